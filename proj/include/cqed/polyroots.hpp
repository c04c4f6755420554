#pragma once

#include <complex>
#include <vector>

#include "cqed/errors.hpp"

namespace cqed {

/// All complex roots of  c[0] + c[1] z + ... + c[n] z^n  by Durand-Kerner iteration.
/// Fine for the low-degree polynomials that appear here (polariton denominators).
inline std::vector<std::complex<double>> polynomial_roots(std::vector<std::complex<double>> c) {
    using cd = std::complex<double>;
    while (!c.empty() && std::abs(c.back()) == 0.0) c.pop_back();
    if (c.size() < 2) throw ValidationError("polynomial_roots: degree must be >= 1");
    std::size_t n = c.size() - 1;
    for (auto& ck : c) ck /= c[n];  // monic; note c[n] changes last
    // scale estimate from the largest coefficient magnitude
    double scale = 1.0;
    for (std::size_t k = 0; k < n; ++k)
        scale = std::max(scale, std::pow(std::abs(c[k]), 1.0 / double(n - k)));

    auto eval = [&](cd z) {
        cd p = c[n];
        for (std::size_t k = n; k-- > 0;) p = p * z + c[k];
        return p;
    };

    std::vector<cd> z(n);
    cd seed(0.4, 0.9);
    cd zk = cd(1.0, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
        zk *= seed;
        z[i] = scale * zk;
    }
    for (int it = 0; it < 500; ++it) {
        double move = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            cd denom(1.0, 0.0);
            for (std::size_t j = 0; j < n; ++j)
                if (j != i) denom *= (z[i] - z[j]);
            cd step = eval(z[i]) / denom;
            z[i] -= step;
            move = std::max(move, std::abs(step));
        }
        if (move < 1e-14 * scale) return z;
    }
    throw NumericalError("polynomial_roots: Durand-Kerner failed to converge");
}

} // namespace cqed
