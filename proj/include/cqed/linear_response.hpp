#pragma once

#include <cmath>
#include <complex>
#include <vector>

#include "cqed/distribution.hpp"
#include "cqed/params.hpp"
#include "cqed/polyroots.hpp"

namespace cqed {

struct ReflectionPoint {
    cplx r;
    double Delta = 0.0;    // rad/s
    double Delta_s = 0.0;  // rad/s
    double abs_r2() const { return std::norm(r); }
};

/// Weak-drive reflection coefficient, all hyperfine sub-ensembles at full collective g.
/// r = -1 + kappa_c1 / (kappa/2 + i Delta + g^2 sum_k chi_k).
inline ReflectionPoint reflection_linear(const CavityParams& cav, const SpinEnsembleParams& spins,
                                         double delta, double delta_s) {
    double omega_d = cav.omega_c + delta;
    double center0 = cav.omega_c + delta_s;
    double g2 = spins.g() * spins.g();
    cplx spin_term = 0.0;
    for (double a : spins.hyperfine_offsets()) {
        auto dist = InhomogeneousDistribution::lorentzian(center0 + a, spins.Gamma);
        spin_term += g2 * susceptibility(dist, omega_d, spins.gamma());
    }
    cplx r = -1.0 + cav.kappa_c1 / (cplx(0.5 * cav.kappa(), delta) + spin_term);
    return {r, delta, delta_s};
}

inline ReflectionPoint reflection_linear(const CavityParams& cav, const SpinEnsembleParams& spins,
                                         const DriveParams& drive) {
    return reflection_linear(cav, spins, drive.Delta, drive.Delta_s);
}

/// |r|^2 over a (Delta, Delta_s) grid, row-major with Delta varying fastest.
inline std::vector<double> reflection_map(const CavityParams& cav, const SpinEnsembleParams& spins,
                                          const std::vector<double>& delta_grid,
                                          const std::vector<double>& delta_s_grid) {
    if (delta_grid.empty() || delta_s_grid.empty())
        throw ValidationError("reflection_map: empty grid");
    for (std::size_t i = 1; i < delta_grid.size(); ++i)
        if (!(delta_grid[i] > delta_grid[i - 1]))
            throw ValidationError("reflection_map: delta grid must be increasing");
    for (std::size_t i = 1; i < delta_s_grid.size(); ++i)
        if (!(delta_s_grid[i] > delta_s_grid[i - 1]))
            throw ValidationError("reflection_map: delta_s grid must be increasing");
    std::vector<double> out;
    out.reserve(delta_grid.size() * delta_s_grid.size());
    for (double ds : delta_s_grid)
        for (double d : delta_grid)
            out.push_back(reflection_linear(cav, spins, d, ds).abs_r2());
    return out;
}

/// Complex polariton frequencies: roots in Delta of the Eq.-2 denominator with
/// Lorentzian sub-ensembles, obtained by clearing denominators into a polynomial.
/// One sub-ensemble gives the familiar quadratic.
inline std::vector<cplx> polariton_frequencies(const CavityParams& cav,
                                               const SpinEnsembleParams& spins,
                                               double delta_s = 0.0) {
    using cd = cplx;
    double g2 = spins.g() * spins.g();
    double w_half = 0.5 * (spins.gamma() + spins.Gamma);
    auto offsets = spins.hyperfine_offsets();
    std::size_t n = offsets.size();

    // denominator D(x) = kappa/2 + i x + sum_k g^2 / (w_half + i (x - delta_s - a_k))
    // multiply by prod_k (w_half + i(x - delta_s - a_k)): polynomial of degree n+1 in x.
    // Build factors as linear polynomials in x: (w_half - i(delta_s + a_k)) + i x.
    auto poly_mul = [](const std::vector<cd>& p, const std::vector<cd>& q) {
        std::vector<cd> r(p.size() + q.size() - 1, cd(0.0));
        for (std::size_t i = 0; i < p.size(); ++i)
            for (std::size_t j = 0; j < q.size(); ++j)
                r[i + j] += p[i] * q[j];
        return r;
    };
    std::vector<std::vector<cd>> factors;
    for (double a : offsets)
        factors.push_back({cd(w_half, -(delta_s + a)), cd(0.0, 1.0)});

    std::vector<cd> all{cd(1.0)};
    for (auto& f : factors) all = poly_mul(all, f);

    std::vector<cd> poly = poly_mul({cd(0.5 * cav.kappa()), cd(0.0, 1.0)}, all);
    for (std::size_t k = 0; k < n; ++k) {
        std::vector<cd> rest{cd(g2)};
        for (std::size_t j = 0; j < n; ++j)
            if (j != k) rest = poly_mul(rest, factors[j]);
        for (std::size_t i = 0; i < rest.size(); ++i) poly[i] += rest[i];
    }
    return polynomial_roots(poly);
}

/// g > max(kappa/2, Gamma/2): each sub-ensemble resolves its vacuum Rabi splitting.
inline bool strong_coupling(const CavityParams& cav, const SpinEnsembleParams& spins) {
    return spins.g() > std::max(0.5 * cav.kappa(), 0.5 * spins.Gamma);
}

} // namespace cqed
