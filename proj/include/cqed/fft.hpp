#pragma once

#include <complex>
#include <vector>

#include "cqed/constants.hpp"
#include "cqed/errors.hpp"

namespace cqed {

namespace detail {

inline bool is_pow2(std::size_t n) { return n != 0 && (n & (n - 1)) == 0; }

inline void fft_pow2(std::vector<std::complex<double>>& a, bool inverse) {
    std::size_t n = a.size();
    for (std::size_t i = 1, j = 0; i < n; ++i) {
        std::size_t bit = n >> 1;
        for (; j & bit; bit >>= 1) j ^= bit;
        j ^= bit;
        if (i < j) std::swap(a[i], a[j]);
    }
    for (std::size_t len = 2; len <= n; len <<= 1) {
        double ang = (inverse ? 2.0 : -2.0) * std::numbers::pi / double(len);
        std::complex<double> wl(std::cos(ang), std::sin(ang));
        for (std::size_t i = 0; i < n; i += len) {
            std::complex<double> w(1.0);
            for (std::size_t k = 0; k < len / 2; ++k) {
                std::complex<double> u = a[i + k];
                std::complex<double> v = a[i + k + len / 2] * w;
                a[i + k] = u + v;
                a[i + k + len / 2] = u - v;
                w *= wl;
            }
        }
    }
    if (inverse)
        for (auto& x : a) x /= double(n);
}

} // namespace detail

/// In-place complex FFT; power-of-two sizes run radix-2, anything else goes
/// through Bluestein's chirp transform.
inline void fft(std::vector<std::complex<double>>& a, bool inverse = false) {
    std::size_t n = a.size();
    if (n == 0) return;
    if (detail::is_pow2(n)) {
        detail::fft_pow2(a, inverse);
        return;
    }
    // Bluestein
    std::size_t m = 1;
    while (m < 2 * n - 1) m <<= 1;
    std::vector<std::complex<double>> w(n);
    for (std::size_t k = 0; k < n; ++k) {
        // k^2 mod 2n avoids precision loss for large k
        std::size_t k2 = (static_cast<unsigned long long>(k) * k) % (2 * n);
        double ang = (inverse ? 1.0 : -1.0) * std::numbers::pi * double(k2) / double(n);
        w[k] = {std::cos(ang), std::sin(ang)};
    }
    std::vector<std::complex<double>> fa(m, 0.0), fb(m, 0.0);
    for (std::size_t k = 0; k < n; ++k) fa[k] = a[k] * w[k];
    fb[0] = std::conj(w[0]);
    for (std::size_t k = 1; k < n; ++k) fb[k] = fb[m - k] = std::conj(w[k]);
    detail::fft_pow2(fa, false);
    detail::fft_pow2(fb, false);
    for (std::size_t k = 0; k < m; ++k) fa[k] *= fb[k];
    detail::fft_pow2(fa, true);
    for (std::size_t k = 0; k < n; ++k) a[k] = fa[k] * w[k];
    if (inverse)
        for (auto& x : a) x /= double(n);
}

} // namespace cqed
