#pragma once

// Shared oracles for the test suites: spectral-feature detectors and fits that
// stay independent of the library code paths they check.

#include <algorithm>
#include <cmath>
#include <vector>

#include "cqed/linear_response.hpp"

namespace cqed::testing {

/// Positions of local minima of y(x), refined by parabolic interpolation.
inline std::vector<double> local_minima(const std::vector<double>& x,
                                        const std::vector<double>& y) {
    std::vector<double> mins;
    for (std::size_t i = 1; i + 1 < x.size(); ++i) {
        if (y[i] < y[i - 1] && y[i] < y[i + 1]) {
            double denom = y[i - 1] - 2.0 * y[i] + y[i + 1];
            double shift = denom > 0.0 ? 0.5 * (y[i - 1] - y[i + 1]) / denom : 0.0;
            mins.push_back(x[i] + shift * (x[i + 1] - x[i]));
        }
    }
    return mins;
}

/// Splitting between the two deepest reflection dips of |r|^2 vs Delta.
inline double dip_splitting(const CavityParams& cav, const SpinEnsembleParams& spins,
                            double delta_s, double span, int n) {
    std::vector<double> xs(n), ys(n);
    for (int i = 0; i < n; ++i) {
        xs[i] = -span + 2.0 * span * i / (n - 1);
        ys[i] = reflection_linear(cav, spins, xs[i], delta_s).abs_r2();
    }
    // indices of the two deepest local minima
    std::vector<std::size_t> idx;
    for (std::size_t i = 1; i + 1 < xs.size(); ++i)
        if (ys[i] < ys[i - 1] && ys[i] < ys[i + 1]) idx.push_back(i);
    if (idx.size() < 2) return 0.0;
    std::sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) { return ys[a] < ys[b]; });
    auto refine = [&](std::size_t i) {
        double denom = ys[i - 1] - 2.0 * ys[i] + ys[i + 1];
        double shift = denom > 0.0 ? 0.5 * (ys[i - 1] - ys[i + 1]) / denom : 0.0;
        return xs[i] + shift * (xs[i + 1] - xs[i]);
    };
    return std::abs(refine(idx[0]) - refine(idx[1]));
}

/// Avoided-crossing centers: Delta_s values where the dip splitting is locally
/// minimal (the gap closes to its avoided minimum at each crossing).
inline std::vector<double> crossing_centers(const CavityParams& cav,
                                            const SpinEnsembleParams& spins, double delta_s_span,
                                            int n_delta_s, double delta_span, int n_delta) {
    std::vector<double> ds(n_delta_s), gap(n_delta_s);
    for (int j = 0; j < n_delta_s; ++j) {
        ds[j] = -delta_s_span + 2.0 * delta_s_span * j / (n_delta_s - 1);
        gap[j] = dip_splitting(cav, spins, ds[j], delta_span, n_delta);
    }
    return local_minima(ds, gap);
}

/// Raw gap minima sit where a line meets the *dressed* cavity: the spectator
/// lines pull it dispersively by ~g^2/A_zz (about 26 kHz here). Removing that
/// first-order pull with the fitted parameters recovers the bare line
/// positions, which is how a hyperfine splitting is extracted from such a map.
inline std::vector<double> pull_corrected_centers(const CavityParams& cav,
                                                  const SpinEnsembleParams& spins,
                                                  const std::vector<double>& raw) {
    double g2 = spins.g() * spins.g();
    double w = 0.5 * (spins.gamma() + spins.Gamma);
    std::vector<double> out;
    for (double c : raw) {
        double pull = 0.0;
        for (double d : raw) {
            if (d == c) continue;
            double sep = d - c;
            pull += g2 * sep / (w * w + sep * sep);
        }
        out.push_back(c - pull);
    }
    return out;
}

/// Least-squares slope of log10(y) vs log10(x).
inline double loglog_slope(const std::vector<double>& x, const std::vector<double>& y) {
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    std::size_t n = x.size();
    for (std::size_t i = 0; i < n; ++i) {
        double lx = std::log10(x[i]), ly = std::log10(y[i]);
        sx += lx; sy += ly; sxx += lx * lx; sxy += lx * ly;
    }
    return (double(n) * sxy - sx * sy) / (double(n) * sxx - sx * sx);
}

/// Prony poles of a uniformly sampled two-mode complex signal:
/// fit z_{n+2} = c1 z_{n+1} + c0 z_n by least squares, return the quadratic roots.
inline std::pair<cplx, cplx> prony2(const std::vector<cplx>& z) {
    // normal equations for (c1, c0)
    cplx a11 = 0, a12 = 0, a22 = 0, b1 = 0, b2 = 0;
    for (std::size_t n = 0; n + 2 < z.size(); ++n) {
        a11 += std::conj(z[n + 1]) * z[n + 1];
        a12 += std::conj(z[n + 1]) * z[n];
        a22 += std::conj(z[n]) * z[n];
        b1 += std::conj(z[n + 1]) * z[n + 2];
        b2 += std::conj(z[n]) * z[n + 2];
    }
    cplx det = a11 * a22 - a12 * std::conj(a12);
    cplx c1 = (b1 * a22 - a12 * b2) / det;
    cplx c0 = (a11 * b2 - std::conj(a12) * b1) / det;
    // roots of w^2 - c1 w - c0
    cplx disc = std::sqrt(c1 * c1 + 4.0 * c0);
    return {0.5 * (c1 + disc), 0.5 * (c1 - disc)};
}

} // namespace cqed::testing
