#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <functional>
#include <string>
#include <vector>

#include "cqed/constants.hpp"
#include "cqed/errors.hpp"

namespace cqed {

using cplx = std::complex<double>;

enum class DistributionKind { Lorentzian, Gaussian, Sampled };

/// Normalized spin-frequency density P(omega), int P domega = 1.
/// Sampled densities carry explicit (omega, density) pairs on an increasing grid.
struct InhomogeneousDistribution {
    DistributionKind kind = DistributionKind::Lorentzian;
    double center = 0.0;   // rad/s
    double fwhm = 0.0;     // rad/s
    std::vector<double> sample_omega;   // Sampled kind only
    std::vector<double> sample_density;

    static InhomogeneousDistribution lorentzian(double center, double fwhm) {
        if (!(fwhm > 0.0)) throw ValidationError("distribution: fwhm must be positive");
        return {DistributionKind::Lorentzian, center, fwhm, {}, {}};
    }
    static InhomogeneousDistribution gaussian(double center, double fwhm) {
        if (!(fwhm > 0.0)) throw ValidationError("distribution: fwhm must be positive");
        return {DistributionKind::Gaussian, center, fwhm, {}, {}};
    }
    static InhomogeneousDistribution sampled(std::vector<double> omega, std::vector<double> density);

    double density(double omega) const {
        double x = omega - center;
        switch (kind) {
        case DistributionKind::Lorentzian: {
            double hw = fwhm / 2.0;
            return hw / (std::numbers::pi * (x * x + hw * hw));
        }
        case DistributionKind::Gaussian: {
            double sigma = fwhm / (2.0 * std::sqrt(2.0 * std::log(2.0)));
            return std::exp(-0.5 * x * x / (sigma * sigma)) / (sigma * std::sqrt(2.0 * std::numbers::pi));
        }
        case DistributionKind::Sampled:
            return sampled_density(omega);
        }
        return 0.0;
    }

private:
    double sampled_density(double omega) const {
        if (omega <= sample_omega.front() || omega >= sample_omega.back()) return 0.0;
        auto it = std::lower_bound(sample_omega.begin(), sample_omega.end(), omega);
        std::size_t i = static_cast<std::size_t>(it - sample_omega.begin());
        if (i == 0) return sample_density.front();
        double t = (omega - sample_omega[i - 1]) / (sample_omega[i] - sample_omega[i - 1]);
        return (1.0 - t) * sample_density[i - 1] + t * sample_density[i];
    }
};

inline double trapezoid_norm(const std::vector<double>& x, const std::vector<double>& y) {
    double s = 0.0;
    for (std::size_t i = 1; i < x.size(); ++i)
        s += 0.5 * (y[i] + y[i - 1]) * (x[i] - x[i - 1]);
    return s;
}

inline InhomogeneousDistribution InhomogeneousDistribution::sampled(std::vector<double> omega,
                                                                    std::vector<double> density) {
    if (omega.size() < 2 || omega.size() != density.size())
        throw ValidationError("sampled distribution: need matching omega/density arrays, n >= 2");
    for (std::size_t i = 1; i < omega.size(); ++i)
        if (!(omega[i] > omega[i - 1]))
            throw ValidationError("sampled distribution: omega grid must be strictly increasing");
    double norm = trapezoid_norm(omega, density);
    if (std::abs(norm - 1.0) > 1e-9)
        throw ValidationError("sampled distribution: density not normalized (trapezoid integral "
                              + std::to_string(norm) + ")");
    InhomogeneousDistribution d;
    d.kind = DistributionKind::Sampled;
    d.sample_omega = std::move(omega);
    d.sample_density = std::move(density);
    // first and second moments for reporting
    double m1 = 0.0;
    for (std::size_t i = 1; i < d.sample_omega.size(); ++i) {
        double dx = d.sample_omega[i] - d.sample_omega[i - 1];
        m1 += 0.5 * (d.sample_omega[i] * d.sample_density[i]
                     + d.sample_omega[i - 1] * d.sample_density[i - 1]) * dx;
    }
    d.center = m1;
    d.fwhm = 0.0;
    return d;
}

namespace detail {

// adaptive Simpson for complex integrands
inline cplx simpson_step(const std::function<cplx(double)>& f, double a, double b,
                         cplx fa, cplx fm, cplx fb, cplx whole, double tol, int depth) {
    double m = 0.5 * (a + b);
    double lm = 0.5 * (a + m), rm = 0.5 * (m + b);
    cplx flm = f(lm), frm = f(rm);
    cplx left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
    cplx right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
    cplx delta = left + right - whole;
    if (depth <= 0 || std::abs(delta) <= 15.0 * tol)
        return left + right + delta / 15.0;
    return simpson_step(f, a, m, fa, flm, fm, left, tol / 2.0, depth - 1)
         + simpson_step(f, m, b, fm, frm, fb, right, tol / 2.0, depth - 1);
}

inline cplx adaptive_simpson(const std::function<cplx(double)>& f, double a, double b,
                             double rel_tol) {
    cplx fa = f(a), fb = f(b), fm = f(0.5 * (a + b));
    cplx whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
    double tol = rel_tol * std::max(std::abs(whole), 1e-300);
    return simpson_step(f, a, b, fa, fm, fb, whole, tol, 48);
}

} // namespace detail

struct QuadratureOptions {
    double window_fwhm = 20.0;  // integrate over center +- window_fwhm * fwhm
    double rel_tol = 1e-6;
};

/// Eq.-2 integral factor  int P(w') / (gamma/2 + i (omega_d - w')) dw'  (no g^2).
/// Lorentzian densities use the closed form 1/((gamma+Gamma)/2 + i(omega_d - center));
/// Gaussian densities are integrated numerically; sampled densities by trapezoid on
/// their own grid. Real part is non-negative for any normalized density.
inline cplx susceptibility(const InhomogeneousDistribution& dist, double omega_d, double gamma,
                           const QuadratureOptions& opt = {}, bool force_numeric = false) {
    if (!(gamma > 0.0)) throw ValidationError("susceptibility: gamma must be positive");
    switch (dist.kind) {
    case DistributionKind::Lorentzian:
        if (!force_numeric)
            return 1.0 / (cplx(0.5 * (gamma + dist.fwhm), omega_d - dist.center));
        [[fallthrough]];
    case DistributionKind::Gaussian: {
        double a = dist.center - opt.window_fwhm * dist.fwhm;
        double b = dist.center + opt.window_fwhm * dist.fwhm;
        auto f = [&](double w) { return dist.density(w) / cplx(0.5 * gamma, omega_d - w); };
        return detail::adaptive_simpson(f, a, b, opt.rel_tol);
    }
    case DistributionKind::Sampled: {
        cplx s = 0.0;
        for (std::size_t i = 1; i < dist.sample_omega.size(); ++i) {
            double w0 = dist.sample_omega[i - 1], w1 = dist.sample_omega[i];
            cplx f0 = dist.sample_density[i - 1] / cplx(0.5 * gamma, omega_d - w0);
            cplx f1 = dist.sample_density[i] / cplx(0.5 * gamma, omega_d - w1);
            s += 0.5 * (f0 + f1) * (w1 - w0);
        }
        return s;
    }
    }
    return 0.0;
}

// ---------------------------------------------------------------------------
// Discretization for the dynamics module
// ---------------------------------------------------------------------------

struct SpinBin {
    double detuning = 0.0;  // rad/s offset from the ensemble center
    double weight = 0.0;    // probability mass, bins sum to 1
};

/// Equal-probability-mass bins of a Lorentzian truncated at +- window_fwhm * FWHM
/// and renormalized; centers placed at the CDF midpoints (inverse-CDF rule).
/// M must be odd so the center bin sits exactly on the line center.
inline std::vector<SpinBin> bin_distribution(double fwhm, int m, double window_fwhm = 20.0) {
    if (m < 1 || m % 2 == 0)
        throw ValidationError("bin_distribution: M must be odd and >= 1");
    if (m == 1 || fwhm <= 0.0)
        return {SpinBin{0.0, 1.0}};
    std::vector<SpinBin> bins(static_cast<std::size_t>(m));
    double u_max = std::atan(2.0 * window_fwhm);  // CDF edge of the truncated Lorentzian
    double w = 1.0 / m;
    for (int k = 0; k < m; ++k) {
        double q = (k + 0.5) / m;                // mass midpoint of bin k
        double u = (2.0 * q - 1.0) * u_max;
        bins[static_cast<std::size_t>(k)] = {0.5 * fwhm * std::tan(u), w};
    }
    bins[static_cast<std::size_t>(m / 2)].detuning = 0.0;  // exact center bin
    return bins;
}

} // namespace cqed
