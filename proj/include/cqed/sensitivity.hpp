#pragma once

#include <cmath>
#include <functional>
#include <limits>
#include <optional>
#include <utility>
#include <vector>

#include "cqed/noise.hpp"
#include "cqed/params.hpp"
#include "cqed/steady_state.hpp"

namespace cqed {

/// Magnetic field to NV frequency shift along the diamond [100] axis: all four
/// orientations project with 1/sqrt(3).
struct FieldConversion {
    double a_hz_per_t = constants.gamma_e / std::sqrt(3.0);  // Hz/T
};

inline double field_to_frequency(double b_tesla, const FieldConversion& conv = {}) {
    return conv.a_hz_per_t * b_tesla;
}

/// Signal S = |f(beta_in) dIm[r]/d omega_s| in volts per Hz of spin-frequency
/// shift; f(beta_in) = sqrt(hbar omega R) beta_in is the probe voltage. The
/// 2pi converting the rad/s slope to an ordinary-frequency slope is applied
/// here and nowhere else.
inline double signal(const CavityParams& cav, const SpinEnsembleParams& spins,
                     const DriveParams& drive, double r_ohm,
                     std::optional<BranchPolicy> policy = std::nullopt) {
    if (drive.beta_in == 0.0) return 0.0;
    auto sols = solve_occupancy(cav, spins, drive);
    if (count_stable(sols) > 1 && !policy)
        throw ValidationError("signal: bistable drive requires a branch policy");
    auto sol = select_branch(sols, policy.value_or(BranchPolicy::FollowFromBelow));
    double probe_v = std::sqrt(constants.hbar * drive.omega_d(cav) * r_ohm) * drive.beta_in;
    return std::abs(probe_v * quadrature_slope(cav, sol) * two_pi);
}

/// eta = sqrt(L) / (S A); S in V/Hz, L in V^2/Hz, A in Hz/T -> T/sqrt(Hz).
inline double sensitivity_at(double s_v_per_hz, double l_v2_per_hz,
                             const FieldConversion& conv = {}) {
    if (!(s_v_per_hz > 0.0)) throw ValidationError("sensitivity_at: S must be positive");
    return std::sqrt(l_v2_per_hz) / (s_v_per_hz * conv.a_hz_per_t);
}

struct OperatingPoint {
    double power_w = 0.0;
    double power_dbm = 0.0;
    double gamma_p = 0.0;        // rad/s
    double s_v_per_hz = 0.0;
    double l_v2_per_hz = 0.0;    // device plane, at the probe offset
    double eta_t_sqrthz = 0.0;
    double cooling_db = 0.0;
    bool on_boundary = false;
    bool bistable = false;
};

/// S, L, eta of one (power, gamma_p) candidate at the standard 15 kHz offset.
inline OperatingPoint evaluate_operating_point(const CavityParams& cav, SpinEnsembleParams spins,
                                               const NoiseEnvironment& env, double power_dbm,
                                               double gamma_p, double f_offset = 15e3,
                                               BranchPolicy policy = BranchPolicy::FollowFromBelow) {
    spins.gamma_p = gamma_p;
    DriveParams d = DriveParams::from_power_dbm(power_dbm, cav);
    auto sols = solve_occupancy(cav, spins, d);
    auto sol = select_branch(sols, policy);
    OperatingPoint op;
    op.power_dbm = power_dbm;
    op.power_w = dbm_to_watts(power_dbm);
    op.gamma_p = gamma_p;
    op.bistable = count_stable(sols) > 1;
    double probe_v = std::sqrt(constants.hbar * d.omega_d(cav) * env.R) * d.beta_in;
    op.s_v_per_hz = std::abs(probe_v * quadrature_slope(cav, sol) * two_pi);
    op.l_v2_per_hz = noise_budget(cav, spins, env, d, sol, f_offset).total;
    op.eta_t_sqrthz = op.s_v_per_hz > 0.0 ? sensitivity_at(op.s_v_per_hz, op.l_v2_per_hz)
                                          : std::numeric_limits<double>::infinity();
    return op;
}

struct OptimizeOptions {
    int grid_power = 56;
    int grid_gamma_p = 56;
    int refine_iters = 40;
    double f_offset = 15e3;
    BranchPolicy policy = BranchPolicy::FollowFromBelow;
};

namespace detail {

// golden-section minimum of f over [a,b]
inline double golden_min(const std::function<double(double)>& f, double a, double b, int iters) {
    const double phi = (std::sqrt(5.0) - 1.0) / 2.0;
    double x1 = b - phi * (b - a), x2 = a + phi * (b - a);
    double f1 = f(x1), f2 = f(x2);
    for (int i = 0; i < iters; ++i) {
        if (f1 < f2) {
            b = x2; x2 = x1; f2 = f1;
            x1 = b - phi * (b - a); f1 = f(x1);
        } else {
            a = x1; x1 = x2; f1 = f2;
            x2 = a + phi * (b - a); f2 = f(x2);
        }
    }
    return f1 < f2 ? x1 : x2;
}

} // namespace detail

/// Deterministic grid search (log-spaced in both axes) plus golden-section
/// refinement of eta over microwave power and optical polarization rate.
inline OperatingPoint optimize_operating_point(const CavityParams& cav,
                                               const SpinEnsembleParams& spins,
                                               const NoiseEnvironment& env,
                                               std::pair<double, double> power_bounds_dbm,
                                               std::pair<double, double> gamma_p_bounds,
                                               const OptimizeOptions& opt = {}) {
    if (!(gamma_p_bounds.first > 0.0) || !(gamma_p_bounds.second >= gamma_p_bounds.first))
        throw ValidationError("optimize_operating_point: bad gamma_p bounds");
    if (!(power_bounds_dbm.second >= power_bounds_dbm.first))
        throw ValidationError("optimize_operating_point: bad power bounds");

    auto eta_of = [&](double p_dbm, double gp) {
        return evaluate_operating_point(cav, spins, env, p_dbm, gp, opt.f_offset, opt.policy)
            .eta_t_sqrthz;
    };

    bool gp_fixed = gamma_p_bounds.first == gamma_p_bounds.second;
    int np = std::max(opt.grid_power, 2), ng = gp_fixed ? 1 : std::max(opt.grid_gamma_p, 2);
    double lg0 = std::log(gamma_p_bounds.first), lg1 = std::log(gamma_p_bounds.second);
    double best = std::numeric_limits<double>::infinity();
    int bi = 0, bj = 0;
    double bp = power_bounds_dbm.first, bg = gamma_p_bounds.first;
    for (int j = 0; j < ng; ++j) {
        double gp = gp_fixed ? gamma_p_bounds.first
                             : std::exp(lg0 + (lg1 - lg0) * j / (ng - 1));
        for (int i = 0; i < np; ++i) {
            double pd = power_bounds_dbm.first
                        + (power_bounds_dbm.second - power_bounds_dbm.first) * i / (np - 1);
            double e = eta_of(pd, gp);
            if (e < best) { best = e; bi = i; bj = j; bp = pd; bg = gp; }
        }
    }
    // refine each axis inside the neighboring grid cells
    double dp = (power_bounds_dbm.second - power_bounds_dbm.first) / (np - 1);
    double pa = std::max(power_bounds_dbm.first, bp - dp);
    double pb = std::min(power_bounds_dbm.second, bp + dp);
    bp = detail::golden_min([&](double p) { return eta_of(p, bg); }, pa, pb, opt.refine_iters);
    if (!gp_fixed) {
        double dg = (lg1 - lg0) / (ng - 1);
        double ga = std::exp(std::max(lg0, std::log(bg) - dg));
        double gb = std::exp(std::min(lg1, std::log(bg) + dg));
        bg = detail::golden_min([&](double lg) { return eta_of(bp, lg); }, ga, gb, opt.refine_iters);
    }
    OperatingPoint op = evaluate_operating_point(cav, spins, env, bp, bg, opt.f_offset, opt.policy);
    {
        SpinEnsembleParams sp = spins;
        sp.gamma_p = bg;
        op.cooling_db = cooling_depth(cav, sp, bp, env, opt.f_offset);
    }
    op.on_boundary = bi == 0 || bi == np - 1 || (!gp_fixed && (bj == 0 || bj == ng - 1));
    return op;
}

// ---------------------------------------------------------------------------
// Broadband spectrum
// ---------------------------------------------------------------------------

/// Empirical low-frequency ambient field spectrum, (Hz, T/sqrt(Hz)) pairs,
/// log-log interpolated; zero outside the table unless extended.
struct AmbientFieldSpectrum {
    std::vector<std::pair<double, double>> points;

    double at(double f_hz) const {
        if (points.empty()) return 0.0;
        if (f_hz <= 0.0) return points.front().second;
        double lf = std::log10(f_hz);
        if (lf <= std::log10(points.front().first)) return points.front().second;
        if (lf >= std::log10(points.back().first)) return points.back().second;
        for (std::size_t i = 1; i < points.size(); ++i) {
            double l1 = std::log10(points[i].first);
            if (lf <= l1) {
                double l0 = std::log10(points[i - 1].first);
                double t = (lf - l0) / (l1 - l0);
                double y0 = std::log10(points[i - 1].second), y1 = std::log10(points[i].second);
                return std::pow(10.0, y0 + t * (y1 - y0));
            }
        }
        return points.back().second;
    }
};

/// eta(f) at a fixed operating point: voltage noise terms evaluated per offset,
/// ambient field noise added in quadrature as a field-equivalent spectrum.
inline std::vector<double> broadband_spectrum(const CavityParams& cav, SpinEnsembleParams spins,
                                              const NoiseEnvironment& env, const OperatingPoint& op,
                                              const std::vector<double>& f_grid,
                                              const AmbientFieldSpectrum& ambient = {},
                                              const FieldConversion& conv = {}) {
    spins.gamma_p = op.gamma_p;
    DriveParams d = DriveParams::from_power_dbm(op.power_dbm, cav);
    auto sol = select_branch(solve_occupancy(cav, spins, d), BranchPolicy::FollowFromBelow);
    double probe_v = std::sqrt(constants.hbar * d.omega_d(cav) * env.R) * d.beta_in;
    double s = std::abs(probe_v * quadrature_slope(cav, sol) * two_pi);
    std::vector<double> eta;
    eta.reserve(f_grid.size());
    for (double f : f_grid) {
        double l = noise_budget(cav, spins, env, d, sol, f).total;
        double e = sensitivity_at(s, l, conv);
        double amb = ambient.at(f);
        eta.push_back(std::sqrt(e * e + amb * amb));
    }
    return eta;
}

/// Continuous-wave inverse readout fidelity relative to the spin-projection
/// limit eta_sp = 1/(gamma_e sqrt(N_total T2*)), T2* = 2/Gamma. Reporting only.
inline double inverse_readout_fidelity(const SpinEnsembleParams& spins, double eta_t_sqrthz) {
    double n_total = spins.N * spins.n_hyperfine;
    double t2_star = 2.0 / spins.Gamma;
    double eta_sp = 1.0 / (constants.gamma_e * std::sqrt(n_total * t2_star));
    return eta_t_sqrthz / eta_sp;
}

} // namespace cqed
