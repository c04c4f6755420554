#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <optional>
#include <sstream>
#include <vector>

#include "cqed/distribution.hpp"
#include "cqed/linear_response.hpp"
#include "cqed/params.hpp"

namespace cqed {

enum class Branch { Lower, MiddleUnstable, Upper };

inline const char* branch_name(Branch b) {
    switch (b) {
    case Branch::Lower: return "lower";
    case Branch::MiddleUnstable: return "middle-unstable";
    case Branch::Upper: return "upper";
    }
    return "?";
}

/// Which stable root a power ramp reaches. Up-sweeps follow the branch
/// continuously connected to alpha = 0; down-sweeps the high-occupancy one.
enum class BranchPolicy { FollowFromBelow, FollowFromAbove };

/// Steady-state spin inversion w = 1 - 2p of a spin detuned by Delta_j from the
/// drive, eliminated from the equations of motion at fixed cavity occupancy.
inline double spin_inversion(double g_s, double alpha_sq, double gamma, double gamma_p,
                             double delta_j) {
    return 1.0 / (1.0 + 2.0 * g_s * g_s * alpha_sq * gamma
                           / (gamma_p * (delta_j * delta_j + 0.25 * gamma * gamma)));
}

namespace detail {

/// Saturable spin susceptibility of one Lorentzian sub-ensemble, closed form.
/// The elimination w(d)/(gamma/2 + i d) = (gamma/2 - i d)/(d^2 + B^2) with
/// B = (gamma/2) sqrt(1 + 8 g_s^2 x / (gamma gamma_p)) splits into two poles of
/// width W = B + Gamma/2:  A/(W + iD) + C/(W - iD),  A - C = 1,  A + C = gamma/(2B).
inline cplx lorentzian_saturable(double x, double D, double Gamma, double gamma, double gamma_p,
                                 double g_s) {
    double B = 0.5 * gamma * std::sqrt(1.0 + 8.0 * g_s * g_s * x / (gamma * gamma_p));
    double W = B + 0.5 * Gamma;
    double apc = 0.5 * gamma / B;      // A + C
    double A = 0.5 * (1.0 + apc);
    double C = 0.5 * (apc - 1.0);
    return A / cplx(W, D) + C / cplx(W, -D);
}

} // namespace detail

/// Spin term of the cavity denominator, g^2-weighted sum over the hyperfine
/// triplet, with drive-induced saturation at occupancy x. D0 = omega_d - omega_s.
inline cplx saturable_susceptibility(const SpinEnsembleParams& spins, double x, double D0) {
    double g2 = spins.g() * spins.g();
    cplx s = 0.0;
    for (double a : spins.hyperfine_offsets())
        s += g2 * detail::lorentzian_saturable(x, D0 - a, spins.Gamma, spins.gamma(),
                                               spins.gamma_p, spins.g_s);
    return s;
}

/// Same quantity from an explicit bin list (the dynamics discretization):
/// sum_k N w_k weight_k g_s^2 / (gamma/2 + i Delta_k).
inline cplx binned_susceptibility(const SpinEnsembleParams& spins, const std::vector<SpinBin>& bins,
                                  double x, double D0) {
    double gs2 = spins.g_s * spins.g_s;
    double gamma = spins.gamma();
    cplx s = 0.0;
    for (double a : spins.hyperfine_offsets()) {
        for (const auto& b : bins) {
            double dj = D0 - a - b.detuning;
            double w = spin_inversion(spins.g_s, x, gamma, spins.gamma_p, dj);
            s += spins.N * b.weight * gs2 * w / cplx(0.5 * gamma, dj);
        }
    }
    return s;
}

/// Effective parameters of the paper's nonlinear model at occupancy x.
struct SteadyStateSolution {
    double alpha_sq = 0.0;  // photons
    double chi = 1.0;       // sqrt(1 + 8 g_s^2 |a|^2 / gamma^2)
    double Gamma_1 = 0.0;   // rad/s, Gamma + gamma chi
    double g_eff = 0.0;     // rad/s, g / sqrt(chi)
    double C_alpha = 0.0;   // 4 g_eff^2 / (kappa Gamma_1)
    Branch branch = Branch::Lower;
    bool stable = true;
    cplx alpha = 0.0;       // cavity field, drive frame
    cplx r = 0.0;           // reflection at the drive point
};

inline SteadyStateSolution make_solution(const CavityParams& cav, const SpinEnsembleParams& spins,
                                         const DriveParams& drive, double x) {
    SteadyStateSolution s;
    s.alpha_sq = x;
    double gamma = spins.gamma();
    s.chi = std::sqrt(1.0 + 8.0 * spins.g_s * spins.g_s * x / (gamma * gamma));
    s.Gamma_1 = spins.Gamma + gamma * s.chi;
    s.g_eff = spins.g() / std::sqrt(s.chi);
    s.C_alpha = 4.0 * s.g_eff * s.g_eff / (cav.kappa() * s.Gamma_1);
    cplx den = cplx(0.5 * cav.kappa(), drive.Delta)
             + saturable_susceptibility(spins, x, drive.Delta - drive.Delta_s);
    if (drive.beta_in > 0.0) {
        s.alpha = std::sqrt(cav.kappa_c1) * drive.beta_in / den;
        s.r = -1.0 + cav.kappa_c1 / den;
    } else {
        s.alpha = 0.0;
        s.r = -1.0 + cav.kappa_c1 / den;
    }
    return s;
}

struct SolverOptions {
    int grid_points = 240;          // log-grid bracketing points
    double grid_decades = 6.0;      // span [1e-6, 1e+6] x linear estimate
    double rel_tol = 1e-12;         // bisection termination
    const std::vector<SpinBin>* bins = nullptr;  // use the binned model instead of closed form
};

namespace detail {

inline cplx cavity_denominator(const CavityParams& cav, const SpinEnsembleParams& spins,
                               const DriveParams& drive, double x, const SolverOptions& opt) {
    cplx spin = opt.bins ? binned_susceptibility(spins, *opt.bins, x, drive.Delta - drive.Delta_s)
                         : saturable_susceptibility(spins, x, drive.Delta - drive.Delta_s);
    return cplx(0.5 * cav.kappa(), drive.Delta) + spin;
}

/// Input flux required to hold occupancy x: |den(x)|^2 x / kappa_c1.
inline double required_flux(const CavityParams& cav, const SpinEnsembleParams& spins,
                            const DriveParams& drive, double x, const SolverOptions& opt) {
    return std::norm(cavity_denominator(cav, spins, drive, x, opt)) * x / cav.kappa_c1;
}

} // namespace detail

/// All non-negative steady-state occupancies at the given drive, bracketed on a
/// log grid and bisected; stability from the slope of |beta_in|^2 vs |alpha|^2.
inline std::vector<SteadyStateSolution> solve_occupancy(const CavityParams& cav,
                                                        const SpinEnsembleParams& spins,
                                                        const DriveParams& drive,
                                                        const SolverOptions& opt = {}) {
    std::vector<SteadyStateSolution> out;
    double flux = drive.flux();
    if (flux == 0.0) {
        out.push_back(make_solution(cav, spins, drive, 0.0));
        return out;
    }
    double x_lin = cav.kappa_c1 * flux
                 / std::norm(detail::cavity_denominator(cav, spins, drive, 0.0, opt));
    auto mismatch = [&](double x) {
        return detail::required_flux(cav, spins, drive, x, opt) - flux;
    };

    int n = std::max(opt.grid_points, 8);
    double lo = std::log10(x_lin) - opt.grid_decades;
    double hi = std::log10(x_lin) + opt.grid_decades;
    std::vector<double> roots;
    double x_prev = std::pow(10.0, lo);
    double f_prev = mismatch(x_prev);
    for (int i = 1; i <= n; ++i) {
        double x_i = std::pow(10.0, lo + (hi - lo) * i / n);
        double f_i = mismatch(x_i);
        if (f_prev == 0.0) roots.push_back(x_prev);
        if (f_prev * f_i < 0.0) {
            double a = x_prev, b = x_i, fa = f_prev;
            while ((b - a) > opt.rel_tol * b) {
                double m = 0.5 * (a + b);
                double fm = mismatch(m);
                if (fa * fm <= 0.0) b = m;
                else { a = m; fa = fm; }
            }
            roots.push_back(0.5 * (a + b));
        }
        x_prev = x_i;
        f_prev = f_i;
    }
    if (roots.empty()) {
        std::ostringstream msg;
        msg << "solve_occupancy: no root bracketed; flux=" << flux
            << " x_lin=" << x_lin << " grid=[1e" << lo << ", 1e" << hi << "]"
            << " mismatch(ends)=(" << mismatch(std::pow(10.0, lo)) << ", "
            << mismatch(std::pow(10.0, hi)) << ")";
        throw NumericalError(msg.str());
    }
    std::sort(roots.begin(), roots.end());
    for (std::size_t i = 0; i < roots.size(); ++i) {
        double x = roots[i];
        SteadyStateSolution s = make_solution(cav, spins, drive, x);
        if (opt.bins) {  // recompute field/reflection with the binned denominator
            cplx den = detail::cavity_denominator(cav, spins, drive, x, opt);
            s.alpha = std::sqrt(cav.kappa_c1) * drive.beta_in / den;
            s.r = -1.0 + cav.kappa_c1 / den;
        }
        double eps = std::max(x * 1e-6, 1e-300);
        double slope = (detail::required_flux(cav, spins, drive, x + eps, opt)
                        - detail::required_flux(cav, spins, drive, std::max(x - eps, 0.0), opt))
                       / (eps + std::min(eps, x));
        s.stable = slope >= 0.0;
        if (roots.size() == 1) {
            s.branch = Branch::Lower;
        } else {
            if (i == 0) s.branch = Branch::Lower;
            else if (i + 1 == roots.size()) s.branch = Branch::Upper;
            else s.branch = Branch::MiddleUnstable;
        }
        out.push_back(s);
    }
    return out;
}

/// Stable root selected by sweep history.
inline SteadyStateSolution select_branch(const std::vector<SteadyStateSolution>& sols,
                                         BranchPolicy policy) {
    const SteadyStateSolution* pick = nullptr;
    for (const auto& s : sols) {
        if (!s.stable) continue;
        if (!pick) { pick = &s; continue; }
        bool better = policy == BranchPolicy::FollowFromBelow ? s.alpha_sq < pick->alpha_sq
                                                              : s.alpha_sq > pick->alpha_sq;
        if (better) pick = &s;
    }
    if (!pick) throw NumericalError("select_branch: no stable root");
    return *pick;
}

inline std::size_t count_stable(const std::vector<SteadyStateSolution>& sols) {
    std::size_t n = 0;
    for (const auto& s : sols) n += s.stable ? 1 : 0;
    return n;
}

/// Paper Eq. 3 verbatim: input flux that sustains occupancy x at resonant tuning,
/// with the chi = sqrt(1 + 8 g_s^2 x / gamma^2) convention. Exact when gamma_p = gamma.
inline double eq3_flux(const CavityParams& cav, const SpinEnsembleParams& spins, double x) {
    double gamma = spins.gamma();
    double chi = std::sqrt(1.0 + 8.0 * spins.g_s * spins.g_s * x / (gamma * gamma));
    double gamma_1 = spins.Gamma + gamma * chi;
    double c_alpha = 4.0 * (spins.g() * spins.g() / chi) / (cav.kappa() * gamma_1);
    double k = cav.kappa();
    return 0.25 * k * (k / cav.kappa_c1) * (1.0 + c_alpha) * (1.0 + c_alpha) * x;
}

struct SaturationThreshold {
    double flux = 0.0;      // photons/s
    double power_w = 0.0;   // W at the cavity frequency
    double power_dbm = 0.0;
};

/// Eq. 4 as printed: |beta_s|^2 = (N g^2 / 2 kappa_c1) [gamma/(sqrt2 (Gamma + sqrt2 gamma))
/// + kappa gamma / (4 g^2)]^2.
inline SaturationThreshold saturation_threshold(const CavityParams& cav,
                                                const SpinEnsembleParams& spins) {
    double g2 = spins.g() * spins.g();
    double gamma = spins.gamma();
    double bracket = gamma / (std::sqrt(2.0) * (spins.Gamma + std::sqrt(2.0) * gamma))
                   + cav.kappa() * gamma / (4.0 * g2);
    SaturationThreshold t;
    t.flux = spins.N * g2 / (2.0 * cav.kappa_c1) * bracket * bracket;
    t.power_w = flux_to_power(t.flux, cav.omega_c);
    t.power_dbm = watts_to_dbm(t.power_w);
    return t;
}

/// Drive power at which the resonant occupancy exceeds its low-power linear
/// extrapolation by `deviation` (default 5%).
inline double numeric_saturation_onset_dbm(const CavityParams& cav,
                                           const SpinEnsembleParams& spins,
                                           double deviation = 0.05) {
    auto x_of = [&](double dbm) {
        DriveParams d = DriveParams::from_power_dbm(dbm, cav);
        return select_branch(solve_occupancy(cav, spins, d), BranchPolicy::FollowFromBelow).alpha_sq;
    };
    double ref_dbm = -90.0;
    double slope = x_of(ref_dbm) / dbm_to_watts(ref_dbm);
    auto dev = [&](double dbm) {
        return x_of(dbm) / (slope * dbm_to_watts(dbm)) - (1.0 + deviation);
    };
    double lo = -80.0, hi = 20.0;
    double flo = dev(lo);
    if (flo > 0.0) throw NumericalError("numeric_saturation_onset: already saturated at -80 dBm");
    if (dev(hi) < 0.0) throw NumericalError("numeric_saturation_onset: no onset below +20 dBm");
    for (int i = 0; i < 200 && (hi - lo) > 1e-9; ++i) {
        double m = 0.5 * (lo + hi);
        if (dev(m) < 0.0) lo = m;
        else hi = m;
    }
    return 0.5 * (lo + hi);
}

/// Paper's closed-form quadrature response, d Im[r] / d omega_s at resonant tuning:
/// (4 C_alpha / Gamma_1)(kappa_c1/kappa)(1 + C_alpha)^-2.  Units: (rad/s)^-1.
inline double quadrature_slope(const CavityParams& cav, const SteadyStateSolution& sol) {
    double c = sol.C_alpha;
    return (4.0 * c / sol.Gamma_1) * (cav.kappa_c1 / cav.kappa()) / ((1.0 + c) * (1.0 + c));
}

/// The chi-adjusted linear response the slope formula differentiates (and the
/// noise model's response function): bare parameters replaced by g_eff, Gamma_1
/// at the solution's operating point.
inline cplx reflection_effective(const CavityParams& cav, const SpinEnsembleParams& spins,
                                 const SteadyStateSolution& sol, double delta, double delta_s) {
    cplx spin = 0.0;
    double ge2 = sol.g_eff * sol.g_eff;
    for (double a : spins.hyperfine_offsets())
        spin += ge2 / cplx(0.5 * sol.Gamma_1, delta - delta_s - a);
    return -1.0 + cav.kappa_c1 / (cplx(0.5 * cav.kappa(), delta) + spin);
}

/// Branch-resolved nonlinear reflection r = -1 + sqrt(kappa_c1) alpha / beta_in.
/// With more than one stable root a policy must be given.
inline ReflectionPoint reflection_nonlinear(const CavityParams& cav,
                                            const SpinEnsembleParams& spins,
                                            const DriveParams& drive,
                                            std::optional<BranchPolicy> policy = std::nullopt) {
    auto sols = solve_occupancy(cav, spins, drive);
    if (count_stable(sols) > 1 && !policy)
        throw ValidationError("reflection_nonlinear: bistable drive requires a branch policy");
    auto s = select_branch(sols, policy.value_or(BranchPolicy::FollowFromBelow));
    return {s.r, drive.Delta, drive.Delta_s};
}

/// Rate at which the spin ensemble absorbs photons in steady state,
/// sum_j gamma_p p_j = 2 x Re[spin susceptibility]. Closed-form route.
inline double spin_absorption_rate(const SpinEnsembleParams& spins, double x, double D0) {
    return 2.0 * x * saturable_susceptibility(spins, x, D0).real();
}

// ---------------------------------------------------------------------------
// Bistability
// ---------------------------------------------------------------------------

struct BistabilityReport {
    double predicate = 0.0;              // (4 g^2 / kappa gamma)(gamma/(Gamma+gamma))^2
    bool predicate_bistable = false;     // predicate > 1
    std::vector<double> multi_root_powers_dbm;
    bool any_multiroot = false;
    double window_lo_dbm = 0.0;
    double window_hi_dbm = 0.0;
};

inline BistabilityReport detect_bistability(const CavityParams& cav,
                                            const SpinEnsembleParams& spins,
                                            const std::vector<double>& powers_dbm) {
    for (std::size_t i = 1; i < powers_dbm.size(); ++i)
        if (!(powers_dbm[i] > powers_dbm[i - 1]))
            throw ValidationError("detect_bistability: power grid must be increasing");
    BistabilityReport rep;
    double g2 = spins.g() * spins.g();
    double gamma = spins.gamma();
    double f = gamma / (spins.Gamma + gamma);
    rep.predicate = (4.0 * g2 / (cav.kappa() * gamma)) * f * f;
    rep.predicate_bistable = rep.predicate > 1.0;
    for (double p : powers_dbm) {
        auto sols = solve_occupancy(cav, spins, DriveParams::from_power_dbm(p, cav));
        if (count_stable(sols) > 1) rep.multi_root_powers_dbm.push_back(p);
    }
    rep.any_multiroot = !rep.multi_root_powers_dbm.empty();
    if (rep.any_multiroot) {
        rep.window_lo_dbm = rep.multi_root_powers_dbm.front();
        rep.window_hi_dbm = rep.multi_root_powers_dbm.back();
    }
    return rep;
}

} // namespace cqed
