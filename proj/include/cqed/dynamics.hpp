#pragma once

#include <cmath>
#include <complex>
#include <functional>
#include <vector>

#include "cqed/distribution.hpp"
#include "cqed/params.hpp"
#include "cqed/steady_state.hpp"

namespace cqed {

/// Mean-field state of cavity + binned ensemble in the drive frame.
/// Bins run over hyperfine sub-ensemble (outer) x frequency bin (inner).
struct EnsembleState {
    cplx alpha = 0.0;
    std::vector<cplx> s;   // coherences
    std::vector<double> p; // excited-state populations
    double t = 0.0;        // s

    double alpha_sq() const { return std::norm(alpha); }
};

struct IntegratorConfig {
    double rel_tol = 1e-9;
    double abs_tol = 1e-12;
    double max_step = 0.0;  // 0 = unbounded
    double steady_state_criterion = 1e-10;  // relative change per 10/kappa window
    double sample_dt = 0.0; // 0 = no sampling callback
};

struct TrajectorySample {
    double t = 0.0;
    cplx alpha = 0.0;
    double mean_inversion = 1.0;
};

struct BinnedModel {
    CavityParams cav;
    SpinEnsembleParams spins;
    std::vector<SpinBin> bins;          // per sub-ensemble bins (shared across triplet)
    std::vector<double> bin_detunings;  // flattened Delta_j = Delta - Delta_s - a - d_bin
    std::vector<double> bin_weights;    // N * weight per flattened bin

    static BinnedModel make(const CavityParams& cav, const SpinEnsembleParams& spins, int m_bins,
                            const DriveParams& drive, double window_fwhm = 20.0) {
        BinnedModel mdl{cav, spins, bin_distribution(spins.Gamma, m_bins, window_fwhm), {}, {}};
        for (double a : spins.hyperfine_offsets()) {
            for (const auto& b : mdl.bins) {
                mdl.bin_detunings.push_back(drive.Delta - drive.Delta_s - a - b.detuning);
                mdl.bin_weights.push_back(spins.N * b.weight);
            }
        }
        return mdl;
    }

    std::size_t n_bins() const { return bin_detunings.size(); }

    EnsembleState polarized_state() const {
        EnsembleState st;
        st.s.assign(n_bins(), cplx(0.0));
        st.p.assign(n_bins(), 0.0);
        return st;
    }
};

namespace detail {

inline void rhs(const BinnedModel& m, const DriveParams& drive, const EnsembleState& y,
                EnsembleState& dy) {
    const double gs = m.spins.g_s;
    const double gamma = m.spins.gamma();
    const double gp = m.spins.gamma_p;
    cplx drive_sum = 0.0;
    std::size_t nb = m.n_bins();
    dy.s.resize(nb);
    dy.p.resize(nb);
    for (std::size_t k = 0; k < nb; ++k) {
        const cplx sk = y.s[k];
        drive_sum += m.bin_weights[k] * sk;
        dy.s[k] = -cplx(0.5 * gamma, m.bin_detunings[k]) * sk
                  - cplx(0.0, gs * (1.0 - 2.0 * y.p[k])) * y.alpha;
        dy.p[k] = -gp * y.p[k] - 2.0 * gs * std::imag(sk * std::conj(y.alpha));
    }
    dy.alpha = -cplx(0.5 * m.cav.kappa(), drive.Delta) * y.alpha
               - cplx(0.0, gs) * drive_sum + std::sqrt(m.cav.kappa_c1) * drive.beta_in;
}

inline void axpy(EnsembleState& y, double a, const EnsembleState& x) {
    y.alpha += a * x.alpha;
    for (std::size_t k = 0; k < y.s.size(); ++k) {
        y.s[k] += a * x.s[k];
        y.p[k] += a * x.p[k];
    }
}

} // namespace detail

/// Max-norm of the equations-of-motion residual at a state; small at steady state.
inline double rhs_residual(const BinnedModel& m, const DriveParams& drive,
                           const EnsembleState& y) {
    EnsembleState dy = y;
    detail::rhs(m, drive, y, dy);
    double r = std::abs(dy.alpha);
    for (std::size_t k = 0; k < y.s.size(); ++k)
        r = std::max({r, std::abs(dy.s[k]), std::abs(dy.p[k])});
    return r;
}

struct IntegrationResult {
    EnsembleState state;
    std::vector<TrajectorySample> samples;
    bool reached_steady_state = false;
    std::size_t steps = 0;
    std::size_t rejected = 0;
};

/// Adaptive Dormand-Prince 5(4) integration of the semiclassical equations of
/// motion. Population bounds p in [0,1] are enforced by step rejection, never
/// clipping. Stops early once (|alpha|^2, mean inversion) stall between 10/kappa
/// observation windows.
inline IntegrationResult integrate(const BinnedModel& m, const DriveParams& drive,
                                   EnsembleState state, double t_end,
                                   const IntegratorConfig& cfg = {}) {
    static constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
    static constexpr double a21 = 1.0 / 5;
    static constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
    static constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
    static constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187,
                            a53 = 64448.0 / 6561, a54 = -212.0 / 729;
    static constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247,
                            a64 = 49.0 / 176, a65 = -5103.0 / 18656;
    static constexpr double b1 = 35.0 / 384, b3 = 500.0 / 1113, b4 = 125.0 / 192,
                            b5 = -2187.0 / 6784, b6 = 11.0 / 84;
    static constexpr double e1 = 35.0 / 384 - 5179.0 / 57600, e3 = 500.0 / 1113 - 7571.0 / 16695,
                            e4 = 125.0 / 192 - 393.0 / 640, e5 = -2187.0 / 6784 + 92097.0 / 339200,
                            e6 = 11.0 / 84 - 187.0 / 2100, e7 = -1.0 / 40;

    IntegrationResult res;
    const double t0 = state.t;
    const double kappa = m.cav.kappa();
    double h = 0.05 / kappa;
    if (cfg.max_step > 0.0) h = std::min(h, cfg.max_step);

    EnsembleState k1 = state, k2 = state, k3 = state, k4 = state, k5 = state, k6 = state,
                  k7 = state, ytmp = state, y5 = state;
    detail::rhs(m, drive, state, k1);

    auto stage = [&](EnsembleState& dst, const EnsembleState& y, double hh,
                     std::initializer_list<std::pair<double, const EnsembleState*>> terms) {
        dst = y;
        for (auto& [coef, kk] : terms) detail::axpy(dst, hh * coef, *kk);
    };

    double window = 10.0 / kappa;
    double next_window = t0 + window;
    double prev_a2 = state.alpha_sq();
    double next_sample = cfg.sample_dt > 0.0 ? t0 : t_end + 1.0;

    auto mean_w = [&](const EnsembleState& y) {
        if (y.p.empty()) return 1.0;
        double acc = 0.0, wsum = 0.0;
        for (std::size_t k = 0; k < y.p.size(); ++k) {
            acc += m.bin_weights[k] * (1.0 - 2.0 * y.p[k]);
            wsum += m.bin_weights[k];
        }
        return wsum > 0.0 ? acc / wsum : 1.0;
    };

    double prev_w = mean_w(state);
    if (cfg.sample_dt > 0.0) {
        res.samples.push_back({state.t, state.alpha, prev_w});
        next_sample = t0 + cfg.sample_dt;
    }

    while (state.t < t_end) {
        double stop = std::min(t_end, next_sample);
        if (state.t + h > stop) h = stop - state.t;
        if (h <= std::abs(state.t) * 1e-15 + 1e-30)
            throw NumericalError("integrate: step size underflow at t=" + std::to_string(state.t));

        stage(ytmp, state, h, {{a21, &k1}});
        detail::rhs(m, drive, ytmp, k2);
        stage(ytmp, state, h, {{a31, &k1}, {a32, &k2}});
        detail::rhs(m, drive, ytmp, k3);
        stage(ytmp, state, h, {{a41, &k1}, {a42, &k2}, {a43, &k3}});
        detail::rhs(m, drive, ytmp, k4);
        stage(ytmp, state, h, {{a51, &k1}, {a52, &k2}, {a53, &k3}, {a54, &k4}});
        detail::rhs(m, drive, ytmp, k5);
        stage(ytmp, state, h, {{a61, &k1}, {a62, &k2}, {a63, &k3}, {a64, &k4}, {a65, &k5}});
        detail::rhs(m, drive, ytmp, k6);
        stage(y5, state, h, {{b1, &k1}, {b3, &k3}, {b4, &k4}, {b5, &k5}, {b6, &k6}});
        detail::rhs(m, drive, y5, k7);

        // embedded error estimate
        double err = 0.0;
        auto err_term = [&](cplx e, cplx ynew, cplx yold) {
            double sc = cfg.abs_tol + cfg.rel_tol * std::max(std::abs(ynew), std::abs(yold));
            err = std::max(err, std::abs(e) / sc);
        };
        cplx ea = h * (e1 * k1.alpha + e3 * k3.alpha + e4 * k4.alpha + e5 * k5.alpha
                       + e6 * k6.alpha + e7 * k7.alpha);
        err_term(ea, y5.alpha, state.alpha);
        for (std::size_t k = 0; k < state.s.size(); ++k) {
            cplx es = h * (e1 * k1.s[k] + e3 * k3.s[k] + e4 * k4.s[k] + e5 * k5.s[k]
                           + e6 * k6.s[k] + e7 * k7.s[k]);
            err_term(es, y5.s[k], state.s[k]);
            double ep = h * (e1 * k1.p[k] + e3 * k3.p[k] + e4 * k4.p[k] + e5 * k5.p[k]
                             + e6 * k6.p[k] + e7 * k7.p[k]);
            err_term(cplx(ep, 0.0), cplx(y5.p[k], 0.0), cplx(state.p[k], 0.0));
        }

        bool p_ok = true;
        for (double pv : y5.p)
            if (pv < -1e-12 || pv > 1.0 + 1e-12) { p_ok = false; break; }

        if (err <= 1.0 && p_ok) {
            y5.t = state.t + h;
            state = y5;
            k1 = k7;  // FSAL
            ++res.steps;
            if (cfg.sample_dt > 0.0 && state.t >= next_sample - 1e-15 * std::abs(next_sample)) {
                res.samples.push_back({state.t, state.alpha, mean_w(state)});
                next_sample += cfg.sample_dt;
            }
            if (state.t >= next_window) {
                double a2 = state.alpha_sq();
                double w = mean_w(state);
                double scale_a = std::max({a2, prev_a2, cfg.abs_tol});
                double da = std::abs(a2 - prev_a2) / scale_a;
                double dw = std::abs(w - prev_w) / std::max({std::abs(w), std::abs(prev_w), 1e-30});
                if (da < cfg.steady_state_criterion && dw < cfg.steady_state_criterion) {
                    res.reached_steady_state = true;
                    break;
                }
                prev_a2 = a2;
                prev_w = w;
                next_window = state.t + window;
            }
        } else {
            ++res.rejected;  // k1 still holds rhs(state); retry with smaller h
        }

        double fac = err > 0.0 ? 0.9 * std::pow(err, -0.2) : 5.0;
        if (!p_ok) fac = std::min(fac, 0.5);
        h *= std::clamp(fac, 0.2, 5.0);
        if (cfg.max_step > 0.0) h = std::min(h, cfg.max_step);
    }
    res.state = state;
    return res;
}

/// mean inversion of a state under a model (weights from the model)
inline double mean_inversion(const BinnedModel& m, const EnsembleState& st) {
    double acc = 0.0, wsum = 0.0;
    for (std::size_t k = 0; k < st.p.size(); ++k) {
        acc += m.bin_weights[k] * (1.0 - 2.0 * st.p[k]);
        wsum += m.bin_weights[k];
    }
    return wsum > 0.0 ? acc / wsum : 1.0;
}

/// Smallest bin count (doubling from m_start) at which the steady-state
/// occupancy stops moving by more than rel_change. The algebraic fixed point
/// stands in for the ODE; the two agree to solver precision on shared bins.
inline int converged_bin_count(const CavityParams& cav, const SpinEnsembleParams& spins,
                               const DriveParams& drive, int m_start = 201,
                               double rel_change = 1e-4, int m_max = 100001) {
    auto x_of = [&](int m_bins) {
        auto bins = bin_distribution(spins.Gamma, m_bins);
        SolverOptions opt;
        opt.bins = &bins;
        return select_branch(solve_occupancy(cav, spins, drive, opt),
                             BranchPolicy::FollowFromBelow).alpha_sq;
    };
    int m = m_start;
    double prev = x_of(m);
    while (m < m_max) {
        int m2 = 2 * m - 1;  // stays odd
        double next = x_of(m2);
        if (std::abs(next - prev) <= rel_change * std::abs(prev)) return m2;
        prev = next;
        m = m2;
    }
    throw NumericalError("converged_bin_count: no convergence below m_max");
}

struct HysteresisPoint {
    double power_dbm = 0.0;
    double alpha_sq = 0.0;
    bool up_sweep = true;
};

/// Sequential power sweep carrying the final state of each segment into the
/// next; history dependence is the point of the exercise.
inline std::vector<HysteresisPoint> hysteresis_sweep(const CavityParams& cav,
                                                     const SpinEnsembleParams& spins,
                                                     const std::vector<double>& powers_up_then_down,
                                                     int m_bins, const IntegratorConfig& cfg = {},
                                                     double t_segment = 0.0) {
    std::vector<HysteresisPoint> trace;
    if (powers_up_then_down.empty()) return trace;
    DriveParams d0 = DriveParams::from_power_dbm(powers_up_then_down.front(), cav);
    BinnedModel model = BinnedModel::make(cav, spins, m_bins, d0);
    EnsembleState st = model.polarized_state();
    if (t_segment <= 0.0) t_segment = 60.0 / spins.gamma_p;
    double prev = powers_up_then_down.front();
    bool up = true;
    for (double p : powers_up_then_down) {
        if (p < prev) up = false;
        prev = p;
        DriveParams d = DriveParams::from_power_dbm(p, cav);
        st.t = 0.0;
        auto res = integrate(model, d, st, t_segment, cfg);
        st = res.state;
        trace.push_back({p, st.alpha_sq(), up});
    }
    return trace;
}

} // namespace cqed
