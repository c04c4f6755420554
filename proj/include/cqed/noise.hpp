#pragma once

#include <cmath>
#include <utility>
#include <vector>

#include "cqed/params.hpp"
#include "cqed/steady_state.hpp"

namespace cqed {

/// Measurement-chain noise description. Temperatures in K, R in ohms.
/// phase_noise entries are (offset Hz, dBc/Hz), increasing offsets, log-log interpolated.
struct NoiseEnvironment {
    double T_port = 348.3433139609502;    // 407 K baseline minus amplifier contribution
    double T_cavity = 348.3433139609502;
    double T_ambient = 300.0;             // spin thermalization bath
    double amp_noise_figure_db = 0.8;
    double power_gain_db = 36.5;
    double R = 50.0;                      // ohm
    std::vector<std::pair<double, double>> phase_noise;  // empty = no source phase noise

    double amp_temperature() const {
        return 290.0 * (std::pow(10.0, amp_noise_figure_db / 10.0) - 1.0);
    }
    double gain_linear() const { return std::pow(10.0, power_gain_db / 10.0); }
};

inline void validate(const NoiseEnvironment& env) {
    if (!(env.T_port > 0.0) || !(env.T_cavity > 0.0) || !(env.T_ambient > 0.0))
        throw ValidationError("noise: temperatures must be positive");
    if (!(env.R > 0.0)) throw ValidationError("noise: termination R must be positive");
    for (std::size_t i = 1; i < env.phase_noise.size(); ++i)
        if (!(env.phase_noise[i].first > env.phase_noise[i - 1].first))
            throw ValidationError("noise: phase_noise offsets must be increasing");
}

/// Optically polarized spins thermalize at gamma_0 against T_ambient and are
/// reset at gamma_p: T_spin = T gamma_0 / (gamma_0 + gamma_p). The unpumped
/// limit gamma_p = 0 is the unpolarized ensemble at T_ambient.
inline double spin_noise_temperature(const SpinEnsembleParams& spins, double t_ambient) {
    if (spins.gamma_p < 0.0 || !(spins.gamma_0 + spins.gamma_p > 0.0))
        throw ValidationError("spin_noise_temperature: need gamma_p >= 0, gamma_0 + gamma_p > 0");
    return t_ambient * spins.gamma_0 / (spins.gamma_0 + spins.gamma_p);
}

struct ChannelFractions {
    double port = 1.0;
    double cavity = 0.0;
    double spin = 0.0;
    double sum() const { return port + cavity + spin; }
};

/// Linear input-output split of the reflected noise among the three channels,
/// with the spin channel rate kappa_s(omega) built from the chi-corrected
/// effective parameters of the operating point. delta_eval is the detuning of
/// the evaluation frequency from the cavity (carrier detuning + offset).
inline ChannelFractions channel_fractions(const CavityParams& cav, const SpinEnsembleParams& spins,
                                          const SteadyStateSolution& sol, double delta_eval,
                                          double delta_s) {
    double ge2 = sol.g_eff * sol.g_eff;
    cplx spin_term = 0.0;
    for (double a : spins.hyperfine_offsets())
        spin_term += ge2 / cplx(0.5 * sol.Gamma_1, delta_eval - delta_s - a);
    double kappa_s = 2.0 * spin_term.real();
    cplx den = cplx(0.5 * cav.kappa(), delta_eval) + spin_term;
    double d2 = std::norm(den);
    ChannelFractions f;
    f.port = std::norm(-1.0 + cav.kappa_c1 / den);
    f.cavity = cav.kappa_c1 * cav.kappa_c / d2;
    f.spin = cav.kappa_c1 * kappa_s / d2;
    return f;
}

/// Emission temperature of the spin channel: polarized spins are cold,
/// saturated spins emit at the hot ambient. Weight is the resonant inversion
/// w = 1/chi_tilde^2 of the drive-burned hole.
inline double spin_channel_temperature(const SpinEnsembleParams& spins,
                                       const SteadyStateSolution& sol, double t_cold,
                                       double t_hot) {
    double gamma = spins.gamma();
    double chi_t2 = 1.0 + 8.0 * spins.g_s * spins.g_s * sol.alpha_sq / (gamma * spins.gamma_p);
    double w = 1.0 / chi_t2;
    return w * t_cold + (1.0 - w) * t_hot;
}

/// Johnson-Nyquist voltage PSD of the three-channel mixture plus the
/// input-referred amplifier term, at the device plane (unit gain). V^2/Hz.
inline double thermal_psd(const NoiseEnvironment& env, const ChannelFractions& f, double t_spin) {
    return constants.k_B * env.R
           * (f.port * env.T_port + f.cavity * env.T_cavity + f.spin * t_spin
              + env.amp_temperature());
}

/// Source phase noise L_phi(f) in dBc/Hz; outside the tabulated range the last
/// slope is extrapolated and *extrapolated is set.
inline double phase_noise_dbc(const NoiseEnvironment& env, double f_offset,
                              bool* extrapolated = nullptr) {
    const auto& tab = env.phase_noise;
    if (tab.empty()) throw ValidationError("phase_noise: empty spectrum");
    if (extrapolated) *extrapolated = false;
    if (tab.size() == 1) return tab.front().second;
    double lf = std::log10(f_offset);
    std::size_t i = 1;
    while (i + 1 < tab.size() && std::log10(tab[i].first) < lf) ++i;
    double l0 = std::log10(tab[i - 1].first), l1 = std::log10(tab[i].first);
    double t = (lf - l0) / (l1 - l0);
    if (extrapolated && (t < 0.0 || t > 1.0)) *extrapolated = true;
    return tab[i - 1].second + t * (tab[i].second - tab[i - 1].second);
}

/// Phase-noise voltage PSD in the quadrature channel at the device plane:
/// L_phi(f) * (hbar omega |beta_in|^2 R) * |r|^2.
inline double phase_noise_psd(const NoiseEnvironment& env, double f_offset, double carrier_power_w,
                              double abs_r2, bool* extrapolated = nullptr) {
    if (carrier_power_w == 0.0) return 0.0;
    double dbc = phase_noise_dbc(env, f_offset, extrapolated);
    return std::pow(10.0, dbc / 10.0) * carrier_power_w * env.R * abs_r2;
}

struct NoiseBudget {
    double thermal_port = 0.0;   // V^2/Hz, device plane
    double thermal_cavity = 0.0;
    double thermal_spin = 0.0;
    double amplifier = 0.0;
    double phase = 0.0;
    double total = 0.0;
    ChannelFractions fractions;
    double t_spin_effective = 0.0;
};

/// Full budget at a resolved operating point. f_offset shifts the evaluation
/// frequency off the carrier (thermal fractions and L_phi are offset-dependent).
inline NoiseBudget noise_budget(const CavityParams& cav, const SpinEnsembleParams& spins,
                                const NoiseEnvironment& env, const DriveParams& drive,
                                const SteadyStateSolution& sol, double f_offset) {
    NoiseBudget b;
    b.fractions = channel_fractions(cav, spins, sol, drive.Delta + two_pi * f_offset,
                                    drive.Delta_s);
    double t_cold = spin_noise_temperature(spins, env.T_ambient);
    b.t_spin_effective = spin_channel_temperature(spins, sol, t_cold, env.T_port);
    double kbr = constants.k_B * env.R;
    b.thermal_port = kbr * b.fractions.port * env.T_port;
    b.thermal_cavity = kbr * b.fractions.cavity * env.T_cavity;
    b.thermal_spin = kbr * b.fractions.spin * b.t_spin_effective;
    b.amplifier = kbr * env.amp_temperature();
    if (!env.phase_noise.empty()) {
        double p_carrier = flux_to_power(drive.flux(), drive.omega_d(cav));
        b.phase = phase_noise_psd(env, f_offset, p_carrier, std::norm(sol.r));
    }
    b.total = b.thermal_port + b.thermal_cavity + b.thermal_spin + b.amplifier + b.phase;
    return b;
}

enum class CoolingModel { Full, Bare };

/// Noise suppression from bringing the spins on resonance:
/// 10 log10( total(detuned) / total(resonant) ), positive = suppression. The
/// Bare variant isolates mode cooling alone (T_spin = 0, no amplifier or phase
/// terms, spin-free reference) so it reads the resonant channel fractions
/// directly: -10 log10(1 - F_spin) at low power.
inline double cooling_depth(const CavityParams& cav, const SpinEnsembleParams& spins,
                            double power_dbm, const NoiseEnvironment& env,
                            double f_offset = 15e3, double detuned_delta_s = two_pi * 5e6,
                            CoolingModel model = CoolingModel::Full) {
    auto total_at = [&](double delta_s, bool reference) {
        DriveParams d = DriveParams::from_power_dbm(power_dbm, cav, 0.0, delta_s);
        auto sol = select_branch(solve_occupancy(cav, spins, d), BranchPolicy::FollowFromBelow);
        if (model == CoolingModel::Bare) {
            if (reference) return env.T_port;  // ideal spin-free baseline
            auto f = channel_fractions(cav, spins, sol, d.Delta + two_pi * f_offset, d.Delta_s);
            double t_spin = spin_channel_temperature(spins, sol, 0.0, env.T_port);
            return (f.port + f.cavity) * env.T_port + f.spin * t_spin;
        }
        return noise_budget(cav, spins, env, d, sol, f_offset).total;
    };
    return 10.0 * std::log10(total_at(detuned_delta_s, true) / total_at(0.0, false));
}

} // namespace cqed
