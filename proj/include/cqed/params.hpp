#pragma once

#include <cmath>
#include <string>
#include <vector>

#include "cqed/constants.hpp"
#include "cqed/errors.hpp"

namespace cqed {

/// Microwave cavity mode. All rates are angular (rad/s).
struct CavityParams {
    double omega_c = two_pi * 2.87e9;   // rad/s, resonance (NV zero-field splitting)
    double kappa_c = two_pi * 130e3;    // rad/s, intrinsic loss
    double kappa_c1 = two_pi * 125e3;   // rad/s, port coupling
    double V = 1.7e-6;                  // m^3, mode volume

    double kappa() const { return kappa_c + kappa_c1; }
    double q_unloaded() const { return omega_c / kappa_c; }
};

/// NV sub-ensemble parameters. N counts spins per hyperfine sub-ensemble;
/// the collective coupling g = g_s sqrt(N) is derived, never stored.
struct SpinEnsembleParams {
    double omega_s = two_pi * 2.87e9;   // rad/s, sub-ensemble center
    double g_s = 0.0;                   // rad/s, single-spin coupling
    double N = 0.0;                     // spins per sub-ensemble
    double Gamma = two_pi * 330e3;      // rad/s, inhomogeneous FWHM
    double gamma_0 = two_pi * 3e3;      // rad/s, thermalization rate
    double gamma_p = two_pi * 30e3;     // rad/s, optical polarization rate
    double A_zz = two_pi * 2.1e6;       // rad/s, 14N hyperfine splitting
    int n_hyperfine = 3;                // sub-ensembles at omega_s, omega_s +- A_zz

    double gamma() const { return gamma_0 + gamma_p; }
    double g() const { return g_s * std::sqrt(N); }

    /// Hyperfine offsets from omega_s, symmetric about the center line.
    std::vector<double> hyperfine_offsets() const {
        if (n_hyperfine == 1) return {0.0};
        std::vector<double> offs;
        int half = n_hyperfine / 2;
        for (int k = -half; k <= half; ++k) offs.push_back(k * A_zz);
        return offs;
    }
};

/// Probe drive in the rotating frame: Delta = omega_d - omega_c, Delta_s = omega_s - omega_c.
struct DriveParams {
    double Delta = 0.0;     // rad/s
    double Delta_s = 0.0;   // rad/s
    double beta_in = 0.0;   // sqrt(photons/s), real positive by phase convention

    double flux() const { return beta_in * beta_in; }
    double omega_d(const CavityParams& cav) const { return cav.omega_c + Delta; }

    static DriveParams from_power_dbm(double p_dbm, const CavityParams& cav,
                                      double delta = 0.0, double delta_s = 0.0) {
        DriveParams d;
        d.Delta = delta;
        d.Delta_s = delta_s;
        d.beta_in = std::sqrt(power_to_flux(dbm_to_watts(p_dbm), cav.omega_c + delta));
        return d;
    }
};

// ---------------------------------------------------------------------------
// Ensemble-size bookkeeping shared by the presets and the design optimizer.
// ---------------------------------------------------------------------------

inline constexpr double carbon_density_cm3 = 1.76e23;  // carbon atoms per cm^3 of diamond
inline constexpr double orientation_fraction = 0.25;   // one of four NV axes
inline constexpr double hyperfine_fraction = 1.0 / 3.0; // one 14N line per sub-ensemble

/// Spins per hyperfine sub-ensemble for an NV density rho (ppm) in volume V_d (cm^3).
inline double ensemble_size(double rho_ppm, double vd_cm3) {
    return rho_ppm * 1e-6 * carbon_density_cm3 * vd_cm3 * orientation_fraction * hyperfine_fraction;
}

inline constexpr double linewidth_per_ppm_hz = 82.5e3; // Gamma = a rho, Hz per ppm
inline constexpr double reference_rho_ppm = 4.0;
inline constexpr double reference_vd_cm3 = 8.1e-3;     // 3 x 3 x 0.9 mm^3
inline constexpr double polarization_budget_cm3_ppm = 0.49;
inline constexpr double reference_aspect_ratio = 2.2;

/// Single-spin coupling of the reference device: the fitted collective
/// g = 2pi x 190 kHz divided by sqrt(N) of the reference diamond.
inline double reference_g_s() {
    return two_pi * 190e3 / std::sqrt(ensemble_size(reference_rho_ppm, reference_vd_cm3));
}

/// g_s scales as sqrt(V0/V) with mode volume.
inline double g_s_for_volume(double v_m3) {
    return reference_g_s() * std::sqrt(1.7e-6 / v_m3);
}

// ---------------------------------------------------------------------------
// Presets
// ---------------------------------------------------------------------------

struct DeviceParams {
    CavityParams cavity;
    SpinEnsembleParams spins;
};

/// The fitted parameter set of the measured device (Fig. 2a caption values).
inline DeviceParams paper_device() {
    DeviceParams d;
    d.cavity = CavityParams{};
    d.spins.omega_s = d.cavity.omega_c;
    d.spins.g_s = reference_g_s();
    d.spins.N = ensemble_size(reference_rho_ppm, reference_vd_cm3);
    d.spins.Gamma = two_pi * 330e3;
    d.spins.gamma_0 = two_pi * 3e3;
    d.spins.gamma_p = two_pi * 30e3;
    return d;
}

/// Same cavity filled with the largest optically polarizable diamond:
/// fill factor 1 and rho V_d at the polarization budget.
inline DeviceParams optimal_diamond() {
    DeviceParams d = paper_device();
    double vd_cm3 = 1.7;  // unit fill of the 1.7 cm^3 mode
    double rho = polarization_budget_cm3_ppm / vd_cm3;
    d.spins.N = ensemble_size(rho, vd_cm3);
    d.spins.Gamma = two_pi * linewidth_per_ppm_hz * rho;
    return d;
}

// ---------------------------------------------------------------------------
// Validation
// ---------------------------------------------------------------------------

struct ValidationReport {
    std::vector<std::string> warnings;
};

inline ValidationReport validate(const CavityParams& c) {
    if (!(c.omega_c > 0.0)) throw ValidationError("cavity.omega_c must be positive");
    if (!(c.kappa_c > 0.0)) throw ValidationError("cavity.kappa_c must be positive");
    if (!(c.kappa_c1 > 0.0)) throw ValidationError("cavity.kappa_c1 must be positive");
    if (!(c.V > 0.0)) throw ValidationError("cavity.V must be positive");
    return {};
}

inline ValidationReport validate(const SpinEnsembleParams& s) {
    ValidationReport rep;
    if (!(s.Gamma > 0.0)) throw ValidationError("spins.Gamma must be positive");
    if (s.g_s < 0.0 || s.N < 0.0) throw ValidationError("spins coupling must be non-negative");
    if (!(s.gamma_p > 0.0)) throw ValidationError("spins.gamma_p must be positive");
    if (s.gamma_0 < 0.0) throw ValidationError("spins.gamma_0 must be non-negative");
    if (s.n_hyperfine < 1 || s.n_hyperfine % 2 == 0)
        throw ValidationError("spins.n_hyperfine must be odd and >= 1");
    if (s.gamma_0 > s.gamma_p / 10.0)
        rep.warnings.push_back("spins: gamma_0 is not << gamma_p (expect gamma_0 <= gamma_p/10)");
    return rep;
}

inline ValidationReport validate(const DeviceParams& d) {
    validate(d.cavity);
    return validate(d.spins);
}

} // namespace cqed
