#pragma once

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <limits>
#include <numbers>

#include "cqed/errors.hpp"

namespace cqed {

inline constexpr double two_pi = 2.0 * std::numbers::pi;

/// Fundamental constants, SI units throughout.
struct PhysicalConstants {
    double hbar = 1.054571817e-34;     // J s
    double k_B = 1.380649e-23;         // J/K
    double mu_B = 9.2740100783e-24;    // J/T
    double g_e = 2.003;                // electron Lande factor, NV ground state
    double gamma_e = 28.0e9;           // Hz/T, electron gyromagnetic ratio
    double mu_0 = 1.25663706212e-6;    // N/A^2
    double h = 6.62607015e-34;         // J s
};

inline constexpr PhysicalConstants constants{};

// Exact inverse of v -> v * scale where one exists. Plain division can land a
// ulp off the value that produced w, and several preimages may round to the
// same product; prefer the shortest-decimal candidate so config round trips
// reproduce their inputs bit-exactly.
inline double invert_scale(double w, double scale) {
    double f = w / scale;
    char buf[40];
    for (int digits : {15, 16, 17}) {
        std::snprintf(buf, sizeof buf, "%.*g", digits, f);
        double cand = std::strtod(buf, nullptr);
        if (cand * scale == w) return cand;
    }
    if (f * scale == w) return f;
    double up = f, down = f;
    for (int i = 0; i < 2; ++i) {
        up = std::nextafter(up, std::numeric_limits<double>::infinity());
        down = std::nextafter(down, -std::numeric_limits<double>::infinity());
        if (up * scale == w) return up;
        if (down * scale == w) return down;
    }
    return f;
}

// angular <-> ordinary frequency; every config-file Hz becomes rad/s exactly once
inline double hz_to_rad(double f_hz) { return two_pi * f_hz; }
inline double rad_to_hz(double w) { return invert_scale(w, two_pi); }

inline double dbm_to_watts(double p_dbm) { return 1e-3 * std::pow(10.0, p_dbm / 10.0); }
inline double watts_to_dbm(double p_w) { return 10.0 * std::log10(p_w / 1e-3); }

inline double db_to_linear(double db) { return std::pow(10.0, db / 10.0); }
inline double linear_to_db(double x) { return 10.0 * std::log10(x); }

/// Photon flux |beta_in|^2 = P / (hbar omega), photons/s.
inline double power_to_flux(double p_watts, double omega) {
    if (!(omega > 0.0))
        throw ValidationError("power_to_flux: omega must be positive");
    if (p_watts < 0.0)
        throw ValidationError("power_to_flux: negative power");
    return p_watts / (constants.hbar * omega);
}

inline double flux_to_power(double flux, double omega) {
    if (!(omega > 0.0))
        throw ValidationError("flux_to_power: omega must be positive");
    return flux * constants.hbar * omega;
}

} // namespace cqed
