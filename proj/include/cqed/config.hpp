#pragma once

#include <fstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "cqed/noise.hpp"
#include "cqed/params.hpp"
#include "cqed/sensitivity.hpp"

namespace cqed {

using json = nlohmann::json;

struct SimConfig {
    DeviceParams device;
    DriveParams drive;          // built from power_dbm/delta_hz/delta_s_hz
    double power_dbm = -50.0;
    NoiseEnvironment noise;
    AmbientFieldSpectrum ambient;
};

namespace detail {

inline void reject_unknown(const json& obj, const std::string& scope,
                           std::initializer_list<const char*> allowed) {
    for (auto it = obj.begin(); it != obj.end(); ++it) {
        bool ok = false;
        for (const char* k : allowed)
            if (it.key() == k) { ok = true; break; }
        if (!ok) throw ValidationError("config: unknown key '" + scope + "." + it.key() + "'");
    }
}

inline double get_num(const json& obj, const std::string& scope, const char* key, double fallback,
                      bool* present = nullptr) {
    if (!obj.contains(key)) {
        if (present) *present = false;
        return fallback;
    }
    if (present) *present = true;
    if (!obj[key].is_number())
        throw ValidationError("config: '" + scope + "." + key + "' must be a number");
    return obj[key].get<double>();
}

} // namespace detail

/// Parse the declarative device config. All frequencies in the file are
/// ordinary Hz; the 2pi conversion happens here and only here. Unknown keys
/// are rejected.
inline SimConfig load_config(const json& root) {
    SimConfig cfg;
    cfg.device = paper_device();
    detail::reject_unknown(root, "", {"cavity", "spins", "drive", "noise", "ambient_field"});

    if (root.contains("cavity")) {
        const auto& c = root["cavity"];
        detail::reject_unknown(c, "cavity", {"f_c_hz", "kappa_c_hz", "kappa_c1_hz", "V_cm3"});
        auto& cav = cfg.device.cavity;
        cav.omega_c = hz_to_rad(detail::get_num(c, "cavity", "f_c_hz", rad_to_hz(cav.omega_c)));
        cav.kappa_c = hz_to_rad(detail::get_num(c, "cavity", "kappa_c_hz", rad_to_hz(cav.kappa_c)));
        cav.kappa_c1 =
            hz_to_rad(detail::get_num(c, "cavity", "kappa_c1_hz", rad_to_hz(cav.kappa_c1)));
        cav.V = detail::get_num(c, "cavity", "V_cm3", cav.V * 1e6) * 1e-6;
        cfg.device.spins.omega_s = cav.omega_c;
    }
    if (root.contains("spins")) {
        const auto& s = root["spins"];
        detail::reject_unknown(s, "spins",
                               {"g_hz", "g_s_hz", "N", "gamma_fwhm_hz", "gamma_p_hz",
                                "gamma_0_hz", "A_zz_hz", "n_hyperfine"});
        auto& sp = cfg.device.spins;
        bool has_g = s.contains("g_hz");
        bool has_gs = s.contains("g_s_hz") || s.contains("N");
        if (has_g && has_gs)
            throw ValidationError("config: give either spins.g_hz or spins.g_s_hz + spins.N");
        if (has_gs) {
            if (!(s.contains("g_s_hz") && s.contains("N")))
                throw ValidationError("config: spins.g_s_hz and spins.N must come together");
            sp.g_s = hz_to_rad(detail::get_num(s, "spins", "g_s_hz", 0.0));
            sp.N = detail::get_num(s, "spins", "N", 0.0);
        } else if (has_g) {
            // collective g with g_s from the mode-volume calibration; N back-computed
            double g = hz_to_rad(detail::get_num(s, "spins", "g_hz", 0.0));
            sp.g_s = g_s_for_volume(cfg.device.cavity.V);
            sp.N = (g / sp.g_s) * (g / sp.g_s);
        }
        sp.Gamma = hz_to_rad(detail::get_num(s, "spins", "gamma_fwhm_hz", rad_to_hz(sp.Gamma)));
        sp.gamma_p = hz_to_rad(detail::get_num(s, "spins", "gamma_p_hz", rad_to_hz(sp.gamma_p)));
        sp.gamma_0 = hz_to_rad(detail::get_num(s, "spins", "gamma_0_hz", rad_to_hz(sp.gamma_0)));
        sp.A_zz = hz_to_rad(detail::get_num(s, "spins", "A_zz_hz", rad_to_hz(sp.A_zz)));
        sp.n_hyperfine = static_cast<int>(detail::get_num(s, "spins", "n_hyperfine",
                                                          sp.n_hyperfine));
    }
    if (root.contains("drive")) {
        const auto& d = root["drive"];
        detail::reject_unknown(d, "drive", {"power_dbm", "delta_hz", "delta_s_hz"});
        cfg.power_dbm = detail::get_num(d, "drive", "power_dbm", cfg.power_dbm);
        double delta = hz_to_rad(detail::get_num(d, "drive", "delta_hz", 0.0));
        double delta_s = hz_to_rad(detail::get_num(d, "drive", "delta_s_hz", 0.0));
        cfg.drive = DriveParams::from_power_dbm(cfg.power_dbm, cfg.device.cavity, delta, delta_s);
    } else {
        cfg.drive = DriveParams::from_power_dbm(cfg.power_dbm, cfg.device.cavity);
    }
    if (root.contains("noise")) {
        const auto& n = root["noise"];
        detail::reject_unknown(n, "noise",
                               {"T_port_k", "T_cavity_k", "T_ambient_k", "amp_noise_figure_db",
                                "power_gain_db", "r_ohm", "phase_noise_dbc"});
        cfg.noise.T_port = detail::get_num(n, "noise", "T_port_k", cfg.noise.T_port);
        cfg.noise.T_cavity = detail::get_num(n, "noise", "T_cavity_k", cfg.noise.T_cavity);
        cfg.noise.T_ambient = detail::get_num(n, "noise", "T_ambient_k", cfg.noise.T_ambient);
        cfg.noise.amp_noise_figure_db =
            detail::get_num(n, "noise", "amp_noise_figure_db", cfg.noise.amp_noise_figure_db);
        cfg.noise.power_gain_db =
            detail::get_num(n, "noise", "power_gain_db", cfg.noise.power_gain_db);
        cfg.noise.R = detail::get_num(n, "noise", "r_ohm", cfg.noise.R);
        if (n.contains("phase_noise_dbc")) {
            if (!n["phase_noise_dbc"].is_array())
                throw ValidationError("config: noise.phase_noise_dbc must be [[f_hz, dbc], ...]");
            cfg.noise.phase_noise.clear();
            for (const auto& e : n["phase_noise_dbc"])
                cfg.noise.phase_noise.emplace_back(e.at(0).get<double>(), e.at(1).get<double>());
        }
        validate(cfg.noise);
    }
    if (root.contains("ambient_field")) {
        if (!root["ambient_field"].is_array())
            throw ValidationError("config: ambient_field must be [[f_hz, t_per_sqrthz], ...]");
        for (const auto& e : root["ambient_field"])
            cfg.ambient.points.emplace_back(e.at(0).get<double>(), e.at(1).get<double>());
    }
    validate(cfg.device);
    return cfg;
}

inline SimConfig load_config_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ValidationError("config: cannot open '" + path + "'");
    json root;
    try {
        in >> root;
    } catch (const json::exception& e) {
        throw ValidationError(std::string("config: JSON parse error: ") + e.what());
    }
    return load_config(root);
}

/// Inverse of load_config; frequencies back in ordinary Hz. Re-parsing the
/// result reproduces the internal state exactly.
inline json dump_config(const SimConfig& cfg) {
    json root;
    root["cavity"] = {{"f_c_hz", rad_to_hz(cfg.device.cavity.omega_c)},
                      {"kappa_c_hz", rad_to_hz(cfg.device.cavity.kappa_c)},
                      {"kappa_c1_hz", rad_to_hz(cfg.device.cavity.kappa_c1)},
                      {"V_cm3", invert_scale(cfg.device.cavity.V, 1e-6)}};
    root["spins"] = {{"g_s_hz", rad_to_hz(cfg.device.spins.g_s)},
                     {"N", cfg.device.spins.N},
                     {"gamma_fwhm_hz", rad_to_hz(cfg.device.spins.Gamma)},
                     {"gamma_p_hz", rad_to_hz(cfg.device.spins.gamma_p)},
                     {"gamma_0_hz", rad_to_hz(cfg.device.spins.gamma_0)},
                     {"A_zz_hz", rad_to_hz(cfg.device.spins.A_zz)},
                     {"n_hyperfine", cfg.device.spins.n_hyperfine}};
    root["drive"] = {{"power_dbm", cfg.power_dbm},
                     {"delta_hz", rad_to_hz(cfg.drive.Delta)},
                     {"delta_s_hz", rad_to_hz(cfg.drive.Delta_s)}};
    root["noise"] = {{"T_port_k", cfg.noise.T_port},
                     {"T_cavity_k", cfg.noise.T_cavity},
                     {"T_ambient_k", cfg.noise.T_ambient},
                     {"amp_noise_figure_db", cfg.noise.amp_noise_figure_db},
                     {"power_gain_db", cfg.noise.power_gain_db},
                     {"r_ohm", cfg.noise.R}};
    if (!cfg.noise.phase_noise.empty()) {
        json pn = json::array();
        for (auto& [f, dbc] : cfg.noise.phase_noise) pn.push_back({f, dbc});
        root["noise"]["phase_noise_dbc"] = pn;
    }
    if (!cfg.ambient.points.empty()) {
        json am = json::array();
        for (auto& [f, t] : cfg.ambient.points) am.push_back({f, t});
        root["ambient_field"] = am;
    }
    return root;
}

} // namespace cqed
