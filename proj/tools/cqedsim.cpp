// cqedsim — spectra, steady states, dynamics, noise, sensitivity, and design
// maps for a cavity-coupled NV-ensemble magnetometer.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "cqed/config.hpp"
#include "cqed/csv.hpp"
#include "cqed/design.hpp"
#include "cqed/dynamics.hpp"
#include "cqed/measurement.hpp"
#include "cqed/threading.hpp"

using namespace cqed;

namespace {

struct CommonArgs {
    std::string preset = "paper-device";
    std::string config_path;
    std::string out = "out.csv";
    std::string json_out;
    bool dump_config = false;
    unsigned threads = 0;
};

SimConfig resolve_config(const CommonArgs& a) {
    SimConfig cfg;
    if (!a.config_path.empty()) {
        cfg = load_config_file(a.config_path);
    } else if (a.preset == "paper-device") {
        cfg.device = paper_device();
        cfg.drive = DriveParams::from_power_dbm(cfg.power_dbm, cfg.device.cavity);
    } else if (a.preset == "optimal-diamond") {
        cfg.device = optimal_diamond();
        cfg.drive = DriveParams::from_power_dbm(cfg.power_dbm, cfg.device.cavity);
    } else {
        throw ValidationError("unknown preset '" + a.preset + "' (paper-device, optimal-diamond)");
    }
    return cfg;
}

void add_common(CLI::App* cmd, CommonArgs& a) {
    cmd->add_option("--preset", a.preset, "device preset: paper-device | optimal-diamond");
    cmd->add_option("--config", a.config_path, "JSON config file (overrides preset)");
    cmd->add_option("--out", a.out, "output CSV path");
    cmd->add_option("--json-out", a.json_out, "JSON summary path");
    cmd->add_flag("--dump-config", a.dump_config, "print the resolved config as JSON and exit");
    cmd->add_option("--threads", a.threads, "worker threads (default: all cores)");
}

std::vector<double> linspace(double a, double b, int n) {
    std::vector<double> v;
    if (n <= 1) { v.push_back(a); return v; }
    for (int i = 0; i < n; ++i) v.push_back(a + (b - a) * i / (n - 1));
    return v;
}

std::vector<double> geomspace(double a, double b, int n) {
    std::vector<double> v;
    if (n <= 1) { v.push_back(a); return v; }
    double la = std::log10(a), lb = std::log10(b);
    for (int i = 0; i < n; ++i) v.push_back(std::pow(10.0, la + (lb - la) * i / (n - 1)));
    return v;
}

bool maybe_dump(const CommonArgs& a, const SimConfig& cfg) {
    if (!a.dump_config) return false;
    std::cout << dump_config(cfg).dump(2) << "\n";
    return true;
}

void write_json(const std::string& path, const json& j) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot open output file '" + path + "'");
    out << j.dump(2) << "\n";
}

// ---------------------------------------------------------------------------

int run_spectrum(const CommonArgs& a, double dmin, double dmax, int dn, double smin, double smax,
                 int sn) {
    SimConfig cfg = resolve_config(a);
    if (maybe_dump(a, cfg)) return 0;
    auto deltas = linspace(hz_to_rad(dmin), hz_to_rad(dmax), dn);
    auto delta_ss = linspace(hz_to_rad(smin), hz_to_rad(smax), sn);
    std::vector<double> rows(deltas.size() * delta_ss.size() * 5);
    parallel_for(delta_ss.size(), [&](std::size_t j) {
        for (std::size_t i = 0; i < deltas.size(); ++i) {
            auto r = reflection_linear(cfg.device.cavity, cfg.device.spins, deltas[i], delta_ss[j]);
            std::size_t k = (j * deltas.size() + i) * 5;
            rows[k] = rad_to_hz(deltas[i]);
            rows[k + 1] = rad_to_hz(delta_ss[j]);
            rows[k + 2] = r.r.real();
            rows[k + 3] = r.r.imag();
            rows[k + 4] = r.abs_r2();
        }
    }, a.threads);
    CsvWriter csv(a.out, {"delta_hz", "delta_s_hz", "re_r", "im_r", "abs_r2"});
    for (std::size_t k = 0; k < rows.size(); k += 5)
        csv.row({rows[k], rows[k + 1], rows[k + 2], rows[k + 3], rows[k + 4]});
    return 0;
}

int run_nonlinear_map(const CommonArgs& a, std::vector<double> powers, double dmin, double dmax,
                      int dn, double smin, double smax, int sn, const std::string& branch) {
    SimConfig cfg = resolve_config(a);
    if (maybe_dump(a, cfg)) return 0;
    BranchPolicy pol = branch == "down" ? BranchPolicy::FollowFromAbove
                                        : BranchPolicy::FollowFromBelow;
    auto deltas = linspace(hz_to_rad(dmin), hz_to_rad(dmax), dn);
    auto delta_ss = linspace(hz_to_rad(smin), hz_to_rad(smax), sn);
    CsvWriter csv(a.out, {"power_dbm", "delta_hz", "delta_s_hz", "alpha_sq", "chi", "c_alpha",
                          "re_r", "im_r", "branch"});
    for (double p : powers) {
        std::vector<SteadyStateSolution> sols(deltas.size() * delta_ss.size());
        parallel_for(delta_ss.size(), [&](std::size_t j) {
            for (std::size_t i = 0; i < deltas.size(); ++i) {
                DriveParams d = DriveParams::from_power_dbm(p, cfg.device.cavity, deltas[i],
                                                            delta_ss[j]);
                sols[j * deltas.size() + i] =
                    select_branch(solve_occupancy(cfg.device.cavity, cfg.device.spins, d), pol);
            }
        }, a.threads);
        for (std::size_t j = 0; j < delta_ss.size(); ++j) {
            for (std::size_t i = 0; i < deltas.size(); ++i) {
                const auto& s = sols[j * deltas.size() + i];
                csv.row_mixed({format_double(p), format_double(rad_to_hz(deltas[i])),
                               format_double(rad_to_hz(delta_ss[j])), format_double(s.alpha_sq),
                               format_double(s.chi), format_double(s.C_alpha),
                               format_double(s.r.real()), format_double(s.r.imag()),
                               branch_name(s.branch)});
            }
        }
    }
    return 0;
}

int run_simulate(const CommonArgs& a, double power_dbm, double t_end, int bins, int points) {
    SimConfig cfg = resolve_config(a);
    if (maybe_dump(a, cfg)) return 0;
    DriveParams d = DriveParams::from_power_dbm(power_dbm, cfg.device.cavity, cfg.drive.Delta,
                                                cfg.drive.Delta_s);
    BinnedModel model = BinnedModel::make(cfg.device.cavity, cfg.device.spins, bins, d);
    if (t_end <= 0.0) t_end = 60.0 / cfg.device.spins.gamma_p;
    IntegratorConfig icfg;
    icfg.sample_dt = t_end / std::max(points - 1, 1);
    auto res = integrate(model, d, model.polarized_state(), t_end, icfg);
    CsvWriter csv(a.out, {"t_s", "re_alpha", "im_alpha", "alpha_sq", "mean_inversion"});
    for (const auto& s : res.samples)
        csv.row({s.t, s.alpha.real(), s.alpha.imag(), std::norm(s.alpha), s.mean_inversion});
    if (!a.json_out.empty()) {
        write_json(a.json_out, json{{"steps", res.steps},
                                    {"rejected", res.rejected},
                                    {"reached_steady_state", res.reached_steady_state},
                                    {"final_alpha_sq", res.state.alpha_sq()}});
    }
    return 0;
}

int run_noise(const CommonArgs& a, double pmin, double pmax, int pn, double offset_hz,
              double detuned_s_hz, bool double_sided, bool apply_gain) {
    SimConfig cfg = resolve_config(a);
    if (maybe_dump(a, cfg)) return 0;
    double scale = (double_sided ? 0.5 : 1.0) * (apply_gain ? cfg.noise.gain_linear() : 1.0);
    CsvWriter csv(a.out, {"power_dbm", "offset_hz", "psd_v2hz_total", "psd_thermal_port",
                          "psd_thermal_cavity", "psd_thermal_spin", "psd_amplifier", "psd_phase",
                          "f_port", "f_cavity", "f_spin", "cooling_db"});
    for (double p : linspace(pmin, pmax, pn)) {
        DriveParams d = DriveParams::from_power_dbm(p, cfg.device.cavity, cfg.drive.Delta,
                                                    cfg.drive.Delta_s);
        auto sol = select_branch(solve_occupancy(cfg.device.cavity, cfg.device.spins, d),
                                 BranchPolicy::FollowFromBelow);
        auto b = noise_budget(cfg.device.cavity, cfg.device.spins, cfg.noise, d, sol, offset_hz);
        double cool = cooling_depth(cfg.device.cavity, cfg.device.spins, p, cfg.noise, offset_hz,
                                    hz_to_rad(detuned_s_hz));
        csv.row({p, offset_hz, b.total * scale, b.thermal_port * scale, b.thermal_cavity * scale,
                 b.thermal_spin * scale, b.amplifier * scale, b.phase * scale, b.fractions.port,
                 b.fractions.cavity, b.fractions.spin, cool});
    }
    return 0;
}

int run_sensitivity(const CommonArgs& a, bool optimize, double pmin, double pmax, double gpmin_hz,
                    double gpmax_hz, double fmin, double fmax, int fn) {
    SimConfig cfg = resolve_config(a);
    if (maybe_dump(a, cfg)) return 0;
    OperatingPoint op;
    if (optimize) {
        op = optimize_operating_point(cfg.device.cavity, cfg.device.spins, cfg.noise,
                                      {pmin, pmax}, {hz_to_rad(gpmin_hz), hz_to_rad(gpmax_hz)});
    } else {
        op = evaluate_operating_point(cfg.device.cavity, cfg.device.spins, cfg.noise,
                                      cfg.power_dbm, cfg.device.spins.gamma_p);
        op.cooling_db = cooling_depth(cfg.device.cavity, cfg.device.spins, cfg.power_dbm,
                                      cfg.noise);
    }
    auto f_grid = geomspace(fmin, fmax, fn);
    auto eta = broadband_spectrum(cfg.device.cavity, cfg.device.spins, cfg.noise, op, f_grid,
                                  cfg.ambient);
    CsvWriter csv(a.out, {"f_hz", "eta_t_sqrthz"});
    for (std::size_t i = 0; i < f_grid.size(); ++i) csv.row({f_grid[i], eta[i]});
    if (!a.json_out.empty()) {
        SpinEnsembleParams sp = cfg.device.spins;
        sp.gamma_p = op.gamma_p;
        write_json(a.json_out,
                   json{{"optimal_power_dbm", op.power_dbm},
                        {"gamma_p_hz", rad_to_hz(op.gamma_p)},
                        {"eta_ft_sqrthz", op.eta_t_sqrthz * 1e15},
                        {"cooling_db", op.cooling_db},
                        {"signal_v_per_hz", op.s_v_per_hz},
                        {"noise_v2_per_hz", op.l_v2_per_hz},
                        {"on_boundary", op.on_boundary},
                        {"bistable", op.bistable},
                        {"inverse_readout_fidelity",
                         inverse_readout_fidelity(sp, op.eta_t_sqrthz)}});
    }
    return 0;
}

int run_design_map(const CommonArgs& a, const std::string& which, double x0, double x1, int xn,
                   double y0, double y1, int yn, const std::string& contours_ft, double aspect) {
    SimConfig cfg = resolve_config(a);
    if (maybe_dump(a, cfg)) return 0;
    DesignMapOptions opt;
    opt.aspect_ratio = aspect;
    opt.threads = a.threads;
    DesignMap map;
    if (which == "diamond") {
        map = sensitivity_map_diamond(geomspace(x0, x1, xn), geomspace(y0, y1, yn),
                                      cfg.device.cavity, cfg.noise, opt);
        CsvWriter csv(a.out, {"rho_ppm", "vd_cm3", "eta_t_sqrthz", "power_dbm", "rho_used_ppm",
                              "feasible", "bistable"});
        for (const auto& c : map.cells)
            csv.row({c.x, c.y, c.eta_t_sqrthz, c.power_dbm, c.rho_used_ppm,
                     c.feasible ? 1.0 : 0.0, c.bistable ? 1.0 : 0.0});
    } else if (which == "cavity") {
        map = sensitivity_map_cavity(geomspace(x0, x1, xn), geomspace(hz_to_rad(y0),
                                     hz_to_rad(y1), yn), cfg.noise, opt);
        CsvWriter csv(a.out, {"q", "gs_hz", "eta_t_sqrthz", "power_dbm", "rho_used_ppm",
                              "feasible", "bistable"});
        for (const auto& c : map.cells)
            csv.row({c.x, rad_to_hz(c.y), c.eta_t_sqrthz, c.power_dbm, c.rho_used_ppm,
                     c.feasible ? 1.0 : 0.0, c.bistable ? 1.0 : 0.0});
    } else {
        throw ValidationError("design-map: expected 'diamond' or 'cavity'");
    }
    if (!a.json_out.empty()) {
        std::vector<double> levels;
        std::stringstream ss(contours_ft);
        std::string tok;
        while (std::getline(ss, tok, ',')) levels.push_back(std::stod(tok) * 1e-15);
        auto sets = extract_contours(map, levels);
        json j = json::array();
        for (const auto& s : sets) {
            json lines = json::array();
            for (const auto& line : s.polylines) {
                json pts = json::array();
                for (auto& [x, y] : line) pts.push_back({x, which == "cavity" ? rad_to_hz(y) : y});
                lines.push_back(pts);
            }
            j.push_back({{"level_ft_sqrthz", s.level * 1e15}, {"polylines", lines}});
        }
        write_json(a.json_out, j);
    }
    return 0;
}

int run_measure(const CommonArgs& a, const std::string& scenario_path, const std::string& trace_out,
                const std::string& psd_out, bool binary) {
    SimConfig cfg = resolve_config(a);
    if (maybe_dump(a, cfg)) return 0;
    std::ifstream in(scenario_path);
    if (!in) throw ValidationError("measure: cannot open scenario '" + scenario_path + "'");
    json sc;
    try {
        in >> sc;
    } catch (const json::exception& e) {
        throw ValidationError(std::string("measure: scenario parse error: ") + e.what());
    }

    double fs = sc.value("fs_hz", 200e3);
    double duration = sc.value("duration_s", 1.0);
    std::uint64_t seed = sc.value("seed", 1ull);
    double power_dbm = sc.value("power_dbm", cfg.power_dbm);

    DriveParams d = DriveParams::from_power_dbm(power_dbm, cfg.device.cavity);
    auto sol = select_branch(solve_occupancy(cfg.device.cavity, cfg.device.spins, d),
                             BranchPolicy::FollowFromBelow);
    double probe_v = std::sqrt(constants.hbar * d.omega_d(cfg.device.cavity) * cfg.noise.R)
                     * d.beta_in;
    double s_v = std::abs(probe_v * quadrature_slope(cfg.device.cavity, sol) * two_pi);
    auto l_of_f = [&](double f) {
        return noise_budget(cfg.device.cavity, cfg.device.spins, cfg.noise, d, sol, f).total;
    };

    std::string ftype = "none";
    double amp_t = 0.0, freq = 0.0, t_on = 0.0;
    if (sc.contains("field")) {
        const auto& f = sc["field"];
        ftype = f.value("type", "none");
        amp_t = f.value("amplitude_t", 0.0);
        freq = f.value("frequency_hz", 0.0);
        t_on = f.value("t_on_s", 0.0);
    }
    auto b_of_t = [&](double t) -> double {
        if (ftype == "sine") return amp_t * std::sin(two_pi * freq * t);
        if (ftype == "step") return t >= t_on ? amp_t : 0.0;
        return 0.0;
    };

    auto trace = synthesize_trace(s_v, b_of_t, l_of_f, fs, duration, seed);

    if (!trace_out.empty()) {
        if (binary) {
            std::ofstream bf(trace_out, std::ios::binary);
            if (!bf) throw std::runtime_error("cannot open '" + trace_out + "'");
            bf.write(reinterpret_cast<const char*>(trace.samples.data()),
                     static_cast<std::streamsize>(trace.samples.size() * sizeof(double)));
        } else {
            CsvWriter csv(trace_out, {"t_s", "v"});
            for (std::size_t i = 0; i < trace.samples.size(); ++i)
                csv.row({double(i) / fs, trace.samples[i]});
        }
    }

    std::size_t seg = 8192;
    double overlap = 0.5;
    if (sc.contains("welch")) {
        seg = sc["welch"].value("segment", seg);
        overlap = sc["welch"].value("overlap", overlap);
    }
    if (!psd_out.empty()) {
        auto psd = welch_psd(trace, seg, overlap, Window::Hann);
        CsvWriter csv(psd_out, {"f_hz", "psd_v2hz"});
        for (std::size_t i = 0; i < psd.f.size(); ++i) csv.row({psd.f[i], psd.p[i]});
    }

    json rep{{"signal_v_per_hz", s_v}, {"power_dbm", power_dbm}, {"samples", trace.samples.size()}};
    if (ftype == "sine" && sc.value("recover", true)) {
        auto rec = recover_field(trace, s_v, freq);
        rep["recovered_t"] = rec.b_tesla;
        rep["snr"] = rec.snr;
        rep["low_snr_warning"] = rec.low_snr;
        if (sc.contains("reference_t")) {
            double ref = sc["reference_t"].get<double>();
            rep["reference_t"] = ref;
            rep["error_vs_reference"] = (rec.b_tesla - ref) / ref;
        }
        if (sc.contains("gaussmeter_t")) {
            double ref = sc["gaussmeter_t"].get<double>();
            rep["gaussmeter_t"] = ref;
            rep["error_vs_gaussmeter"] = (rec.b_tesla - ref) / ref;
        }
    }
    if (!a.json_out.empty()) write_json(a.json_out, rep);
    else std::cout << rep.dump(2) << "\n";
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"cavity-QED NV-ensemble magnetometer simulator"};
    app.require_subcommand(1);

    CommonArgs common;

    // spectrum
    auto* sp = app.add_subcommand("spectrum", "linear reflection spectroscopy map");
    CommonArgs sp_a;
    add_common(sp, sp_a);
    double sp_dmin = -1.2e6, sp_dmax = 1.2e6, sp_smin = -3.6e6, sp_smax = 3.6e6;
    int sp_dn = 241, sp_sn = 241;
    sp->add_option("--delta-min-hz", sp_dmin);
    sp->add_option("--delta-max-hz", sp_dmax);
    sp->add_option("--delta-points", sp_dn);
    sp->add_option("--delta-s-min-hz", sp_smin);
    sp->add_option("--delta-s-max-hz", sp_smax);
    sp->add_option("--delta-s-points", sp_sn);

    // nonlinear-map
    auto* nl = app.add_subcommand("nonlinear-map", "saturable steady-state reflection map");
    CommonArgs nl_a;
    add_common(nl, nl_a);
    std::vector<double> nl_powers{-50.0, -18.0, -8.0};
    double nl_dmin = -1.2e6, nl_dmax = 1.2e6, nl_smin = -1.2e6, nl_smax = 1.2e6;
    int nl_dn = 81, nl_sn = 81;
    std::string nl_branch = "up";
    nl->add_option("--powers-dbm", nl_powers, "probe powers (dBm)");
    nl->add_option("--delta-min-hz", nl_dmin);
    nl->add_option("--delta-max-hz", nl_dmax);
    nl->add_option("--delta-points", nl_dn);
    nl->add_option("--delta-s-min-hz", nl_smin);
    nl->add_option("--delta-s-max-hz", nl_smax);
    nl->add_option("--delta-s-points", nl_sn);
    nl->add_option("--branch", nl_branch, "up | down sweep history");

    // simulate
    auto* si = app.add_subcommand("simulate", "integrate the equations of motion");
    CommonArgs si_a;
    add_common(si, si_a);
    double si_p = -30.0, si_t = 0.0;
    int si_bins = 201, si_points = 400;
    si->add_option("--power-dbm", si_p);
    si->add_option("--t-end-s", si_t, "0 = auto (60 / gamma_p)");
    si->add_option("--bins", si_bins, "frequency bins per sub-ensemble (odd)");
    si->add_option("--points", si_points, "trajectory samples");

    // noise
    auto* no = app.add_subcommand("noise", "output voltage noise budget vs power");
    CommonArgs no_a;
    add_common(no, no_a);
    double no_pmin = -60.0, no_pmax = -5.0, no_offset = 15e3, no_det = 5e6;
    int no_pn = 56;
    bool no_ds = false, no_gain = false;
    no->add_option("--power-min-dbm", no_pmin);
    no->add_option("--power-max-dbm", no_pmax);
    no->add_option("--power-points", no_pn);
    no->add_option("--offset-hz", no_offset);
    no->add_option("--detuned-delta-s-hz", no_det);
    no->add_flag("--double-sided", no_ds, "report double-sided PSDs (Fig. 3 convention)");
    no->add_flag("--apply-gain", no_gain, "scale PSDs by the chain power gain");

    // sensitivity
    auto* se = app.add_subcommand("sensitivity", "magnetic sensitivity and operating point");
    CommonArgs se_a;
    add_common(se, se_a);
    bool se_opt = false;
    double se_pmin = -45.0, se_pmax = -5.0, se_gpmin = 30e3, se_gpmax = 30e3;
    double se_fmin = 1e3, se_fmax = 50e3;
    int se_fn = 61;
    se->add_flag("--optimize", se_opt, "grid + golden-section search over (P, gamma_p)");
    se->add_option("--power-min-dbm", se_pmin);
    se->add_option("--power-max-dbm", se_pmax);
    se->add_option("--gamma-p-min-hz", se_gpmin);
    se->add_option("--gamma-p-max-hz", se_gpmax);
    se->add_option("--f-min-hz", se_fmin);
    se->add_option("--f-max-hz", se_fmax);
    se->add_option("--f-points", se_fn);

    // design-map
    auto* de = app.add_subcommand("design-map", "sensitivity design-space maps");
    CommonArgs de_a;
    add_common(de, de_a);
    std::string de_which = "diamond";
    double de_x0 = 0.03, de_x1 = 30.0, de_y0 = 1.7e-3, de_y1 = 1.7;
    int de_xn = 13, de_yn = 13;
    std::string de_contours = "2,10,100,1000";
    double de_aspect = 2.2;
    de->add_option("kind", de_which, "diamond | cavity")->required();
    de->add_option("--x-min", de_x0, "rho_ppm or Q minimum");
    de->add_option("--x-max", de_x1);
    de->add_option("--x-points", de_xn);
    de->add_option("--y-min", de_y0, "vd_cm3 or gs_hz minimum");
    de->add_option("--y-max", de_y1);
    de->add_option("--y-points", de_yn);
    de->add_option("--contours", de_contours, "levels in fT/sqrt(Hz), comma separated");
    de->add_option("--aspect", de_aspect, "diamond aspect ratio for the polarization budget");

    // measure
    auto* me = app.add_subcommand("measure", "synthesize a detector trace and recover the field");
    CommonArgs me_a;
    add_common(me, me_a);
    std::string me_scenario, me_trace_out, me_psd_out = "psd.csv";
    bool me_binary = false;
    me->add_option("--scenario", me_scenario, "scenario JSON")->required();
    me->add_option("--trace-out", me_trace_out, "write the raw trace (CSV, or .f64 with --binary)");
    me->add_option("--psd-out", me_psd_out, "Welch PSD CSV");
    me->add_flag("--binary", me_binary, "trace as raw little-endian float64");

    CLI11_PARSE(app, argc, argv);

    try {
        if (sp->parsed()) {
            set_thread_count(sp_a.threads);
            return run_spectrum(sp_a, sp_dmin, sp_dmax, sp_dn, sp_smin, sp_smax, sp_sn);
        }
        if (nl->parsed()) {
            set_thread_count(nl_a.threads);
            return run_nonlinear_map(nl_a, nl_powers, nl_dmin, nl_dmax, nl_dn, nl_smin, nl_smax,
                                     nl_sn, nl_branch);
        }
        if (si->parsed()) {
            set_thread_count(si_a.threads);
            return run_simulate(si_a, si_p, si_t, si_bins, si_points);
        }
        if (no->parsed()) {
            set_thread_count(no_a.threads);
            return run_noise(no_a, no_pmin, no_pmax, no_pn, no_offset, no_det, no_ds, no_gain);
        }
        if (se->parsed()) {
            set_thread_count(se_a.threads);
            return run_sensitivity(se_a, se_opt, se_pmin, se_pmax, se_gpmin, se_gpmax, se_fmin,
                                   se_fmax, se_fn);
        }
        if (de->parsed()) {
            set_thread_count(de_a.threads);
            return run_design_map(de_a, de_which, de_x0, de_x1, de_xn, de_y0, de_y1, de_yn,
                                  de_contours, de_aspect);
        }
        if (me->parsed()) {
            set_thread_count(me_a.threads);
            return run_measure(me_a, me_scenario, me_trace_out, me_psd_out, me_binary);
        }
    } catch (const ValidationError& e) {
        std::cerr << "validation error: " << e.what() << "\n";
        return 2;
    } catch (const NumericalError& e) {
        std::cerr << "numerical error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 3;
    }
    return 0;
}
