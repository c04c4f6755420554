#pragma once

#include <cmath>
#include <limits>
#include <utility>
#include <vector>

#include "cqed/params.hpp"
#include "cqed/sensitivity.hpp"
#include "cqed/threading.hpp"

namespace cqed {

struct DiamondDesign {
    double rho_ppm = 0.0;
    double vd_cm3 = 0.0;
    double aspect_ratio = reference_aspect_ratio;
    double fill(double v_cavity_cm3) const { return vd_cm3 / v_cavity_cm3; }
};

struct CavityDesign {
    double q_unloaded = 0.0;
    double v_cm3 = 0.0;
    double g_s = 0.0;            // rad/s
    double coupling_ratio = 125.0 / 130.0;  // kappa_c1 / kappa_c of the reference device
};

/// Single-spin coupling of the reference device from its diamond geometry:
/// N = rho n_C V_d f_orient f_hyperfine, g_s0 = g / sqrt(N).
inline double calibrate_gs(double g_collective, double rho_ppm, double vd_cm3) {
    double n = ensemble_size(rho_ppm, vd_cm3);
    if (!(n > 0.0)) throw ValidationError("calibrate_gs: empty ensemble");
    return g_collective / std::sqrt(n);
}

/// Gamma = a rho with a = 82.5 kHz/ppm.
inline double linewidth_from_density(double rho_ppm) {
    if (!(rho_ppm > 0.0)) throw ValidationError("linewidth_from_density: rho must be positive");
    return two_pi * linewidth_per_ppm_hz * rho_ppm;
}

/// Optical polarization budget rho V_d <= 0.49 cm^3 ppm at aspect ratio 2.2,
/// relaxed linearly for larger aspect ratios.
inline bool polarization_feasible(double rho_ppm, double vd_cm3,
                                  double aspect_ratio = reference_aspect_ratio) {
    if (!(rho_ppm > 0.0) || !(vd_cm3 > 0.0) || !(aspect_ratio > 0.0))
        throw ValidationError("polarization_feasible: inputs must be positive");
    return rho_ppm * vd_cm3 <= polarization_budget_cm3_ppm * (aspect_ratio / reference_aspect_ratio);
}

inline double rho_budget(double vd_cm3, double aspect_ratio = reference_aspect_ratio) {
    return polarization_budget_cm3_ppm * (aspect_ratio / reference_aspect_ratio) / vd_cm3;
}

struct DesignCell {
    double x = 0.0;              // rho_ppm (diamond map) or Q (cavity map)
    double y = 0.0;              // vd_cm3 (diamond map) or g_s rad/s (cavity map)
    double eta_t_sqrthz = 0.0;
    double power_dbm = 0.0;
    double rho_used_ppm = 0.0;   // constraint-clipped density actually evaluated
    bool feasible = true;
    bool bistable = false;
};

struct DesignMapOptions {
    double gamma_p_cap = two_pi * 30e3;   // current laser
    double aspect_ratio = reference_aspect_ratio;
    std::pair<double, double> power_bounds_dbm = {-50.0, 20.0};
    int power_grid = 56;
    int refine_iters = 32;
    int rho_grid = 24;                    // cavity map: per-cell density search
    double f_offset = 15e3;
    unsigned threads = 0;                 // 0 = library default
};

namespace detail {

/// eta minimized over power at gamma_p fixed to the cap; any stable root may be
/// the operating point (hysteresis protocols reach both extremal branches).
inline DesignCell optimize_cell(const CavityParams& cav, SpinEnsembleParams spins,
                                const NoiseEnvironment& env, const DesignMapOptions& opt) {
    spins.gamma_p = opt.gamma_p_cap;
    DesignCell cell;
    auto eval = [&](double p_dbm, BranchPolicy pol) {
        return evaluate_operating_point(cav, spins, env, p_dbm, spins.gamma_p, opt.f_offset, pol);
    };
    OperatingPoint best;
    best.eta_t_sqrthz = std::numeric_limits<double>::infinity();
    for (BranchPolicy pol : {BranchPolicy::FollowFromBelow, BranchPolicy::FollowFromAbove}) {
        double lo = opt.power_bounds_dbm.first, hi = opt.power_bounds_dbm.second;
        double bp = lo;
        double be = std::numeric_limits<double>::infinity();
        for (int i = 0; i < opt.power_grid; ++i) {
            double p = lo + (hi - lo) * i / (opt.power_grid - 1);
            OperatingPoint op = eval(p, pol);
            if (op.eta_t_sqrthz < be) { be = op.eta_t_sqrthz; bp = p; }
        }
        double dp = (hi - lo) / (opt.power_grid - 1);
        bp = detail::golden_min(
            [&](double p) { return eval(p, pol).eta_t_sqrthz; },
            std::max(lo, bp - dp), std::min(hi, bp + dp), opt.refine_iters);
        OperatingPoint op = eval(bp, pol);
        if (op.eta_t_sqrthz < best.eta_t_sqrthz) best = op;
        cell.bistable = cell.bistable || op.bistable;
    }
    cell.eta_t_sqrthz = best.eta_t_sqrthz;
    cell.power_dbm = best.power_dbm;
    return cell;
}

} // namespace detail

struct DesignMap {
    std::vector<double> x_grid;   // rho_ppm or Q
    std::vector<double> y_grid;   // vd_cm3 or g_s
    std::vector<DesignCell> cells;  // row-major, x fastest

    const DesignCell& at(std::size_t ix, std::size_t iy) const {
        return cells[iy * x_grid.size() + ix];
    }
};

/// Fig. 5a: sensitivity over diamond density and volume in the reference cavity.
/// Infeasible cells are evaluated at the constraint-clipped density and flagged.
inline DesignMap sensitivity_map_diamond(const std::vector<double>& rho_grid_ppm,
                                         const std::vector<double>& vd_grid_cm3,
                                         const CavityParams& cav, const NoiseEnvironment& env,
                                         const DesignMapOptions& opt = {}) {
    if (rho_grid_ppm.empty() || vd_grid_cm3.empty())
        throw ValidationError("sensitivity_map_diamond: empty grid");
    double v_cm3 = cav.V * 1e6;
    for (double vd : vd_grid_cm3)
        if (vd > v_cm3 * (1.0 + 1e-12))
            throw ValidationError("sensitivity_map_diamond: V_d exceeds the cavity mode volume");
    DesignMap map{rho_grid_ppm, vd_grid_cm3, {}};
    map.cells.resize(rho_grid_ppm.size() * vd_grid_cm3.size());
    double gs = g_s_for_volume(cav.V);
    parallel_for(map.cells.size(), [&](std::size_t idx) {
        std::size_t ix = idx % rho_grid_ppm.size();
        std::size_t iy = idx / rho_grid_ppm.size();
        double rho = rho_grid_ppm[ix], vd = vd_grid_cm3[iy];
        DesignCell cell;
        cell.x = rho;
        cell.y = vd;
        cell.feasible = polarization_feasible(rho, vd, opt.aspect_ratio);
        cell.rho_used_ppm = cell.feasible ? rho : rho_budget(vd, opt.aspect_ratio);
        SpinEnsembleParams spins = paper_device().spins;
        spins.g_s = gs;
        spins.N = ensemble_size(cell.rho_used_ppm, vd);
        spins.Gamma = linewidth_from_density(cell.rho_used_ppm);
        DesignCell solved = detail::optimize_cell(cav, spins, env, opt);
        cell.eta_t_sqrthz = solved.eta_t_sqrthz;
        cell.power_dbm = solved.power_dbm;
        cell.bistable = solved.bistable;
        map.cells[idx] = cell;
    }, opt.threads);
    return map;
}

/// Fig. 5b: sensitivity over unloaded Q and single-spin coupling; V follows
/// g_s by the mode-volume scaling, diamond fills the cavity, density optimized
/// per cell under the polarization constraint.
inline DesignMap sensitivity_map_cavity(const std::vector<double>& q_grid,
                                        const std::vector<double>& gs_grid,
                                        const NoiseEnvironment& env,
                                        const DesignMapOptions& opt = {}) {
    if (q_grid.empty() || gs_grid.empty())
        throw ValidationError("sensitivity_map_cavity: empty grid");
    DesignMap map{q_grid, gs_grid, {}};
    map.cells.resize(q_grid.size() * gs_grid.size());
    CavityParams ref;
    double gs0 = g_s_for_volume(ref.V);
    parallel_for(map.cells.size(), [&](std::size_t idx) {
        std::size_t ix = idx % q_grid.size();
        std::size_t iy = idx / q_grid.size();
        double q = q_grid[ix], gs = gs_grid[iy];
        CavityParams cav = ref;
        cav.V = ref.V * (gs0 / gs) * (gs0 / gs);
        cav.kappa_c = cav.omega_c / q;
        cav.kappa_c1 = cav.kappa_c * (125.0 / 130.0);
        double vd_cm3 = cav.V * 1e6;  // unit fill
        double rho_max = rho_budget(vd_cm3, opt.aspect_ratio);
        DesignCell cell;
        cell.x = q;
        cell.y = gs;
        cell.feasible = true;
        DesignCell best;
        best.eta_t_sqrthz = std::numeric_limits<double>::infinity();
        double best_rho = rho_max;
        for (int k = 0; k < opt.rho_grid; ++k) {
            double rho = rho_max * std::pow(10.0, -3.0 * (1.0 - double(k) / (opt.rho_grid - 1)));
            SpinEnsembleParams spins = paper_device().spins;
            spins.g_s = gs;
            spins.N = ensemble_size(rho, vd_cm3);
            spins.Gamma = linewidth_from_density(rho);
            DesignCell c = detail::optimize_cell(cav, spins, env, opt);
            if (c.eta_t_sqrthz < best.eta_t_sqrthz) { best = c; best_rho = rho; }
        }
        cell.eta_t_sqrthz = best.eta_t_sqrthz;
        cell.power_dbm = best.power_dbm;
        cell.bistable = best.bistable;
        cell.rho_used_ppm = best_rho;
        map.cells[idx] = cell;
    }, opt.threads);
    return map;
}

// ---------------------------------------------------------------------------
// Contours (marching squares on log10(eta))
// ---------------------------------------------------------------------------

struct ContourSet {
    double level = 0.0;  // T/sqrt(Hz)
    std::vector<std::vector<std::pair<double, double>>> polylines;  // (x, y) chains
};

namespace detail {

struct Seg { double x0, y0, x1, y1; };

inline std::vector<std::vector<std::pair<double, double>>> chain_segments(std::vector<Seg> segs) {
    std::vector<std::vector<std::pair<double, double>>> out;
    auto close = [](double a, double b) { return std::abs(a - b) <= 1e-12 * (std::abs(a) + std::abs(b) + 1e-300); };
    while (!segs.empty()) {
        std::vector<std::pair<double, double>> line{{segs.back().x0, segs.back().y0},
                                                    {segs.back().x1, segs.back().y1}};
        segs.pop_back();
        bool grew = true;
        while (grew) {
            grew = false;
            for (std::size_t i = 0; i < segs.size(); ++i) {
                auto& s = segs[i];
                auto& head = line.front();
                auto& tail = line.back();
                if (close(s.x0, tail.first) && close(s.y0, tail.second)) {
                    line.push_back({s.x1, s.y1});
                } else if (close(s.x1, tail.first) && close(s.y1, tail.second)) {
                    line.push_back({s.x0, s.y0});
                } else if (close(s.x1, head.first) && close(s.y1, head.second)) {
                    line.insert(line.begin(), {s.x0, s.y0});
                } else if (close(s.x0, head.first) && close(s.y0, head.second)) {
                    line.insert(line.begin(), {s.x1, s.y1});
                } else {
                    continue;
                }
                segs.erase(segs.begin() + static_cast<std::ptrdiff_t>(i));
                grew = true;
                break;
            }
        }
        out.push_back(std::move(line));
    }
    return out;
}

} // namespace detail

/// Marching-squares contours of eta over the map grid at the given levels.
inline std::vector<ContourSet> extract_contours(const DesignMap& map,
                                                const std::vector<double>& levels) {
    std::vector<ContourSet> out;
    std::size_t nx = map.x_grid.size(), ny = map.y_grid.size();
    for (double lvl : levels) {
        std::vector<detail::Seg> segs;
        for (std::size_t j = 0; j + 1 < ny; ++j) {
            for (std::size_t i = 0; i + 1 < nx; ++i) {
                double v00 = map.at(i, j).eta_t_sqrthz, v10 = map.at(i + 1, j).eta_t_sqrthz;
                double v01 = map.at(i, j + 1).eta_t_sqrthz, v11 = map.at(i + 1, j + 1).eta_t_sqrthz;
                double x0 = map.x_grid[i], x1 = map.x_grid[i + 1];
                double y0 = map.y_grid[j], y1 = map.y_grid[j + 1];
                auto lerp = [&](double a, double b, double va, double vb) {
                    return a + (b - a) * (lvl - va) / (vb - va);
                };
                std::vector<std::pair<double, double>> pts;
                if ((v00 - lvl) * (v10 - lvl) < 0.0) pts.push_back({lerp(x0, x1, v00, v10), y0});
                if ((v10 - lvl) * (v11 - lvl) < 0.0) pts.push_back({x1, lerp(y0, y1, v10, v11)});
                if ((v01 - lvl) * (v11 - lvl) < 0.0) pts.push_back({lerp(x0, x1, v01, v11), y1});
                if ((v00 - lvl) * (v01 - lvl) < 0.0) pts.push_back({x0, lerp(y0, y1, v00, v01)});
                if (pts.size() >= 2)
                    segs.push_back({pts[0].first, pts[0].second, pts[1].first, pts[1].second});
                if (pts.size() == 4)
                    segs.push_back({pts[2].first, pts[2].second, pts[3].first, pts[3].second});
            }
        }
        out.push_back({lvl, detail::chain_segments(std::move(segs))});
    }
    return out;
}

} // namespace cqed
