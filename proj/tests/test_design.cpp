#include <catch2/catch_amalgamated.hpp>

#include "cqed/design.hpp"

using namespace cqed;
using Catch::Approx;

TEST_CASE("calibrate_gs", "[design]") {
    SECTION("reference diamond bookkeeping") {
        REQUIRE(ensemble_size(4.0, 8.1e-3) * 12.0 == Approx(5.7024e15).epsilon(1e-12));
        REQUIRE(ensemble_size(4.0, 8.1e-3) == Approx(4.752e14).epsilon(1e-12));
        double gs0 = calibrate_gs(hz_to_rad(190e3), 4.0, 8.1e-3);
        REQUIRE(gs0 == Approx(0.05476401154283427).epsilon(1e-12));
    }
    SECTION("doubling the diamond multiplies g by sqrt(2)") {
        double n1 = ensemble_size(4.0, 8.1e-3), n2 = ensemble_size(4.0, 2.0 * 8.1e-3);
        REQUIRE(std::sqrt(n2 / n1) == Approx(std::sqrt(2.0)).epsilon(1e-12));
    }
    SECTION("halving the mode volume multiplies g_s by sqrt(2)") {
        REQUIRE(g_s_for_volume(1.7e-6 / 2.0) / g_s_for_volume(1.7e-6)
                == Approx(std::sqrt(2.0)).epsilon(1e-12));
    }
}

TEST_CASE("linewidth_from_density", "[design]") {
    REQUIRE(linewidth_from_density(4.0) == Approx(hz_to_rad(330e3)).epsilon(1e-12));
    REQUIRE(linewidth_from_density(1.0) == Approx(hz_to_rad(82.5e3)).epsilon(1e-12));
    REQUIRE(linewidth_from_density(10.0) == Approx(hz_to_rad(825e3)).epsilon(1e-12));
    REQUIRE_THROWS_AS(linewidth_from_density(0.0), ValidationError);
}

TEST_CASE("polarization_feasible", "[design]") {
    SECTION("the measured diamond is comfortably polarizable") {
        REQUIRE(polarization_feasible(4.0, 8.1e-3));       // 0.0324 <= 0.49
    }
    SECTION("boundary is feasible") {
        REQUIRE(polarization_feasible(0.49 / 1.7, 1.7));
    }
    SECTION("a filled cavity at 1 ppm is not") {
        REQUIRE_FALSE(polarization_feasible(1.0, 1.7));    // 1.7 > 0.49
    }
    SECTION("larger aspect ratios relax the budget linearly") {
        REQUIRE_FALSE(polarization_feasible(1.0, 0.6, 2.2));
        REQUIRE(polarization_feasible(1.0, 0.6, 4.4));     // budget doubles
    }
}

TEST_CASE("diamond design map", "[design]") {
    CavityParams cav = paper_device().cavity;
    NoiseEnvironment env;
    DesignMapOptions opt;
    opt.power_grid = 40;
    opt.refine_iters = 20;

    std::vector<double> rho{0.05, 0.2, 0.8, 3.2};
    std::vector<double> vd{0.0081, 0.081, 0.52, 1.7};
    auto map = sensitivity_map_diamond(rho, vd, cav, env, opt);

    SECTION("grid bookkeeping and V_d bound") {
        REQUIRE(map.cells.size() == rho.size() * vd.size());
        REQUIRE_THROWS_AS(sensitivity_map_diamond({1.0}, {2.0}, cav, env, opt), ValidationError);
        REQUIRE_THROWS_AS(sensitivity_map_diamond({}, vd, cav, env, opt), ValidationError);
    }
    SECTION("eta is nonincreasing in V_d at fixed feasible rho") {
        for (std::size_t ix = 0; ix < rho.size(); ++ix) {
            for (std::size_t iy = 1; iy < vd.size(); ++iy) {
                if (!map.at(ix, iy).feasible || !map.at(ix, iy - 1).feasible) continue;
                REQUIRE(map.at(ix, iy).eta_t_sqrthz
                        <= map.at(ix, iy - 1).eta_t_sqrthz * 1.01);
            }
        }
    }
    SECTION("infeasible cells report the clipped density, never dropped") {
        const auto& c = map.at(3, 3);  // rho = 3.2, vd = 1.7 -> 5.44 > 0.49
        REQUIRE_FALSE(c.feasible);
        REQUIRE(c.rho_used_ppm == Approx(0.49 / 1.7).epsilon(1e-12));
        REQUIRE(std::isfinite(c.eta_t_sqrthz));
    }
    SECTION("contour levels nest") {
        std::vector<double> levels{2e-15, 10e-15, 100e-15, 1000e-15};
        for (std::size_t l = 1; l < levels.size(); ++l) {
            for (const auto& c : map.cells) {
                if (c.eta_t_sqrthz <= levels[l - 1]) REQUIRE(c.eta_t_sqrthz <= levels[l]);
            }
        }
        auto contours = extract_contours(map, levels);
        REQUIRE(contours.size() == 4);
    }
    SECTION("maps are deterministic") {
        auto again = sensitivity_map_diamond(rho, vd, cav, env, opt);
        for (std::size_t i = 0; i < map.cells.size(); ++i) {
            REQUIRE(again.cells[i].eta_t_sqrthz == map.cells[i].eta_t_sqrthz);
            REQUIRE(again.cells[i].power_dbm == map.cells[i].power_dbm);
        }
    }
}

TEST_CASE("current-device cell goes through the same code path as a direct solve",
          "[design]") {
    DeviceParams dev = paper_device();
    NoiseEnvironment env;
    DesignMapOptions opt;
    opt.power_grid = 40;
    opt.refine_iters = 20;
    auto map = sensitivity_map_diamond({4.0}, {8.1e-3}, dev.cavity, env, opt);
    SpinEnsembleParams spins = dev.spins;
    spins.gamma_p = opt.gamma_p_cap;
    auto direct = detail::optimize_cell(dev.cavity, spins, env, opt);
    REQUIRE(map.cells[0].eta_t_sqrthz == Approx(direct.eta_t_sqrthz).epsilon(1e-6));

    // and the cell reproduces the device sensitivity within the headline band
    REQUIRE(map.cells[0].eta_t_sqrthz > 0.7 * 580e-15);
    REQUIRE(map.cells[0].eta_t_sqrthz < 1.3 * 580e-15);
}

TEST_CASE("cavity design map", "[design]") {
    NoiseEnvironment env;
    DesignMapOptions opt;
    opt.power_grid = 32;
    opt.refine_iters = 16;
    opt.rho_grid = 12;
    double gs0 = g_s_for_volume(1.7e-6);
    auto map = sensitivity_map_cavity({1.1e4, 2.2e4}, {gs0, 4.0 * gs0}, env, opt);
    REQUIRE(map.cells.size() == 4);
    for (const auto& c : map.cells) {
        REQUIRE(std::isfinite(c.eta_t_sqrthz));
        REQUIRE(c.eta_t_sqrthz > 0.0);
        REQUIRE(c.rho_used_ppm > 0.0);
    }
    // per-cell densities respect the polarization budget of their cavities
    double gs1 = map.y_grid[1];
    double v1_cm3 = 1.7 * (gs0 / gs1) * (gs0 / gs1);
    REQUIRE(map.at(0, 1).rho_used_ppm <= rho_budget(v1_cm3) * (1.0 + 1e-12));
    REQUIRE(map.at(0, 0).rho_used_ppm <= rho_budget(1.7) * (1.0 + 1e-12));
}

TEST_CASE("contour chaining produces connected polylines", "[design]") {
    // synthetic bowl: eta = r^2 around the grid center
    DesignMap map;
    map.x_grid = {0, 1, 2, 3, 4};
    map.y_grid = {0, 1, 2, 3, 4};
    map.cells.resize(25);
    for (std::size_t j = 0; j < 5; ++j)
        for (std::size_t i = 0; i < 5; ++i) {
            DesignCell c;
            c.x = double(i);
            c.y = double(j);
            c.eta_t_sqrthz = (c.x - 2) * (c.x - 2) + (c.y - 2) * (c.y - 2);
            map.cells[j * 5 + i] = c;
        }
    auto sets = extract_contours(map, {1.5});
    REQUIRE(sets.size() == 1);
    REQUIRE_FALSE(sets[0].polylines.empty());
    std::size_t total_pts = 0;
    for (auto& line : sets[0].polylines) total_pts += line.size();
    REQUIRE(total_pts >= 8);  // a closed-ish ring around the center
}
