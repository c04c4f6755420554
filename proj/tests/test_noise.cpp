#include <catch2/catch_amalgamated.hpp>

#include <random>

#include "cqed/noise.hpp"

using namespace cqed;
using Catch::Approx;

namespace {
SpinEnsembleParams single_line() {
    SpinEnsembleParams s = paper_device().spins;
    s.n_hyperfine = 1;
    return s;
}

SteadyStateSolution linear_solution(const DeviceParams& dev, const SpinEnsembleParams& spins) {
    DriveParams weak = DriveParams::from_power_dbm(-90.0, dev.cavity);
    return make_solution(dev.cavity, spins, weak, 0.0);
}
} // namespace

TEST_CASE("spin_noise_temperature", "[noise]") {
    SpinEnsembleParams s = paper_device().spins;

    SECTION("paper preset at 300 K ambient") {
        REQUIRE(spin_noise_temperature(s, 300.0) == Approx(27.2727272727).epsilon(1e-9));
    }
    SECTION("no pump leaves the ensemble at ambient") {
        s.gamma_p = 0.0;
        REQUIRE(spin_noise_temperature(s, 300.0) == Approx(300.0).epsilon(1e-12));
    }
    SECTION("infinite pump freezes the ensemble out") {
        s.gamma_p = 1e12 * s.gamma_0;
        REQUIRE(spin_noise_temperature(s, 300.0) < 1e-9 * 300.0);
    }
}

TEST_CASE("channel_fractions", "[noise]") {
    DeviceParams dev = paper_device();

    SECTION("two-channel beamsplitter at g = 0") {
        SpinEnsembleParams s = dev.spins;
        s.N = 0.0;
        auto sol = linear_solution(dev, s);
        auto f = channel_fractions(dev.cavity, s, sol, 0.0, 0.0);
        double k = dev.cavity.kappa();
        REQUIRE(f.spin == 0.0);
        REQUIRE(f.port == Approx(std::pow(1.0 - 2.0 * dev.cavity.kappa_c1 / k, 2)).epsilon(1e-12));
        REQUIRE(f.cavity
                == Approx(4.0 * dev.cavity.kappa_c1 * dev.cavity.kappa_c / (k * k)).epsilon(1e-12));
        REQUIRE(f.sum() == Approx(1.0).margin(1e-14));
    }
    SECTION("linear-regime resonant fractions, single sub-ensemble") {
        SpinEnsembleParams s = single_line();
        auto f = channel_fractions(dev.cavity, s, linear_solution(dev, s), 0.0, 0.0);
        // kappa_s = 4 g^2 / (Gamma + gamma) = 2pi x 397.8 kHz
        REQUIRE(f.port == Approx(0.3807285521424196).epsilon(1e-9));
        REQUIRE(f.cavity == Approx(0.1525310278427852).epsilon(1e-9));
        REQUIRE(f.spin == Approx(0.4667404200147951).epsilon(1e-9));
    }
    SECTION("sum rule holds at random detunings and operating points") {
        std::mt19937_64 rng(7);
        std::uniform_real_distribution<double> u(-1.0, 1.0);
        for (int i = 0; i < 1000; ++i) {
            SpinEnsembleParams s = dev.spins;
            s.Gamma = hz_to_rad(330e3 * std::pow(10.0, u(rng)));
            s.N = 4.752e14 * std::pow(10.0, u(rng));
            CavityParams cav = dev.cavity;
            cav.kappa_c = hz_to_rad(130e3 * std::pow(10.0, u(rng)));
            cav.kappa_c1 = hz_to_rad(125e3 * std::pow(10.0, u(rng)));
            DriveParams d = DriveParams::from_power_dbm(-60.0 + 50.0 * u(rng), cav,
                                                        hz_to_rad(1e6 * u(rng)),
                                                        hz_to_rad(3e6 * u(rng)));
            auto sol = select_branch(solve_occupancy(cav, s, d), BranchPolicy::FollowFromBelow);
            auto f = channel_fractions(cav, s, sol, d.Delta + two_pi * 15e3 * u(rng), d.Delta_s);
            REQUIRE(std::abs(f.sum() - 1.0) < 1e-12);
        }
    }
}

TEST_CASE("thermal_psd", "[noise]") {
    NoiseEnvironment env;
    env.amp_noise_figure_db = 0.0;  // isolate the bath mixture

    SECTION("equal baths collapse to k_B T R, fractions irrelevant") {
        env.T_port = env.T_cavity = 407.0;
        for (double fs : {0.0, 0.2, 0.7}) {
            ChannelFractions f{1.0 - fs - 0.1, 0.1, fs};
            REQUIRE(thermal_psd(env, f, 407.0)
                    == Approx(constants.k_B * 407.0 * env.R).margin(1e-30));
        }
    }
    SECTION("T = 407 K into 50 ohm") {
        REQUIRE(constants.k_B * 407.0 * 50.0 == Approx(2.809620715e-19).epsilon(1e-9));
    }
    SECTION("zero-temperature spin bath suppression") {
        env.T_port = env.T_cavity = 407.0;
        ChannelFractions f{0.3807285521424196, 0.1525310278427852, 0.4667404200147951};
        double cold = thermal_psd(env, f, 0.0);
        double hot = constants.k_B * 407.0 * env.R;
        REQUIRE(10.0 * std::log10(cold / hot) == Approx(-2.7306133).epsilon(1e-5));
    }
    SECTION("PSD is nondecreasing in the spin temperature") {
        ChannelFractions f{0.38, 0.15, 0.47};
        double prev = 0.0;
        for (double t = 0.0; t <= 400.0; t += 50.0) {
            double v = thermal_psd(env, f, t);
            REQUIRE(v >= prev);
            prev = v;
        }
    }
}

TEST_CASE("phase_noise_psd", "[noise]") {
    NoiseEnvironment env;

    SECTION("empty spectrum is a validation error") {
        REQUIRE_THROWS_AS(phase_noise_psd(env, 15e3, 1e-3, 0.1), ValidationError);
    }
    env.phase_noise = {{1e3, -120.0}, {10e3, -130.0}, {100e3, -140.0}};
    SECTION("no carrier, no phase noise") {
        REQUIRE(phase_noise_psd(env, 15e3, 0.0, 0.5) == 0.0);
    }
    SECTION("carrier suppression cancels the source phase noise") {
        REQUIRE(phase_noise_psd(env, 15e3, 1e-3, 0.0) == 0.0);
    }
    SECTION("log-log interpolation and extrapolation flag") {
        bool extrap = false;
        REQUIRE(phase_noise_dbc(env, 10e3, &extrap) == Approx(-130.0).margin(1e-9));
        REQUIRE_FALSE(extrap);
        double mid = phase_noise_dbc(env, std::sqrt(1e3 * 10e3), &extrap);
        REQUIRE(mid == Approx(-125.0).margin(1e-9));
        phase_noise_dbc(env, 1e6, &extrap);
        REQUIRE(extrap);
    }
}

TEST_CASE("noise budget and equilibrium null", "[noise]") {
    DeviceParams dev = paper_device();
    NoiseEnvironment env;

    SECTION("components add up") {
        DriveParams d = DriveParams::from_power_dbm(-30.0, dev.cavity);
        auto sol = select_branch(solve_occupancy(dev.cavity, dev.spins, d),
                                 BranchPolicy::FollowFromBelow);
        auto b = noise_budget(dev.cavity, dev.spins, env, d, sol, 15e3);
        REQUIRE(b.total
                == Approx(b.thermal_port + b.thermal_cavity + b.thermal_spin + b.amplifier
                          + b.phase).epsilon(1e-12));
        REQUIRE(std::abs(b.fractions.sum() - 1.0) < 1e-12);
    }
    SECTION("all baths equal gives exactly k_B T R plus the amplifier term") {
        NoiseEnvironment eq = env;
        eq.T_port = eq.T_cavity = 320.0;
        // spin bath lands exactly at 320 K: T_ambient gamma_0/(gamma_0+gamma_p)
        SpinEnsembleParams s = dev.spins;
        eq.T_ambient = 320.0 * (s.gamma_0 + s.gamma_p) / s.gamma_0;
        for (double p : {-60.0, -20.0, -10.0}) {
            DriveParams d = DriveParams::from_power_dbm(p, dev.cavity);
            auto sol = select_branch(solve_occupancy(dev.cavity, s, d),
                                     BranchPolicy::FollowFromBelow);
            auto b = noise_budget(dev.cavity, s, eq, d, sol, 15e3);
            double want = constants.k_B * eq.R * (320.0 + eq.amp_temperature());
            REQUIRE(b.total == Approx(want).epsilon(1e-12));
        }
    }
}

TEST_CASE("cooling_depth", "[noise]") {
    DeviceParams dev = paper_device();
    NoiseEnvironment env;

    SECTION("detuned baseline reproduces the 407 K system temperature") {
        DriveParams d = DriveParams::from_power_dbm(-60.0, dev.cavity, 0.0, two_pi * 5e6);
        auto sol = select_branch(solve_occupancy(dev.cavity, dev.spins, d),
                                 BranchPolicy::FollowFromBelow);
        auto b = noise_budget(dev.cavity, dev.spins, env, d, sol, 15e3);
        // residual spin coupling at 5 MHz detuning still cools ~1.4%
        REQUIRE(b.total == Approx(constants.k_B * 407.0 * env.R).epsilon(0.02));
    }
    SECTION("low-power suppression near the measured 1.98 dB") {
        double depth = cooling_depth(dev.cavity, dev.spins, -60.0, env);
        REQUIRE(std::abs(depth - 1.98) < 0.1);
        REQUIRE(depth == Approx(1.9336).margin(0.02));  // this model, hyperfine triplet
    }
    SECTION("bare mode-cooling depth") {
        double bare = cooling_depth(dev.cavity, dev.spins, -60.0, env, 15e3, two_pi * 5e6,
                                    CoolingModel::Bare);
        REQUIRE(bare == Approx(2.7174).margin(0.01));  // hyperfine triplet
        REQUIRE(bare == Approx(2.73).margin(0.05));
        SpinEnsembleParams s = single_line();
        double bare1 = cooling_depth(dev.cavity, s, -60.0, env, 15e3, two_pi * 5e6,
                                     CoolingModel::Bare);
        // 2.7306 dB at zero offset; the 15 kHz measurement offset adds 0.005
        REQUIRE(bare1 == Approx(2.7360).margin(0.001));
    }
    SECTION("cooling quenches above saturation") {
        double ps = saturation_threshold(dev.cavity, dev.spins).power_dbm;
        REQUIRE(cooling_depth(dev.cavity, dev.spins, ps + 15.0, env) <= 0.1);
        REQUIRE(cooling_depth(dev.cavity, dev.spins, ps + 25.0, env) <= 0.01);
    }
    SECTION("cooling depth is nonincreasing in power") {
        double prev = 1e9;
        for (double p : {-60.0, -40.0, -30.0, -25.0, -20.0, -15.0, -10.0, -5.0, 0.0}) {
            double depth = cooling_depth(dev.cavity, dev.spins, p, env);
            REQUIRE(depth <= prev + 1e-9);
            prev = depth;
        }
    }
}

TEST_CASE("phase noise crossover with a flat -130 dBc/Hz source", "[noise]") {
    DeviceParams dev = paper_device();
    NoiseEnvironment env;
    env.phase_noise = {{1e3, -130.0}, {100e3, -130.0}};
    auto phase_minus_thermal = [&](double p_dbm) {
        DriveParams d = DriveParams::from_power_dbm(p_dbm, dev.cavity);
        auto sol = select_branch(solve_occupancy(dev.cavity, dev.spins, d),
                                 BranchPolicy::FollowFromBelow);
        auto b = noise_budget(dev.cavity, dev.spins, env, d, sol, 15e3);
        return b.phase - (b.total - b.phase);
    };
    double lo = -60.0, hi = 0.0;
    REQUIRE(phase_minus_thermal(lo) < 0.0);
    REQUIRE(phase_minus_thermal(hi) > 0.0);
    for (int i = 0; i < 60; ++i) {
        double m = 0.5 * (lo + hi);
        (phase_minus_thermal(m) < 0.0 ? lo : hi) = m;
    }
    double crossover = 0.5 * (lo + hi);
    // with the geometric g_s calibration the device stays reflective much longer
    // than the paper's -15 dBm anchor, pushing the crossover down
    REQUIRE(crossover == Approx(-40.0).margin(2.5));
}
