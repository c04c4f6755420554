#include <catch2/catch_amalgamated.hpp>

#include "cqed/constants.hpp"
#include "cqed/params.hpp"

using namespace cqed;
using Catch::Approx;

TEST_CASE("physical constants are consistent", "[core_model]") {
    REQUIRE(constants.hbar > 0.0);
    REQUIRE(constants.k_B > 0.0);
    REQUIRE(constants.mu_B > 0.0);
    REQUIRE(constants.gamma_e > 0.0);
    // gamma_e = g_e mu_B / h within 0.2%
    double derived = constants.g_e * constants.mu_B / constants.h;
    REQUIRE(std::abs(derived - constants.gamma_e) / constants.gamma_e < 0.002);
}

TEST_CASE("dbm_to_watts", "[core_model]") {
    REQUIRE(dbm_to_watts(0.0) == Approx(1e-3).epsilon(1e-15));
    REQUIRE(dbm_to_watts(-18.0) == Approx(1.5848931924611134e-05).epsilon(1e-12));
    REQUIRE(dbm_to_watts(-35.0) == Approx(3.1622776601683794e-07).epsilon(1e-12));
    REQUIRE(watts_to_dbm(dbm_to_watts(-7.3)) == Approx(-7.3).margin(1e-12));
}

TEST_CASE("power_to_flux", "[core_model]") {
    double omega = two_pi * 2.87e9;

    SECTION("zero power gives zero flux") {
        REQUIRE(power_to_flux(0.0, omega) == 0.0);
    }
    SECTION("-18 dBm at 2.87 GHz") {
        // P / (hbar omega) with hbar = 1.054571817e-34
        double expected = 1.5848931924611134e-05 / (1.054571817e-34 * omega);
        REQUIRE(expected == Approx(8.334e18).epsilon(2e-4));
        REQUIRE(power_to_flux(dbm_to_watts(-18.0), omega) == Approx(expected).epsilon(1e-14));
    }
    SECTION("round trip") {
        double p = 2.5e-6;
        REQUIRE(flux_to_power(power_to_flux(p, omega), omega) == Approx(p).epsilon(1e-12));
    }
    SECTION("non-positive omega rejected") {
        REQUIRE_THROWS_AS(power_to_flux(1e-3, 0.0), ValidationError);
        REQUIRE_THROWS_AS(power_to_flux(1e-3, -1.0), ValidationError);
        REQUIRE_THROWS_AS(power_to_flux(-1e-3, omega), ValidationError);
    }
}

TEST_CASE("hz/rad conversions invert exactly", "[core_model]") {
    for (double f : {125e3, 130e3, 330e3, 33e3, 190e3, 2.87e9, 30e3, 3e3, 2.1e6, 82.5e3})
        REQUIRE(rad_to_hz(hz_to_rad(f)) == f);
}

TEST_CASE("paper device preset carries the fitted parameter set", "[core_model]") {
    DeviceParams d = paper_device();
    REQUIRE(d.cavity.kappa_c1 == hz_to_rad(125e3));
    REQUIRE(d.cavity.kappa_c == hz_to_rad(130e3));
    REQUIRE(d.spins.Gamma == hz_to_rad(330e3));
    REQUIRE(d.spins.gamma() == Approx(hz_to_rad(33e3)).epsilon(1e-15));
    REQUIRE(d.spins.gamma_p == hz_to_rad(30e3));
    REQUIRE(d.spins.gamma_0 == hz_to_rad(3e3));
    REQUIRE(d.spins.g() == Approx(hz_to_rad(190e3)).epsilon(1e-12));
    REQUIRE(d.cavity.V == Approx(1.7e-6).epsilon(1e-15));
    REQUIRE(d.cavity.omega_c == hz_to_rad(2.87e9));
    REQUIRE(d.spins.A_zz == hz_to_rad(2.1e6));
    REQUIRE(d.spins.n_hyperfine == 3);

    SECTION("kappa and Q derive from the caption values") {
        REQUIRE(d.cavity.kappa() == Approx(hz_to_rad(255e3)).epsilon(1e-15));
        REQUIRE(d.cavity.q_unloaded() == Approx(2.2e4).epsilon(0.005));
    }
    SECTION("N is back-computed from the geometric calibration") {
        REQUIRE(d.spins.N == Approx(4.752e14).epsilon(1e-12));
        REQUIRE(d.spins.g_s == Approx(two_pi * 8.715963140583689e-3).epsilon(1e-12));
        REQUIRE(d.spins.g_s * std::sqrt(d.spins.N) == Approx(hz_to_rad(190e3)).epsilon(1e-12));
    }
    SECTION("validation passes without warnings") {
        auto rep = validate(d);
        REQUIRE(rep.warnings.empty());
    }
}

TEST_CASE("gamma_0 << gamma_p is enforced as a warning threshold", "[core_model]") {
    SpinEnsembleParams s = paper_device().spins;
    s.gamma_0 = s.gamma_p / 5.0;
    auto rep = validate(s);
    REQUIRE(rep.warnings.size() == 1);
}

TEST_CASE("drive params", "[core_model]") {
    CavityParams cav;
    DriveParams d = DriveParams::from_power_dbm(-18.0, cav, hz_to_rad(10e3), hz_to_rad(-5e3));
    REQUIRE(d.Delta == hz_to_rad(10e3));
    REQUIRE(d.Delta_s == hz_to_rad(-5e3));
    REQUIRE(d.omega_d(cav) == Approx(cav.omega_c + hz_to_rad(10e3)).epsilon(1e-15));
    REQUIRE(d.beta_in >= 0.0);
    REQUIRE(d.flux() == Approx(power_to_flux(dbm_to_watts(-18.0), d.omega_d(cav))).epsilon(1e-12));
}

TEST_CASE("hyperfine offsets are symmetric", "[core_model]") {
    SpinEnsembleParams s = paper_device().spins;
    auto offs = s.hyperfine_offsets();
    REQUIRE(offs.size() == 3);
    REQUIRE(offs[0] == -s.A_zz);
    REQUIRE(offs[1] == 0.0);
    REQUIRE(offs[2] == s.A_zz);
    s.n_hyperfine = 1;
    REQUIRE(s.hyperfine_offsets() == std::vector<double>{0.0});
}

TEST_CASE("parameter validation rejects nonsense", "[core_model]") {
    CavityParams cav;
    cav.kappa_c = -1.0;
    REQUIRE_THROWS_AS(validate(cav), ValidationError);
    SpinEnsembleParams s = paper_device().spins;
    s.n_hyperfine = 2;
    REQUIRE_THROWS_AS(validate(s), ValidationError);
    s = paper_device().spins;
    s.Gamma = 0.0;
    REQUIRE_THROWS_AS(validate(s), ValidationError);
}
