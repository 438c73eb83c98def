#include <doctest.h>

#include <cmath>

#include "oracles.hpp"
#include "starkqfi/gravimetry.hpp"

using namespace starkqfi;

TEST_SUITE("gravimetry") {

TEST_CASE("recoil energy") {
  PhysicalSetup s;
  CHECK(s.atom_mass == doctest::Approx(1.4431e-25).epsilon(1e-4));
  const double er = recoil_energy(s);
  CHECK(er == doctest::Approx(1.3443e-30).epsilon(1e-4));
  CHECK(er / (2.0 * M_PI * constants::hbar) == doctest::Approx(2029.0).epsilon(1e-3));
  PhysicalSetup longer = s;
  longer.wavelength *= 2.0;
  CHECK(recoil_energy(longer) == doctest::Approx(er / 4.0).epsilon(1e-14));
  PhysicalSetup heavier = s;
  heavier.atom_mass *= 2.0;
  CHECK(recoil_energy(heavier) == doctest::Approx(er / 2.0).epsilon(1e-14));
}

TEST_CASE("tight-binding tunnelling") {
  CHECK(hubbard_J(10.0) == doctest::Approx(2.274e-2).epsilon(1e-3));
  CHECK(hubbard_J(16.0) == doctest::Approx(6.055e-3).epsilon(1e-3));
  for (double v = 0.5; v < 60.0; v += 0.37) CHECK(hubbard_J(v) == doctest::Approx(oracle::hopping(v)).epsilon(1e-13));
  for (double v = 5.0; v < 40.0; v += 0.25) CHECK(hubbard_J(v + 0.25) < hubbard_J(v));
  CHECK_THROWS_AS(hubbard_J(0.0), std::domain_error);
  PhysicalSetup shallow;
  shallow.lattice_depth = 4.0;
  CHECK(shallow.tight_binding_warning());
  CHECK_FALSE(PhysicalSetup{}.tight_binding_warning());
}

TEST_CASE("tilt from gravity") {
  PhysicalSetup s;
  const Tilt t = gradient_from_g(s);
  CHECK(t.joules == doctest::Approx(7.532e-31).epsilon(1e-3));
  CHECK(t.recoil_units == doctest::Approx(0.560).epsilon(2e-3));
  CHECK(t.hopping_units == doctest::Approx(t.recoil_units / hubbard_J(10.0)).epsilon(1e-14));
  PhysicalSetup doubled = s;
  doubled.gravity *= 2.0;
  CHECK(gradient_from_g(doubled).joules == doctest::Approx(2.0 * t.joules).epsilon(1e-14));
  PhysicalSetup none = s;
  none.gravity = 0.0;
  CHECK_THROWS_AS(gradient_from_g(none), std::invalid_argument);
}

TEST_CASE("depth for a tilt ratio") {
  PhysicalSetup s;
  for (double ratio : {3.0, 5.0, 20.0, 100.0}) {
    s.lattice_depth = depth_for_tilt_ratio(s, ratio);
    CHECK(gradient_from_g(s).hopping_units == doctest::Approx(ratio).epsilon(1e-9));
  }
  CHECK_THROWS_AS(depth_for_tilt_ratio(s, 1e12), std::domain_error);
}

TEST_CASE("sensitivity") {
  PhysicalSetup s;
  const double plateau = 0.64;
  const double d = sensitivity(s, plateau, 1.0);
  const double h = gradient_from_g(s).joules;
  CHECK(d == doctest::Approx(constants::hbar / (h * std::sqrt(plateau))).epsilon(1e-12));
  PhysicalSetup four = s;
  four.measurements = 4;
  CHECK(sensitivity(four, plateau, 1.0) == doctest::Approx(d / 2.0).epsilon(1e-14));
  CHECK(sensitivity(s, 4.0 * plateau, 1.0) / d == doctest::Approx(0.5).epsilon(1e-14));
  CHECK(sensitivity(s, plateau, 0.5) > d);
  CHECK_THROWS_AS(sensitivity(s, 0.0, 1.0), std::domain_error);
  CHECK_THROWS_AS(sensitivity(s, plateau, 2.0), std::invalid_argument);
}

TEST_CASE("unit-system invariance") {
  // The same run expressed in J-units and in E_R-units gives the same dg/g.
  PhysicalSetup s;
  s.lattice_depth = depth_for_tilt_ratio(s, 5.0);
  const double J = hubbard_J(s) * recoil_energy(s);
  const double ER = recoil_energy(s);
  const double plateau_J = 0.64;  // F_Q/t^2 with h and t in J-units
  const double t = 1.0;
  const double t_J = t * J / constants::hbar;
  const double t_R = t * ER / constants::hbar;
  const double qfi_J = plateau_J * t_J * t_J;
  const double qfi_R = qfi_J * (ER / J) * (ER / J);
  const double plateau_R = qfi_R / (t_R * t_R);
  const double qfi_si = qfi_J / (J * J);
  CHECK(sensitivity_from_si_qfi(s, qfi_si) == doctest::Approx(sensitivity(s, plateau_J, t)).epsilon(1e-12));
  CHECK(sensitivity(s, plateau_R, t) == doctest::Approx(sensitivity(s, plateau_J, t)).epsilon(1e-12));
}

TEST_CASE("validation") {
  PhysicalSetup s;
  s.measurements = 0;
  CHECK_THROWS_AS(s.validate(), std::invalid_argument);
}

}
