#include "starkqfi/gravimetry.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

#include "starkqfi/qfi.hpp"

namespace starkqfi {

void PhysicalSetup::validate() const {
  if (!(atom_mass > 0.0) || !(wavelength > 0.0) || !(lattice_depth > 0.0) || !(gravity > 0.0) ||
      measurements < 1 || !(coherence_time > 0.0)) {
    throw std::invalid_argument("PhysicalSetup: all fields must be positive");
  }
}

double recoil_energy(const PhysicalSetup& setup) {
  setup.validate();
  const double k = 2.0 * std::numbers::pi / setup.wavelength;
  return constants::hbar * constants::hbar * k * k / (2.0 * setup.atom_mass);
}

double hubbard_J(double depth_over_recoil) {
  if (!(depth_over_recoil > 0.0)) throw std::domain_error("hubbard_J: lattice depth must be positive");
  return 4.0 / std::sqrt(std::numbers::pi) * std::pow(depth_over_recoil, 0.75) *
         std::exp(-2.0 * std::sqrt(depth_over_recoil));
}

double hubbard_J(const PhysicalSetup& setup) { return hubbard_J(setup.lattice_depth); }

Tilt gradient_from_g(const PhysicalSetup& setup) {
  setup.validate();
  const double joules = setup.atom_mass * setup.gravity * setup.wavelength / 2.0;
  const double recoil = joules / recoil_energy(setup);
  return {joules, recoil, recoil / hubbard_J(setup)};
}

double depth_for_tilt_ratio(const PhysicalSetup& setup, double ratio) {
  if (!(ratio > 0.0)) throw std::domain_error("depth_for_tilt_ratio: ratio must be positive");
  const double tilt = gradient_from_g(setup).recoil_units;
  // h/J is increasing in depth on [0.5, 200].
  auto excess = [&](double depth) { return tilt / hubbard_J(depth) - ratio; };
  double lo = 0.5;
  double hi = 200.0;
  if (excess(lo) > 0.0 || excess(hi) < 0.0) {
    throw std::domain_error("depth_for_tilt_ratio: ratio not reachable for depths in [0.5, 200]");
  }
  for (int iter = 0; iter < 200 && hi - lo > 1e-12 * hi; ++iter) {
    const double mid = 0.5 * (lo + hi);
    (excess(mid) > 0.0 ? hi : lo) = mid;
  }
  return 0.5 * (lo + hi);
}

double sensitivity_from_si_qfi(const PhysicalSetup& setup, double qfi_si) {
  setup.validate();
  const double dh = cramer_rao_bound(qfi_si, setup.measurements);
  const double lever = setup.atom_mass * setup.wavelength / 2.0;  // dh/dg
  return dh / lever / setup.gravity;
}

double sensitivity(const PhysicalSetup& setup, double plateau, double time_seconds) {
  setup.validate();
  if (!(plateau > 0.0)) throw std::domain_error("sensitivity: plateau must be positive");
  if (!(time_seconds > 0.0) || time_seconds > setup.coherence_time) {
    throw std::invalid_argument("sensitivity: time must lie in (0, coherence_time]");
  }
  const double qfi_si = plateau * time_seconds * time_seconds / (constants::hbar * constants::hbar);
  return sensitivity_from_si_qfi(setup, qfi_si);
}

}  // namespace starkqfi
