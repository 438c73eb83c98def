#pragma once

namespace starkqfi {

/// Physical constants (CODATA 2018).
namespace constants {
inline constexpr double hbar = 1.054571817e-34;          // J s
inline constexpr double atomic_mass_unit = 1.66053906660e-27;  // kg
inline constexpr double rb87_mass = 86.909180531 * atomic_mass_unit;
}  // namespace constants

/// Atoms in a vertical optical lattice. Defaults: Rb-87 in a 1064 nm
/// lattice, one measurement, 1 s coherence time.
struct PhysicalSetup {
  double atom_mass = constants::rb87_mass;  // kg
  double wavelength = 1064e-9;              // m
  double lattice_depth = 10.0;              // V0 / E_R
  double gravity = 9.81;                    // m/s^2
  long measurements = 1;
  double coherence_time = 1.0;  // s

  /// Throws std::invalid_argument unless every field is positive.
  void validate() const;
  /// Depths below 5 E_R are outside the tight-binding regime.
  bool tight_binding_warning() const { return lattice_depth < 5.0; }
};

/// E_R = hbar^2 k^2 / 2m with k = 2 pi / lambda, in joules.
double recoil_energy(const PhysicalSetup& setup);

/// Tight-binding tunnelling J / E_R = (4/sqrt(pi)) V^{3/4} exp(-2 sqrt(V)),
/// V = V0 / E_R. Throws std::domain_error for V <= 0.
double hubbard_J(double depth_over_recoil);
double hubbard_J(const PhysicalSetup& setup);

/// Tilt per site h = m g lambda / 2.
struct Tilt {
  double joules;
  double recoil_units;
  double hopping_units;  // h / J
};
Tilt gradient_from_g(const PhysicalSetup& setup);

/// Lattice depth V0/E_R at which h/J equals `ratio` (bisection on the
/// monotone tunnelling law over [0.5, 200]). Throws std::domain_error when
/// the ratio is unreachable in that range.
double depth_for_tilt_ratio(const PhysicalSetup& setup, double ratio);

/// Relative gravimetric precision dg/g from a long-time normalized QFI.
///
/// `plateau` is F_Q/t^2 computed in hopping units (energies in J, times in
/// hbar/J) at the tilt h/J of this setup. The QFI with respect to the
/// physical tilt after a time t is plateau * t^2 / hbar^2, so
///   dh = hbar / (t sqrt(M plateau)),  dg/g = dh / (m g lambda / 2).
/// Throws std::domain_error for plateau <= 0 and std::invalid_argument when
/// t exceeds the coherence time.
double sensitivity(const PhysicalSetup& setup, double plateau, double time_seconds);

/// Same bound from a QFI in SI units (1/J^2).
double sensitivity_from_si_qfi(const PhysicalSetup& setup, double qfi_si);

}  // namespace starkqfi
