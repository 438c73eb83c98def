#pragma once

#include <functional>
#include <span>
#include <vector>

#include "starkqfi/propagator.hpp"
#include "starkqfi/types.hpp"

namespace starkqfi {

/// Quantum Fisher information at one time, with the normalized value
/// F_Q / t^2 (zero at t = 0).
struct QfiSample {
  double t = 0.0;
  double qfi = 0.0;
  double qfi_over_t2 = 0.0;
};

/// Pure-state QFI F_Q = 4 (<dpsi|dpsi> - |<psi|dpsi>|^2).
///
/// Evaluated as 4 |dpsi - <psi|dpsi> psi|^2, so it is never negative.
/// Raises NumericalError if |psi| deviates from 1 by more than 1e-8.
QfiSample qfi_pure(const EvolvedPair& pair);

/// QFI time series for the state exp(-iHt)|psi0> with respect to the
/// parameter whose generator is G = dH/dh. On the dense path the series is
/// evaluated in the eigenbasis without reconstructing site-basis vectors.
std::vector<QfiSample> qfi_series(const SparseOperator& H, const SparseOperator& G, const StateVector& psi0,
                                  std::span<const double> times, const PropagatorOptions& options = {});

/// Finite-difference oracle: |d_h Psi> from central differences of
/// exp(-iH(h)t)|psi0> at h +- delta and h +- delta/2, combined by Richardson
/// extrapolation. Throws NumericalError when the two step sizes disagree by
/// more than `consistency` (relative), which signals delta is too large.
QfiSample qfi_finite_difference(const std::function<SparseOperator(double)>& hamiltonian_at,
                                const StateVector& psi0, double t, double h, double delta,
                                const PropagatorOptions& options = {}, double consistency = 1e-3);

/// Cramer-Rao bound 1/sqrt(M F_Q). Throws std::domain_error for qfi <= 0
/// and std::invalid_argument for measurements < 1.
double cramer_rao_bound(double qfi, long measurements);

}  // namespace starkqfi
