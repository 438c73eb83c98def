#include "starkqfi/qfi.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>

namespace starkqfi {

namespace {

constexpr double kNormTolerance = 1e-8;

QfiSample make_sample(double t, double qfi) {
  return {t, qfi, t > 0.0 ? qfi / (t * t) : 0.0};
}

}  // namespace

QfiSample qfi_pure(const EvolvedPair& pair) {
  const double norm = pair.psi.norm();
  if (std::abs(norm - 1.0) > kNormTolerance) {
    std::ostringstream os;
    os << "qfi_pure: state norm " << norm << " at t = " << pair.t << " is not 1";
    throw NumericalError(os.str());
  }
  const StateVector orthogonal = pair.dpsi - (pair.psi.dot(pair.dpsi) / (norm * norm)) * pair.psi;
  const double qfi = 4.0 * orthogonal.squaredNorm();
  return make_sample(pair.t, qfi);
}

std::vector<QfiSample> qfi_series(const SparseOperator& H, const SparseOperator& G, const StateVector& psi0,
                                  std::span<const double> times, const PropagatorOptions& options) {
  std::vector<QfiSample> out;
  out.reserve(times.size());
  if (resolve_method(options, H.rows()) == PropagationMethod::dense && H.rows() == psi0.size() &&
      std::abs(psi0.norm() - 1.0) <= 1e-10) {
    auto run = [&](auto& spectral) {
      spectral.set_initial_state(psi0);
      spectral.attach_generator(G);
      for (double t : times) out.push_back(qfi_pure(spectral.eigen_pair(t)));
    };
    if (is_real(H)) {
      SpectralPropagator<double> spectral(H);
      run(spectral);
    } else {
      SpectralPropagator<Complex> spectral(H);
      run(spectral);
    }
    return out;
  }
  propagate_with_derivative(H, G, psi0, times, options,
                            [&](const EvolvedPair& pair) { out.push_back(qfi_pure(pair)); });
  return out;
}

QfiSample qfi_finite_difference(const std::function<SparseOperator(double)>& hamiltonian_at,
                                const StateVector& psi0, double t, double h, double delta,
                                const PropagatorOptions& options, double consistency) {
  if (!(delta > 0.0)) throw std::invalid_argument("qfi_finite_difference: delta must be positive");
  const double grid[] = {t};
  auto state_at = [&](double value) { return evolve(hamiltonian_at(value), psi0, grid, options).front(); };

  const StateVector psi = state_at(h);
  const StateVector coarse = (state_at(h + delta) - state_at(h - delta)) / (2.0 * delta);
  const StateVector fine = (state_at(h + 0.5 * delta) - state_at(h - 0.5 * delta)) / delta;

  const double scale = std::max(fine.norm(), 1e-300);
  if ((coarse - fine).norm() / scale > consistency) {
    std::ostringstream os;
    os << "qfi_finite_difference: step " << delta << " too large (relative disagreement "
       << (coarse - fine).norm() / scale << ")";
    throw NumericalError(os.str());
  }
  // Central differences err at O(delta^2); this combination cancels it.
  const StateVector extrapolated = (4.0 * fine - coarse) / 3.0;
  return qfi_pure(EvolvedPair{t, psi, extrapolated});
}

double cramer_rao_bound(double qfi, long measurements) {
  if (measurements < 1) throw std::invalid_argument("cramer_rao_bound: need at least one measurement");
  if (!(qfi > 0.0)) throw std::domain_error("cramer_rao_bound: zero QFI gives no finite bound");
  return 1.0 / std::sqrt(static_cast<double>(measurements) * qfi);
}

}  // namespace starkqfi
