#include "starkqfi/propagator.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

#include <unsupported/Eigen/MatrixFunctions>

namespace starkqfi {

namespace {

constexpr double kInputNormTolerance = 1e-10;

void check_grid(std::span<const double> times) {
  for (std::size_t k = 0; k < times.size(); ++k) {
    if (!std::isfinite(times[k])) throw std::invalid_argument("time grid contains a non-finite value");
    if (k == 0 && times[k] < 0.0) throw std::invalid_argument("time grid must start at t >= 0");
    if (k > 0 && times[k] < times[k - 1]) throw std::invalid_argument("time grid must be ascending");
  }
}

void check_state(const SparseOperator& H, const StateVector& psi0) {
  if (H.rows() != H.cols()) throw std::invalid_argument("Hamiltonian must be square");
  if (psi0.size() != H.rows()) throw std::invalid_argument("initial state length does not match dimension");
  if (std::abs(psi0.norm() - 1.0) > kInputNormTolerance) {
    throw std::invalid_argument("initial state is not normalized");
  }
}

// Gershgorin disc union, returned as (centre, radius) of the enclosing interval.
std::pair<double, double> spectral_interval(const SparseOperator& H) {
  double lo = 0.0;
  double hi = 0.0;
  for (Index row = 0; row < H.outerSize(); ++row) {
    double diag = 0.0;
    double off = 0.0;
    for (SparseOperator::InnerIterator it(H, row); it; ++it) {
      if (it.col() == row) {
        diag = it.value().real();
      } else {
        off += std::abs(it.value());
      }
    }
    if (row == 0) {
      lo = diag - off;
      hi = diag + off;
    } else {
      lo = std::min(lo, diag - off);
      hi = std::max(hi, diag + off);
    }
  }
  return {0.5 * (lo + hi), 0.5 * (hi - lo)};
}

struct ShiftedHamiltonian {
  const SparseOperator& H;
  double shift;

  Index size() const { return H.rows(); }
  void apply(const StateVector& x, StateVector& y) const {
    y.noalias() = H * x;
    y -= shift * x;
  }
};

// [[H - s, 0], [G, H - s]] acting on (psi, dpsi) stacked.
struct AugmentedOperator {
  const SparseOperator& H;
  const SparseOperator& G;
  double shift;

  Index size() const { return 2 * H.rows(); }
  void apply(const StateVector& x, StateVector& y) const {
    const Index n = H.rows();
    y.head(n).noalias() = H * x.head(n);
    y.tail(n).noalias() = G * x.head(n);
    y.tail(n).noalias() += H * x.tail(n);
    y -= shift * x;
  }
};

// Short-step Krylov exponential w <- exp(-i M tau) w with residual-based
// step control. Hermitian operators use the Lanczos tridiagonal (built with
// full reorthogonalization); general operators use the Arnoldi Hessenberg
// matrix and a Pade exponential.
template <typename Operator, bool Hermitian>
class KrylovStepper {
 public:
  KrylovStepper(const Operator& op, double norm_estimate, const PropagatorOptions& options)
      : op_(op),
        m_(static_cast<int>(std::min<Index>(std::max(options.krylov_dimension, 1), op.size()))),
        tolerance_(options.tolerance),
        max_steps_(options.max_steps),
        breakdown_(1e-13 * std::max(1.0, norm_estimate)),
        basis_(op.size(), m_ + 1),
        hessenberg_(Eigen::MatrixXcd::Zero(m_ + 1, m_)),
        work_(op.size()) {
    tau_hint_ = norm_estimate > 0.0 ? 2.0 / norm_estimate : 1.0;
  }

  long steps() const { return steps_; }

  // Advances `w` from time t to t + dt.
  void advance(StateVector& w, double t, double dt) {
    double done = 0.0;
    while (done < dt) {
      const double remaining = dt - done;
      const double beta = w.norm();
      if (!std::isfinite(beta)) fail("non-finite state norm", t + done);
      if (beta == 0.0) return;

      const int used = build_basis(w / beta, t + done);
      const bool clamped = tau_hint_ >= remaining;
      double tau = clamped ? remaining : tau_hint_;
      bool first_try = true;
      StateVector y;
      for (;;) {
        double error = 0.0;
        y = small_exponential(used, tau, error);
        if (!y.allFinite()) fail("Krylov breakdown: non-finite small exponential", t + done);
        if (error <= tolerance_) break;
        tau *= 0.5;
        first_try = false;
        if (tau < 1e-14 * std::max(1.0, t + done)) fail("Krylov step size underflow", t + done);
      }

      w.noalias() = basis_.leftCols(used) * (beta * y);
      w *= std::exp(Complex(0.0, -shift_ * tau));
      if (first_try) {
        if (!clamped) tau_hint_ = 2.0 * tau;
      } else {
        tau_hint_ = tau;
      }
      done = (first_try && clamped) ? dt : done + tau;
      if (++steps_ > max_steps_) fail("Krylov propagation did not converge within max_steps", t + done);
    }
  }

  void set_phase_shift(double shift) { shift_ = shift; }

 private:
  [[noreturn]] void fail(const std::string& what, double t) const {
    std::ostringstream os;
    os << what << " (step " << steps_ << ", t = " << t << ")";
    throw NumericalError(os.str());
  }

  // Orthonormal Krylov basis of span{v, Mv, ...}; returns its size and
  // sets happy_ when the space became invariant.
  int build_basis(const StateVector& v, double t) {
    hessenberg_.setZero();
    cached_size_ = -1;
    basis_.col(0) = v;
    happy_ = false;
    for (int j = 0; j < m_; ++j) {
      op_.apply(basis_.col(j), work_);
      for (int pass = 0; pass < 2; ++pass) {
        const StateVector coeffs = basis_.leftCols(j + 1).adjoint() * work_;
        work_.noalias() -= basis_.leftCols(j + 1) * coeffs;
        hessenberg_.col(j).head(j + 1) += coeffs;
      }
      const double next = work_.norm();
      if (!std::isfinite(next)) fail("Krylov breakdown: non-finite basis vector", t);
      hessenberg_(j + 1, j) = next;
      if (next <= breakdown_) {
        happy_ = true;
        return j + 1;
      }
      basis_.col(j + 1) = work_ / next;
    }
    return m_;
  }

  StateVector small_exponential(int used, double tau, double& error) {
    StateVector y(used);
    if constexpr (Hermitian) {
      if (cached_size_ != used) {
        Eigen::VectorXd diag(used);
        Eigen::VectorXd sub(std::max(used - 1, 0));
        for (int j = 0; j < used; ++j) diag(j) = hessenberg_(j, j).real();
        for (int j = 0; j + 1 < used; ++j) sub(j) = hessenberg_(j + 1, j).real();
        if (used == 1) {
          ritz_values_ = diag;
          ritz_first_row_ = Eigen::VectorXd::Ones(1);
          ritz_vectors_ = Eigen::MatrixXd::Ones(1, 1);
        } else {
          Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver;
          solver.computeFromTridiagonal(diag, sub, Eigen::ComputeEigenvectors);
          ritz_values_ = solver.eigenvalues();
          ritz_vectors_ = solver.eigenvectors();
          ritz_first_row_ = ritz_vectors_.row(0).transpose();
        }
        cached_size_ = used;
      }
      const StateVector weights =
          (ritz_values_ * Complex(0.0, -tau)).array().exp().matrix().cwiseProduct(ritz_first_row_.cast<Complex>());
      y = ritz_vectors_.cast<Complex>() * weights;
    } else {
      const Eigen::MatrixXcd exponent = Complex(0.0, -tau) * hessenberg_.topLeftCorner(used, used);
      const Eigen::MatrixXcd expm = exponent.exp();
      y = expm.col(0);
    }
    error = happy_ ? 0.0 : std::abs(hessenberg_(used, used - 1)) * std::abs(y(used - 1));
    return y;
  }

 private:
  const Operator& op_;
  int m_;
  double tolerance_;
  long max_steps_;
  double breakdown_;
  double shift_ = 0.0;
  double tau_hint_ = 1.0;
  long steps_ = 0;
  bool happy_ = false;
  Eigen::MatrixXcd basis_;
  Eigen::MatrixXcd hessenberg_;
  StateVector work_;
  int cached_size_ = -1;
  Eigen::VectorXd ritz_values_;
  Eigen::MatrixXd ritz_vectors_;
  Eigen::VectorXd ritz_first_row_;
};

template <typename Scalar>
void dense_propagate(const SparseOperator& H, const StateVector& psi0, std::span<const double> times,
                     const std::function<void(double, const StateVector&)>& visit) {
  SpectralPropagator<Scalar> spectral(H);
  spectral.set_initial_state(psi0);
  for (double t : times) {
    if (t == 0.0) {
      visit(t, psi0);
    } else {
      visit(t, spectral.state(t));
    }
  }
}

template <typename Scalar>
void dense_propagate_pair(const SparseOperator& H, const SparseOperator& G, const StateVector& psi0,
                          std::span<const double> times, const std::function<void(const EvolvedPair&)>& visit) {
  SpectralPropagator<Scalar> spectral(H);
  spectral.set_initial_state(psi0);
  spectral.attach_generator(G);
  for (double t : times) visit(spectral.pair(t));
}

}  // namespace

bool is_real(const SparseOperator& op) {
  for (Index k = 0; k < op.outerSize(); ++k) {
    for (SparseOperator::InnerIterator it(op, k); it; ++it) {
      if (it.value().imag() != 0.0) return false;
    }
  }
  return true;
}

PropagationMethod resolve_method(const PropagatorOptions& options, Index dimension) {
  if (options.method != PropagationMethod::automatic) return options.method;
  return dimension <= options.dense_threshold ? PropagationMethod::dense : PropagationMethod::krylov;
}

void propagate(const SparseOperator& H, const StateVector& psi0, std::span<const double> times,
               const PropagatorOptions& options, const std::function<void(double, const StateVector&)>& visit) {
  check_state(H, psi0);
  check_grid(times);
  if (resolve_method(options, H.rows()) == PropagationMethod::dense) {
    if (is_real(H)) {
      dense_propagate<double>(H, psi0, times, visit);
    } else {
      dense_propagate<Complex>(H, psi0, times, visit);
    }
    return;
  }

  const auto [centre, radius] = spectral_interval(H);
  ShiftedHamiltonian op{H, centre};
  KrylovStepper<ShiftedHamiltonian, true> stepper(op, radius, options);
  stepper.set_phase_shift(centre);
  StateVector w = psi0;
  double now = 0.0;
  for (double t : times) {
    if (t > now) {
      stepper.advance(w, now, t - now);
      now = t;
    }
    visit(t, w);
  }
}

void propagate_with_derivative(const SparseOperator& H, const SparseOperator& G, const StateVector& psi0,
                               std::span<const double> times, const PropagatorOptions& options,
                               const std::function<void(const EvolvedPair&)>& visit) {
  check_state(H, psi0);
  check_grid(times);
  if (G.rows() != H.rows() || G.cols() != H.cols()) {
    throw std::invalid_argument("generator dimension does not match Hamiltonian");
  }
  if (resolve_method(options, H.rows()) == PropagationMethod::dense) {
    if (is_real(H)) {
      dense_propagate_pair<double>(H, G, psi0, times, visit);
    } else {
      dense_propagate_pair<Complex>(H, G, psi0, times, visit);
    }
    return;
  }

  const Index n = H.rows();
  const auto [centre, radius] = spectral_interval(H);
  const auto [g_centre, g_radius] = spectral_interval(G);
  AugmentedOperator op{H, G, centre};
  KrylovStepper<AugmentedOperator, false> stepper(op, radius + std::abs(g_centre) + g_radius, options);
  stepper.set_phase_shift(centre);
  StateVector w = StateVector::Zero(2 * n);
  w.head(n) = psi0;
  double now = 0.0;
  for (double t : times) {
    if (t > now) {
      stepper.advance(w, now, t - now);
      now = t;
    }
    visit(EvolvedPair{t, w.head(n), w.tail(n)});
  }
}

std::vector<StateVector> evolve(const SparseOperator& H, const StateVector& psi0, std::span<const double> times,
                                const PropagatorOptions& options) {
  std::vector<StateVector> out;
  out.reserve(times.size());
  propagate(H, psi0, times, options, [&](double, const StateVector& psi) { out.push_back(psi); });
  return out;
}

std::vector<EvolvedPair> evolve_with_derivative(const SparseOperator& H, const SparseOperator& G,
                                                const StateVector& psi0, std::span<const double> times,
                                                const PropagatorOptions& options) {
  std::vector<EvolvedPair> out;
  out.reserve(times.size());
  propagate_with_derivative(H, G, psi0, times, options, [&](const EvolvedPair& p) { out.push_back(p); });
  return out;
}

}  // namespace starkqfi
