#pragma once

#include <functional>
#include <span>
#include <vector>

#include <Eigen/Eigenvalues>

#include "starkqfi/types.hpp"

namespace starkqfi {

enum class PropagationMethod { automatic, krylov, dense };

struct PropagatorOptions {
  PropagationMethod method = PropagationMethod::automatic;
  /// Krylov subspace dimension (capped by the operator dimension).
  int krylov_dimension = 30;
  /// Accepted residual estimate per Krylov step.
  double tolerance = 1e-12;
  /// automatic selects the dense path at or below this dimension.
  Index dense_threshold = 1024;
  /// Hard cap on accepted Krylov steps for one propagation.
  long max_steps = 1'000'000;
};

/// |Psi(t)> together with |d_h Psi(t)>.
struct EvolvedPair {
  double t = 0.0;
  StateVector psi;
  StateVector dpsi;
};

/// Resolves `automatic` against the dimension.
PropagationMethod resolve_method(const PropagatorOptions& options, Index dimension);

/// exp(-iHt)|psi0> at each grid time (ascending, t >= 0).
std::vector<StateVector> evolve(const SparseOperator& H, const StateVector& psi0,
                                std::span<const double> times, const PropagatorOptions& options = {});

/// Co-propagates (psi, dpsi) under i d_t psi = H psi, i d_t dpsi = H dpsi + G psi
/// with dpsi(0) = 0, i.e. dpsi(t) = d/dh exp(-iHt)|psi0> for G = dH/dh.
std::vector<EvolvedPair> evolve_with_derivative(const SparseOperator& H, const SparseOperator& G,
                                                const StateVector& psi0, std::span<const double> times,
                                                const PropagatorOptions& options = {});

/// Streaming variants: `visit` is called once per grid time, in order.
void propagate(const SparseOperator& H, const StateVector& psi0, std::span<const double> times,
               const PropagatorOptions& options, const std::function<void(double, const StateVector&)>& visit);
void propagate_with_derivative(const SparseOperator& H, const SparseOperator& G, const StateVector& psi0,
                               std::span<const double> times, const PropagatorOptions& options,
                               const std::function<void(const EvolvedPair&)>& visit);

/// True when every stored entry of `op` has zero imaginary part.
bool is_real(const SparseOperator& op);

/// Dense-eigendecomposition propagator, exact up to the eigensolver.
///
/// Scalar is double for real-symmetric H and Complex otherwise. With a
/// generator G attached, the derivative state is evaluated in closed form in
/// the eigenbasis:
///   d_n(t) = -i sum_m G_nm c_m K_nm(t),
///   K_nm(t) = int_0^t e^{-iE_n(t-s)} e^{-iE_m s} ds.
/// Well separated pairs use the time-independent matrix
/// A_nm = G_nm c_m / (-i(E_m - E_n)) so each time costs one dense product;
/// near-degenerate pairs are summed separately with the sinc form of K.
template <typename Scalar>
class SpectralPropagator {
 public:
  using Matrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;

  explicit SpectralPropagator(const SparseOperator& H) {
    Matrix dense(H.rows(), H.cols());
    if constexpr (std::is_same_v<Scalar, double>) {
      dense = Eigen::MatrixXcd(H).real();
    } else {
      dense = Eigen::MatrixXcd(H);
    }
    Eigen::SelfAdjointEigenSolver<Matrix> solver(dense);
    if (solver.info() != Eigen::Success) throw NumericalError("SpectralPropagator: eigensolver failed");
    energies_ = solver.eigenvalues();
    vectors_ = solver.eigenvectors();
  }

  Index dimension() const { return energies_.size(); }
  const Eigen::VectorXd& energies() const { return energies_; }
  const Matrix& eigenvectors() const { return vectors_; }

  void set_initial_state(const StateVector& psi0) {
    coefficients_ = vectors_.adjoint().template cast<Complex>() * psi0;
    generator_attached_ = false;
  }

  void attach_generator(const SparseOperator& G) {
    const Index n = dimension();
    Eigen::MatrixXcd Gt;
    if constexpr (std::is_same_v<Scalar, double>) {
      if (is_real(G)) {
        const Eigen::SparseMatrix<double, Eigen::RowMajor, Index> real_part = G.real();
        Gt = (vectors_.transpose() * (real_part * vectors_)).template cast<Complex>();
      }
    }
    if (Gt.size() == 0) {
      const Eigen::MatrixXcd V = vectors_.template cast<Complex>();
      Gt = V.adjoint() * (G * V);
    }
    const double scale = std::max(1.0, energies_.cwiseAbs().maxCoeff());
    const double near = 1e-7 * scale;

    separated_.setZero(n, n);
    near_pairs_.clear();
    for (Index m = 0; m < n; ++m) {
      for (Index k = 0; k < n; ++k) {
        const double gap = energies_(m) - energies_(k);
        const Complex weight = Gt(k, m) * coefficients_(m);
        if (std::abs(gap) > near) {
          separated_(k, m) = weight / Complex(0.0, -gap);
        } else if (weight != Complex(0.0)) {
          near_pairs_.push_back({k, m, weight});
        }
      }
    }
    row_sums_ = separated_.rowwise().sum();
    generator_attached_ = true;
  }

  /// Amplitudes of |Psi(t)> in the eigenbasis.
  StateVector eigen_amplitudes(double t) const { return phases(t).cwiseProduct(coefficients_); }

  StateVector state(double t) const { return to_site_basis(eigen_amplitudes(t)); }

  /// (psi, dpsi) in the eigenbasis; inner products match the site basis.
  EvolvedPair eigen_pair(double t) const {
    if (!generator_attached_) throw std::logic_error("SpectralPropagator: no generator attached");
    const StateVector p = phases(t);
    StateVector d = separated_ * p - p.cwiseProduct(row_sums_);
    for (const auto& pair : near_pairs_) {
      const double gap = energies_(pair.col) - energies_(pair.row);
      const double x = 0.5 * gap * t;
      const double sinc = std::abs(x) < 1e-4 ? 1.0 - x * x / 6.0 : std::sin(x) / x;
      const double mean = 0.5 * (energies_(pair.row) + energies_(pair.col));
      d(pair.row) += pair.weight * (t * sinc) * std::exp(Complex(0.0, -mean * t));
    }
    d *= Complex(0.0, -1.0);
    return {t, p.cwiseProduct(coefficients_), std::move(d)};
  }

  EvolvedPair pair(double t) const {
    EvolvedPair e = eigen_pair(t);
    e.psi = to_site_basis(e.psi);
    e.dpsi = to_site_basis(e.dpsi);
    return e;
  }

 private:
  struct NearPair {
    Index row;
    Index col;
    Complex weight;
  };

  StateVector to_site_basis(const StateVector& x) const {
    if constexpr (std::is_same_v<Scalar, double>) {
      StateVector out(x.size());
      out.real() = vectors_ * x.real();
      out.imag() = vectors_ * x.imag();
      return out;
    } else {
      return vectors_ * x;
    }
  }

  StateVector phases(double t) const {
    return (energies_ * Complex(0.0, -t)).array().exp().matrix();
  }

  Eigen::VectorXd energies_;
  Matrix vectors_;
  StateVector coefficients_;
  Eigen::MatrixXcd separated_;
  StateVector row_sums_;
  std::vector<NearPair> near_pairs_;
  bool generator_attached_ = false;
};

}  // namespace starkqfi
