#include "starkqfi/hamiltonian.hpp"

#include <cmath>
#include <ostream>
#include <stdexcept>
#include <vector>

namespace starkqfi {

void ModelParams::validate() const {
  if (!(J >= 0.0)) throw std::invalid_argument("ModelParams: J must be non-negative");
  if (!std::isfinite(U) || !std::isfinite(h) || !std::isfinite(J)) {
    throw std::invalid_argument("ModelParams: couplings must be finite");
  }
  if (L < 1) throw std::invalid_argument("ModelParams: L must be >= 1");
  if (N < 0) throw std::invalid_argument("ModelParams: N must be >= 0");
}

namespace {

using Triplet = Eigen::Triplet<Complex, Index>;

// Calls emit(target_index, amplitude) for every state reached from `state`
// by one hop between neighbouring sites, with amplitude
// <target| b+_a b_b |state> = sqrt(n_a + 1) sqrt(n_b).
template <typename Emit>
void for_each_hop(const FockBasis& basis, Index state, std::vector<int>& scratch, Emit&& emit) {
  const int L = basis.sites();
  for (int site = 0; site < L; ++site) scratch[static_cast<std::size_t>(site)] = basis.occupation(state, site);
  for (int l = 0; l + 1 < L; ++l) {
    auto& a = scratch[static_cast<std::size_t>(l)];
    auto& b = scratch[static_cast<std::size_t>(l + 1)];
    if (b > 0) {  // b+_l b_{l+1}
      const double amp = std::sqrt(static_cast<double>(a + 1) * b);
      ++a;
      --b;
      emit(basis.rank_unchecked(scratch), amp);
      --a;
      ++b;
    }
    if (a > 0) {  // b+_{l+1} b_l
      const double amp = std::sqrt(static_cast<double>(b + 1) * a);
      --a;
      ++b;
      emit(basis.rank_unchecked(scratch), amp);
      ++a;
      --b;
    }
  }
}

double interaction_energy(const FockBasis& basis, Index state) {
  double e = 0.0;
  for (int l = 0; l < basis.sites(); ++l) {
    const int n = basis.occupation(state, l);
    e += 0.5 * n * (n - 1);
  }
  return e;
}

double gradient_energy(const FockBasis& basis, Index state) {
  double e = 0.0;
  for (int l = 0; l < basis.sites(); ++l) e += static_cast<double>(l) * basis.occupation(state, l);
  return e;
}

SparseOperator from_triplets(Index dim, const std::vector<Triplet>& triplets) {
  SparseOperator op(dim, dim);
  op.setFromTriplets(triplets.begin(), triplets.end());
  op.makeCompressed();
  return op;
}

template <typename Diagonal>
SparseOperator diagonal_operator(const FockBasis& basis, Diagonal&& value) {
  std::vector<Triplet> triplets;
  triplets.reserve(static_cast<std::size_t>(basis.dimension()));
  for (Index i = 0; i < basis.dimension(); ++i) {
    const double v = value(i);
    if (v != 0.0) triplets.emplace_back(i, i, v);
  }
  return from_triplets(basis.dimension(), triplets);
}

}  // namespace

SparseOperator build_hopping_term(const FockBasis& basis) {
  std::vector<Triplet> triplets;
  triplets.reserve(static_cast<std::size_t>(basis.dimension()) * 2 * static_cast<std::size_t>(basis.sites()));
  std::vector<int> scratch(static_cast<std::size_t>(basis.sites()));
  for (Index i = 0; i < basis.dimension(); ++i) {
    for_each_hop(basis, i, scratch, [&](Index j, double amp) { triplets.emplace_back(i, j, -amp); });
  }
  return from_triplets(basis.dimension(), triplets);
}

SparseOperator build_interaction_term(const FockBasis& basis) {
  return diagonal_operator(basis, [&](Index i) { return interaction_energy(basis, i); });
}

SparseOperator build_gradient_generator(const FockBasis& basis) {
  return diagonal_operator(basis, [&](Index i) { return gradient_energy(basis, i); });
}

SparseOperator build_hamiltonian(const ModelParams& params, const FockBasis& basis) {
  params.validate();
  if (params.L != basis.sites() || params.N != basis.particles()) {
    throw std::invalid_argument("build_hamiltonian: basis does not match (L, N)");
  }
  std::vector<Triplet> triplets;
  triplets.reserve(static_cast<std::size_t>(basis.dimension()) * (2 * static_cast<std::size_t>(basis.sites()) + 1));
  std::vector<int> scratch(static_cast<std::size_t>(basis.sites()));
  for (Index i = 0; i < basis.dimension(); ++i) {
    const double diag = params.U * interaction_energy(basis, i) + params.h * gradient_energy(basis, i);
    if (diag != 0.0) triplets.emplace_back(i, i, diag);
    if (params.J != 0.0) {
      for_each_hop(basis, i, scratch, [&](Index j, double amp) { triplets.emplace_back(i, j, -params.J * amp); });
    }
  }
  return from_triplets(basis.dimension(), triplets);
}

StateVector apply(const SparseOperator& op, const StateVector& v) {
  if (v.size() != op.cols()) {
    throw std::invalid_argument("apply: vector length " + std::to_string(v.size()) +
                                " does not match operator dimension " + std::to_string(op.cols()));
  }
  return op * v;
}

double hermiticity_defect(const SparseOperator& op) {
  const SparseOperator adjoint = op.adjoint();
  const SparseOperator diff = op - adjoint;
  double worst = 0.0;
  for (Index k = 0; k < diff.outerSize(); ++k) {
    for (SparseOperator::InnerIterator it(diff, k); it; ++it) worst = std::max(worst, std::abs(it.value()));
  }
  return worst;
}

void write_triplets(std::ostream& os, const SparseOperator& op) {
  const auto precision = os.precision(17);
  for (Index row = 0; row < op.outerSize(); ++row) {
    for (SparseOperator::InnerIterator it(op, row); it; ++it) {
      os << it.row() << ' ' << it.col() << ' ' << it.value().real() << ' ' << it.value().imag() << '\n';
    }
  }
  os.precision(precision);
}

}  // namespace starkqfi
