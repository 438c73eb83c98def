#pragma once

#include <iosfwd>

#include "starkqfi/basis.hpp"
#include "starkqfi/types.hpp"

namespace starkqfi {

/// Couplings and lattice of the tilted Bose-Hubbard chain
///   H = -J sum_l (b+_l b_{l+1} + h.c.) + U/2 sum_l n_l(n_l-1) + h sum_l l n_l
/// with open boundaries and l = 0 at the lowest site. Energies share one
/// unit; the dimensionless default takes J = 1 and hbar = 1.
struct ModelParams {
  double J = 1.0;
  double U = 0.0;
  double h = 0.0;
  int L = 1;
  int N = 0;

  void validate() const;
};

/// -sum_l (b+_l b_{l+1} + h.c.), the hopping part per unit J.
SparseOperator build_hopping_term(const FockBasis& basis);
/// 1/2 sum_l n_l(n_l-1), the interaction part per unit U.
SparseOperator build_interaction_term(const FockBasis& basis);
/// G = dH/dh = sum_l l n_l. Diagonal.
SparseOperator build_gradient_generator(const FockBasis& basis);

/// Full Hamiltonian, assembled in a single pass over the basis. Throws
/// std::invalid_argument if the basis sector does not match params.
SparseOperator build_hamiltonian(const ModelParams& params, const FockBasis& basis);

/// Matrix-vector product with a length check.
StateVector apply(const SparseOperator& op, const StateVector& v);

/// max |A_ij - conj(A_ji)| over stored entries.
double hermiticity_defect(const SparseOperator& op);

/// Writes "row col re im" per stored entry, sorted by row then column.
void write_triplets(std::ostream& os, const SparseOperator& op);

}  // namespace starkqfi
