#pragma once

#include <complex>
#include <stdexcept>

#include <Eigen/Dense>
#include <Eigen/SparseCore>

namespace starkqfi {

using Index = Eigen::Index;
using Complex = std::complex<double>;

/// State vector in the Fock basis.
using StateVector = Eigen::VectorXcd;

/// Row-compressed Hermitian operator in the Fock basis. Row-major storage
/// fixes the summation order of products (row by row, ascending column).
using SparseOperator = Eigen::SparseMatrix<Complex, Eigen::RowMajor, Index>;

/// Raised when a numerical procedure fails (Krylov breakdown, loss of
/// normalization, non-convergence).
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Raised when a configuration would exceed the configured basis
/// dimension cap.
class DimensionCapError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace starkqfi
