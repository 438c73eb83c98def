#pragma once

#include "starkqfi/basis.hpp"
#include "starkqfi/types.hpp"

namespace starkqfi {

/// Site-resolved density <n_l> and multiple occupancy N_l = <n_l(n_l - 1)>.
struct OccupancyProfile {
  double t = 0.0;
  Eigen::VectorXd density;
  Eigen::VectorXd multi_occupancy;
  double total_multi = 0.0;
};

/// Diagonal expectations from the probability weights |psi_i|^2 in one pass
/// over the occupation table. Throws std::invalid_argument on a length
/// mismatch and NumericalError if |psi| deviates from 1 by more than 1e-8.
OccupancyProfile occupancy_profile(const StateVector& psi, const FockBasis& basis, double t = 0.0);

}  // namespace starkqfi
