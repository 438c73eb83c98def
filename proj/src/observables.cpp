#include "starkqfi/observables.hpp"

#include <cmath>
#include <stdexcept>

namespace starkqfi {

OccupancyProfile occupancy_profile(const StateVector& psi, const FockBasis& basis, double t) {
  if (psi.size() != basis.dimension()) {
    throw std::invalid_argument("occupancy_profile: state length does not match basis dimension");
  }
  const Eigen::VectorXd weights = psi.cwiseAbs2();
  if (std::abs(weights.sum() - 1.0) > 2e-8) throw NumericalError("occupancy_profile: state is not normalized");

  const auto& occ = basis.occupations();
  const Eigen::MatrixXd n = occ.cast<double>().matrix();
  const Eigen::MatrixXd pairs = (occ * (occ - 1)).cast<double>().matrix();

  OccupancyProfile profile;
  profile.t = t;
  profile.density = n.transpose() * weights;
  profile.multi_occupancy = pairs.transpose() * weights;
  profile.total_multi = profile.multi_occupancy.sum();
  return profile;
}

}  // namespace starkqfi
