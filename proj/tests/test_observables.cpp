#include <doctest.h>

#include <random>

#include "oracles.hpp"
#include "starkqfi/analysis.hpp"
#include "starkqfi/observables.hpp"

using namespace starkqfi;

TEST_SUITE("observables") {

TEST_CASE("Fock states") {
  FockBasis b(7, 3);
  const auto stag = occupancy_profile(b.basis_vector(staggered_initial_state(7, 3)), b);
  CHECK(stag.multi_occupancy.cwiseAbs().maxCoeff() == 0.0);
  CHECK(stag.total_multi == 0.0);
  CHECK(stag.density.sum() == doctest::Approx(3.0));

  FockBasis two(4, 2);
  const auto packed = occupancy_profile(two.basis_vector(FockState({2, 0, 0, 0})), two);
  CHECK(packed.multi_occupancy(0) == 2.0);
  CHECK(packed.multi_occupancy.tail(3).cwiseAbs().maxCoeff() == 0.0);
  CHECK(packed.total_multi == 2.0);
}

TEST_CASE("random states against the oracle") {
  std::mt19937_64 rng(8);
  const int L = 5;
  const int N = 3;
  FockBasis b(L, N);
  const auto states = oracle::enumerate(L, N);
  for (int trial = 0; trial < 10; ++trial) {
    const auto psi = oracle::random_state(b.dimension(), rng);
    const auto p = occupancy_profile(psi, b, 1.5);
    CHECK(p.t == 1.5);
    Eigen::VectorXd n = Eigen::VectorXd::Zero(L);
    Eigen::VectorXd m = Eigen::VectorXd::Zero(L);
    for (std::size_t i = 0; i < states.size(); ++i) {
      const double w = std::norm(psi(static_cast<Index>(i)));
      for (int l = 0; l < L; ++l) {
        const int k = states[i][static_cast<std::size_t>(l)];
        n(l) += w * k;
        m(l) += w * k * (k - 1);
      }
    }
    CHECK((p.density - n).cwiseAbs().maxCoeff() < 1e-14);
    CHECK((p.multi_occupancy - m).cwiseAbs().maxCoeff() < 1e-14);
    CHECK(p.density.sum() == doctest::Approx(N).epsilon(1e-12));
  }
}

TEST_CASE("errors") {
  FockBasis b(4, 2);
  CHECK_THROWS_AS(occupancy_profile(StateVector::Zero(3), b), std::invalid_argument);
  StateVector v = StateVector::Zero(b.dimension());
  v(0) = 1.1;
  CHECK_THROWS_AS(occupancy_profile(v, b), NumericalError);
}

TEST_CASE("sum rule along a trajectory and hard-core limit") {
  RunSettings s;
  std::vector<double> times;
  for (int k = 0; k <= 100; ++k) times.push_back(0.5 * k);
  const auto profiles = occupancy_series({1.0, 1e4, 1.3, 9, 3}, times, s);
  double worst = 0.0;
  for (const auto& p : profiles) {
    CHECK(std::abs(p.density.sum() - 3.0) <= 1e-8);
    CHECK(p.multi_occupancy.minCoeff() >= -1e-10);
    worst = std::max(worst, p.total_multi);
  }
  CHECK(worst <= 1e-2);
}

TEST_CASE("reflection with reversed tilt mirrors the profile") {
  // L=7, N=3 staggered is symmetric under l -> L-1-l.
  RunSettings s;
  const std::vector<double> times{0.0, 3.0, 17.5};
  const auto up = occupancy_series({1.0, 2.0, 0.9, 7, 3}, times, s);
  const auto down = occupancy_series({1.0, 2.0, -0.9, 7, 3}, times, s);
  for (std::size_t k = 0; k < times.size(); ++k) {
    CHECK((up[k].density - down[k].density.reverse()).cwiseAbs().maxCoeff() < 1e-9);
    CHECK((up[k].multi_occupancy - down[k].multi_occupancy.reverse()).cwiseAbs().maxCoeff() < 1e-9);
  }
}

TEST_CASE("resonant double occupancy exceeds the off-resonant value") {
  RunSettings s;
  std::vector<double> times;
  for (int k = 0; k <= 200; ++k) times.push_back(0.5 * k);
  const double h = 3.0;
  const double resonant = time_averaged_multi(occupancy_series({1.0, h, h, 7, 3}, times, s));
  const double off = time_averaged_multi(occupancy_series({1.0, 2.5 * h, h, 7, 3}, times, s));
  CHECK(resonant > 2.0 * off);
}

TEST_CASE("trapezoidal average") {
  std::vector<OccupancyProfile> p(3);
  p[0].t = 0.0;
  p[0].total_multi = 0.0;
  p[1].t = 1.0;
  p[1].total_multi = 2.0;
  p[2].t = 2.0;
  p[2].total_multi = 2.0;
  CHECK(time_averaged_multi(p) == doctest::Approx(1.5));
}

}
