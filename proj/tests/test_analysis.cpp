#include <doctest.h>

#include <cmath>

#include "starkqfi/analysis.hpp"

using namespace starkqfi;

namespace {

RunSettings quick(double horizon = 200.0) {
  RunSettings s;
  s.horizon = horizon;
  s.workers = 2;
  return s;
}

}  // namespace

TEST_SUITE("analysis") {

TEST_CASE("plateau of synthetic series") {
  std::vector<QfiSample> series;
  for (int k = 1; k <= 400; ++k) {
    const double t = 0.5 * k;
    series.push_back({t, 3.0 * t * t, 3.0});
  }
  const auto p = plateau(series, 0.5);
  CHECK(p.value == doctest::Approx(3.0));
  CHECK(p.spread == doctest::Approx(0.0));
  CHECK(p.accepted);
  CHECK(p.t_min == doctest::Approx(100.0));
  CHECK(p.t_max == 200.0);
  CHECK(p.samples == 201);

  for (auto& s : series) s = {s.t, 0.0, 0.0};
  const auto zero = plateau(series);
  CHECK(zero.value == 0.0);
  CHECK(zero.accepted);

  CHECK_THROWS_AS(plateau(std::vector<QfiSample>{}), std::invalid_argument);
  CHECK_THROWS_AS(plateau(series, 1.0), std::invalid_argument);
}

TEST_CASE("fluctuating series is flagged") {
  std::vector<QfiSample> series;
  for (int k = 1; k <= 100; ++k) {
    const double y = (k % 2 == 0) ? 1.0 : 2.0;
    series.push_back({double(k), y * k * k, y});
  }
  CHECK_FALSE(plateau(series, 0.5, 0.15).accepted);
}

TEST_CASE("power-law fit") {
  std::vector<double> x{1.0, 2.0, 4.0, 8.0, 16.0};
  std::vector<double> y;
  for (double v : x) y.push_back(0.3 * std::pow(v, 1.7));
  const auto fit = fit_power_law(x, y);
  CHECK(fit.exponent == doctest::Approx(1.7).epsilon(1e-12));
  CHECK(fit.prefactor == doctest::Approx(0.3).epsilon(1e-12));
  CHECK(fit.r_squared == doctest::Approx(1.0));
  CHECK(fit.points.size() == 5);

  std::vector<double> flat(5, 2.0);
  const auto f = fit_power_law(x, flat);
  CHECK(f.exponent == doctest::Approx(0.0).epsilon(1e-12));
  CHECK(f.r_squared == 1.0);

  CHECK_THROWS_AS(fit_power_law(std::vector<double>{1, 2, 3}, std::vector<double>{1, 2, 3}), std::invalid_argument);
  CHECK_THROWS_AS(fit_power_law(std::vector<double>{1, 2, 3, 4}, std::vector<double>{1, -2, 3, 4}),
                  std::invalid_argument);
}

TEST_CASE("grids") {
  const auto g = log_grid(0.05, 5.0, 21);
  CHECK(g.size() == 21);
  CHECK(g.front() == 0.05);
  CHECK(g.back() == 5.0);
  CHECK(g[10] == doctest::Approx(0.5));
  const auto u = linear_grid(0.0, 20.0, 0.5);
  CHECK(u.size() == 41);
  CHECK(u.back() == doctest::Approx(20.0));
  RunSettings s;
  CHECK(s.time_grid().size() == 400);
  CHECK(s.tail_grid().size() == 201);
  CHECK(s.tail_grid().front() == 100.0);
}

TEST_CASE("time series has zero QFI without hopping") {
  const auto series = qfi_time_series({0.0, 3.0, 2.0, 7, 2}, quick(20.0));
  for (const auto& s : series) CHECK(s.qfi == doctest::Approx(0.0).epsilon(1e-9));
}

TEST_CASE("localized plateau matches the dense recomputation") {
  RunSettings krylov = quick();
  krylov.propagator.method = PropagationMethod::krylov;
  RunSettings dense = quick();
  dense.propagator.method = PropagationMethod::dense;
  const ModelParams p{1.0, 0.0, 5.0, 11, 2};
  const auto a = long_time_plateau(p, krylov);
  const auto b = long_time_plateau(p, dense);
  CHECK(std::abs(a.value - b.value) <= 1e-8 * b.value);
  // Two independent particles in the Wannier-Stark regime: 8 N J^2 / h^2.
  CHECK(b.value == doctest::Approx(8.0 * 2 / 25.0).epsilon(0.05));
  CHECK(b.accepted);

  const auto full = qfi_time_series(p, dense);
  CHECK(plateau(full).value == doctest::Approx(b.value).epsilon(1e-12));
}

TEST_CASE("sweeps keep input order and record failures") {
  const std::vector<ModelParams> configs{{1.0, 0.0, 5.0, 7, 2}, {1.0, 0.0, 5.0, 3, 3}, {1.0, 0.0, 4.0, 9, 2}};
  const auto cells = plateau_sweep(configs, quick(40.0));
  REQUIRE(cells.size() == 3);
  CHECK(cells[0].ok());
  CHECK_FALSE(cells[1].ok());
  CHECK(std::isnan(cells[1].plateau.value));
  CHECK(cells[2].ok());
  CHECK(cells[2].params.L == 9);
}

TEST_CASE("scaling preconditions") {
  const ModelParams base{1.0, 0.0, 5.0, 11, 2};
  CHECK_THROWS_AS(size_scaling(base, std::vector<int>{7, 9, 11}, quick()), std::invalid_argument);
  CHECK_THROWS_AS(particle_scaling(base, std::vector<int>{1}, quick()), std::invalid_argument);
  CHECK_THROWS_AS(particle_scaling(base, std::vector<int>{1, 2, 3, 7}, quick()), std::invalid_argument);
  CHECK_THROWS_AS(critical_point(base, log_grid(0.1, 5.0, 10), quick()), std::invalid_argument);
}

TEST_CASE("localized plateau decays as h^-2") {
  const auto result = localized_h_scaling({1.0, 0.0, 0.0, 9, 1}, std::vector<double>{3.0, 4.5, 6.0, 8.0, 10.0}, quick());
  CHECK(result.fit.exponent == doctest::Approx(-2.0).epsilon(0.15));
  CHECK(result.fit.r_squared >= 0.9);
}

TEST_CASE("critical point lies inside the grid") {
  const auto cp = critical_point({1.0, 0.0, 0.0, 9, 2}, log_grid(0.05, 5.0, 24), quick());
  CHECK_FALSE(cp.at_boundary);
  CHECK(cp.h_c > 0.05);
  CHECK(cp.h_c < 5.0);
  CHECK(cp.peak_plateau > cp.cells.front().plateau.value);
  CHECK(cp.peak_plateau > cp.cells.back().plateau.value);
}

TEST_CASE("resonance scan bookkeeping") {
  const std::vector<double> U{0.0, 1.0, 2.0};
  const std::vector<double> h{3.0, 4.0};
  const auto scan = resonance_scan(7, 2, U, h, quick(60.0));
  REQUIRE(scan.ratio.rows() == 2);
  REQUIRE(scan.ratio.cols() == 3);
  CHECK(scan.ratio(0, 0) == 1.0);
  CHECK(scan.ratio(1, 0) == 1.0);
  CHECK(scan.failures.empty());

  const auto only_zero = resonance_scan(7, 2, std::vector<double>{0.0}, h, quick(60.0));
  CHECK((only_zero.ratio.array() == 1.0).all());

  // Without U=0 in the grid a separate baseline is computed.
  const auto shifted = resonance_scan(7, 2, std::vector<double>{1.0, 2.0}, h, quick(60.0));
  CHECK(shifted.ratio(0, 0) == doctest::Approx(scan.ratio(0, 1)).epsilon(1e-12));

  const auto table = resonance_coefficient(7, std::vector<int>{1, 2}, 0, h, quick(60.0));
  CHECK((table.ratio.array() == 1.0).all());
}

TEST_CASE("peak extraction with parabolic refinement") {
  ResonanceScan scan;
  scan.h_grid = {2.0};
  scan.U_grid = {3.0, 3.5, 4.0, 4.5, 5.0};
  scan.ratio.resize(1, 5);
  scan.ratio << 1.0, 1.5, 2.0, 1.5, 1.0;
  const auto peaks = extract_peaks(scan);
  REQUIRE(peaks.size() == 1);
  CHECK(peaks[0].U == doctest::Approx(4.0));
  CHECK(peaks[0].nearest_m == 2);
  CHECK(peaks[0].distance == doctest::Approx(0.0));
  CHECK(peaks[0].height == 2.0);
}

TEST_CASE("dimension cap") {
  CHECK_THROWS_AS(StarkProblem::staggered({1.0, 0.0, 1.0, 11, 5}, 1000), DimensionCapError);
  const auto p = StarkProblem::staggered({1.0, 0.0, 1.0, 11, 5}, 3003);
  CHECK(p.basis.dimension() == 3003);
}

}
