#include "starkqfi/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <stdexcept>

#include "starkqfi/parallel.hpp"

namespace starkqfi {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

// Vertex abscissa of the parabola through three points.
double parabola_vertex(double x0, double y0, double x1, double y1, double x2, double y2) {
  const double a = (x1 - x0) * (y1 - y2);
  const double b = (x1 - x2) * (y1 - y0);
  const double denom = a - b;
  if (denom == 0.0) return x1;
  const double vertex = x1 - 0.5 * ((x1 - x0) * a - (x1 - x2) * b) / denom;
  // Stay inside the bracketing interval.
  return std::clamp(vertex, std::min(x0, x2), std::max(x0, x2));
}

ScalingResult fit_cells(std::vector<ScanCell> cells, const std::vector<double>& abscissa) {
  std::vector<double> x;
  std::vector<double> y;
  for (std::size_t i = 0; i < cells.size(); ++i) {
    if (cells[i].ok()) {
      x.push_back(abscissa[i]);
      y.push_back(cells[i].plateau.value);
    }
  }
  if (x.size() < 4) {
    std::ostringstream os;
    os << "scaling fit needs at least 4 successful points, got " << x.size();
    for (const auto& c : cells) {
      if (!c.ok()) os << "; " << c.error;
    }
    throw NumericalError(os.str());
  }
  return {fit_power_law(x, y), std::move(cells)};
}

}  // namespace

void RunSettings::validate() const {
  if (!(horizon > 0.0)) throw std::invalid_argument("horizon must be positive");
  if (!(time_step > 0.0) || time_step > horizon) throw std::invalid_argument("time_step must lie in (0, horizon]");
  if (!(window_fraction > 0.0) || !(window_fraction < 1.0)) {
    throw std::invalid_argument("window_fraction must lie in (0, 1)");
  }
  if (!(plateau_tolerance > 0.0)) throw std::invalid_argument("plateau_tolerance must be positive");
  if (max_dimension < 1) throw std::invalid_argument("max_dimension must be positive");
}

std::vector<double> RunSettings::time_grid() const {
  validate();
  const auto steps = static_cast<long>(std::llround(horizon / time_step));
  std::vector<double> grid;
  grid.reserve(static_cast<std::size_t>(steps));
  for (long k = 1; k <= steps; ++k) grid.push_back(static_cast<double>(k) * time_step);
  return grid;
}

std::vector<double> RunSettings::tail_grid() const {
  const auto full = time_grid();
  const double start = (1.0 - window_fraction) * full.back();
  std::vector<double> tail;
  for (double t : full) {
    if (t >= start - 1e-12 * full.back()) tail.push_back(t);
  }
  return tail;
}

StarkProblem StarkProblem::staggered(const ModelParams& params, Index max_dimension) {
  params.validate();
  const Index dim = dimension(params.L, params.N);
  if (dim > max_dimension) {
    std::ostringstream os;
    os << "basis dimension " << dim << " for (L=" << params.L << ", N=" << params.N << ") exceeds the cap "
       << max_dimension;
    throw DimensionCapError(os.str());
  }
  FockBasis basis(params.L, params.N);
  FockState initial = staggered_initial_state(params.L, params.N);
  StateVector psi0 = basis.basis_vector(initial);
  SparseOperator H = build_hamiltonian(params, basis);
  SparseOperator G = build_gradient_generator(basis);
  return {params, std::move(basis), std::move(H), std::move(G), std::move(initial), std::move(psi0)};
}

PlateauEstimate plateau(std::span<const QfiSample> series, double window_fraction, double tolerance) {
  if (series.empty()) throw std::invalid_argument("plateau: empty series");
  if (!(window_fraction > 0.0) || !(window_fraction < 1.0)) {
    throw std::invalid_argument("plateau: window_fraction must lie in (0, 1)");
  }
  const double horizon = series.back().t;
  const double start = (1.0 - window_fraction) * horizon;

  PlateauEstimate est;
  est.t_max = horizon;
  est.t_min = horizon;
  double sum = 0.0;
  for (const auto& s : series) {
    if (s.t >= start - 1e-12 * horizon && s.t > 0.0) {
      sum += s.qfi_over_t2;
      est.t_min = std::min(est.t_min, s.t);
      ++est.samples;
    }
  }
  if (est.samples == 0) throw std::invalid_argument("plateau: no samples in the tail window");
  est.value = sum / static_cast<double>(est.samples);
  double sq = 0.0;
  for (const auto& s : series) {
    if (s.t >= start - 1e-12 * horizon && s.t > 0.0) sq += (s.qfi_over_t2 - est.value) * (s.qfi_over_t2 - est.value);
  }
  est.spread = std::sqrt(sq / static_cast<double>(est.samples));
  est.accepted = est.value > 0.0 ? est.spread / est.value <= tolerance : est.spread == 0.0;
  return est;
}

PowerLawFit fit_power_law(std::span<const double> x, std::span<const double> y, std::size_t min_points) {
  if (x.size() != y.size()) throw std::invalid_argument("fit_power_law: x and y differ in length");
  if (x.size() < min_points) {
    throw std::invalid_argument("fit_power_law: need at least " + std::to_string(min_points) + " points");
  }
  const auto n = static_cast<Index>(x.size());
  Eigen::VectorXd lx(n);
  Eigen::VectorXd ly(n);
  PowerLawFit fit;
  for (Index i = 0; i < n; ++i) {
    const auto k = static_cast<std::size_t>(i);
    if (!(x[k] > 0.0) || !(y[k] > 0.0)) throw std::invalid_argument("fit_power_law: values must be positive");
    lx(i) = std::log(x[k]);
    ly(i) = std::log(y[k]);
    fit.points.emplace_back(x[k], y[k]);
  }
  const double mx = lx.mean();
  const double my = ly.mean();
  const double sxx = (lx.array() - mx).square().sum();
  if (sxx == 0.0) throw std::invalid_argument("fit_power_law: abscissae must not all coincide");
  const double sxy = ((lx.array() - mx) * (ly.array() - my)).sum();
  fit.exponent = sxy / sxx;
  const double intercept = my - fit.exponent * mx;
  fit.prefactor = std::exp(intercept);
  const double ss_tot = (ly.array() - my).square().sum();
  const double ss_res = (ly.array() - intercept - fit.exponent * lx.array()).square().sum();
  fit.r_squared = ss_tot > 0.0 ? std::clamp(1.0 - ss_res / ss_tot, 0.0, 1.0) : 1.0;
  return fit;
}

std::vector<QfiSample> qfi_time_series(const ModelParams& params, const RunSettings& settings) {
  const auto problem = StarkProblem::staggered(params, settings.max_dimension);
  const auto grid = settings.time_grid();
  return qfi_series(problem.hamiltonian, problem.generator, problem.psi0, grid, settings.propagator);
}

PlateauEstimate long_time_plateau(const ModelParams& params, const RunSettings& settings) {
  const auto problem = StarkProblem::staggered(params, settings.max_dimension);
  const auto grid = settings.tail_grid();
  const auto series = qfi_series(problem.hamiltonian, problem.generator, problem.psi0, grid, settings.propagator);
  // The tail grid already is the window; average all of it.
  PlateauEstimate est;
  est.t_min = grid.front();
  est.t_max = grid.back();
  est.samples = series.size();
  double sum = 0.0;
  for (const auto& s : series) sum += s.qfi_over_t2;
  est.value = sum / static_cast<double>(series.size());
  double sq = 0.0;
  for (const auto& s : series) sq += (s.qfi_over_t2 - est.value) * (s.qfi_over_t2 - est.value);
  est.spread = std::sqrt(sq / static_cast<double>(series.size()));
  est.accepted =
      est.value > 0.0 ? est.spread / est.value <= settings.plateau_tolerance : est.spread == 0.0;
  return est;
}

std::vector<OccupancyProfile> occupancy_series(const ModelParams& params, std::span<const double> times,
                                               const RunSettings& settings) {
  const auto problem = StarkProblem::staggered(params, settings.max_dimension);
  std::vector<OccupancyProfile> profiles;
  profiles.reserve(times.size());
  propagate(problem.hamiltonian, problem.psi0, times, settings.propagator,
            [&](double t, const StateVector& psi) { profiles.push_back(occupancy_profile(psi, problem.basis, t)); });
  return profiles;
}

double time_averaged_multi(std::span<const OccupancyProfile> profiles) {
  if (profiles.empty()) throw std::invalid_argument("time_averaged_multi: no profiles");
  if (profiles.size() == 1) return profiles.front().total_multi;
  double integral = 0.0;
  for (std::size_t k = 1; k < profiles.size(); ++k) {
    integral += 0.5 * (profiles[k].total_multi + profiles[k - 1].total_multi) * (profiles[k].t - profiles[k - 1].t);
  }
  const double span = profiles.back().t - profiles.front().t;
  if (!(span > 0.0)) throw std::invalid_argument("time_averaged_multi: times must span a positive interval");
  return integral / span;
}

std::vector<ScanCell> plateau_sweep(std::span<const ModelParams> configs, const RunSettings& settings) {
  settings.validate();
  return parallel_map<ScanCell>(configs.size(), settings.workers, [&](std::size_t i) {
    ScanCell cell;
    cell.params = configs[i];
    try {
      cell.plateau = long_time_plateau(configs[i], settings);
    } catch (const std::exception& e) {
      cell.error = e.what();
      cell.plateau.value = kNaN;
      cell.plateau.spread = kNaN;
    }
    return cell;
  });
}

ScalingResult size_scaling(const ModelParams& base, std::span<const int> sizes, const RunSettings& settings) {
  if (sizes.size() < 4) throw std::invalid_argument("size_scaling: need at least 4 sizes");
  std::vector<ModelParams> configs;
  std::vector<double> x;
  for (int L : sizes) {
    ModelParams p = base;
    p.L = L;
    configs.push_back(p);
    x.push_back(L);
  }
  return fit_cells(plateau_sweep(configs, settings), x);
}

ScalingResult particle_scaling(const ModelParams& base, std::span<const int> particle_numbers,
                               const RunSettings& settings) {
  if (particle_numbers.size() < 4) throw std::invalid_argument("particle_scaling: need at least 4 particle numbers");
  const int max_n = *std::max_element(particle_numbers.begin(), particle_numbers.end());
  if (base.L < 2 * max_n - 1) {
    throw std::invalid_argument("particle_scaling: L must be at least 2 max(N) - 1");
  }
  std::vector<ModelParams> configs;
  std::vector<double> x;
  for (int N : particle_numbers) {
    if (N < 1) throw std::invalid_argument("particle_scaling: particle numbers must be positive");
    ModelParams p = base;
    p.N = N;
    configs.push_back(p);
    x.push_back(N);
  }
  return fit_cells(plateau_sweep(configs, settings), x);
}

ScalingResult localized_h_scaling(const ModelParams& base, std::span<const double> tilts,
                                  const RunSettings& settings) {
  if (tilts.size() < 4) throw std::invalid_argument("localized_h_scaling: need at least 4 tilts");
  std::vector<ModelParams> configs;
  std::vector<double> x;
  for (double h : tilts) {
    ModelParams p = base;
    p.h = h;
    configs.push_back(p);
    x.push_back(h);
  }
  return fit_cells(plateau_sweep(configs, settings), x);
}

std::vector<double> log_grid(double lo, double hi, int count) {
  if (!(lo > 0.0) || !(hi > lo) || count < 2) throw std::invalid_argument("log_grid: need 0 < lo < hi, count >= 2");
  std::vector<double> grid(static_cast<std::size_t>(count));
  const double a = std::log(lo);
  const double b = std::log(hi);
  for (int i = 0; i < count; ++i) grid[static_cast<std::size_t>(i)] = std::exp(a + (b - a) * i / (count - 1));
  grid.front() = lo;
  grid.back() = hi;
  return grid;
}

std::vector<double> linear_grid(double lo, double hi, double step) {
  if (!(step > 0.0) || hi < lo) throw std::invalid_argument("linear_grid: need step > 0 and hi >= lo");
  std::vector<double> grid;
  const auto n = static_cast<long>(std::floor((hi - lo) / step + 1e-9));
  for (long k = 0; k <= n; ++k) grid.push_back(lo + static_cast<double>(k) * step);
  return grid;
}

CriticalPoint critical_point(const ModelParams& base, std::span<const double> tilts, const RunSettings& settings) {
  if (tilts.size() < 20) throw std::invalid_argument("critical_point: need at least 20 tilts");
  for (std::size_t i = 0; i < tilts.size(); ++i) {
    if (!(tilts[i] > 0.0) || (i > 0 && tilts[i] <= tilts[i - 1])) {
      throw std::invalid_argument("critical_point: tilts must be positive and ascending");
    }
  }
  std::vector<ModelParams> configs;
  for (double h : tilts) {
    ModelParams p = base;
    p.h = h;
    configs.push_back(p);
  }
  CriticalPoint cp;
  cp.cells = plateau_sweep(configs, settings);

  Index best = -1;
  for (std::size_t i = 0; i < cp.cells.size(); ++i) {
    if (!cp.cells[i].ok()) continue;
    if (best < 0 || cp.cells[i].plateau.value > cp.cells[static_cast<std::size_t>(best)].plateau.value) {
      best = static_cast<Index>(i);
    }
  }
  if (best < 0) throw NumericalError("critical_point: every cell failed");
  cp.peak_index = best;
  const auto b = static_cast<std::size_t>(best);
  cp.peak_plateau = cp.cells[b].plateau.value;
  cp.h_c = tilts[b];
  cp.at_boundary = b == 0 || b + 1 == tilts.size();
  if (!cp.at_boundary && cp.cells[b - 1].ok() && cp.cells[b + 1].ok()) {
    const double x = parabola_vertex(std::log(tilts[b - 1]), cp.cells[b - 1].plateau.value, std::log(tilts[b]),
                                     cp.cells[b].plateau.value, std::log(tilts[b + 1]),
                                     cp.cells[b + 1].plateau.value);
    cp.h_c = std::exp(x);
  }
  return cp;
}

std::vector<ResonancePeak> extract_peaks(const ResonanceScan& scan) {
  std::vector<ResonancePeak> peaks;
  const auto& U = scan.U_grid;
  for (Index r = 0; r < scan.ratio.rows(); ++r) {
    const double h = scan.h_grid[static_cast<std::size_t>(r)];
    for (Index c = 1; c + 1 < scan.ratio.cols(); ++c) {
      const double left = scan.ratio(r, c - 1);
      const double mid = scan.ratio(r, c);
      const double right = scan.ratio(r, c + 1);
      if (!std::isfinite(left) || !std::isfinite(mid) || !std::isfinite(right)) continue;
      if (!(mid > left && mid > right)) continue;
      const auto k = static_cast<std::size_t>(c);
      ResonancePeak peak;
      peak.h = h;
      peak.U = parabola_vertex(U[k - 1], left, U[k], mid, U[k + 1], right);
      peak.height = mid;
      peak.nearest_m = std::max(1, static_cast<int>(std::lround(peak.U / h)));
      peak.distance = std::abs(peak.U - peak.nearest_m * h);
      peaks.push_back(peak);
    }
  }
  return peaks;
}

ResonanceScan resonance_scan(int L, int N, std::span<const double> U_grid, std::span<const double> h_grid,
                             const RunSettings& settings, double J) {
  if (U_grid.empty() || h_grid.empty()) throw std::invalid_argument("resonance_scan: empty grid");
  for (std::size_t i = 1; i < U_grid.size(); ++i) {
    if (U_grid[i] <= U_grid[i - 1]) throw std::invalid_argument("resonance_scan: U grid must be ascending");
  }
  ResonanceScan scan;
  scan.L = L;
  scan.N = N;
  scan.U_grid.assign(U_grid.begin(), U_grid.end());
  scan.h_grid.assign(h_grid.begin(), h_grid.end());

  const auto zero = std::find(U_grid.begin(), U_grid.end(), 0.0);
  const bool has_zero = zero != U_grid.end();
  const auto nU = static_cast<Index>(U_grid.size());
  const auto nh = static_cast<Index>(h_grid.size());

  // Row-major cell order (h outer, U inner), then one U=0 baseline per h
  // when the grid lacks U=0.
  std::vector<ModelParams> configs;
  for (double h : h_grid) {
    for (double U : U_grid) configs.push_back({J, U, h, L, N});
  }
  if (!has_zero) {
    for (double h : h_grid) configs.push_back({J, 0.0, h, L, N});
  }
  const auto cells = plateau_sweep(configs, settings);

  scan.plateau.resize(nh, nU);
  scan.spread.resize(nh, nU);
  scan.ratio.resize(nh, nU);
  scan.accepted.resize(nh, nU);
  const auto zero_col = has_zero ? static_cast<Index>(zero - U_grid.begin()) : -1;
  for (Index r = 0; r < nh; ++r) {
    for (Index c = 0; c < nU; ++c) {
      const auto& cell = cells[static_cast<std::size_t>(r * nU + c)];
      scan.plateau(r, c) = cell.plateau.value;
      scan.spread(r, c) = cell.plateau.spread;
      scan.accepted(r, c) = cell.ok() && cell.plateau.accepted;
      if (!cell.ok()) {
        std::ostringstream os;
        os << "U=" << cell.params.U << " h=" << cell.params.h << ": " << cell.error;
        scan.failures.push_back(os.str());
      }
    }
    const double baseline = has_zero ? scan.plateau(r, zero_col)
                                     : cells[static_cast<std::size_t>(nh * nU + r)].plateau.value;
    for (Index c = 0; c < nU; ++c) {
      scan.ratio(r, c) = c == zero_col ? 1.0 : scan.plateau(r, c) / baseline;
    }
  }
  if (!has_zero) {
    for (Index r = 0; r < nh; ++r) {
      const auto& cell = cells[static_cast<std::size_t>(nh * nU + r)];
      if (!cell.ok()) scan.failures.push_back("baseline h=" + std::to_string(cell.params.h) + ": " + cell.error);
    }
  }
  scan.peaks = extract_peaks(scan);
  return scan;
}

ResonanceCoefficientTable resonance_coefficient(int L, std::span<const int> particle_numbers, int m,
                                                std::span<const double> h_grid, const RunSettings& settings,
                                                double J) {
  if (m < 0) throw std::invalid_argument("resonance_coefficient: m must be non-negative");
  if (particle_numbers.empty() || h_grid.empty()) throw std::invalid_argument("resonance_coefficient: empty grid");
  ResonanceCoefficientTable table;
  table.L = L;
  table.m = m;
  table.particle_numbers.assign(particle_numbers.begin(), particle_numbers.end());
  table.h_grid.assign(h_grid.begin(), h_grid.end());

  const auto nN = static_cast<Index>(particle_numbers.size());
  const auto nh = static_cast<Index>(h_grid.size());
  std::vector<ModelParams> configs;
  for (int N : particle_numbers) {
    for (double h : h_grid) {
      configs.push_back({J, 0.0, h, L, N});
      if (m > 0) configs.push_back({J, m * h, h, L, N});
    }
  }
  const auto cells = plateau_sweep(configs, settings);
  const std::size_t stride = m > 0 ? 2 : 1;

  table.resonant.resize(nN, nh);
  table.free.resize(nN, nh);
  table.ratio.resize(nN, nh);
  for (Index i = 0; i < nN; ++i) {
    for (Index j = 0; j < nh; ++j) {
      const std::size_t base = static_cast<std::size_t>(i * nh + j) * stride;
      const auto& free_cell = cells[base];
      const auto& res_cell = cells[base + stride - 1];
      for (const auto* cell : {&free_cell, &res_cell}) {
        if (!cell->ok()) {
          std::ostringstream os;
          os << "N=" << cell->params.N << " U=" << cell->params.U << " h=" << cell->params.h << ": " << cell->error;
          table.failures.push_back(os.str());
        }
      }
      table.free(i, j) = free_cell.plateau.value;
      table.resonant(i, j) = res_cell.plateau.value;
      table.ratio(i, j) = m == 0 ? 1.0 : res_cell.plateau.value / free_cell.plateau.value;
    }
  }
  return table;
}

}  // namespace starkqfi
