#pragma once

#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "starkqfi/basis.hpp"
#include "starkqfi/hamiltonian.hpp"
#include "starkqfi/observables.hpp"
#include "starkqfi/propagator.hpp"
#include "starkqfi/qfi.hpp"

namespace starkqfi {

/// Time grid, plateau window and execution settings shared by every sweep.
struct RunSettings {
  double horizon = 200.0;      // T, in 1/J
  double time_step = 0.5;      // uniform grid spacing
  double window_fraction = 0.5;
  double plateau_tolerance = 0.15;
  Index max_dimension = 500'000;
  unsigned workers = 0;  // 0: hardware concurrency
  PropagatorOptions propagator{};

  void validate() const;
  /// dt, 2 dt, ..., T.
  std::vector<double> time_grid() const;
  /// Grid points with t >= (1 - window_fraction) T.
  std::vector<double> tail_grid() const;
};

/// Basis, Hamiltonian, generator and staggered initial state of one
/// configuration. Throws DimensionCapError above `max_dimension`.
struct StarkProblem {
  ModelParams params;
  FockBasis basis;
  SparseOperator hamiltonian;
  SparseOperator generator;
  FockState initial;
  StateVector psi0;

  static StarkProblem staggered(const ModelParams& params, Index max_dimension = 500'000);
};

/// Tail-window statistics of F_Q/t^2.
struct PlateauEstimate {
  double value = 0.0;
  double spread = 0.0;
  double t_min = 0.0;
  double t_max = 0.0;
  std::size_t samples = 0;
  bool accepted = false;  // spread/value within the tolerance
};

/// Mean and standard deviation of qfi_over_t2 over
/// t in [(1 - window_fraction) T, T], T being the last sample time.
PlateauEstimate plateau(std::span<const QfiSample> series, double window_fraction = 0.5,
                        double tolerance = 0.15);

/// Least-squares line through (log x, log y).
struct PowerLawFit {
  double exponent = 0.0;
  double prefactor = 0.0;
  double r_squared = 0.0;
  std::vector<std::pair<double, double>> points;
};

/// Requires at least `min_points` pairs with positive x and y.
PowerLawFit fit_power_law(std::span<const double> x, std::span<const double> y, std::size_t min_points = 4);

/// Full QFI series of the staggered state on settings.time_grid().
std::vector<QfiSample> qfi_time_series(const ModelParams& params, const RunSettings& settings);

/// Plateau of one configuration, evaluated on the tail grid only.
PlateauEstimate long_time_plateau(const ModelParams& params, const RunSettings& settings);

/// Occupancy profiles of the staggered state at each grid time (t >= 0).
std::vector<OccupancyProfile> occupancy_series(const ModelParams& params, std::span<const double> times,
                                               const RunSettings& settings);

/// Trapezoidal time average of total_multi over the span of profile times.
double time_averaged_multi(std::span<const OccupancyProfile> profiles);

/// One cell of a sweep. Failed cells keep the error message and a NaN value.
struct ScanCell {
  ModelParams params;
  PlateauEstimate plateau;
  std::string error;

  bool ok() const { return error.empty(); }
};

/// Plateaus of independent configurations on the worker pool, in input order.
std::vector<ScanCell> plateau_sweep(std::span<const ModelParams> configs, const RunSettings& settings);

struct ScalingResult {
  PowerLawFit fit;
  std::vector<ScanCell> cells;
};

/// F_Q/t^2 ~ L^beta at fixed N, U, h. Needs at least four sizes.
ScalingResult size_scaling(const ModelParams& base, std::span<const int> sizes, const RunSettings& settings);

/// F_Q/t^2 ~ N^alpha at fixed L. Needs at least four particle numbers and
/// L >= 2 max(N) - 1.
ScalingResult particle_scaling(const ModelParams& base, std::span<const int> particle_numbers,
                               const RunSettings& settings);

/// F_Q/t^2 ~ h^p over a localized-phase tilt grid.
ScalingResult localized_h_scaling(const ModelParams& base, std::span<const double> tilts,
                                  const RunSettings& settings);

/// `count` points log-spaced over [lo, hi].
std::vector<double> log_grid(double lo, double hi, int count);
/// lo, lo + step, ..., up to hi (inclusive within rounding).
std::vector<double> linear_grid(double lo, double hi, double step);

struct CriticalPoint {
  double h_c = 0.0;
  double peak_plateau = 0.0;
  Index peak_index = 0;
  bool at_boundary = false;
  std::vector<ScanCell> cells;
};

/// Argmax of the plateau over an ascending, log-spaced tilt grid of at
/// least 20 points, refined by one three-point parabolic step in log h.
CriticalPoint critical_point(const ModelParams& base, std::span<const double> tilts, const RunSettings& settings);

/// Discrete local maximum of A_r(., h) along U with parabolic refinement.
struct ResonancePeak {
  double h = 0.0;
  double U = 0.0;
  double height = 0.0;
  int nearest_m = 0;     // integer m >= 1 minimizing |U - m h|
  double distance = 0.0;  // |U - nearest_m h|
};

/// (U, h) map of plateaus and resonance coefficients
/// A_r(U, h) = plateau(U, h) / plateau(0, h). Rows index h, columns U.
struct ResonanceScan {
  int L = 0;
  int N = 0;
  std::vector<double> U_grid;
  std::vector<double> h_grid;
  Eigen::MatrixXd plateau;
  Eigen::MatrixXd spread;
  Eigen::MatrixXd ratio;
  Eigen::Array<bool, Eigen::Dynamic, Eigen::Dynamic> accepted;
  std::vector<std::string> failures;
  std::vector<ResonancePeak> peaks;
};

ResonanceScan resonance_scan(int L, int N, std::span<const double> U_grid, std::span<const double> h_grid,
                             const RunSettings& settings, double J = 1.0);

/// All strict interior local maxima of each row of `scan.ratio`.
std::vector<ResonancePeak> extract_peaks(const ResonanceScan& scan);

/// A_r(U = m h, h) for each N; rows index N, columns h.
struct ResonanceCoefficientTable {
  int L = 0;
  int m = 0;
  std::vector<int> particle_numbers;
  std::vector<double> h_grid;
  Eigen::MatrixXd resonant;
  Eigen::MatrixXd free;
  Eigen::MatrixXd ratio;
  std::vector<std::string> failures;
};

ResonanceCoefficientTable resonance_coefficient(int L, std::span<const int> particle_numbers, int m,
                                                std::span<const double> h_grid, const RunSettings& settings,
                                                double J = 1.0);

}  // namespace starkqfi
