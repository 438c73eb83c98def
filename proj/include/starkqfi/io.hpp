#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "starkqfi/analysis.hpp"
#include "starkqfi/gravimetry.hpp"
#include "starkqfi/observables.hpp"

namespace starkqfi::io {

using nlohmann::json;

/// Shortest text that reads back to the same double; "nan" and "inf" for
/// non-finite values.
std::string format_double(double value);

/// 64-bit FNV-1a.
std::uint64_t fnv1a(std::string_view bytes);
/// fnv1a of the compact dump of `config` as 16 hex digits. Object keys are
/// sorted by the json type, so equal configs hash equally.
std::string config_hash(const json& config);

/// Writes `text` to `path`, creating parent directories.
void write_file(const std::filesystem::path& path, std::string_view text);

json to_json(const ModelParams& params);
json to_json(const PlateauEstimate& estimate);
json to_json(const PowerLawFit& fit);
json to_json(const RunSettings& settings);
json to_json(const PhysicalSetup& setup);
json to_json(const ResonancePeak& peak);

/// "ok", "unsettled" (spread above tolerance) or "failed".
std::string cell_flag(const ScanCell& cell);

/// One labelled QFI series per (U, h).
struct LabelledSeries {
  double U = 0.0;
  double h = 0.0;
  std::vector<QfiSample> samples;
};

/// Header: U,h,t,qfi,qfi_over_t2
void write_qfi_csv(std::ostream& os, const std::vector<LabelledSeries>& series);

/// Header: U,h,L,N,plateau,spread,flag
void write_scan_csv(std::ostream& os, const std::vector<ScanCell>& cells);
void write_scan_csv(std::ostream& os, const ResonanceScan& scan);

/// Header: m,N,h,U,resonant,free,ratio
void write_coefficient_csv(std::ostream& os, const ResonanceCoefficientTable& table, bool header = true);

/// Header: U,t,l,n_l,N_l
void write_occupancy_csv(std::ostream& os, double U, const std::vector<OccupancyProfile>& profiles,
                         bool header = true);

/// One trajectory frame.
struct TrajectoryFrame {
  double t = 0.0;
  StateVector amplitudes;  // selected basis amplitudes
  double norm = 0.0;
  double energy = 0.0;
};

/// Header: t,re_<i>,im_<i>...,norm,energy with one pair per selected index.
void write_trajectory_csv(std::ostream& os, const std::vector<Index>& selected,
                          const std::vector<TrajectoryFrame>& frames);

/// Row of the sensitivity table.
struct SensitivityRow {
  int N = 0;
  double plateau_off = 0.0;
  double plateau_res = 0.0;
  double off_resonance = 0.0;  // dg/g
  double resonance = 0.0;
  double ratio = 0.0;
};

/// Aligned text table with columns N, dg/g(off-res), dg/g(res), ratio.
std::string sensitivity_table(const std::vector<SensitivityRow>& rows);

/// Standalone matplotlib scripts that read the CSVs written next to them.
std::string plot_script_qfi_time();
std::string plot_script_scaling();
std::string plot_script_resonance();
std::string plot_script_coefficient();
std::string plot_script_occupancy();
std::string plot_script_critical_point();

}  // namespace starkqfi::io
