#include "starkqfi/cli.hpp"

#include <cmath>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "starkqfi/analysis.hpp"
#include "starkqfi/gravimetry.hpp"
#include "starkqfi/io.hpp"
#include "starkqfi/parallel.hpp"

namespace starkqfi::cli {

namespace fs = std::filesystem;

namespace {

json run_defaults() {
  return {{"horizon", 200.0},
          {"time_step", 0.5},
          {"window_fraction", 0.5},
          {"plateau_tolerance", 0.15},
          {"max_dimension", 500000},
          {"workers", 0},
          {"method", "automatic"},
          {"krylov_dimension", 30},
          {"krylov_tolerance", 1e-12},
          {"krylov_max_steps", 1000000},
          {"dense_threshold", 1024}};
}

bool is_leaf_key(const std::string& key) { return key.ends_with("_grid") || key == "series"; }

void merge_into(json& target, const json& patch, const std::string& path) {
  if (!patch.is_object()) throw ConfigError(path.empty() ? "config must be a JSON object" : path + " must be an object");
  for (const auto& [key, value] : patch.items()) {
    const std::string where = path.empty() ? key : path + "." + key;
    if (!target.contains(key)) throw ConfigError("unknown config key: " + where);
    if (target[key].is_object() && !is_leaf_key(key)) {
      merge_into(target[key], value, where);
    } else {
      target[key] = value;
    }
  }
}

double number(const json& j, const char* key) {
  const auto& v = j.at(key);
  if (!v.is_number()) throw ConfigError(std::string(key) + " must be a number");
  return v.get<double>();
}

int integer(const json& j, const char* key) {
  const auto& v = j.at(key);
  if (!v.is_number_integer()) throw ConfigError(std::string(key) + " must be an integer");
  return v.get<int>();
}

std::vector<int> integer_list(const json& j, const char* key) {
  const auto& v = j.at(key);
  if (!v.is_array() || v.empty()) throw ConfigError(std::string(key) + " must be a non-empty integer array");
  std::vector<int> out;
  for (const auto& x : v) {
    if (!x.is_number_integer()) throw ConfigError(std::string(key) + " must hold integers");
    out.push_back(x.get<int>());
  }
  return out;
}

// Array of numbers, {lo, hi, step} (linear) or {lo, hi, count} (log-spaced).
std::vector<double> grid(const json& j, const char* key) {
  const auto& v = j.at(key);
  std::vector<double> out;
  if (v.is_array()) {
    for (const auto& x : v) {
      if (!x.is_number()) throw ConfigError(std::string(key) + " must hold numbers");
      out.push_back(x.get<double>());
    }
  } else if (v.is_object() && v.contains("step")) {
    out = linear_grid(number(v, "lo"), number(v, "hi"), number(v, "step"));
  } else if (v.is_object() && v.contains("count")) {
    out = log_grid(number(v, "lo"), number(v, "hi"), integer(v, "count"));
  } else {
    throw ConfigError(std::string(key) + " must be an array, {lo, hi, step} or {lo, hi, count}");
  }
  if (out.empty()) throw ConfigError(std::string(key) + " must not be empty");
  return out;
}

RunSettings settings_from(const json& run) {
  RunSettings s;
  s.horizon = number(run, "horizon");
  s.time_step = number(run, "time_step");
  s.window_fraction = number(run, "window_fraction");
  s.plateau_tolerance = number(run, "plateau_tolerance");
  s.max_dimension = run.at("max_dimension").get<Index>();
  const int workers = integer(run, "workers");
  if (workers < 0) throw ConfigError("workers must be non-negative");
  s.workers = static_cast<unsigned>(workers);
  const auto method = run.at("method").get<std::string>();
  if (method == "automatic") {
    s.propagator.method = PropagationMethod::automatic;
  } else if (method == "krylov") {
    s.propagator.method = PropagationMethod::krylov;
  } else if (method == "dense") {
    s.propagator.method = PropagationMethod::dense;
  } else {
    throw ConfigError("method must be automatic, krylov or dense");
  }
  s.propagator.krylov_dimension = integer(run, "krylov_dimension");
  s.propagator.tolerance = number(run, "krylov_tolerance");
  s.propagator.dense_threshold = run.at("dense_threshold").get<Index>();
  s.propagator.max_steps = run.at("krylov_max_steps").get<long>();
  if (s.propagator.krylov_dimension < 2) throw ConfigError("krylov_dimension must be at least 2");
  if (!(s.propagator.tolerance > 0.0)) throw ConfigError("krylov_tolerance must be positive");
  if (s.propagator.max_steps < 1) throw ConfigError("krylov_max_steps must be positive");
  s.validate();
  return s;
}

ModelParams model_from(const json& m) {
  ModelParams p;
  p.J = number(m, "J");
  if (m.contains("U")) p.U = number(m, "U");
  if (m.contains("h")) p.h = number(m, "h");
  p.L = integer(m, "L");
  p.N = integer(m, "N");
  return p;
}

void guard_dimension(int L, int N, Index cap) {
  Index dim = 0;
  try {
    dim = dimension(L, N);
  } catch (const std::overflow_error&) {
    throw DimensionCapError("basis dimension for (L=" + std::to_string(L) + ", N=" + std::to_string(N) +
                            ") overflows");
  }
  if (dim > cap) {
    throw DimensionCapError("basis dimension " + std::to_string(dim) + " for (L=" + std::to_string(L) +
                            ", N=" + std::to_string(N) + ") exceeds the cap " + std::to_string(cap));
  }
  if (L < 2 * N - 1) {
    throw ConfigError("staggered state needs L >= 2N - 1, got L=" + std::to_string(L) + ", N=" + std::to_string(N));
  }
}

fs::path out_dir(const json& config) { return fs::path(config.at("out").get<std::string>()); }

template <typename Writer>
void write_csv(const fs::path& path, Writer&& writer) {
  std::ostringstream os;
  writer(os);
  io::write_file(path, os.str());
}

json cell_failures(const std::vector<ScanCell>& cells) {
  json failures = json::array();
  for (const auto& c : cells) {
    if (!c.ok()) failures.push_back({{"params", io::to_json(c.params)}, {"error", c.error}});
  }
  return failures;
}

json matrix_rows(const Eigen::MatrixXd& m) {
  json rows = json::array();
  for (Index r = 0; r < m.rows(); ++r) {
    json row = json::array();
    for (Index c = 0; c < m.cols(); ++c) {
      if (std::isfinite(m(r, c))) {
        row.push_back(m(r, c));
      } else {
        row.push_back(nullptr);
      }
    }
    rows.push_back(row);
  }
  return rows;
}

// --- commands --------------------------------------------------------------

json cmd_qfi_time(const json& config, std::ostream& log) {
  const auto settings = settings_from(config.at("run"));
  const ModelParams base = model_from(config.at("model"));
  guard_dimension(base.L, base.N, settings.max_dimension);
  const auto& series_cfg = config.at("series");
  if (!series_cfg.is_array() || series_cfg.empty()) throw ConfigError("series must be a non-empty array");
  std::vector<ModelParams> configs;
  for (const auto& s : series_cfg) {
    ModelParams p = base;
    p.U = number(s, "U");
    p.h = number(s, "h");
    p.validate();
    configs.push_back(p);
  }

  struct Outcome {
    io::LabelledSeries series;
    std::string error;
  };
  const auto outcomes = parallel_map<Outcome>(configs.size(), settings.workers, [&](std::size_t i) {
    Outcome o;
    o.series.U = configs[i].U;
    o.series.h = configs[i].h;
    try {
      o.series.samples = qfi_time_series(configs[i], settings);
    } catch (const NumericalError& e) {
      o.error = e.what();
    }
    return o;
  });

  const fs::path dir = out_dir(config);
  std::vector<io::LabelledSeries> all;
  json results = json::array();
  json failures = json::array();
  for (std::size_t i = 0; i < outcomes.size(); ++i) {
    const auto& o = outcomes[i];
    if (!o.error.empty()) {
      failures.push_back({{"params", io::to_json(configs[i])}, {"error", o.error}});
      continue;
    }
    all.push_back(o.series);
    json entry = {{"params", io::to_json(configs[i])}};
    const auto est = plateau(o.series.samples, settings.window_fraction, settings.plateau_tolerance);
    entry["plateau"] = io::to_json(est);
    std::vector<double> t;
    std::vector<double> q;
    bool positive = true;
    for (const auto& s : o.series.samples) {
      if (s.t >= est.t_min) {
        t.push_back(s.t);
        q.push_back(s.qfi);
        positive = positive && s.qfi > 0.0;
      }
    }
    entry["time_fit"] = positive && t.size() >= 4 ? io::to_json(fit_power_law(t, q)) : json(nullptr);
    results.push_back(entry);
    log << "U=" << configs[i].U << " h=" << configs[i].h << " plateau=" << est.value << '\n';
  }
  write_csv(dir / "qfi_time.csv", [&](std::ostream& os) { io::write_qfi_csv(os, all); });
  io::write_file(dir / "plot_qfi_time.py", io::plot_script_qfi_time());

  const auto& traj = config.at("trajectory");
  if (traj.at("enabled").get<bool>()) {
    std::vector<Index> selected;
    for (const auto& x : traj.at("amplitudes")) selected.push_back(x.get<Index>());
    std::vector<double> times{0.0};
    for (double t : settings.time_grid()) times.push_back(t);
    for (std::size_t i = 0; i < configs.size(); ++i) {
      const auto problem = StarkProblem::staggered(configs[i], settings.max_dimension);
      for (Index k : selected) {
        if (k < 0 || k >= problem.basis.dimension()) {
          throw ConfigError("trajectory amplitude index " + std::to_string(k) + " outside the basis");
        }
      }
      std::vector<io::TrajectoryFrame> frames;
      propagate(problem.hamiltonian, problem.psi0, times, settings.propagator,
                [&](double t, const StateVector& psi) {
                  io::TrajectoryFrame f;
                  f.t = t;
                  f.amplitudes.resize(static_cast<Index>(selected.size()));
                  for (std::size_t k = 0; k < selected.size(); ++k) f.amplitudes(static_cast<Index>(k)) = psi(selected[k]);
                  f.norm = psi.norm();
                  f.energy = psi.dot(problem.hamiltonian * psi).real();
                  frames.push_back(std::move(f));
                });
      write_csv(dir / ("trajectory_" + std::to_string(i) + ".csv"),
                [&](std::ostream& os) { io::write_trajectory_csv(os, selected, frames); });
    }
  }
  return {{"series", results}, {"failures", failures}};
}

json cmd_scaling(const json& config, std::ostream& log) {
  const auto settings = settings_from(config.at("run"));
  const ModelParams base = model_from(config.at("model"));
  const auto mode = config.at("mode").get<std::string>();
  const auto& values = config.at("values");
  if (!values.is_array() || values.empty()) throw ConfigError("values must be a non-empty array");

  ScalingResult result;
  std::string variable;
  if (mode == "size") {
    variable = "L";
    const auto sizes = integer_list(config, "values");
    for (int L : sizes) guard_dimension(L, base.N, settings.max_dimension);
    result = size_scaling(base, sizes, settings);
  } else if (mode == "particle") {
    variable = "N";
    const auto particles = integer_list(config, "values");
    for (int N : particles) guard_dimension(base.L, N, settings.max_dimension);
    result = particle_scaling(base, particles, settings);
  } else if (mode == "tilt") {
    variable = "h";
    const auto tilts = grid(config, "values");
    guard_dimension(base.L, base.N, settings.max_dimension);
    result = localized_h_scaling(base, tilts, settings);
  } else {
    throw ConfigError("mode must be size, particle or tilt");
  }
  const fs::path dir = out_dir(config);
  write_csv(dir / "scaling.csv", [&](std::ostream& os) { io::write_scan_csv(os, result.cells); });
  io::write_file(dir / "plot_scaling.py", io::plot_script_scaling());
  log << "exponent=" << result.fit.exponent << " r2=" << result.fit.r_squared << '\n';
  json cells = json::array();
  for (const auto& c : result.cells) {
    cells.push_back({{"params", io::to_json(c.params)}, {"plateau", io::to_json(c.plateau)}, {"flag", io::cell_flag(c)}});
  }
  return {{"variable", variable}, {"fit", io::to_json(result.fit)}, {"cells", cells},
          {"failures", cell_failures(result.cells)}};
}

json cmd_resonance(const json& config, std::ostream& log) {
  const auto settings = settings_from(config.at("run"));
  const double J = number(config, "J");
  const int L = integer(config, "L");
  const auto mode = config.at("mode").get<std::string>();
  const auto h_grid = grid(config, "h_grid");
  const fs::path dir = out_dir(config);

  if (mode == "scan") {
    const int N = integer(config, "N");
    guard_dimension(L, N, settings.max_dimension);
    const auto U_grid = grid(config, "U_grid");
    const auto scan = resonance_scan(L, N, U_grid, h_grid, settings, J);
    write_csv(dir / "resonance_scan.csv", [&](std::ostream& os) { io::write_scan_csv(os, scan); });
    io::write_file(dir / "plot_resonance.py", io::plot_script_resonance());
    json peaks = json::array();
    for (const auto& p : scan.peaks) peaks.push_back(io::to_json(p));
    json failures = json::array();
    for (const auto& f : scan.failures) failures.push_back(f);
    log << scan.peaks.size() << " peaks, " << scan.failures.size() << " failed cells\n";
    return {{"mode", mode},       {"U_grid", scan.U_grid},          {"h_grid", scan.h_grid},
            {"peaks", peaks},     {"ratio", matrix_rows(scan.ratio)}, {"plateau", matrix_rows(scan.plateau)},
            {"failures", failures}};
  }
  if (mode == "coefficient") {
    const auto particles = integer_list(config, "N_list");
    const auto ms = integer_list(config, "m_list");
    for (int N : particles) guard_dimension(L, N, settings.max_dimension);
    json tables = json::array();
    json failures = json::array();
    std::ostringstream csv;
    bool header = true;
    for (int m : ms) {
      if (m < 0) throw ConfigError("m_list entries must be non-negative");
      const auto table = resonance_coefficient(L, particles, m, h_grid, settings, J);
      io::write_coefficient_csv(csv, table, header);
      header = false;
      for (const auto& f : table.failures) failures.push_back(f);
      // Relative spread across N per grid point, normalized by the first N.
      json spread = json::array();
      for (Index j = 0; j < table.ratio.cols(); ++j) {
        const auto col = table.ratio.col(j);
        spread.push_back((col.maxCoeff() - col.minCoeff()) / col(0));
      }
      tables.push_back({{"m", m},
                        {"N_list", particles},
                        {"ratio", matrix_rows(table.ratio)},
                        {"resonant", matrix_rows(table.resonant)},
                        {"free", matrix_rows(table.free)},
                        {"relative_spread", spread}});
      log << "m=" << m << " done\n";
    }
    io::write_file(dir / "resonance_coefficient.csv", csv.str());
    io::write_file(dir / "plot_resonance_coefficient.py", io::plot_script_coefficient());
    return {{"mode", mode}, {"h_grid", h_grid}, {"tables", tables}, {"failures", failures}};
  }
  throw ConfigError("mode must be scan or coefficient");
}

json cmd_occupancy(const json& config, std::ostream& log) {
  const auto settings = settings_from(config.at("run"));
  const ModelParams base = model_from(config.at("model"));
  guard_dimension(base.L, base.N, settings.max_dimension);
  const auto U_values = grid(config, "U_grid");
  std::vector<double> times{0.0};
  for (double t : settings.time_grid()) times.push_back(t);

  struct Outcome {
    std::vector<OccupancyProfile> profiles;
    std::string error;
  };
  const auto outcomes = parallel_map<Outcome>(U_values.size(), settings.workers, [&](std::size_t i) {
    Outcome o;
    ModelParams p = base;
    p.U = U_values[i];
    try {
      o.profiles = occupancy_series(p, times, settings);
    } catch (const NumericalError& e) {
      o.error = e.what();
    }
    return o;
  });

  const fs::path dir = out_dir(config);
  std::ostringstream csv;
  json results = json::array();
  json failures = json::array();
  bool header = true;
  for (std::size_t i = 0; i < outcomes.size(); ++i) {
    const auto& o = outcomes[i];
    if (!o.error.empty()) {
      failures.push_back({{"U", U_values[i]}, {"error", o.error}});
      continue;
    }
    io::write_occupancy_csv(csv, U_values[i], o.profiles, header);
    header = false;
    double sum_rule = 0.0;
    for (const auto& p : o.profiles) sum_rule = std::max(sum_rule, std::abs(p.density.sum() - base.N));
    const double average = time_averaged_multi(o.profiles);
    results.push_back({{"U", U_values[i]}, {"time_averaged_multi", average}, {"sum_rule_defect", sum_rule}});
    log << "U=" << U_values[i] << " <sum N_l>_t=" << average << '\n';
  }
  io::write_file(dir / "occupancy.csv", csv.str());
  io::write_file(dir / "plot_occupancy.py", io::plot_script_occupancy());
  return {{"profiles", results}, {"failures", failures}};
}

json cmd_gravimetry(const json& config, std::ostream& log) {
  const auto settings = settings_from(config.at("run"));
  const auto& phys = config.at("physical");
  PhysicalSetup setup;
  setup.atom_mass = number(phys, "atom_mass");
  setup.wavelength = number(phys, "wavelength");
  setup.gravity = number(phys, "gravity");
  setup.measurements = phys.at("measurements").get<long>();
  setup.coherence_time = number(phys, "coherence_time");
  const double h = number(config, "h");
  if (phys.at("lattice_depth").is_null()) {
    setup.lattice_depth = depth_for_tilt_ratio(setup, h);
  } else {
    setup.lattice_depth = number(phys, "lattice_depth");
  }
  setup.validate();
  const Tilt tilt = gradient_from_g(setup);
  if (setup.tight_binding_warning()) {
    log << "warning: lattice depth " << setup.lattice_depth << " E_R is below the tight-binding regime\n";
  }

  const int L = integer(config, "L");
  const auto particles = integer_list(config, "N_list");
  const double U_off = number(config, "U_off");
  const int m = integer(config, "m");
  if (m < 1) throw ConfigError("m must be at least 1");
  for (int N : particles) guard_dimension(L, N, settings.max_dimension);

  std::vector<ModelParams> configs;
  for (int N : particles) {
    configs.push_back({1.0, U_off, h, L, N});
    configs.push_back({1.0, m * h, h, L, N});
  }
  const auto cells = plateau_sweep(configs, settings);

  std::vector<io::SensitivityRow> rows;
  json table = json::array();
  for (std::size_t i = 0; i < particles.size(); ++i) {
    const auto& off = cells[2 * i];
    const auto& res = cells[2 * i + 1];
    if (!off.ok() || !res.ok()) continue;
    io::SensitivityRow row;
    row.N = particles[i];
    row.plateau_off = off.plateau.value;
    row.plateau_res = res.plateau.value;
    row.off_resonance = sensitivity(setup, row.plateau_off, setup.coherence_time);
    row.resonance = sensitivity(setup, row.plateau_res, setup.coherence_time);
    row.ratio = row.resonance / row.off_resonance;
    rows.push_back(row);
    table.push_back({{"N", row.N},
                     {"plateau_off_resonance", row.plateau_off},
                     {"plateau_resonance", row.plateau_res},
                     {"A_r", row.plateau_res / row.plateau_off},
                     {"dg_over_g_off_resonance", row.off_resonance},
                     {"dg_over_g_resonance", row.resonance},
                     {"ratio", row.ratio}});
  }
  const std::string text = io::sensitivity_table(rows);
  log << text;
  const fs::path dir = out_dir(config);
  io::write_file(dir / "sensitivity.txt", text);
  write_csv(dir / "gravimetry_cells.csv", [&](std::ostream& os) { io::write_scan_csv(os, cells); });
  return {{"physical", io::to_json(setup)},
          {"recoil_energy", recoil_energy(setup)},
          {"J_over_recoil", hubbard_J(setup)},
          {"tilt", {{"joules", tilt.joules}, {"recoil_units", tilt.recoil_units}, {"hopping_units", tilt.hopping_units}}},
          {"tight_binding_warning", setup.tight_binding_warning()},
          {"table", table},
          {"failures", cell_failures(cells)}};
}

json cmd_critical_point(const json& config, std::ostream& log) {
  const auto settings = settings_from(config.at("run"));
  const ModelParams base = model_from(config.at("model"));
  guard_dimension(base.L, base.N, settings.max_dimension);
  const auto tilts = grid(config, "h_grid");
  const auto cp = critical_point(base, tilts, settings);
  const fs::path dir = out_dir(config);
  write_csv(dir / "critical_point.csv", [&](std::ostream& os) { io::write_scan_csv(os, cp.cells); });
  io::write_file(dir / "plot_critical_point.py", io::plot_script_critical_point());
  log << "h_c=" << cp.h_c << " peak=" << cp.peak_plateau << (cp.at_boundary ? " (grid boundary)" : "") << '\n';
  return {{"h_c", cp.h_c},
          {"peak_plateau", cp.peak_plateau},
          {"peak_index", cp.peak_index},
          {"at_boundary", cp.at_boundary},
          {"failures", cell_failures(cp.cells)}};
}

}  // namespace

const std::vector<std::string>& command_names() {
  static const std::vector<std::string> names{"qfi-time",  "scaling",    "resonance",
                                              "occupancy", "gravimetry", "critical-point"};
  return names;
}

json default_config(const std::string& command) {
  json c = {{"out", "out"}, {"run", run_defaults()}};
  if (command == "qfi-time") {
    c["model"] = {{"J", 1.0}, {"L", 11}, {"N", 2}};
    c["series"] = json::array({{{"U", 0.0}, {"h", 5.0}}, {{"U", 5.0}, {"h", 5.0}}, {{"U", 20.0}, {"h", 5.0}},
                               {{"U", 0.0}, {"h", 1.0}}, {{"U", 5.0}, {"h", 1.0}}, {{"U", 20.0}, {"h", 1.0}},
                               {{"U", 0.0}, {"h", 0.1}}, {{"U", 5.0}, {"h", 0.1}}, {{"U", 20.0}, {"h", 0.1}}});
    c["trajectory"] = {{"enabled", false}, {"amplitudes", json::array({0})}};
  } else if (command == "scaling") {
    c["mode"] = "size";
    c["model"] = {{"J", 1.0}, {"U", 0.0}, {"h", 5.0}, {"L", 11}, {"N", 2}};
    c["values"] = json::array({7, 9, 11, 13, 15, 17, 19});
  } else if (command == "resonance") {
    c["mode"] = "scan";
    c["J"] = 1.0;
    c["L"] = 11;
    c["N"] = 4;
    c["U_grid"] = {{"lo", 0.0}, {"hi", 20.0}, {"step", 0.5}};
    c["h_grid"] = {{"lo", 2.0}, {"hi", 5.0}, {"step", 0.5}};
    c["N_list"] = json::array({2, 3, 4});
    c["m_list"] = json::array({2, 4});
  } else if (command == "occupancy") {
    c["model"] = {{"J", 1.0}, {"h", 4.0}, {"L", 11}, {"N", 3}};
    c["U_grid"] = json::array({4.0, 8.0, 10.0});
  } else if (command == "gravimetry") {
    c["physical"] = io::to_json(PhysicalSetup{});
    c["physical"]["lattice_depth"] = nullptr;
    c["L"] = 11;
    c["N_list"] = json::array({2, 3, 4});
    c["h"] = 5.0;
    c["U_off"] = 0.0;
    c["m"] = 4;
  } else if (command == "critical-point") {
    c["model"] = {{"J", 1.0}, {"U", 0.0}, {"L", 11}, {"N", 2}};
    c["h_grid"] = {{"lo", 0.05}, {"hi", 5.0}, {"count", 30}};
  } else {
    throw ConfigError("unknown command: " + command);
  }
  return c;
}

json resolve_config(const std::string& command, const json& user, const Overrides& overrides) {
  json config = default_config(command);
  if (!user.is_null()) merge_into(config, user, "");
  if (overrides.out) config["out"] = *overrides.out;
  if (overrides.workers) config["run"]["workers"] = *overrides.workers;
  if (overrides.horizon) config["run"]["horizon"] = *overrides.horizon;
  if (overrides.window) config["run"]["window_fraction"] = *overrides.window;
  if (overrides.dense_oracle) config["run"]["method"] = "dense";
  settings_from(config.at("run"));
  return config;
}

json execute(const std::string& command, const json& config, std::ostream& log) {
  json results;
  if (command == "qfi-time") {
    results = cmd_qfi_time(config, log);
  } else if (command == "scaling") {
    results = cmd_scaling(config, log);
  } else if (command == "resonance") {
    results = cmd_resonance(config, log);
  } else if (command == "occupancy") {
    results = cmd_occupancy(config, log);
  } else if (command == "gravimetry") {
    results = cmd_gravimetry(config, log);
  } else if (command == "critical-point") {
    results = cmd_critical_point(config, log);
  } else {
    throw ConfigError("unknown command: " + command);
  }
  json summary = {{"command", command},
                  {"version", STARKQFI_VERSION},
                  {"config_hash", io::config_hash(config)},
                  {"config", config},
                  {"results", results}};
  io::write_file(out_dir(config) / "summary.json", summary.dump(2) + "\n");
  return summary;
}

int run(const std::string& command, const json& user, const Overrides& overrides, std::ostream& log,
        std::ostream& err) {
  try {
    const json config = resolve_config(command, user, overrides);
    log << "resolved config (" << io::config_hash(config) << "):\n" << config.dump(2) << '\n';
    const json summary = execute(command, config, log);
    const auto& failures = summary.at("results").at("failures");
    if (!failures.empty()) {
      err << failures.size() << " failed cell(s)\n";
      if (overrides.strict) return exit_numerical;
    }
    return exit_ok;
  } catch (const DimensionCapError& e) {
    err << "dimension cap: " << e.what() << '\n';
    return exit_dimension_cap;
  } catch (const NumericalError& e) {
    err << "numerical failure: " << e.what() << '\n';
    return exit_numerical;
  } catch (const ConfigError& e) {
    err << "config error: " << e.what() << '\n';
    return exit_config;
  } catch (const json::exception& e) {
    err << "config error: " << e.what() << '\n';
    return exit_config;
  } catch (const std::logic_error& e) {
    err << "config error: " << e.what() << '\n';
    return exit_config;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return exit_unexpected;
  }
}

int main(int argc, char** argv) {
  CLI::App app{"Quantum Fisher information of tilted Bose-Hubbard chains"};
  app.set_version_flag("--version", STARKQFI_VERSION);
  std::string command;
  std::string config_path;
  Overrides overrides;
  app.add_option("command", command, "Experiment to run")->required()->check(CLI::IsMember(command_names()));
  app.add_option("--config", config_path, "JSON config file")->check(CLI::ExistingFile);
  app.add_option("--out", overrides.out, "Output directory");
  app.add_option("--workers", overrides.workers, "Worker threads (0: all cores)");
  app.add_option("--horizon", overrides.horizon, "Final time T in units of 1/J");
  app.add_option("--window", overrides.window, "Tail window fraction for plateaus");
  app.add_flag("--strict", overrides.strict, "Exit nonzero when any cell fails");
  app.add_flag("--dense-oracle", overrides.dense_oracle, "Force the dense eigendecomposition path");
  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? exit_ok : exit_config;
  }

  json user;
  if (!config_path.empty()) {
    std::ifstream in(config_path);
    try {
      user = json::parse(in);
    } catch (const json::parse_error& e) {
      std::cerr << "config error: " << e.what() << '\n';
      return exit_config;
    }
  }
  return run(command, user, overrides, std::cout, std::cerr);
}

}  // namespace starkqfi::cli
