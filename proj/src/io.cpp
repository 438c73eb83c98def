#include "starkqfi/io.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <ostream>
#include <sstream>
#include <stdexcept>

namespace starkqfi::io {

std::string format_double(double value) {
  if (std::isnan(value)) return "nan";
  if (std::isinf(value)) return value > 0 ? "inf" : "-inf";
  char buffer[32];
  const auto result = std::to_chars(buffer, buffer + sizeof buffer, value);
  return std::string(buffer, result.ptr);
}

std::uint64_t fnv1a(std::string_view bytes) {
  std::uint64_t hash = 0xcbf29ce484222325ULL;
  for (unsigned char c : bytes) {
    hash ^= c;
    hash *= 0x100000001b3ULL;
  }
  return hash;
}

std::string config_hash(const json& config) {
  char buffer[17];
  std::snprintf(buffer, sizeof buffer, "%016llx", static_cast<unsigned long long>(fnv1a(config.dump())));
  return buffer;
}

void write_file(const std::filesystem::path& path, std::string_view text) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open " + path.string() + " for writing");
  out << text;
  if (!out) throw std::runtime_error("write failed: " + path.string());
}

json to_json(const ModelParams& p) {
  return {{"J", p.J}, {"U", p.U}, {"h", p.h}, {"L", p.L}, {"N", p.N}};
}

json to_json(const PlateauEstimate& e) {
  return {{"value", e.value},     {"spread", e.spread},   {"t_min", e.t_min},
          {"t_max", e.t_max},     {"samples", e.samples}, {"accepted", e.accepted}};
}

json to_json(const PowerLawFit& fit) {
  json points = json::array();
  for (const auto& [x, y] : fit.points) points.push_back({x, y});
  return {{"exponent", fit.exponent}, {"prefactor", fit.prefactor}, {"r_squared", fit.r_squared},
          {"points", points}};
}

json to_json(const RunSettings& s) {
  const char* method = s.propagator.method == PropagationMethod::dense    ? "dense"
                       : s.propagator.method == PropagationMethod::krylov ? "krylov"
                                                                          : "automatic";
  return {{"horizon", s.horizon},
          {"time_step", s.time_step},
          {"window_fraction", s.window_fraction},
          {"plateau_tolerance", s.plateau_tolerance},
          {"max_dimension", s.max_dimension},
          {"workers", s.workers},
          {"method", method},
          {"krylov_dimension", s.propagator.krylov_dimension},
          {"krylov_tolerance", s.propagator.tolerance},
          {"krylov_max_steps", s.propagator.max_steps},
          {"dense_threshold", s.propagator.dense_threshold}};
}

json to_json(const PhysicalSetup& s) {
  return {{"atom_mass", s.atom_mass},       {"wavelength", s.wavelength},
          {"lattice_depth", s.lattice_depth}, {"gravity", s.gravity},
          {"measurements", s.measurements}, {"coherence_time", s.coherence_time}};
}

json to_json(const ResonancePeak& p) {
  return {{"h", p.h}, {"U", p.U}, {"height", p.height}, {"nearest_m", p.nearest_m}, {"distance", p.distance}};
}

std::string cell_flag(const ScanCell& cell) {
  if (!cell.ok()) return "failed";
  return cell.plateau.accepted ? "ok" : "unsettled";
}

void write_qfi_csv(std::ostream& os, const std::vector<LabelledSeries>& series) {
  os << "U,h,t,qfi,qfi_over_t2\n";
  for (const auto& s : series) {
    const std::string prefix = format_double(s.U) + ',' + format_double(s.h) + ',';
    for (const auto& q : s.samples) {
      os << prefix << format_double(q.t) << ',' << format_double(q.qfi) << ',' << format_double(q.qfi_over_t2)
         << '\n';
    }
  }
}

namespace {

void scan_row(std::ostream& os, const ModelParams& p, double plateau, double spread, const std::string& flag) {
  os << format_double(p.U) << ',' << format_double(p.h) << ',' << p.L << ',' << p.N << ','
     << format_double(plateau) << ',' << format_double(spread) << ',' << flag << '\n';
}

}  // namespace

void write_scan_csv(std::ostream& os, const std::vector<ScanCell>& cells) {
  os << "U,h,L,N,plateau,spread,flag\n";
  for (const auto& c : cells) scan_row(os, c.params, c.plateau.value, c.plateau.spread, cell_flag(c));
}

void write_scan_csv(std::ostream& os, const ResonanceScan& scan) {
  os << "U,h,L,N,plateau,spread,flag\n";
  for (Index r = 0; r < scan.ratio.rows(); ++r) {
    for (Index c = 0; c < scan.ratio.cols(); ++c) {
      ModelParams p{1.0, scan.U_grid[static_cast<std::size_t>(c)], scan.h_grid[static_cast<std::size_t>(r)], scan.L,
                    scan.N};
      const double value = scan.plateau(r, c);
      const std::string flag = std::isnan(value) ? "failed" : scan.accepted(r, c) ? "ok" : "unsettled";
      scan_row(os, p, value, scan.spread(r, c), flag);
    }
  }
}

void write_coefficient_csv(std::ostream& os, const ResonanceCoefficientTable& table, bool header) {
  if (header) os << "m,N,h,U,resonant,free,ratio\n";
  for (Index i = 0; i < table.ratio.rows(); ++i) {
    for (Index j = 0; j < table.ratio.cols(); ++j) {
      const double h = table.h_grid[static_cast<std::size_t>(j)];
      os << table.m << ',' << table.particle_numbers[static_cast<std::size_t>(i)] << ',' << format_double(h) << ','
         << format_double(table.m * h) << ',' << format_double(table.resonant(i, j)) << ','
         << format_double(table.free(i, j)) << ',' << format_double(table.ratio(i, j)) << '\n';
    }
  }
}

void write_occupancy_csv(std::ostream& os, double U, const std::vector<OccupancyProfile>& profiles, bool header) {
  if (header) os << "U,t,l,n_l,N_l\n";
  const std::string u = format_double(U);
  for (const auto& p : profiles) {
    const std::string t = format_double(p.t);
    for (Index l = 0; l < p.density.size(); ++l) {
      os << u << ',' << t << ',' << l << ',' << format_double(p.density(l)) << ','
         << format_double(p.multi_occupancy(l)) << '\n';
    }
  }
}

void write_trajectory_csv(std::ostream& os, const std::vector<Index>& selected,
                          const std::vector<TrajectoryFrame>& frames) {
  os << 't';
  for (Index i : selected) os << ",re_" << i << ",im_" << i;
  os << ",norm,energy\n";
  for (const auto& f : frames) {
    os << format_double(f.t);
    for (Index k = 0; k < f.amplitudes.size(); ++k) {
      os << ',' << format_double(f.amplitudes(k).real()) << ',' << format_double(f.amplitudes(k).imag());
    }
    os << ',' << format_double(f.norm) << ',' << format_double(f.energy) << '\n';
  }
}

std::string sensitivity_table(const std::vector<SensitivityRow>& rows) {
  std::ostringstream os;
  char line[128];
  std::snprintf(line, sizeof line, "%4s  %16s  %16s  %8s\n", "N", "dg/g(off-res)", "dg/g(res)", "ratio");
  os << line;
  for (const auto& r : rows) {
    std::snprintf(line, sizeof line, "%4d  %16.4e  %16.4e  %8.4f\n", r.N, r.off_resonance, r.resonance, r.ratio);
    os << line;
  }
  return os.str();
}

std::string plot_script_qfi_time() {
  return R"(#!/usr/bin/env python3
# F_Q/t^2 against t, one panel per tilt h, one curve per U.
import sys
import pandas as pd
import matplotlib.pyplot as plt

df = pd.read_csv("qfi_time.csv")
tilts = sorted(df["h"].unique())
fig, axes = plt.subplots(1, len(tilts), figsize=(4 * len(tilts), 3.5), squeeze=False)
for ax, h in zip(axes[0], tilts):
    for U, g in df[df["h"] == h].groupby("U"):
        ax.plot(g["t"], g["qfi_over_t2"], label=f"U={U:g}")
    ax.set_title(f"h={h:g}")
    ax.set_xlabel("t")
    ax.set_ylabel("F_Q / t^2")
    ax.legend()
fig.tight_layout()
fig.savefig(sys.argv[1] if len(sys.argv) > 1 else "qfi_time.png", dpi=150)
)";
}

std::string plot_script_scaling() {
  return R"(#!/usr/bin/env python3
# Plateau against the scanned variable on log-log axes with the fitted law.
import json
import sys
import numpy as np
import pandas as pd
import matplotlib.pyplot as plt

df = pd.read_csv("scaling.csv")
summary = json.load(open("summary.json"))
var = summary["results"]["variable"]
fit = summary["results"]["fit"]
ok = df[df["flag"] != "failed"]
x = ok[var].to_numpy(dtype=float)
fig, ax = plt.subplots(figsize=(4.5, 3.5))
ax.loglog(x, ok["plateau"], "o")
xs = np.geomspace(x.min(), x.max(), 100)
ax.loglog(xs, fit["prefactor"] * xs ** fit["exponent"], "-",
          label=f"exponent {fit['exponent']:.3f}, r2 {fit['r_squared']:.3f}")
ax.set_xlabel(var)
ax.set_ylabel("F_Q / t^2")
ax.legend()
fig.tight_layout()
fig.savefig(sys.argv[1] if len(sys.argv) > 1 else "scaling.png", dpi=150)
)";
}

std::string plot_script_resonance() {
  return R"(#!/usr/bin/env python3
# Heatmap of A_r(U, h) with the lines U = m h overlaid.
import sys
import numpy as np
import pandas as pd
import matplotlib.pyplot as plt

df = pd.read_csv("resonance_scan.csv")
grid = df.pivot(index="h", columns="U", values="plateau")
base = grid[0.0] if 0.0 in grid.columns else None
ratio = grid.div(base, axis=0) if base is not None else grid
fig, ax = plt.subplots(figsize=(6, 4))
mesh = ax.pcolormesh(ratio.columns, ratio.index, ratio.to_numpy(), shading="nearest")
fig.colorbar(mesh, ax=ax, label="A_r" if base is not None else "F_Q / t^2")
hs = np.linspace(ratio.index.min(), ratio.index.max(), 50)
for m in range(1, 5):
    ax.plot(m * hs, hs, "w--", lw=0.8)
ax.set_xlim(ratio.columns.min(), ratio.columns.max())
ax.set_xlabel("U")
ax.set_ylabel("h")
fig.tight_layout()
fig.savefig(sys.argv[1] if len(sys.argv) > 1 else "resonance.png", dpi=150)
)";
}

std::string plot_script_coefficient() {
  return R"(#!/usr/bin/env python3
# A_r at U = m h against h, one curve per (m, N).
import sys
import pandas as pd
import matplotlib.pyplot as plt

df = pd.read_csv("resonance_coefficient.csv")
fig, ax = plt.subplots(figsize=(4.5, 3.5))
for (m, N), g in df.groupby(["m", "N"]):
    ax.plot(g["h"], g["ratio"], "o-", label=f"m={m}, N={N}")
ax.set_xlabel("h")
ax.set_ylabel("A_r")
ax.legend()
fig.tight_layout()
fig.savefig(sys.argv[1] if len(sys.argv) > 1 else "resonance_coefficient.png", dpi=150)
)";
}

std::string plot_script_occupancy() {
  return R"(#!/usr/bin/env python3
# N_l(t) heatmaps per U and the site sum against t.
import sys
import pandas as pd
import matplotlib.pyplot as plt

df = pd.read_csv("occupancy.csv")
values = sorted(df["U"].unique())
fig, axes = plt.subplots(1, len(values) + 1, figsize=(4 * (len(values) + 1), 3.5), squeeze=False)
for ax, U in zip(axes[0], values):
    grid = df[df["U"] == U].pivot(index="l", columns="t", values="N_l")
    mesh = ax.pcolormesh(grid.columns, grid.index, grid.to_numpy(), shading="nearest")
    fig.colorbar(mesh, ax=ax)
    ax.set_title(f"U={U:g}")
    ax.set_xlabel("t")
    ax.set_ylabel("l")
total = df.groupby(["U", "t"])["N_l"].sum().reset_index()
for U, g in total.groupby("U"):
    axes[0][-1].plot(g["t"], g["N_l"], label=f"U={U:g}")
axes[0][-1].set_xlabel("t")
axes[0][-1].set_ylabel("sum_l N_l")
axes[0][-1].legend()
fig.tight_layout()
fig.savefig(sys.argv[1] if len(sys.argv) > 1 else "occupancy.png", dpi=150)
)";
}

std::string plot_script_critical_point() {
  return R"(#!/usr/bin/env python3
# Plateau against h on a log axis with the located maximum.
import json
import sys
import pandas as pd
import matplotlib.pyplot as plt

df = pd.read_csv("critical_point.csv")
summary = json.load(open("summary.json"))
fig, ax = plt.subplots(figsize=(4.5, 3.5))
ax.semilogx(df["h"], df["plateau"], "o-")
ax.axvline(summary["results"]["h_c"], color="k", ls="--")
ax.set_xlabel("h")
ax.set_ylabel("F_Q / t^2")
fig.tight_layout()
fig.savefig(sys.argv[1] if len(sys.argv) > 1 else "critical_point.png", dpi=150)
)";
}

}  // namespace starkqfi::io
