#pragma once

// CSV and plotting-script emission for sweep results.

#include <charconv>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <string>
#include <system_error>

#include "beamlab/errors.hpp"
#include "beamlab/harness.hpp"
#include "beamlab/types.hpp"

namespace beamlab {

/// Shortest round-trip decimal form, '.' separator, "nan" for NaN.
inline std::string format_number(double v) {
  if (std::isnan(v)) return "nan";
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

namespace detail {

inline std::ofstream open_for_write(const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error("cannot open '" + path.string() + "' for writing");
  return out;
}

inline void finish(std::ofstream& out, const std::filesystem::path& path) {
  out.flush();
  if (!out) throw Error("write to '" + path.string() + "' failed");
}

}  // namespace detail

/// `<stem>_raw.csv` next to the summary path.
inline std::filesystem::path raw_csv_path(const std::filesystem::path& summary) {
  return summary.parent_path() / (summary.stem().string() + "_raw.csv");
}

/// Summary rows `x,method,mean_sinr_db,std_db,n_ok` plus the per-trial
/// sibling file `x,method,trial,sinr_db`.
inline void emit_csv(const SweepResult& result, const std::filesystem::path& path) {
  {
    auto out = detail::open_for_write(path);
    out << "x,method,mean_sinr_db,std_db,n_ok\n";
    for (std::size_t xi = 0; xi < result.x_values.size(); ++xi)
      for (const auto& s : result.series)
        out << format_number(result.x_values[xi]) << ',' << to_string(s.method) << ','
            << format_number(s.mean_db[xi]) << ',' << format_number(s.std_db[xi]) << ',' << s.n_ok[xi] << '\n';
    detail::finish(out, path);
  }
  const auto raw_path = raw_csv_path(path);
  auto out = detail::open_for_write(raw_path);
  out << "x,method,trial,sinr_db\n";
  for (std::size_t xi = 0; xi < result.x_values.size(); ++xi)
    for (const auto& s : result.series)
      for (std::size_t t = 0; t < s.raw_db[xi].size(); ++t)
        out << format_number(result.x_values[xi]) << ',' << to_string(s.method) << ',' << t << ','
            << format_number(s.raw_db[xi][t]) << '\n';
  detail::finish(out, raw_path);
}

/// `angle_deg,method,gain_db` for every stored beampattern curve.
inline void emit_beampattern_csv(const SweepResult& result, const std::filesystem::path& path) {
  auto out = detail::open_for_write(path);
  out << "angle_deg,method,gain_db\n";
  for (const auto& [method, curve] : result.beampatterns)
    for (std::size_t i = 0; i < curve.angles.size(); ++i)
      out << format_number(rad_to_deg(curve.angles[i])) << ',' << to_string(method) << ','
          << format_number(curve.gains_db[i]) << '\n';
  detail::finish(out, path);
}

inline constexpr const char* kPlotScript = R"PY(#!/usr/bin/env python3
"""Plots every sweep CSV in this directory (written by `beamlab run`)."""
import csv
import glob
import os
import sys
from collections import defaultdict

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt

LABELS = {
    "sinr_vs_snr": ("Input SNR (dB)", "Output SINR (dB)"),
    "sinr_vs_snapshots": ("Number of snapshots", "Output SINR (dB)"),
    "sinr_vs_inr": ("Input INR (dB)", "Output SINR (dB)"),
}


def read_rows(path):
    with open(path, newline="", encoding="utf-8") as fh:
        return list(csv.DictReader(fh))


def plot_sweep(path, name):
    series = defaultdict(list)
    for row in read_rows(path):
        series[row["method"]].append((float(row["x"]), float(row["mean_sinr_db"])))
    xlabel, ylabel = LABELS.get(name, ("x", "Output SINR (dB)"))
    fig, (ax, dev) = plt.subplots(1, 2, figsize=(11, 4))
    optimal = dict(series.get("optimal", []))
    for method, pts in sorted(series.items()):
        xs, ys = zip(*sorted(pts))
        ax.plot(xs, ys, marker="o", label=method)
        if optimal and method != "optimal":
            dev.plot(xs, [optimal[x] - y for x, y in zip(xs, ys)], marker="o", label=method)
    if name == "sinr_vs_snapshots":
        ax.set_xscale("log")
        dev.set_xscale("log")
    ax.set_xlabel(xlabel)
    ax.set_ylabel(ylabel)
    ax.grid(True)
    ax.legend()
    dev.set_xlabel(xlabel)
    dev.set_ylabel("Deviation from optimal SINR (dB)")
    dev.grid(True)
    dev.legend()
    fig.tight_layout()
    fig.savefig(os.path.join(os.path.dirname(path), name + ".png"), dpi=120)
    plt.close(fig)


def plot_beampattern(path):
    curves = defaultdict(list)
    for row in read_rows(path):
        curves[row["method"]].append((float(row["angle_deg"]), float(row["gain_db"])))
    fig, ax = plt.subplots(figsize=(7, 4))
    for method, pts in sorted(curves.items()):
        xs, ys = zip(*pts)
        ax.plot(xs, ys, label=method)
    ax.set_xlabel("Angle (deg)")
    ax.set_ylabel("Normalized beampattern (dB)")
    ax.set_xlim(-90, 90)
    ax.set_ylim(-100, 5)
    ax.grid(True)
    ax.legend()
    fig.tight_layout()
    fig.savefig(os.path.join(os.path.dirname(path), "beampattern.png"), dpi=120)
    plt.close(fig)


def main():
    here = sys.argv[1] if len(sys.argv) > 1 else os.path.dirname(os.path.abspath(__file__))
    for path in sorted(glob.glob(os.path.join(here, "*.csv"))):
        name = os.path.splitext(os.path.basename(path))[0]
        if name.endswith("_raw"):
            continue
        if name == "beampattern_curves":
            plot_beampattern(path)
        else:
            plot_sweep(path, name)


if __name__ == "__main__":
    main()
)PY";

/// Writes `plot_results.py` into dir and returns its path.
inline std::filesystem::path write_plot_script(const std::filesystem::path& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw Error("cannot create directory '" + dir.string() + "': " + ec.message());
  const auto path = dir / "plot_results.py";
  auto out = detail::open_for_write(path);
  out << kPlotScript;
  detail::finish(out, path);
  return path;
}

}  // namespace beamlab
