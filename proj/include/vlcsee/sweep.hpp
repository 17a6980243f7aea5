// SPDX-License-Identifier: Apache-2.0
//
// Experiment driver: plans (sweep value x seed x baseline) cells, runs
// them in parallel worker processes, and persists curve, record, summary
// and plot files. All outputs are deterministic for a (config, seed).
#pragma once

#include <string>
#include <vector>

#include "vlcsee/baselines.hpp"
#include "vlcsee/config.hpp"

namespace vlcsee {

inline constexpr const char* kVersionTag = "0.1.0";

struct RunRecord {
  std::string config_hash;
  std::uint64_t seed = 0;
  std::string baseline;
  double final_smoothed_see = 0;
  double final_smoothed_reward = 0;
  std::vector<double> final_r_lu;
  double best_reward = 0;
  double wall_clock_s = 0;
  std::string version = kVersionTag;
};

struct CellSpec {
  ExperimentConfig config;  // axis already applied
  BaselineSpec baseline;
  std::uint64_t seed = 0;
  std::string dir;          // output directory for this cell
  std::string axis_name;    // empty when not part of a sweep
  double axis_value = 0;
};

// Trailing moving average, window `window` (shorter at the start).
std::vector<double> moving_average(const std::vector<double>& values, int window);

// Runs one cell in-process: trains, writes curve.csv / record.csv and,
// when auditing, audit.csv. Returns the record.
RunRecord run_cell(const CellSpec& cell);

struct SweepOutcome {
  std::vector<RunRecord> records;
  int failures = 0;
};

// Runs cells in forked worker processes, `workers` at a time; returns one
// exit code per cell (0 = success, 2 = failure).
std::vector<int> run_cells(const std::vector<CellSpec>& cells, int workers);

// Expands the config's sweep axis (or a single point when no axis is set),
// runs every cell in forked worker processes (config.workers at a time),
// writes per-cell outputs plus summary.csv and failures.csv under
// config.out_dir. Per-cell failures are recorded, never fatal.
SweepOutcome run_sweep(const ExperimentConfig& config);

// Builds plot-ready CSV and SVG line plots from every summary.csv found
// directly under `dir`. Regeneration from unchanged summaries is
// byte-identical.
void emit_plot_data(const std::string& dir);

// Shared CSV helpers (schema is frozen; see README).
void write_curve_csv(const std::string& path, const std::string& kind_label, std::uint64_t seed,
                     const std::string& hash, const std::vector<UpdateLogRow>& rows, int num_lus);
void write_record_csv(const std::string& path, const RunRecord& record);

}  // namespace vlcsee
