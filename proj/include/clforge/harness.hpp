#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <utility>
#include <vector>

#include "clforge/config.hpp"
#include "clforge/metrics.hpp"
#include "clforge/trainer.hpp"

namespace clforge {

/// One sweep cell: the axis assignment applied to the base config.
struct SweepCell {
  int index = 0;
  std::vector<std::pair<std::string, double>> axes;
  ExperimentConfig cfg;
};

std::vector<SweepCell> expand_sweep(const ExperimentConfig& cfg);

struct RunResult {
  std::string run_id;
  std::uint64_t seed = 0;
  std::vector<MetricRow> metrics;
  ForgettingReport report;
  std::vector<double> S;  // cumulative per-step train loss per task (finite model)
};

/// Train one cell with one seed and collect metrics + the forgetting report.
RunResult execute_run(const ExperimentConfig& cfg, const std::string& run_id, Seed seed);

/// Expand the sweep, run every (cell, seed) pair, and write results.csv,
/// report.csv, and meta.json under out_dir. Returns the number of runs.
int run_experiment(const ExperimentConfig& cfg, const std::string& out_dir, int jobs);

/// Self-check battery over every module; prints one line per check.
/// Returns the number of failed checks.
int verify_all(std::ostream& os);

/// Render a results.csv as an SVG of median test error curves with IQR bands.
void plot_csv(const std::string& csv_path, const std::string& recipe,
              const std::string& out_path);

/// Evaluate the closed-form bounds over the grid in a bounds config; CSV out.
void bounds_table(const std::string& config_path, std::ostream& os);

}  // namespace clforge
