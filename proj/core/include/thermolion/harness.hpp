// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "thermolion/dataset.hpp"
#include "thermolion/gradcheck.hpp"
#include "thermolion/optim.hpp"
#include "thermolion/problems.hpp"
#include "thermolion/run_config.hpp"

namespace thermolion {

/// Everything measured on one run cell. Wall-clock fields are excluded
/// from determinism contracts.
struct RunRecord {
  std::vector<double> epoch_loss;
  std::vector<double> epoch_accuracy;  // NaN for non-classification problems
  std::vector<double> epoch_seconds;
  double total_seconds = 0.0;
  double final_loss = 0.0;
  double final_accuracy = 0.0;  // NaN for non-classification
  bool diverged = false;
  RunConfig config;
  std::vector<GateTelemetry> telemetry;
  std::string out_dir;  // echo; empty when nothing was written
};

/// A problem built from its config: objective + optional dataset.
/// Dataset synthesis and gradient noise share the data stream (2);
/// parameter init draws from the init stream (0).
struct ProblemInstance {
  std::unique_ptr<Objective> objective;
  std::optional<Dataset> dataset;
};

ProblemInstance make_problem(const ProblemConfig& cfg, RngStream& data_stream,
                             std::size_t sample_cap);

const std::vector<std::string>& problem_ids();

/// Runs one cell: builds problem and optimizer from the registries,
/// iterates epochs x batches, steps every parameter tensor each batch,
/// records metrics, writes metrics.csv / telemetry.jsonl / config.json
/// under cfg.out_dir (if set), and returns the record. A non-finite or
/// > 1e12 loss aborts the cell with diverged=true instead of crashing.
RunRecord run_experiment(const RunConfig& cfg);

struct SuiteResult {
  std::vector<RunRecord> cells;  // optimizer-major order
  std::vector<std::string> optimizers;
  std::vector<ProblemConfig> problems;
  std::string baseline;
};

SuiteResult run_suite(const SuiteConfig& cfg);

/// Comparison table: one row per optimizer, one column per problem, plus
/// a relative-gain column against the baseline. Pure function of the
/// records.
std::string render_suite_table(const SuiteResult& result);

/// Finite-difference verification gateway for a registered problem.
/// Classification problems are checked on a 4-sample batch; the MLP's
/// large tensors are subsampled to keep this interactive.
GradCheckReport gradcheck_problem(const ProblemConfig& cfg, std::uint64_t seed,
                                  std::size_t max_entries_per_tensor = 200);
GradCheckReport gradcheck_problem(const std::string& problem_id,
                                  std::uint64_t seed,
                                  std::size_t max_entries_per_tensor = 200);

}  // namespace thermolion
