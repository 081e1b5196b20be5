// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "thermolion/optim.hpp"

namespace thermolion {

/// Problem selection plus its parameters. Registered ids: quadratic,
/// rosenbrock, blobs, mnist. Fields irrelevant to the selected id keep
/// their defaults and round-trip unchanged.
struct ProblemConfig {
  std::string id = "quadratic";

  // quadratic
  std::size_t dim = 100;
  double noise_std = 0.0;
  double h_min = 0.1;
  double h_max = 10.0;

  // analytic problems: optimizer steps that make up one "epoch"
  std::size_t steps_per_epoch = 10;

  // rosenbrock
  double x0 = -1.2;
  double y0 = 1.0;

  // blobs
  std::size_t per_class = 100;
  int classes = 10;
  std::size_t blob_dim = 64;
  double separation = 3.0;

  // classifier width (blobs, mnist)
  std::size_t hidden = 256;

  // mnist
  std::string images_path;
  std::string labels_path;

  bool operator==(const ProblemConfig&) const = default;
};

/// One (optimizer, problem, seed) cell. An emitted config re-runs to
/// bit-identical results.
struct RunConfig {
  ProblemConfig problem;
  std::string optimizer = "thermolion";
  OptimConfig optim;  // resolved values, echoed in full
  std::size_t epochs = 12;
  std::size_t batch_size = 1024;
  std::size_t sample_cap = 5000;
  std::uint64_t seed = 42;
  std::size_t telemetry_every = 1;
  std::string out_dir;  // empty: no files written

  bool operator==(const RunConfig&) const = default;
};

bool operator==(const OptimConfig& a, const OptimConfig& b);

std::string run_config_to_json(const RunConfig& cfg);

/// Parses a JSON document mirroring RunConfig. Optimizer fields start
/// from default_config_for(optimizer id) and present keys override.
RunConfig run_config_from_json(const std::string& text);

RunConfig load_run_config(const std::string& path);

/// Cross-product suite: every optimizer id against every problem, sharing
/// the base run parameters. Lion cells follow the η/3 protocol unless the
/// suite sets lion_lr explicitly.
struct SuiteConfig {
  RunConfig base;
  std::vector<std::string> optimizers = {"adam", "lion", "thermolion"};
  std::vector<ProblemConfig> problems;
  std::string baseline = "adam";
  double lion_lr = 0.0;  // 0: base lr / 3
};

SuiteConfig suite_config_from_json(const std::string& text);
SuiteConfig load_suite_config(const std::string& path);

}  // namespace thermolion
