// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "thermolion/harness.hpp"

namespace thermolion {

/// Writes metrics.csv (header `epoch,loss,accuracy,seconds`),
/// telemetry.jsonl (one GateTelemetry object per line) and config.json
/// (the exact RunConfig echo) into dir, creating it if needed.
void emit_metrics(const RunRecord& record, const std::filesystem::path& dir);

std::string metrics_to_csv(const RunRecord& record);
std::string telemetry_to_jsonl(std::span<const GateTelemetry> rows);

struct MetricsSeries {
  std::vector<double> loss;
  std::vector<double> accuracy;
  std::vector<double> seconds;
};

MetricsSeries load_metrics_csv(const std::filesystem::path& path);

}  // namespace thermolion
