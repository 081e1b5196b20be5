// SPDX-License-Identifier: Apache-2.0
#include "thermolion/metrics_io.hpp"

#include <nlohmann/json.hpp>

#include <cstdio>
#include <fstream>
#include <sstream>

namespace thermolion {

namespace {

std::string fmt_g17(double x) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", x);
  return buf;
}

void write_text(const std::filesystem::path& path, const std::string& text) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("cannot write '" + path.string() + "'");
  f << text;
  if (!f) throw std::runtime_error("write failed for '" + path.string() + "'");
}

}  // namespace

std::string metrics_to_csv(const RunRecord& record) {
  std::ostringstream os;
  os << "epoch,loss,accuracy,seconds\n";
  for (std::size_t e = 0; e < record.epoch_loss.size(); ++e) {
    char sec[32];
    std::snprintf(sec, sizeof(sec), "%.6f", record.epoch_seconds[e]);
    os << (e + 1) << ',' << fmt_g17(record.epoch_loss[e]) << ','
       << fmt_g17(record.epoch_accuracy[e]) << ',' << sec << "\n";
  }
  return os.str();
}

std::string telemetry_to_jsonl(std::span<const GateTelemetry> rows) {
  std::ostringstream os;
  for (const auto& t : rows) {
    nlohmann::json j;
    j["tensor"] = t.tensor_name;
    j["step"] = t.step;
    j["rho_mean"] = t.rho_mean;
    j["rho_max"] = t.rho_max;
    j["lambda_mean"] = t.lambda_mean;
    j["lambda_min"] = t.lambda_min;
    j["lambda_max"] = t.lambda_max;
    j["sigma"] = t.sigma;
    j["temperature"] = t.temperature;
    j["aligned_fraction"] = t.aligned_fraction;
    os << j.dump() << "\n";
  }
  return os.str();
}

void emit_metrics(const RunRecord& record, const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);
  write_text(dir / "metrics.csv", metrics_to_csv(record));
  write_text(dir / "telemetry.jsonl", telemetry_to_jsonl(record.telemetry));
  write_text(dir / "config.json", run_config_to_json(record.config));
}

MetricsSeries load_metrics_csv(const std::filesystem::path& path) {
  std::ifstream f(path);
  if (!f) throw std::runtime_error("cannot open '" + path.string() + "'");
  std::string line;
  if (!std::getline(f, line) || line != "epoch,loss,accuracy,seconds")
    throw std::runtime_error("'" + path.string() +
                             "': unexpected metrics.csv header");
  MetricsSeries out;
  while (std::getline(f, line)) {
    if (line.empty()) continue;
    std::istringstream ls(line);
    std::string field;
    std::getline(ls, field, ',');  // epoch index, implicit by position
    std::getline(ls, field, ',');
    out.loss.push_back(std::strtod(field.c_str(), nullptr));
    std::getline(ls, field, ',');
    out.accuracy.push_back(std::strtod(field.c_str(), nullptr));
    std::getline(ls, field, ',');
    out.seconds.push_back(std::strtod(field.c_str(), nullptr));
  }
  return out;
}

}  // namespace thermolion
