// SPDX-License-Identifier: Apache-2.0
#include "thermolion/harness.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <limits>
#include <sstream>

#include "thermolion/metrics_io.hpp"
#include "thermolion/mlp.hpp"

namespace thermolion {

namespace {

constexpr double kDivergenceThreshold = 1e12;
constexpr std::uint64_t kStreamInit = 0;
constexpr std::uint64_t kStreamShuffle = 1;
constexpr std::uint64_t kStreamData = 2;
constexpr std::uint64_t kStreamThermalBase = 3;

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
      .count();
}

}  // namespace

const std::vector<std::string>& problem_ids() {
  static const std::vector<std::string> ids = {"quadratic", "rosenbrock",
                                               "blobs", "mnist"};
  return ids;
}

ProblemInstance make_problem(const ProblemConfig& cfg, RngStream& data_stream,
                             std::size_t sample_cap) {
  ProblemInstance out;
  if (cfg.id == "quadratic") {
    if (cfg.dim == 0)
      throw std::invalid_argument("quadratic: dim must be >= 1");
    if (!(cfg.h_min > 0.0) || cfg.h_max < cfg.h_min)
      throw std::invalid_argument("quadratic: need 0 < h_min <= h_max");
    FlatTensor h("h", {cfg.dim});
    for (double& x : h.data)
      x = cfg.h_min + (cfg.h_max - cfg.h_min) * data_stream.next_unit();
    out.objective = std::make_unique<QuadraticObjective>(std::move(h),
                                                         cfg.noise_std);
  } else if (cfg.id == "rosenbrock") {
    out.objective = std::make_unique<RosenbrockObjective>(cfg.x0, cfg.y0);
  } else if (cfg.id == "blobs") {
    Dataset ds = synth_blobs(data_stream, cfg.per_class, cfg.classes,
                             cfg.blob_dim, cfg.separation);
    if (sample_cap > 0) ds = take_first(ds, sample_cap);
    out.objective = std::make_unique<MlpObjective>(
        MlpDims{ds.dim, cfg.hidden, static_cast<std::size_t>(ds.num_classes)});
    out.dataset = std::move(ds);
  } else if (cfg.id == "mnist") {
    if (cfg.images_path.empty() || cfg.labels_path.empty())
      throw std::invalid_argument(
          "mnist: images_path and labels_path must be set");
    Dataset ds = load_mnist(cfg.images_path, cfg.labels_path);
    if (sample_cap > 0) ds = take_first(ds, sample_cap);
    out.objective = std::make_unique<MlpObjective>(
        MlpDims{ds.dim, cfg.hidden, static_cast<std::size_t>(ds.num_classes)});
    out.dataset = std::move(ds);
  } else {
    std::ostringstream os;
    os << "unknown problem '" << cfg.id << "'; registered:";
    for (const auto& id : problem_ids()) os << " " << id;
    throw std::invalid_argument(os.str());
  }
  return out;
}

RunRecord run_experiment(const RunConfig& cfg) {
  cfg.optim.validate();
  if (cfg.epochs == 0) throw std::invalid_argument("run: epochs must be >= 1");
  if (cfg.problem.steps_per_epoch == 0)
    throw std::invalid_argument("run: steps_per_epoch must be >= 1");
  const OptimizerKind kind = optimizer_from_id(cfg.optimizer);

  RngStream init_stream(cfg.seed, kStreamInit);
  RngStream shuffle_stream(cfg.seed, kStreamShuffle);
  RngStream data_stream(cfg.seed, kStreamData);

  ProblemInstance problem = make_problem(cfg.problem, data_stream,
                                         cfg.sample_cap);
  const bool classify = problem.objective->classification();

  std::vector<FlatTensor> params = problem.objective->init_params(init_stream);
  std::vector<OptimState> states;
  std::vector<RngStream> thermal;
  states.reserve(params.size());
  thermal.reserve(params.size());
  for (std::size_t k = 0; k < params.size(); ++k) {
    states.push_back(OptimState::zeros_like(params[k], cfg.optim.temp_init));
    thermal.emplace_back(cfg.seed, kStreamThermalBase + k);
  }

  RunRecord record;
  record.config = cfg;
  record.final_loss = std::numeric_limits<double>::quiet_NaN();
  record.final_accuracy = std::numeric_limits<double>::quiet_NaN();

  const BatchPlan plan{cfg.batch_size, false};
  std::vector<double> image_scratch;
  std::vector<int> label_scratch;
  std::vector<FlatTensor> grads;

  const auto run_start = std::chrono::steady_clock::now();
  for (std::size_t epoch = 1; epoch <= cfg.epochs && !record.diverged;
       ++epoch) {
    const auto epoch_start = std::chrono::steady_clock::now();

    std::vector<std::vector<std::size_t>> batches;
    if (classify) {
      batches = epoch_batches(problem.dataset->n, plan, shuffle_stream);
    } else {
      batches.assign(cfg.problem.steps_per_epoch, {});
    }

    double loss_sum = 0.0;
    double weight_sum = 0.0;
    for (const auto& idx : batches) {
      Batch batch;
      if (classify)
        batch = gather(*problem.dataset, idx, image_scratch, label_scratch);

      const double loss =
          problem.objective->eval(params, batch, &data_stream, grads);
      if (!std::isfinite(loss) || loss > kDivergenceThreshold) {
        record.diverged = true;
        break;
      }
      const double weight = classify ? static_cast<double>(batch.n) : 1.0;
      loss_sum += loss * weight;
      weight_sum += weight;

      try {
        for (std::size_t k = 0; k < params.size(); ++k) {
          auto tel = optimizer_step(kind, params[k], grads[k], states[k],
                                    cfg.optim, thermal[k]);
          if (tel && cfg.telemetry_every > 0 &&
              tel->step % cfg.telemetry_every == 0)
            record.telemetry.push_back(std::move(*tel));
        }
      } catch (const NonFiniteGradient&) {
        record.diverged = true;
        break;
      }
    }

    if (record.diverged) break;

    record.epoch_loss.push_back(loss_sum / weight_sum);
    record.epoch_accuracy.push_back(
        classify
            ? problem.objective->accuracy(params, problem.dataset->as_batch())
            : std::numeric_limits<double>::quiet_NaN());
    record.epoch_seconds.push_back(seconds_since(epoch_start));
  }
  record.total_seconds = seconds_since(run_start);

  if (!record.epoch_loss.empty()) {
    record.final_loss = record.epoch_loss.back();
    record.final_accuracy = record.epoch_accuracy.back();
  }

  if (!cfg.out_dir.empty()) {
    record.out_dir = cfg.out_dir;
    emit_metrics(record, cfg.out_dir);
  }
  return record;
}

SuiteResult run_suite(const SuiteConfig& cfg) {
  if (cfg.optimizers.empty())
    throw std::invalid_argument("suite: no optimizers listed");
  if (cfg.problems.empty())
    throw std::invalid_argument("suite: no problems listed");

  SuiteResult result;
  result.optimizers = cfg.optimizers;
  result.problems = cfg.problems;
  result.baseline = cfg.baseline;

  for (const auto& opt : cfg.optimizers) {
    const OptimizerKind kind = optimizer_from_id(opt);
    for (std::size_t j = 0; j < cfg.problems.size(); ++j) {
      RunConfig cell = cfg.base;
      cell.problem = cfg.problems[j];
      cell.optimizer = opt;
      cell.optim = default_config_for(kind);
      // Cells share the base learning rate; Lion follows the eta/3
      // protocol unless the suite pins lion_lr.
      cell.optim.lr = cfg.base.optim.lr;
      if (kind == OptimizerKind::Lion)
        cell.optim.lr =
            cfg.lion_lr > 0.0 ? cfg.lion_lr : cfg.base.optim.lr / 3.0;
      cell.optim.noise_enabled = cfg.base.optim.noise_enabled;
      cell.optim.temp_init = cfg.base.optim.temp_init;
      if (!cfg.base.out_dir.empty())
        cell.out_dir = cfg.base.out_dir + "/" + opt + "_" +
                       cfg.problems[j].id + "_" + std::to_string(j);
      result.cells.push_back(run_experiment(cell));
    }
  }
  return result;
}

namespace {

std::string format_cell(const RunRecord& rec, bool classify) {
  if (rec.diverged) return "diverged";
  char buf[32];
  if (classify)
    std::snprintf(buf, sizeof(buf), "%.2f%%", rec.final_accuracy * 100.0);
  else
    std::snprintf(buf, sizeof(buf), "%.4e", rec.final_loss);
  return buf;
}

}  // namespace

std::string render_suite_table(const SuiteResult& result) {
  const std::size_t n_opt = result.optimizers.size();
  const std::size_t n_prob = result.problems.size();

  std::ptrdiff_t baseline_row = -1;
  for (std::size_t i = 0; i < n_opt; ++i)
    if (result.optimizers[i] == result.baseline)
      baseline_row = static_cast<std::ptrdiff_t>(i);

  std::vector<bool> classify(n_prob);
  for (std::size_t j = 0; j < n_prob; ++j)
    classify[j] = result.cells[j].config.problem.id == "blobs" ||
                  result.cells[j].config.problem.id == "mnist";

  // header
  std::vector<std::vector<std::string>> grid;
  std::vector<std::string> head = {"optimizer"};
  for (std::size_t j = 0; j < n_prob; ++j) {
    std::string name = result.problems[j].id;
    if (result.problems[j].id == "quadratic" &&
        result.problems[j].noise_std != 0.0) {
      char buf[32];
      std::snprintf(buf, sizeof(buf), "(s=%g)", result.problems[j].noise_std);
      name += buf;
    }
    head.push_back(name);
  }
  head.push_back("gain vs " + result.baseline);
  grid.push_back(head);

  for (std::size_t i = 0; i < n_opt; ++i) {
    std::vector<std::string> row = {result.optimizers[i]};
    double gain_sum = 0.0;
    std::size_t gain_count = 0;
    for (std::size_t j = 0; j < n_prob; ++j) {
      const RunRecord& rec = result.cells[i * n_prob + j];
      row.push_back(format_cell(rec, classify[j]));
      if (baseline_row >= 0) {
        const RunRecord& base =
            result.cells[static_cast<std::size_t>(baseline_row) * n_prob + j];
        if (!rec.diverged && !base.diverged) {
          if (classify[j]) {
            gain_sum += (rec.final_accuracy - base.final_accuracy) * 100.0;
          } else if (base.final_loss != 0.0) {
            gain_sum += (base.final_loss - rec.final_loss) /
                        std::abs(base.final_loss) * 100.0;
          }
          ++gain_count;
        }
      }
    }
    if (baseline_row < 0 || gain_count == 0) {
      row.push_back("n/a");
    } else {
      char buf[32];
      std::snprintf(buf, sizeof(buf), "%+.1f%%",
                    gain_sum / static_cast<double>(gain_count));
      row.push_back(buf);
    }
    grid.push_back(row);
  }

  std::vector<std::size_t> widths(grid[0].size(), 0);
  for (const auto& row : grid)
    for (std::size_t c = 0; c < row.size(); ++c)
      widths[c] = std::max(widths[c], row[c].size());

  std::ostringstream os;
  for (std::size_t r = 0; r < grid.size(); ++r) {
    for (std::size_t c = 0; c < grid[r].size(); ++c) {
      if (c) os << "  ";
      os << grid[r][c];
      os << std::string(widths[c] - grid[r][c].size(), ' ');
    }
    os << "\n";
    if (r == 0) {
      std::size_t total = 0;
      for (std::size_t w : widths) total += w;
      os << std::string(total + 2 * (widths.size() - 1), '-') << "\n";
    }
  }
  return os.str();
}

GradCheckReport gradcheck_problem(const ProblemConfig& cfg, std::uint64_t seed,
                                  std::size_t max_entries_per_tensor) {
  RngStream data_stream(seed, kStreamData);
  // 4-sample batches keep the finite-difference sweep fast.
  ProblemInstance problem = make_problem(cfg, data_stream, 4);
  RngStream init_stream(seed, kStreamInit);
  std::vector<FlatTensor> params = problem.objective->init_params(init_stream);
  const Batch batch =
      problem.dataset ? problem.dataset->as_batch() : Batch{};
  return gradient_check(*problem.objective, std::move(params), batch, 1e-6,
                        max_entries_per_tensor, seed);
}

GradCheckReport gradcheck_problem(const std::string& problem_id,
                                  std::uint64_t seed,
                                  std::size_t max_entries_per_tensor) {
  ProblemConfig cfg;
  cfg.id = problem_id;
  return gradcheck_problem(cfg, seed, max_entries_per_tensor);
}

}  // namespace thermolion
