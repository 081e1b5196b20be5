// SPDX-License-Identifier: Apache-2.0
//
// CLI for seeded optimizer-vs-problem experiments: single runs, comparison
// suites, gradient checks and loss-curve plots.

#include "CLI11.hpp"

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>

#include "thermolion/harness.hpp"
#include "thermolion/metrics_io.hpp"
#include "thermolion/svg_plot.hpp"

namespace fs = std::filesystem;
using namespace thermolion;

namespace {

struct CommonFlags {
  std::string config_path;
  std::string out_dir;
  std::string optimizer;
  std::string problem;
  std::uint64_t seed = 0;
  bool seed_set = false;
  bool no_noise = false;
};

void add_common(CLI::App* cmd, CommonFlags& flags, bool with_selectors) {
  cmd->add_option("--config", flags.config_path, "JSON config file");
  cmd->add_option("--out", flags.out_dir, "output directory");
  cmd->add_option("--seed", flags.seed, "run seed")
      ->each([&flags](const std::string&) { flags.seed_set = true; });
  cmd->add_flag("--no-noise", flags.no_noise,
                "disable thermal noise (forces T0=0)");
  if (with_selectors) {
    cmd->add_option("--optimizer", flags.optimizer,
                    "optimizer id (resets optimizer params to its defaults)");
    cmd->add_option("--problem", flags.problem, "problem id");
  }
}

void apply_overrides(RunConfig& cfg, const CommonFlags& flags) {
  if (!flags.optimizer.empty()) {
    cfg.optimizer = flags.optimizer;
    cfg.optim = default_config_for(optimizer_from_id(flags.optimizer));
  }
  if (!flags.problem.empty() && flags.problem != cfg.problem.id) {
    cfg.problem = ProblemConfig{};
    cfg.problem.id = flags.problem;
  }
  if (flags.seed_set) cfg.seed = flags.seed;
  if (!flags.out_dir.empty()) cfg.out_dir = flags.out_dir;
  if (flags.no_noise) {
    cfg.optim.noise_enabled = false;
    cfg.optim.temp_init = 0.0;
  }
}

int cmd_run(const CommonFlags& flags) {
  RunConfig cfg;
  if (!flags.config_path.empty()) cfg = load_run_config(flags.config_path);
  apply_overrides(cfg, flags);

  const RunRecord rec = run_experiment(cfg);
  std::printf("run: %s on %s (seed %llu)\n", rec.config.optimizer.c_str(),
              rec.config.problem.id.c_str(),
              static_cast<unsigned long long>(rec.config.seed));
  if (rec.diverged) std::printf("  DIVERGED after %zu epochs\n", rec.epoch_loss.size());
  std::printf("  final loss     %.6e\n", rec.final_loss);
  if (!std::isnan(rec.final_accuracy))
    std::printf("  final accuracy %.2f%%\n", rec.final_accuracy * 100.0);
  std::printf("  wall clock     %.3fs\n", rec.total_seconds);
  if (!rec.out_dir.empty())
    std::printf("  outputs        %s/{metrics.csv,telemetry.jsonl,config.json}\n",
                rec.out_dir.c_str());
  return 0;
}

SuiteConfig default_suite() {
  SuiteConfig s;
  s.optimizers = {"adam", "lion", "thermolion"};
  ProblemConfig clean;
  clean.id = "quadratic";
  ProblemConfig noisy = clean;
  noisy.noise_std = 5.0;
  s.problems = {clean, noisy};
  return s;
}

int cmd_suite(const CommonFlags& flags) {
  SuiteConfig cfg = flags.config_path.empty()
                        ? default_suite()
                        : load_suite_config(flags.config_path);
  if (flags.seed_set) cfg.base.seed = flags.seed;
  if (!flags.out_dir.empty()) cfg.base.out_dir = flags.out_dir;
  if (flags.no_noise) {
    cfg.base.optim.noise_enabled = false;
    cfg.base.optim.temp_init = 0.0;
  }

  const SuiteResult result = run_suite(cfg);
  const std::string table = render_suite_table(result);
  std::fputs(table.c_str(), stdout);
  if (!cfg.base.out_dir.empty()) {
    fs::create_directories(cfg.base.out_dir);
    std::ofstream f(fs::path(cfg.base.out_dir) / "suite_table.txt");
    f << table;
  }
  return 0;
}

int cmd_gradcheck(const CommonFlags& flags, std::size_t entries) {
  ProblemConfig pc;
  if (!flags.config_path.empty())
    pc = load_run_config(flags.config_path).problem;
  if (!flags.problem.empty()) pc.id = flags.problem;

  const std::uint64_t seed = flags.seed_set ? flags.seed : 42;
  const GradCheckReport report = gradcheck_problem(pc, seed, entries);
  std::printf("gradcheck: %s (seed %llu)\n", pc.id.c_str(),
              static_cast<unsigned long long>(seed));
  for (const auto& t : report.tensors)
    std::printf("  %-6s max rel error %.3e  (%zu entries)\n", t.name.c_str(),
                t.max_rel_error, t.entries_checked);
  const bool ok = report.passes(1e-5);
  std::printf("  => %s (threshold 1e-5)\n", ok ? "PASS" : "FAIL");
  return ok ? 0 : 1;
}

int cmd_plot(const std::vector<std::string>& inputs, const std::string& out) {
  std::vector<PlotSeries> series;
  for (const auto& input : inputs) {
    fs::path metrics = input;
    fs::path dir = input;
    if (fs::is_directory(metrics)) {
      metrics /= "metrics.csv";
    } else {
      dir = metrics.parent_path();
    }
    PlotSeries s;
    s.losses = load_metrics_csv(metrics).loss;
    const fs::path config = dir / "config.json";
    if (fs::exists(config))
      s.label = load_run_config(config.string()).optimizer;
    else
      s.label = dir.filename().string();
    series.push_back(std::move(s));
  }
  emit_loss_svg(series, out);
  std::printf("plot: wrote %s (%zu series)\n", out.c_str(), series.size());
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"SNR-gated optimizer benchmark harness"};
  app.require_subcommand(1);

  CommonFlags run_flags, suite_flags, grad_flags;
  std::size_t grad_entries = 200;
  std::vector<std::string> plot_inputs;
  std::string plot_out = "curves.svg";

  CLI::App* run = app.add_subcommand("run", "run one (optimizer, problem) cell");
  add_common(run, run_flags, true);

  CLI::App* suite =
      app.add_subcommand("suite", "run an optimizer x problem comparison");
  add_common(suite, suite_flags, false);

  CLI::App* gradcheck = app.add_subcommand(
      "gradcheck", "finite-difference check of a problem's gradients");
  add_common(gradcheck, grad_flags, true);
  gradcheck->add_option("--entries", grad_entries,
                        "entries checked per tensor (0 = all)");

  CLI::App* plot = app.add_subcommand("plot", "render loss curves as SVG");
  plot->add_option("--out", plot_out, "output SVG path");
  plot->add_option("inputs", plot_inputs, "run directories or metrics.csv files")
      ->required();

  CLI11_PARSE(app, argc, argv);

  try {
    if (run->parsed()) return cmd_run(run_flags);
    if (suite->parsed()) return cmd_suite(suite_flags);
    if (gradcheck->parsed()) return cmd_gradcheck(grad_flags, grad_entries);
    if (plot->parsed()) return cmd_plot(plot_inputs, plot_out);
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
  return 0;
}
