// SPDX-License-Identifier: Apache-2.0
#include "doctest.h"

#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "thermolion/harness.hpp"
#include "thermolion/metrics_io.hpp"
#include "thermolion/svg_plot.hpp"

using namespace thermolion;
namespace fs = std::filesystem;

namespace {

RunConfig small_quadratic_run(const char* optimizer) {
  RunConfig cfg;
  cfg.problem.id = "quadratic";
  cfg.problem.dim = 50;
  cfg.problem.steps_per_epoch = 5;
  cfg.optimizer = optimizer;
  cfg.optim = default_config_for(optimizer_from_id(optimizer));
  cfg.epochs = 6;
  cfg.seed = 11;
  return cfg;
}

fs::path temp_dir(const char* name) {
  const fs::path p = fs::temp_directory_path() / name;
  fs::remove_all(p);
  return p;
}

// Minimal well-formedness scan: every opened tag is closed in order.
bool xml_well_formed(const std::string& text) {
  std::vector<std::string> stack;
  std::size_t i = 0;
  while ((i = text.find('<', i)) != std::string::npos) {
    if (text.compare(i, 4, "<!--") == 0) {
      i = text.find("-->", i);
      if (i == std::string::npos) return false;
      continue;
    }
    if (text.compare(i, 2, "<?") == 0) {
      i = text.find("?>", i);
      if (i == std::string::npos) return false;
      continue;
    }
    const std::size_t end = text.find('>', i);
    if (end == std::string::npos) return false;
    std::string tag = text.substr(i + 1, end - i - 1);
    if (!tag.empty() && tag.back() == '/') {
      i = end + 1;
      continue;  // self-closing
    }
    if (!tag.empty() && tag.front() == '/') {
      const std::string name = tag.substr(1);
      if (stack.empty() || stack.back() != name) return false;
      stack.pop_back();
    } else {
      const std::size_t sp = tag.find_first_of(" \t\n");
      stack.push_back(sp == std::string::npos ? tag : tag.substr(0, sp));
    }
    i = end + 1;
  }
  return stack.empty();
}

}  // namespace

TEST_CASE("make_problem rejects unknown ids, listing the registry") {
  ProblemConfig pc;
  pc.id = "hills";
  RngStream data(1, 2);
  try {
    make_problem(pc, data, 0);
    FAIL("expected rejection");
  } catch (const std::invalid_argument& e) {
    const std::string msg = e.what();
    for (const auto& id : problem_ids())
      CHECK(msg.find(id) != std::string::npos);
  }
}

TEST_CASE("convex descent: sgdm reduces quadratic loss") {
  RunConfig cfg = small_quadratic_run("sgdm");
  const RunRecord rec = run_experiment(cfg);
  REQUIRE(rec.epoch_loss.size() == 6);
  CHECK_FALSE(rec.diverged);
  CHECK(rec.final_loss < rec.epoch_loss.front());
  CHECK(std::isnan(rec.final_accuracy));
}

TEST_CASE("identical configs produce bit-identical records") {
  RunConfig cfg = small_quadratic_run("thermolion");
  cfg.problem.noise_std = 0.5;  // exercise the data-noise stream too
  const RunRecord a = run_experiment(cfg);
  const RunRecord b = run_experiment(cfg);

  CHECK(a.epoch_loss == b.epoch_loss);
  CHECK(a.epoch_accuracy.size() == b.epoch_accuracy.size());
  CHECK(a.final_loss == b.final_loss);
  REQUIRE(a.telemetry.size() == b.telemetry.size());
  for (std::size_t i = 0; i < a.telemetry.size(); ++i) {
    CHECK(a.telemetry[i].lambda_mean == b.telemetry[i].lambda_mean);
    CHECK(a.telemetry[i].sigma == b.telemetry[i].sigma);
  }

  RunConfig other = cfg;
  other.seed = 12;
  CHECK(run_experiment(other).epoch_loss != a.epoch_loss);
}

TEST_CASE("telemetry throttling: every=5 over 60 steps gives 12 rows") {
  RunConfig cfg = small_quadratic_run("thermolion");
  cfg.problem.steps_per_epoch = 10;
  cfg.epochs = 6;  // 60 steps, one tensor
  cfg.telemetry_every = 5;
  const RunRecord rec = run_experiment(cfg);
  CHECK(rec.telemetry.size() == 12);
  for (const auto& t : rec.telemetry) CHECK(t.step % 5 == 0);

  // baselines emit no telemetry rows
  RunConfig adam = small_quadratic_run("adam");
  CHECK(run_experiment(adam).telemetry.empty());
}

TEST_CASE("run config JSON round-trip") {
  RunConfig cfg = small_quadratic_run("adamw");
  cfg.problem.noise_std = 2.5;
  cfg.sample_cap = 1234;
  cfg.telemetry_every = 3;
  cfg.out_dir = "somewhere/out";
  const std::string text = run_config_to_json(cfg);
  const RunConfig parsed = run_config_from_json(text);
  CHECK(parsed == cfg);

  // optimizer defaults resolve per id, overrides apply on top
  const RunConfig sparse = run_config_from_json(
      R"({"optimizer": {"id": "lion", "lr": 0.000333}, "seed": 7})");
  CHECK(sparse.optimizer == "lion");
  CHECK(sparse.optim.lr == 0.000333);
  CHECK(sparse.optim.beta2 == 0.99);
  CHECK(sparse.optim.weight_decay == 0.0);
  CHECK(sparse.seed == 7);
}

TEST_CASE("divergence is a reportable outcome") {
  RunConfig cfg = small_quadratic_run("sgdm");
  cfg.optim.lr = 1e6;  // wildly unstable on h up to 10
  cfg.epochs = 20;
  const RunRecord rec = run_experiment(cfg);
  CHECK(rec.diverged);
  CHECK(rec.epoch_loss.size() < 20);
}

TEST_CASE("emit_metrics writes the pinned formats") {
  RunConfig cfg = small_quadratic_run("thermolion");
  cfg.epochs = 12;
  const fs::path dir = temp_dir("tl_emit");
  cfg.out_dir = dir.string();
  const RunRecord rec = run_experiment(cfg);

  std::ifstream csv(dir / "metrics.csv");
  REQUIRE(csv.good());
  std::string line;
  std::vector<std::string> lines;
  while (std::getline(csv, line)) lines.push_back(line);
  REQUIRE(lines.size() == 13);  // header + 12 epochs
  CHECK(lines[0] == "epoch,loss,accuracy,seconds");

  const MetricsSeries series = load_metrics_csv(dir / "metrics.csv");
  REQUIRE(series.loss.size() == 12);
  for (std::size_t e = 0; e < 12; ++e) {
    CHECK(series.loss[e] == rec.epoch_loss[e]);  // %.17g round-trips exactly
    CHECK(std::isnan(series.accuracy[e]));
  }

  // telemetry.jsonl carries the pinned keys, one object per line
  std::ifstream jsonl(dir / "telemetry.jsonl");
  REQUIRE(jsonl.good());
  std::size_t rows = 0;
  while (std::getline(jsonl, line)) {
    ++rows;
    for (const char* key :
         {"tensor", "step", "rho_mean", "rho_max", "lambda_mean", "lambda_min",
          "lambda_max", "sigma", "temperature", "aligned_fraction"})
      CHECK(line.find(std::string("\"") + key + "\"") != std::string::npos);
  }
  CHECK(rows == rec.telemetry.size());

  // config echo parses back to the exact RunConfig
  std::ifstream cfgf(dir / "config.json");
  std::stringstream buf;
  buf << cfgf.rdbuf();
  CHECK(run_config_from_json(buf.str()) == cfg);
}

TEST_CASE("suite: single cell reduces to run_experiment; gains vs baseline") {
  SuiteConfig suite;
  suite.base = small_quadratic_run("adam");
  suite.optimizers = {"adam"};
  ProblemConfig prob = suite.base.problem;
  suite.problems = {prob};
  const SuiteResult single = run_suite(suite);
  REQUIRE(single.cells.size() == 1);

  RunConfig direct_cfg = suite.base;
  direct_cfg.optim = default_config_for(OptimizerKind::Adam);
  direct_cfg.optim.lr = suite.base.optim.lr;
  const RunRecord direct = run_experiment(direct_cfg);
  CHECK(single.cells[0].epoch_loss == direct.epoch_loss);

  // 3 x 2 suite over the spec's smoke matrix
  SuiteConfig smoke;
  smoke.base = small_quadratic_run("adam");
  smoke.base.epochs = 4;
  smoke.optimizers = {"adam", "lion", "thermolion"};
  ProblemConfig clean = smoke.base.problem;
  ProblemConfig noisy = clean;
  noisy.noise_std = 5.0;
  smoke.problems = {clean, noisy};
  const SuiteResult result = run_suite(smoke);
  REQUIRE(result.cells.size() == 6);
  for (const auto& cell : result.cells) {
    CHECK_FALSE(cell.diverged);
    CHECK(std::isfinite(cell.final_loss));
  }
  // lion cells follow the eta/3 protocol
  CHECK(result.cells[2].config.optim.lr ==
        doctest::Approx(smoke.base.optim.lr / 3.0).epsilon(1e-15));

  const std::string table = render_suite_table(result);
  // baseline row reports a zero gain against itself
  std::istringstream ts(table);
  std::string line;
  bool found_baseline = false;
  while (std::getline(ts, line)) {
    if (line.rfind("adam", 0) == 0) {
      found_baseline = true;
      CHECK(line.find("+0.0%") != std::string::npos);
    }
  }
  CHECK(found_baseline);

  // pure function of the records
  CHECK(render_suite_table(result) == table);
}

TEST_CASE("blobs classification end to end") {
  RunConfig cfg;
  cfg.problem.id = "blobs";
  cfg.problem.per_class = 40;
  cfg.problem.classes = 5;
  cfg.problem.blob_dim = 16;
  cfg.problem.separation = 6.0;
  cfg.problem.hidden = 32;
  cfg.optimizer = "thermolion";
  cfg.optim = default_config_for(OptimizerKind::ThermoLion);
  cfg.epochs = 8;
  cfg.batch_size = 50;
  cfg.seed = 3;
  const RunRecord rec = run_experiment(cfg);
  REQUIRE_FALSE(rec.diverged);
  REQUIRE(rec.epoch_accuracy.size() == 8);
  CHECK(rec.final_accuracy > 0.9);  // well-separated clusters are easy
  CHECK(rec.final_loss < rec.epoch_loss.front());
}

TEST_CASE("gradcheck gateway per registered problem") {
  CHECK(gradcheck_problem("quadratic", 42).max_rel_error < 1e-9);
  CHECK(gradcheck_problem("rosenbrock", 42).max_rel_error < 1e-7);
  const GradCheckReport mlp = gradcheck_problem("blobs", 42, 60);
  CHECK(mlp.tensors.size() == 4);
  CHECK(mlp.max_rel_error < 1e-5);
  CHECK(mlp.passes(1e-5));
}

TEST_CASE("loss SVG: polylines, log spacing, structure, fallback") {
  const PlotSeries series{"thermolion", {1.0, 0.1, 0.01}};
  const std::string svg = render_loss_svg(std::vector<PlotSeries>{series});

  CHECK(xml_well_formed(svg));
  std::size_t polylines = 0, pos = 0;
  while ((pos = svg.find("<polyline", pos)) != std::string::npos) {
    ++polylines;
    ++pos;
  }
  CHECK(polylines == 1);

  // log axis: the three decades sit at equally spaced y coordinates
  const std::size_t pts = svg.find("points=\"");
  REQUIRE(pts != std::string::npos);
  const std::size_t end = svg.find('"', pts + 8);
  std::istringstream coords(svg.substr(pts + 8, end - pts - 8));
  std::vector<double> ys;
  std::string pair;
  while (coords >> pair) {
    const auto comma = pair.find(',');
    ys.push_back(std::stod(pair.substr(comma + 1)));
  }
  REQUIRE(ys.size() == 3);
  CHECK(std::abs((ys[1] - ys[0]) - (ys[2] - ys[1])) < 0.05);

  // legend carries the label
  CHECK(svg.find("thermolion") != std::string::npos);

  // all-nonpositive losses: linear fallback with a warning annotation
  const PlotSeries flat{"zero", {0.0, 0.0, 0.0}};
  const std::string fallback = render_loss_svg(std::vector<PlotSeries>{flat});
  CHECK(xml_well_formed(fallback));
  CHECK(fallback.find("warning") != std::string::npos);
  CHECK(fallback.find("linear") != std::string::npos);

  CHECK_THROWS_AS(render_loss_svg(std::vector<PlotSeries>{{"x", {1.0}}}),
                  std::invalid_argument);
  CHECK_THROWS_AS(render_loss_svg({}), std::invalid_argument);
}

TEST_CASE("re-rendering curves from saved metrics is idempotent") {
  RunConfig cfg = small_quadratic_run("adam");
  const fs::path dir = temp_dir("tl_replot");
  cfg.out_dir = dir.string();
  const RunRecord rec = run_experiment(cfg);

  const PlotSeries live{rec.config.optimizer, rec.epoch_loss};
  const MetricsSeries saved = load_metrics_csv(dir / "metrics.csv");
  const PlotSeries reloaded{rec.config.optimizer, saved.loss};
  CHECK(render_loss_svg(std::vector<PlotSeries>{live}) ==
        render_loss_svg(std::vector<PlotSeries>{reloaded}));
}
