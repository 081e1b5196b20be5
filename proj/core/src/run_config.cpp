// SPDX-License-Identifier: Apache-2.0
#include "thermolion/run_config.hpp"

#include <nlohmann/json.hpp>

#include <fstream>
#include <sstream>

namespace thermolion {

using nlohmann::json;

bool operator==(const OptimConfig& a, const OptimConfig& b) {
  return a.lr == b.lr && a.beta1 == b.beta1 && a.beta2 == b.beta2 &&
         a.eps == b.eps && a.alpha_boost == b.alpha_boost &&
         a.c_solid == b.c_solid && a.temp_init == b.temp_init &&
         a.temp_decay == b.temp_decay && a.weight_decay == b.weight_decay &&
         a.noise_enabled == b.noise_enabled;
}

namespace {

json problem_to_json(const ProblemConfig& p) {
  json j;
  j["id"] = p.id;
  j["dim"] = p.dim;
  j["noise_std"] = p.noise_std;
  j["h_min"] = p.h_min;
  j["h_max"] = p.h_max;
  j["steps_per_epoch"] = p.steps_per_epoch;
  j["x0"] = p.x0;
  j["y0"] = p.y0;
  j["per_class"] = p.per_class;
  j["classes"] = p.classes;
  j["blob_dim"] = p.blob_dim;
  j["separation"] = p.separation;
  j["hidden"] = p.hidden;
  j["images_path"] = p.images_path;
  j["labels_path"] = p.labels_path;
  return j;
}

ProblemConfig problem_from_json(const json& j) {
  ProblemConfig p;
  p.id = j.value("id", p.id);
  p.dim = j.value("dim", p.dim);
  p.noise_std = j.value("noise_std", p.noise_std);
  p.h_min = j.value("h_min", p.h_min);
  p.h_max = j.value("h_max", p.h_max);
  p.steps_per_epoch = j.value("steps_per_epoch", p.steps_per_epoch);
  p.x0 = j.value("x0", p.x0);
  p.y0 = j.value("y0", p.y0);
  p.per_class = j.value("per_class", p.per_class);
  p.classes = j.value("classes", p.classes);
  p.blob_dim = j.value("blob_dim", p.blob_dim);
  p.separation = j.value("separation", p.separation);
  p.hidden = j.value("hidden", p.hidden);
  p.images_path = j.value("images_path", p.images_path);
  p.labels_path = j.value("labels_path", p.labels_path);
  return p;
}

json optim_to_json(const std::string& id, const OptimConfig& c) {
  json j;
  j["id"] = id;
  j["lr"] = c.lr;
  j["beta1"] = c.beta1;
  j["beta2"] = c.beta2;
  j["eps"] = c.eps;
  j["alpha_boost"] = c.alpha_boost;
  j["c_solid"] = c.c_solid;
  j["temp_init"] = c.temp_init;
  j["temp_decay"] = c.temp_decay;
  j["weight_decay"] = c.weight_decay;
  j["noise_enabled"] = c.noise_enabled;
  return j;
}

OptimConfig optim_from_json(const json& j, const std::string& id) {
  OptimConfig c = default_config_for(optimizer_from_id(id));
  c.lr = j.value("lr", c.lr);
  c.beta1 = j.value("beta1", c.beta1);
  c.beta2 = j.value("beta2", c.beta2);
  c.eps = j.value("eps", c.eps);
  c.alpha_boost = j.value("alpha_boost", c.alpha_boost);
  c.c_solid = j.value("c_solid", c.c_solid);
  c.temp_init = j.value("temp_init", c.temp_init);
  c.temp_decay = j.value("temp_decay", c.temp_decay);
  c.weight_decay = j.value("weight_decay", c.weight_decay);
  c.noise_enabled = j.value("noise_enabled", c.noise_enabled);
  return c;
}

std::string read_text_file(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw std::runtime_error("cannot open '" + path + "'");
  std::ostringstream os;
  os << f.rdbuf();
  return os.str();
}

RunConfig run_config_from_json_obj(const json& j) {
  RunConfig cfg;
  if (j.contains("problem")) cfg.problem = problem_from_json(j.at("problem"));
  if (j.contains("optimizer")) {
    const json& o = j.at("optimizer");
    cfg.optimizer = o.value("id", cfg.optimizer);
    cfg.optim = optim_from_json(o, cfg.optimizer);
  } else {
    cfg.optim = default_config_for(optimizer_from_id(cfg.optimizer));
  }
  cfg.epochs = j.value("epochs", cfg.epochs);
  cfg.batch_size = j.value("batch_size", cfg.batch_size);
  cfg.sample_cap = j.value("sample_cap", cfg.sample_cap);
  cfg.seed = j.value("seed", cfg.seed);
  cfg.telemetry_every = j.value("telemetry_every", cfg.telemetry_every);
  cfg.out_dir = j.value("out_dir", cfg.out_dir);
  return cfg;
}

}  // namespace

std::string run_config_to_json(const RunConfig& cfg) {
  json j;
  j["problem"] = problem_to_json(cfg.problem);
  j["optimizer"] = optim_to_json(cfg.optimizer, cfg.optim);
  j["epochs"] = cfg.epochs;
  j["batch_size"] = cfg.batch_size;
  j["sample_cap"] = cfg.sample_cap;
  j["seed"] = cfg.seed;
  j["telemetry_every"] = cfg.telemetry_every;
  j["out_dir"] = cfg.out_dir;
  return j.dump(2) + "\n";
}

RunConfig run_config_from_json(const std::string& text) {
  return run_config_from_json_obj(json::parse(text));
}

RunConfig load_run_config(const std::string& path) {
  return run_config_from_json(read_text_file(path));
}

SuiteConfig suite_config_from_json(const std::string& text) {
  const json j = json::parse(text);
  SuiteConfig s;
  if (j.contains("base")) s.base = run_config_from_json_obj(j.at("base"));
  if (j.contains("optimizers"))
    s.optimizers = j.at("optimizers").get<std::vector<std::string>>();
  if (j.contains("problems")) {
    s.problems.clear();
    for (const auto& pj : j.at("problems"))
      s.problems.push_back(problem_from_json(pj));
  }
  s.baseline = j.value("baseline", s.baseline);
  s.lion_lr = j.value("lion_lr", s.lion_lr);
  return s;
}

SuiteConfig load_suite_config(const std::string& path) {
  return suite_config_from_json(read_text_file(path));
}

}  // namespace thermolion
