// SPDX-License-Identifier: Apache-2.0
#include "thermolion/optim.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace thermolion {

namespace {

void check_range(bool ok, const char* what, double value) {
  if (!ok) {
    std::ostringstream os;
    os << "OptimConfig: " << what << " out of range (got " << value << ")";
    throw std::invalid_argument(os.str());
  }
}

void require_finite_gradient(const FlatTensor& g, const char* context) {
  if (!all_finite(g))
    throw NonFiniteGradient(std::string(context) + ": non-finite gradient in '" +
                            g.name + "'");
}

void check_step_inputs(const FlatTensor& theta, const FlatTensor& g,
                       const OptimState& state, const OptimConfig& cfg,
                       const char* context) {
  cfg.validate();
  require_same_shape(theta, g, context);
  require_same_shape(state.m, g, context);
  require_same_shape(state.v, g, context);
  require_finite_gradient(g, context);
}

}  // namespace

void OptimConfig::validate() const {
  check_range(std::isfinite(lr) && lr > 0.0, "lr", lr);
  check_range(beta1 >= 0.0 && beta1 < 1.0, "beta1", beta1);
  check_range(beta2 >= 0.0 && beta2 < 1.0, "beta2", beta2);
  check_range(std::isfinite(eps) && eps > 0.0, "eps", eps);
  check_range(alpha_boost >= 0.0, "alpha_boost", alpha_boost);
  check_range(std::isfinite(c_solid) && c_solid > 0.0, "c_solid", c_solid);
  check_range(temp_init >= 0.0, "temp_init", temp_init);
  check_range(temp_decay > 0.0 && temp_decay <= 1.0, "temp_decay", temp_decay);
  check_range(weight_decay >= 0.0, "weight_decay", weight_decay);
}

OptimState OptimState::zeros_like(const FlatTensor& param, double temp_init) {
  OptimState st;
  st.m = FlatTensor(param.name, param.shape);
  st.v = FlatTensor(param.name, param.shape);
  st.step = 0;
  st.temperature = temp_init;
  return st;
}

void update_moments(OptimState& state, const FlatTensor& g, double beta1,
                    double beta2) {
  require_same_shape(state.m, g, "update_moments");
  require_same_shape(state.v, g, "update_moments");
  for (std::size_t i = 0; i < g.size(); ++i) {
    state.m[i] = beta1 * state.m[i] + (1.0 - beta1) * g[i];
    state.v[i] = beta2 * state.v[i] + (1.0 - beta2) * (g[i] * g[i]);
  }
  ++state.step;
}

FlatTensor snr(const FlatTensor& m, const FlatTensor& v, double eps) {
  require_same_shape(m, v, "snr");
  if (!(eps > 0.0)) throw std::invalid_argument("snr: eps must be > 0");
  FlatTensor rho = m;
  rho.name = m.name;
  for (std::size_t i = 0; i < m.size(); ++i) {
    if (v[i] < 0.0)
      throw std::invalid_argument("snr: negative second moment (state corruption) in '" +
                                  v.name + "'");
    rho[i] = std::abs(m[i]) / (std::sqrt(v[i]) + eps);
  }
  return rho;
}

FlatTensor gate(const FlatTensor& rho) {
  // tanh rounds to exactly 1.0 once rho exceeds ~19; the gate contract is
  // [0,1), so saturation is capped one ulp below 1.
  static const double kBelowOne = std::nextafter(1.0, 0.0);
  return elementwise_map(
      rho, [](double r) { return std::min(std::tanh(r), kBelowOne); });
}

FlatTensor alignment(const FlatTensor& m, const FlatTensor& g, double alpha) {
  require_same_shape(m, g, "alignment");
  FlatTensor a = m;
  for (std::size_t i = 0; i < m.size(); ++i)
    a[i] = sign_of(m[i]) * sign_of(g[i]) > 0.0 ? alpha : 0.0;
  return a;
}

double thermal_sigma(double temperature, const FlatTensor& v) {
  return std::sqrt(temperature * mean(v));
}

namespace {

struct GateArrays {
  FlatTensor rho;
  FlatTensor lambda;
  FlatTensor boost;
  FlatTensor delta;  // lr-scaled deterministic step
};

GateArrays compute_gate_arrays(const FlatTensor& m, const FlatTensor& v,
                               const FlatTensor& g, const OptimConfig& cfg,
                               std::optional<double> gate_override) {
  GateArrays out;
  out.rho = snr(m, v, cfg.eps);
  if (gate_override) {
    out.lambda = out.rho;
    for (double& x : out.lambda.data) x = *gate_override;
  } else {
    out.lambda = gate(out.rho);
  }
  out.boost = alignment(m, g, cfg.alpha_boost);
  out.delta = m;
  for (std::size_t i = 0; i < m.size(); ++i) {
    const double lam = out.lambda[i];
    const double gas = (1.0 - lam) * sign_of(m[i]) * (1.0 + out.boost[i]);
    const double solid = cfg.c_solid * lam * (m[i] / (std::sqrt(v[i]) + cfg.eps));
    out.delta[i] = cfg.lr * (gas + solid);
  }
  return out;
}

}  // namespace

FlatTensor thermolion_direction(const FlatTensor& m, const FlatTensor& v,
                                const FlatTensor& g, const OptimConfig& cfg,
                                std::optional<double> gate_override) {
  cfg.validate();
  require_same_shape(m, g, "thermolion_direction");
  require_same_shape(v, g, "thermolion_direction");
  return compute_gate_arrays(m, v, g, cfg, gate_override).delta;
}

GateTelemetry thermolion_step(FlatTensor& theta, const FlatTensor& g,
                              OptimState& state, const OptimConfig& cfg,
                              RngStream& rng,
                              std::optional<double> gate_override) {
  check_step_inputs(theta, g, state, cfg, "thermolion_step");

  update_moments(state, g, cfg.beta1, cfg.beta2);
  const GateArrays arrays =
      compute_gate_arrays(state.m, state.v, g, cfg, gate_override);

  const double temp = state.temperature;  // T_t, decayed after the step
  const double sigma = thermal_sigma(temp, state.v);

  const std::size_t n = theta.size();
  std::vector<double> noise(n, 0.0);
  if (cfg.noise_enabled && sigma > 0.0) {
    for (std::size_t i = 0; i < n; ++i)
      noise[i] = (1.0 - arrays.lambda[i]) * sigma * rng.next_gaussian();
  }

  const double shrink = 1.0 - cfg.lr * cfg.weight_decay;
  for (std::size_t i = 0; i < n; ++i)
    theta[i] = theta[i] * shrink - arrays.delta[i] - noise[i];

  state.temperature = cfg.temp_decay * state.temperature;

  GateTelemetry t;
  t.tensor_name = theta.name;
  t.step = state.step;
  t.temperature = temp;
  t.sigma = sigma;
  t.rho_mean = mean(arrays.rho);
  t.lambda_mean = mean(arrays.lambda);
  t.rho_max = arrays.rho[0];
  t.lambda_min = arrays.lambda[0];
  t.lambda_max = arrays.lambda[0];
  std::size_t aligned = 0;
  for (std::size_t i = 0; i < n; ++i) {
    t.rho_max = std::max(t.rho_max, arrays.rho[i]);
    t.lambda_min = std::min(t.lambda_min, arrays.lambda[i]);
    t.lambda_max = std::max(t.lambda_max, arrays.lambda[i]);
    if (sign_of(state.m[i]) * sign_of(g[i]) > 0.0) ++aligned;
  }
  t.aligned_fraction = static_cast<double>(aligned) / static_cast<double>(n);
  return t;
}

void adam_step(FlatTensor& theta, const FlatTensor& g, OptimState& state,
               const OptimConfig& cfg) {
  check_step_inputs(theta, g, state, cfg, "adam_step");

  // L2-in-gradient weight decay (classic Adam), applied only when nonzero.
  const FlatTensor* grad = &g;
  FlatTensor decayed;
  if (cfg.weight_decay > 0.0) {
    decayed = g;
    for (std::size_t i = 0; i < g.size(); ++i)
      decayed[i] = g[i] + cfg.weight_decay * theta[i];
    grad = &decayed;
  }

  update_moments(state, *grad, cfg.beta1, cfg.beta2);
  const auto t = static_cast<double>(state.step);
  const double bc1 = 1.0 - std::pow(cfg.beta1, t);
  const double bc2 = 1.0 - std::pow(cfg.beta2, t);
  for (std::size_t i = 0; i < theta.size(); ++i) {
    const double mhat = state.m[i] / bc1;
    const double vhat = state.v[i] / bc2;
    theta[i] -= cfg.lr * mhat / (std::sqrt(vhat) + cfg.eps);
  }
}

void adamw_step(FlatTensor& theta, const FlatTensor& g, OptimState& state,
                const OptimConfig& cfg) {
  check_step_inputs(theta, g, state, cfg, "adamw_step");

  update_moments(state, g, cfg.beta1, cfg.beta2);
  const auto t = static_cast<double>(state.step);
  const double bc1 = 1.0 - std::pow(cfg.beta1, t);
  const double bc2 = 1.0 - std::pow(cfg.beta2, t);
  const double shrink = 1.0 - cfg.lr * cfg.weight_decay;
  for (std::size_t i = 0; i < theta.size(); ++i) {
    const double mhat = state.m[i] / bc1;
    const double vhat = state.v[i] / bc2;
    theta[i] = theta[i] * shrink - cfg.lr * mhat / (std::sqrt(vhat) + cfg.eps);
  }
}

void lion_step(FlatTensor& theta, const FlatTensor& g, OptimState& state,
               const OptimConfig& cfg) {
  check_step_inputs(theta, g, state, cfg, "lion_step");

  // Two-beta scheme: beta1 interpolation picks the update direction,
  // beta2 EMA keeps the memory.
  const double shrink = 1.0 - cfg.lr * cfg.weight_decay;
  for (std::size_t i = 0; i < theta.size(); ++i) {
    const double u =
        sign_of(cfg.beta1 * state.m[i] + (1.0 - cfg.beta1) * g[i]);
    theta[i] = theta[i] * shrink - cfg.lr * u;
    state.m[i] = cfg.beta2 * state.m[i] + (1.0 - cfg.beta2) * g[i];
  }
  ++state.step;
}

void rmsprop_step(FlatTensor& theta, const FlatTensor& g, OptimState& state,
                  const OptimConfig& cfg) {
  check_step_inputs(theta, g, state, cfg, "rmsprop_step");

  for (std::size_t i = 0; i < theta.size(); ++i) {
    state.v[i] = cfg.beta2 * state.v[i] + (1.0 - cfg.beta2) * (g[i] * g[i]);
    theta[i] -= cfg.lr * g[i] / (std::sqrt(state.v[i]) + cfg.eps);
  }
  ++state.step;
}

void sgdm_step(FlatTensor& theta, const FlatTensor& g, OptimState& state,
               const OptimConfig& cfg) {
  check_step_inputs(theta, g, state, cfg, "sgdm_step");

  for (std::size_t i = 0; i < theta.size(); ++i) {
    state.m[i] = cfg.beta1 * state.m[i] + g[i];
    theta[i] -= cfg.lr * state.m[i];
  }
  ++state.step;
}

std::string_view optimizer_id(OptimizerKind kind) {
  switch (kind) {
    case OptimizerKind::Sgdm: return "sgdm";
    case OptimizerKind::Adam: return "adam";
    case OptimizerKind::AdamW: return "adamw";
    case OptimizerKind::RmsProp: return "rmsprop";
    case OptimizerKind::Lion: return "lion";
    case OptimizerKind::ThermoLion: return "thermolion";
  }
  throw std::logic_error("optimizer_id: unhandled kind");
}

const std::vector<std::string>& optimizer_ids() {
  static const std::vector<std::string> ids = {"sgdm",    "adam", "adamw",
                                               "rmsprop", "lion", "thermolion"};
  return ids;
}

OptimizerKind optimizer_from_id(std::string_view id) {
  static const std::pair<std::string_view, OptimizerKind> table[] = {
      {"sgdm", OptimizerKind::Sgdm},       {"adam", OptimizerKind::Adam},
      {"adamw", OptimizerKind::AdamW},     {"rmsprop", OptimizerKind::RmsProp},
      {"lion", OptimizerKind::Lion},       {"thermolion", OptimizerKind::ThermoLion},
  };
  for (const auto& [name, kind] : table)
    if (name == id) return kind;
  std::ostringstream os;
  os << "unknown optimizer '" << id << "'; registered:";
  for (const auto& name : optimizer_ids()) os << " " << name;
  throw std::invalid_argument(os.str());
}

OptimConfig default_config_for(OptimizerKind kind) {
  OptimConfig cfg;  // ThermoLion defaults
  switch (kind) {
    case OptimizerKind::ThermoLion:
      break;
    case OptimizerKind::Adam:
      cfg.beta2 = 0.999;
      cfg.weight_decay = 0.0;
      break;
    case OptimizerKind::AdamW:
      cfg.beta2 = 0.999;
      cfg.weight_decay = 0.01;
      break;
    case OptimizerKind::RmsProp:
      cfg.weight_decay = 0.0;
      break;
    case OptimizerKind::Lion:
      cfg.weight_decay = 0.0;
      break;
    case OptimizerKind::Sgdm:
      cfg.weight_decay = 0.0;
      break;
  }
  return cfg;
}

std::optional<GateTelemetry> optimizer_step(OptimizerKind kind,
                                            FlatTensor& theta,
                                            const FlatTensor& g,
                                            OptimState& state,
                                            const OptimConfig& cfg,
                                            RngStream& rng) {
  switch (kind) {
    case OptimizerKind::Sgdm: sgdm_step(theta, g, state, cfg); return {};
    case OptimizerKind::Adam: adam_step(theta, g, state, cfg); return {};
    case OptimizerKind::AdamW: adamw_step(theta, g, state, cfg); return {};
    case OptimizerKind::RmsProp: rmsprop_step(theta, g, state, cfg); return {};
    case OptimizerKind::Lion: lion_step(theta, g, state, cfg); return {};
    case OptimizerKind::ThermoLion: return thermolion_step(theta, g, state, cfg, rng);
  }
  throw std::logic_error("optimizer_step: unhandled kind");
}

}  // namespace thermolion
