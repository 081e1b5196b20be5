// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "thermolion/flat_tensor.hpp"
#include "thermolion/rng.hpp"

namespace thermolion {

/// A step was handed a gradient with NaN/Inf entries. State is untouched;
/// the harness reports the run as diverged rather than crashing.
struct NonFiniteGradient : std::runtime_error {
  explicit NonFiniteGradient(const std::string& what)
      : std::runtime_error(what) {}
};

/// Scalar hyperparameters of one optimizer instance.
struct OptimConfig {
  double lr = 1e-3;
  double beta1 = 0.9;
  double beta2 = 0.99;
  double eps = 1e-8;
  double alpha_boost = 0.5;   // alignment boost coefficient
  double c_solid = 2.0;       // solid-phase scale
  double temp_init = 1e-2;    // T0
  double temp_decay = 0.99;   // per-step temperature multiplier
  double weight_decay = 0.01;
  bool noise_enabled = true;

  /// Throws std::invalid_argument on any out-of-range field.
  void validate() const;
};

/// Per-tensor optimizer state: first/second moment EMAs, step counter,
/// temperature. v stays elementwise nonnegative; temperature never rises.
struct OptimState {
  FlatTensor m;
  FlatTensor v;
  std::uint64_t step = 0;
  double temperature = 0.0;

  static OptimState zeros_like(const FlatTensor& param, double temp_init);
};

/// Per-step phase summary of one tensor: SNR, gate, noise scale,
/// temperature and the share of sign-aligned entries.
struct GateTelemetry {
  std::string tensor_name;
  std::uint64_t step = 0;
  double rho_mean = 0.0;
  double rho_max = 0.0;
  double lambda_mean = 0.0;
  double lambda_min = 0.0;
  double lambda_max = 0.0;
  double sigma = 0.0;
  double temperature = 0.0;
  double aligned_fraction = 0.0;
};

/// m' = b1*m + (1-b1)*g, v' = b2*v + (1-b2)*g^2, step' = step+1.
void update_moments(OptimState& state, const FlatTensor& g, double beta1,
                    double beta2);

/// Element-wise SNR rho = |m| / (sqrt(v) + eps). Negative v entries are
/// rejected as state corruption.
FlatTensor snr(const FlatTensor& m, const FlatTensor& v, double eps);

/// Phase gate lambda = tanh(rho), in [0,1) for finite rho >= 0.
FlatTensor gate(const FlatTensor& rho);

/// Alignment boost: alpha where sign(m)*sign(g) > 0, else 0. Zero entries
/// in either operand never align.
FlatTensor alignment(const FlatTensor& m, const FlatTensor& g, double alpha);

/// sqrt(T * mean(v)); the per-entry (1-lambda) factor is applied by the
/// caller.
double thermal_sigma(double temperature, const FlatTensor& v);

/// Deterministic ThermoLion step direction (already scaled by lr):
///   lr * [ (1-lambda)*sign(m)*(1+A) + c*lambda*m/(sqrt(v)+eps) ].
/// gate_override replaces tanh(rho) with a fixed value (test hook).
FlatTensor thermolion_direction(const FlatTensor& m, const FlatTensor& v,
                                const FlatTensor& g, const OptimConfig& cfg,
                                std::optional<double> gate_override = {});

/// One ThermoLion update on (theta, state). Order: moments, SNR, gate,
/// alignment, deterministic step, gated thermal noise, decoupled weight
/// decay + descent, temperature decay. Returns the step's telemetry.
GateTelemetry thermolion_step(FlatTensor& theta, const FlatTensor& g,
                              OptimState& state, const OptimConfig& cfg,
                              RngStream& rng,
                              std::optional<double> gate_override = {});

// Baselines. All reject shape mismatches and non-finite gradients before
// touching any state.
void adam_step(FlatTensor& theta, const FlatTensor& g, OptimState& state,
               const OptimConfig& cfg);
void adamw_step(FlatTensor& theta, const FlatTensor& g, OptimState& state,
                const OptimConfig& cfg);
void lion_step(FlatTensor& theta, const FlatTensor& g, OptimState& state,
               const OptimConfig& cfg);
void rmsprop_step(FlatTensor& theta, const FlatTensor& g, OptimState& state,
                  const OptimConfig& cfg);
void sgdm_step(FlatTensor& theta, const FlatTensor& g, OptimState& state,
               const OptimConfig& cfg);

enum class OptimizerKind { Sgdm, Adam, AdamW, RmsProp, Lion, ThermoLion };

std::string_view optimizer_id(OptimizerKind kind);
OptimizerKind optimizer_from_id(std::string_view id);
const std::vector<std::string>& optimizer_ids();

/// Per-optimizer defaults: every optimizer shares the base lr; Adam/AdamW
/// use their conventional (0.9, 0.999) betas, Adam and the sign/SGD
/// baselines carry no weight decay.
OptimConfig default_config_for(OptimizerKind kind);

/// Unified per-tensor step. Telemetry is produced for ThermoLion only.
std::optional<GateTelemetry> optimizer_step(OptimizerKind kind,
                                            FlatTensor& theta,
                                            const FlatTensor& g,
                                            OptimState& state,
                                            const OptimConfig& cfg,
                                            RngStream& rng);

}  // namespace thermolion
