// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "thermolion/problems.hpp"

namespace thermolion {

struct GradCheckReport {
  struct TensorResult {
    std::string name;
    double max_rel_error = 0.0;
    std::size_t entries_checked = 0;
  };
  std::vector<TensorResult> tensors;
  double max_rel_error = 0.0;

  bool passes(double threshold = 1e-5) const { return max_rel_error < threshold; }
};

/// Central finite differences against the objective's analytic gradients
/// on its noise-free channel. max_entries_per_tensor = 0 checks every
/// entry; otherwise a deterministic sample of that many entries is taken
/// per tensor (seeded by pick_seed).
GradCheckReport gradient_check(const Objective& objective,
                               std::vector<FlatTensor> params,
                               const Batch& batch, double fd_step = 1e-6,
                               std::size_t max_entries_per_tensor = 0,
                               std::uint64_t pick_seed = 0);

}  // namespace thermolion
