// SPDX-License-Identifier: Apache-2.0
#include "thermolion/gradcheck.hpp"

#include <algorithm>
#include <cmath>

#include "thermolion/rng.hpp"

namespace thermolion {

GradCheckReport gradient_check(const Objective& objective,
                               std::vector<FlatTensor> params,
                               const Batch& batch, double fd_step,
                               std::size_t max_entries_per_tensor,
                               std::uint64_t pick_seed) {
  std::vector<FlatTensor> grads;
  objective.eval(params, batch, nullptr, grads);

  GradCheckReport report;
  RngStream picker(pick_seed, 0xFDC0DE);

  for (std::size_t k = 0; k < params.size(); ++k) {
    GradCheckReport::TensorResult result;
    result.name = params[k].name;

    std::vector<std::size_t> entries;
    const std::size_t n = params[k].size();
    if (max_entries_per_tensor == 0 || max_entries_per_tensor >= n) {
      entries.resize(n);
      for (std::size_t i = 0; i < n; ++i) entries[i] = i;
    } else {
      entries = shuffle_indices(picker, n);
      entries.resize(max_entries_per_tensor);
    }

    std::vector<FlatTensor> scratch;
    for (std::size_t i : entries) {
      const double saved = params[k][i];
      params[k][i] = saved + fd_step;
      const double up = objective.eval(params, batch, nullptr, scratch);
      params[k][i] = saved - fd_step;
      const double down = objective.eval(params, batch, nullptr, scratch);
      params[k][i] = saved;

      const double fd = (up - down) / (2.0 * fd_step);
      const double an = grads[k][i];
      const double scale = std::max({std::abs(fd), std::abs(an), 1e-6});
      result.max_rel_error =
          std::max(result.max_rel_error, std::abs(fd - an) / scale);
    }
    result.entries_checked = entries.size();
    report.max_rel_error = std::max(report.max_rel_error, result.max_rel_error);
    report.tensors.push_back(std::move(result));
  }
  return report;
}

}  // namespace thermolion
