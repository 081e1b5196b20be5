// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <filesystem>
#include <span>
#include <string>
#include <vector>

namespace thermolion {

struct PlotSeries {
  std::string label;
  std::vector<double> losses;  // one point per epoch
};

/// Standalone SVG of log10-loss versus epoch, one polyline per series
/// with a legend. Falls back to a linear axis with a warning annotation
/// when no positive loss exists.
std::string render_loss_svg(std::span<const PlotSeries> series);

void emit_loss_svg(std::span<const PlotSeries> series,
                   const std::filesystem::path& path);

}  // namespace thermolion
