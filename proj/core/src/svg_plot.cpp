// SPDX-License-Identifier: Apache-2.0
#include "thermolion/svg_plot.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace thermolion {

namespace {

constexpr double kWidth = 800.0, kHeight = 480.0;
constexpr double kLeft = 70.0, kRight = 150.0, kTop = 30.0, kBottom = 50.0;

const char* kPalette[] = {"#4878a8", "#c44040", "#3f9b57", "#e08030",
                          "#7a5195", "#8a6642", "#2ca8a8", "#c45090"};

std::string escape_xml(const std::string& s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      default: out += c;
    }
  }
  return out;
}

std::string fmt(double x) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.2f", x);
  return buf;
}

}  // namespace

std::string render_loss_svg(std::span<const PlotSeries> series) {
  if (series.empty())
    throw std::invalid_argument("render_loss_svg: no series");
  std::size_t max_epochs = 0;
  for (const auto& s : series) max_epochs = std::max(max_epochs, s.losses.size());
  if (max_epochs < 2)
    throw std::invalid_argument("render_loss_svg: need at least 2 epochs");

  bool any_positive = false;
  double vmin = 0.0, vmax = 0.0;
  bool first = true;
  for (const auto& s : series)
    for (double v : s.losses)
      if (v > 0.0) {
        any_positive = true;
        const double lv = std::log10(v);
        vmin = first ? lv : std::min(vmin, lv);
        vmax = first ? lv : std::max(vmax, lv);
        first = false;
      }
  const bool log_axis = any_positive;
  if (!log_axis) {
    first = true;
    for (const auto& s : series)
      for (double v : s.losses) {
        vmin = first ? v : std::min(vmin, v);
        vmax = first ? v : std::max(vmax, v);
        first = false;
      }
  }
  if (vmin == vmax) {
    vmin -= 0.5;
    vmax += 0.5;
  }

  const double plot_w = kWidth - kLeft - kRight;
  const double plot_h = kHeight - kTop - kBottom;
  const auto x_of = [&](std::size_t epoch) {
    return kLeft + plot_w * (max_epochs == 1
                                 ? 0.0
                                 : static_cast<double>(epoch) /
                                       static_cast<double>(max_epochs - 1));
  };
  const auto y_of = [&](double value) {
    return kTop + plot_h * (1.0 - (value - vmin) / (vmax - vmin));
  };

  std::ostringstream os;
  os << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
  os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kWidth
     << "\" height=\"" << kHeight << "\" viewBox=\"0 0 " << kWidth << " "
     << kHeight << "\">\n";
  os << "<rect x=\"0\" y=\"0\" width=\"" << kWidth << "\" height=\"" << kHeight
     << "\" fill=\"white\"/>\n";

  // axes
  os << "<line x1=\"" << fmt(kLeft) << "\" y1=\"" << fmt(kTop) << "\" x2=\""
     << fmt(kLeft) << "\" y2=\"" << fmt(kTop + plot_h)
     << "\" stroke=\"black\"/>\n";
  os << "<line x1=\"" << fmt(kLeft) << "\" y1=\"" << fmt(kTop + plot_h)
     << "\" x2=\"" << fmt(kLeft + plot_w) << "\" y2=\"" << fmt(kTop + plot_h)
     << "\" stroke=\"black\"/>\n";
  os << "<text x=\"" << fmt(kLeft + plot_w / 2) << "\" y=\""
     << fmt(kHeight - 12.0)
     << "\" text-anchor=\"middle\" font-size=\"13\">epoch</text>\n";
  os << "<text x=\"16\" y=\"" << fmt(kTop - 10.0) << "\" font-size=\"13\">"
     << (log_axis ? "loss (log scale)" : "loss (linear scale)")
     << "</text>\n";
  if (!log_axis)
    os << "<text x=\"" << fmt(kLeft + 10.0) << "\" y=\"" << fmt(kTop + 14.0)
       << "\" font-size=\"12\" fill=\"#c44040\">warning: no positive losses, "
          "linear axis</text>\n";

  // y ticks: decades in log mode, 5 even ticks otherwise
  if (log_axis) {
    for (int d = static_cast<int>(std::floor(vmin));
         d <= static_cast<int>(std::ceil(vmax)); ++d) {
      if (d < vmin - 1e-9 || d > vmax + 1e-9) continue;
      const double y = y_of(d);
      char lbl[32];
      std::snprintf(lbl, sizeof(lbl), "1e%d", d);
      os << "<line x1=\"" << fmt(kLeft - 4.0) << "\" y1=\"" << fmt(y)
         << "\" x2=\"" << fmt(kLeft) << "\" y2=\"" << fmt(y)
         << "\" stroke=\"black\"/>\n";
      os << "<text x=\"" << fmt(kLeft - 8.0) << "\" y=\"" << fmt(y + 4.0)
         << "\" text-anchor=\"end\" font-size=\"11\">" << lbl << "</text>\n";
    }
  } else {
    for (int k = 0; k <= 4; ++k) {
      const double v = vmin + (vmax - vmin) * k / 4.0;
      const double y = y_of(v);
      char lbl[32];
      std::snprintf(lbl, sizeof(lbl), "%.3g", v);
      os << "<line x1=\"" << fmt(kLeft - 4.0) << "\" y1=\"" << fmt(y)
         << "\" x2=\"" << fmt(kLeft) << "\" y2=\"" << fmt(y)
         << "\" stroke=\"black\"/>\n";
      os << "<text x=\"" << fmt(kLeft - 8.0) << "\" y=\"" << fmt(y + 4.0)
         << "\" text-anchor=\"end\" font-size=\"11\">" << lbl << "</text>\n";
    }
  }

  // x ticks: at most ~12 integer epochs
  const std::size_t stride = std::max<std::size_t>(1, (max_epochs - 1) / 12);
  for (std::size_t e = 0; e < max_epochs; e += stride) {
    const double x = x_of(e);
    os << "<line x1=\"" << fmt(x) << "\" y1=\"" << fmt(kTop + plot_h)
       << "\" x2=\"" << fmt(x) << "\" y2=\"" << fmt(kTop + plot_h + 4.0)
       << "\" stroke=\"black\"/>\n";
    os << "<text x=\"" << fmt(x) << "\" y=\"" << fmt(kTop + plot_h + 18.0)
       << "\" text-anchor=\"middle\" font-size=\"11\">" << (e + 1)
       << "</text>\n";
  }

  for (std::size_t s = 0; s < series.size(); ++s) {
    const char* color = kPalette[s % (sizeof(kPalette) / sizeof(*kPalette))];
    std::ostringstream pts;
    bool any = false;
    for (std::size_t e = 0; e < series[s].losses.size(); ++e) {
      const double v = series[s].losses[e];
      if (log_axis && !(v > 0.0)) continue;  // not representable on log axis
      const double value = log_axis ? std::log10(v) : v;
      if (any) pts << " ";
      pts << fmt(x_of(e)) << "," << fmt(y_of(value));
      any = true;
    }
    os << "<polyline fill=\"none\" stroke=\"" << color
       << "\" stroke-width=\"1.5\" points=\"" << pts.str() << "\"/>\n";

    const double ly = kTop + 16.0 + 18.0 * static_cast<double>(s);
    os << "<line x1=\"" << fmt(kLeft + plot_w + 12.0) << "\" y1=\"" << fmt(ly)
       << "\" x2=\"" << fmt(kLeft + plot_w + 34.0) << "\" y2=\"" << fmt(ly)
       << "\" stroke=\"" << color << "\" stroke-width=\"2\"/>\n";
    os << "<text x=\"" << fmt(kLeft + plot_w + 40.0) << "\" y=\""
       << fmt(ly + 4.0) << "\" font-size=\"12\">" << escape_xml(series[s].label)
       << "</text>\n";
  }

  os << "</svg>\n";
  return os.str();
}

void emit_loss_svg(std::span<const PlotSeries> series,
                   const std::filesystem::path& path) {
  const std::string svg = render_loss_svg(series);
  if (path.has_parent_path())
    std::filesystem::create_directories(path.parent_path());
  std::ofstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("cannot write '" + path.string() + "'");
  f << svg;
  if (!f) throw std::runtime_error("write failed for '" + path.string() + "'");
}

}  // namespace thermolion
