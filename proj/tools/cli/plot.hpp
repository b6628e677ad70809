#pragma once

#include <span>

#include "omniflow/raster.hpp"

namespace omniflow::cli {

struct PlotOptions {
  int width = 640;
  int height = 400;
  bool log_x = false;
  bool log_y = false;
};

/// Line plot of (x, y) on a white canvas with a plain frame. Points that are
/// not finite, or not positive on a log axis, are skipped. No text is drawn.
Raster8 line_plot(std::span<const double> x, std::span<const double> y, const PlotOptions& o = {});

}  // namespace omniflow::cli
