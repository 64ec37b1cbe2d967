// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <string>

#include "psc/analysis.hpp"

namespace psc {

/// Deterministic styling. Colors come from a fixed ordered palette assigned
/// by the alphabetical rank of the method name, so identical inputs always
/// render identically.
struct PlotStyle {
  int width = 960;
  int height = 600;
  int margin_left = 70;
  int margin_right = 230;  // legend column
  int margin_top = 30;
  int margin_bottom = 60;
  double marker_size = 3.0;
  std::string x_label;  // defaults to the spec's metric names
  std::string y_label;
  int precision = 4;  // decimal places for printed AUC values
};

/// Standalone SVG 1.1 document with axes, fitted curves (polynomials
/// discretized at 256 points), sample markers, an AUC legend, dashed
/// crossing lines and shaded bound-violation bands.
///
/// Data maps to pixels affinely:
///   px = margin_left + (x - x_lo) / (x_hi - x_lo) * plot_width
///   py = margin_top + (1 - (y - y_lo) / (y_hi - y_lo)) * plot_height
/// with x over the comparison range and y over the padded data extent.
/// All numeric attributes print with fixed 4-decimal precision; rendering is
/// a pure function of its inputs.
std::string render(const ComparisonReport& report, const PlotStyle& style = {});

}  // namespace psc
