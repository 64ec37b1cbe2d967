// SPDX-License-Identifier: Apache-2.0
#include "psc/plot.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <map>

namespace psc {

namespace {

constexpr int kCurveSamples = 256;

const char* kPalette[] = {"#1f77b4", "#ff7f0e", "#2ca02c", "#d62728", "#9467bd",
                          "#8c564b", "#e377c2", "#7f7f7f", "#bcbd22", "#17becf"};
constexpr std::size_t kPaletteSize = sizeof(kPalette) / sizeof(kPalette[0]);

std::string fixed4(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.4f", v);
  return buf;
}

std::string fixed(double v, int precision) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.*f", precision, v);
  return buf;
}

std::string xml_escape(const std::string& text) {
  std::string out;
  for (char c : text) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      default: out.push_back(c);
    }
  }
  return out;
}

}  // namespace

std::string render(const ComparisonReport& report, const PlotStyle& style) {
  if (report.entries.empty())
    throw Error(Errc::EmptyReport, "report has no successful entries to render");

  const Interval x_range = report.spec.range;
  const double plot_w = style.width - style.margin_left - style.margin_right;
  const double plot_h = style.height - style.margin_top - style.margin_bottom;

  // Colors by alphabetical rank of the method name.
  std::map<std::string, const char*> color_of;
  {
    std::vector<std::string> names;
    for (const ReportEntry& e : report.entries) names.push_back(e.method);
    std::sort(names.begin(), names.end());
    for (std::size_t i = 0; i < names.size(); ++i)
      color_of[names[i]] = kPalette[i % kPaletteSize];
  }

  // Pre-sample curves over their effective ranges; y extent from curves and markers.
  std::map<std::string, std::vector<XY>> curve_samples;
  double y_lo = 0.0;
  double y_hi = 0.0;
  bool have_y = false;
  auto take_y = [&](double y) {
    if (!have_y) {
      y_lo = y_hi = y;
      have_y = true;
    } else {
      y_lo = std::min(y_lo, y);
      y_hi = std::max(y_hi, y);
    }
  };
  for (const ReportEntry& e : report.entries) {
    std::vector<XY> samples;
    samples.reserve(kCurveSamples);
    for (int i = 0; i < kCurveSamples; ++i) {
      const double x = (i == kCurveSamples - 1)
                           ? e.auc_range.hi
                           : e.auc_range.lo + e.auc_range.width() * static_cast<double>(i) /
                                                  (kCurveSamples - 1);
      const double y = e.curve.evaluate(x);
      take_y(y);
      samples.push_back({x, y});
    }
    curve_samples[e.method] = std::move(samples);
    for (const SampledPoint& p : e.series.points) take_y(p.y);
  }
  double pad = 0.05 * (y_hi - y_lo);
  if (pad == 0.0) pad = 1.0;
  y_lo -= pad;
  y_hi += pad;

  auto px = [&](double x) {
    return style.margin_left + (x - x_range.lo) / x_range.width() * plot_w;
  };
  auto py = [&](double y) {
    return style.margin_top + (1.0 - (y - y_lo) / (y_hi - y_lo)) * plot_h;
  };

  std::string svg;
  svg += "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
  svg += "<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" width=\"" +
         std::to_string(style.width) + "\" height=\"" + std::to_string(style.height) +
         "\" viewBox=\"0 0 " + std::to_string(style.width) + " " + std::to_string(style.height) +
         "\">\n";
  svg += "<rect x=\"0\" y=\"0\" width=\"" + std::to_string(style.width) + "\" height=\"" +
         std::to_string(style.height) + "\" fill=\"#ffffff\"/>\n";

  // Shaded bound-violation bands, behind everything else.
  for (const ReportEntry& e : report.entries) {
    for (const BoundViolation& v : e.bound_violations) {
      svg += "<rect x=\"" + fixed4(px(v.where.lo)) + "\" y=\"" + fixed4(style.margin_top) +
             "\" width=\"" + fixed4(px(v.where.hi) - px(v.where.lo)) + "\" height=\"" +
             fixed4(plot_h) + "\" fill=\"" + color_of[e.method] + "\" fill-opacity=\"0.12\"/>\n";
    }
  }

  // Axes frame and ticks.
  svg += "<rect x=\"" + fixed4(style.margin_left) + "\" y=\"" + fixed4(style.margin_top) +
         "\" width=\"" + fixed4(plot_w) + "\" height=\"" + fixed4(plot_h) +
         "\" fill=\"none\" stroke=\"#000000\" stroke-width=\"1\"/>\n";
  constexpr int kTicks = 5;
  for (int i = 0; i <= kTicks; ++i) {
    const double fx = x_range.lo + x_range.width() * static_cast<double>(i) / kTicks;
    const double gx = px(fx);
    svg += "<line x1=\"" + fixed4(gx) + "\" y1=\"" + fixed4(style.margin_top + plot_h) +
           "\" x2=\"" + fixed4(gx) + "\" y2=\"" + fixed4(style.margin_top + plot_h + 5) +
           "\" stroke=\"#000000\" stroke-width=\"1\"/>\n";
    svg += "<text x=\"" + fixed4(gx) + "\" y=\"" + fixed4(style.margin_top + plot_h + 18) +
           "\" font-family=\"monospace\" font-size=\"11\" text-anchor=\"middle\">" + fixed4(fx) +
           "</text>\n";

    const double fy = y_lo + (y_hi - y_lo) * static_cast<double>(i) / kTicks;
    const double gy = py(fy);
    svg += "<line x1=\"" + fixed4(style.margin_left - 5) + "\" y1=\"" + fixed4(gy) + "\" x2=\"" +
           fixed4(style.margin_left) + "\" y2=\"" + fixed4(gy) +
           "\" stroke=\"#000000\" stroke-width=\"1\"/>\n";
    svg += "<text x=\"" + fixed4(style.margin_left - 8) + "\" y=\"" + fixed4(gy + 4) +
           "\" font-family=\"monospace\" font-size=\"11\" text-anchor=\"end\">" + fixed4(fy) +
           "</text>\n";
  }

  const std::string x_label =
      style.x_label.empty() ? std::string(report.spec.x_axis.name()) : style.x_label;
  const std::string y_label =
      style.y_label.empty() ? std::string(report.spec.y_axis.name()) : style.y_label;
  svg += "<text x=\"" + fixed4(style.margin_left + plot_w / 2) + "\" y=\"" +
         fixed4(style.height - 12) +
         "\" font-family=\"monospace\" font-size=\"13\" text-anchor=\"middle\">" +
         xml_escape(x_label) + "</text>\n";
  svg += "<text x=\"16\" y=\"" + fixed4(style.margin_top + plot_h / 2) +
         "\" font-family=\"monospace\" font-size=\"13\" text-anchor=\"middle\" transform=\"rotate(-90 16 " +
         fixed4(style.margin_top + plot_h / 2) + ")\">" + xml_escape(y_label) + "</text>\n";

  // Crossing markers.
  for (const Crossing& c : report.crossings) {
    const double gx = px(c.x);
    svg += "<line x1=\"" + fixed4(gx) + "\" y1=\"" + fixed4(style.margin_top) + "\" x2=\"" +
           fixed4(gx) + "\" y2=\"" + fixed4(style.margin_top + plot_h) +
           "\" stroke=\"#555555\" stroke-width=\"1\" stroke-dasharray=\"4,4\"/>\n";
  }

  // Curves in rank order, one path per method.
  for (const ReportEntry& e : report.entries) {
    const auto& samples = curve_samples[e.method];
    std::string d;
    for (std::size_t i = 0; i < samples.size(); ++i) {
      d += (i == 0 ? "M" : " L");
      d += fixed4(px(samples[i].x)) + " " + fixed4(py(samples[i].y));
    }
    svg += "<path d=\"" + d + "\" fill=\"none\" stroke=\"" + color_of[e.method] +
           "\" stroke-width=\"2\"/>\n";
  }

  // Sample markers at their true coordinates.
  for (const ReportEntry& e : report.entries) {
    for (const SampledPoint& p : e.series.points) {
      svg += "<circle cx=\"" + fixed4(px(p.x)) + "\" cy=\"" + fixed4(py(p.y)) + "\" r=\"" +
             fixed4(style.marker_size) + "\" fill=\"" + color_of[e.method] + "\"/>\n";
    }
  }

  // Legend, one row per method in rank order, AUC at the styled precision.
  {
    const double legend_x = style.margin_left + plot_w + 14;
    double legend_y = style.margin_top + 14;
    for (const ReportEntry& e : report.entries) {
      svg += "<rect x=\"" + fixed4(legend_x) + "\" y=\"" + fixed4(legend_y - 9) +
             "\" width=\"10\" height=\"10\" fill=\"" + color_of[e.method] + "\"/>\n";
      std::string label = std::to_string(e.rank) + ". " + e.method + " AUC=" +
                          fixed(e.auc, style.precision);
      if (e.auc_clamped) label += " clamped=" + fixed(*e.auc_clamped, style.precision);
      svg += "<text class=\"legend\" x=\"" + fixed4(legend_x + 16) + "\" y=\"" + fixed4(legend_y) +
             "\" font-family=\"monospace\" font-size=\"12\">" + xml_escape(label) + "</text>\n";
      legend_y += 18;
    }
  }

  svg += "</svg>\n";
  return svg;
}

}  // namespace psc
