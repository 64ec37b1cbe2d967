// SPDX-License-Identifier: Apache-2.0
#include <doctest.h>

#include <string>

#include "psc/plot.hpp"
#include "psc/simgen.hpp"

using namespace psc;

namespace {

const RunContext kCtx{"synthetic", "simulated", AttackMode::Untargeted, AttackFamily::Gradient};

std::size_t count_occurrences(const std::string& text, const std::string& needle) {
  std::size_t count = 0;
  for (std::size_t pos = text.find(needle); pos != std::string::npos;
       pos = text.find(needle, pos + needle.size())) {
    ++count;
  }
  return count;
}

ComparisonSpec default_spec(int order) {
  ComparisonSpec spec;
  spec.range = {0.0, 3.0};
  spec.resolution = 10;
  spec.order = order;
  return spec;
}

ComparisonReport four_method_report() {
  std::vector<AttackRecord> records;
  const ParamSet ps{"ps1", 0.0};
  std::vector<double> xs;
  for (int i = 0; i <= 80; ++i) xs.push_back(3.0 * i / 80.0);
  std::vector<std::string> methods;
  for (int i = 0; i < 4; ++i) {
    CurveModel model{Logistic{1.4 + 0.3 * i, 0.8 + 0.25 * i, 100.0 - 2.0 * i}, 0.0,
                     static_cast<std::uint64_t>(i)};
    std::string name = "m";
    name.push_back(static_cast<char>('a' + i));
    methods.push_back(name);
    auto more = generate_runs(model, name, std::span<const ParamSet>(&ps, 1), xs,
                              MetricKind::distance(LpNorm::L2), MetricKind::success_rate(), kCtx);
    records.insert(records.end(), more.begin(), more.end());
  }
  return compare(records, default_spec(5), methods);
}

}  // namespace

TEST_CASE("four-method report renders four paths and four legend rows") {
  const auto report = four_method_report();
  const std::string svg = render(report);
  CHECK(count_occurrences(svg, "<path d=\"M") == 4);
  CHECK(count_occurrences(svg, "class=\"legend\"") == 4);
  CHECK(svg.rfind("<?xml version=\"1.0\" encoding=\"UTF-8\"?>", 0) == 0);
  CHECK(svg.find("</svg>") != std::string::npos);

  // Every method appears in the legend with the report's AUC value.
  for (const ReportEntry& e : report.entries) {
    char auc_text[64];
    std::snprintf(auc_text, sizeof(auc_text), "%s AUC=%.4f", e.method.c_str(), e.auc);
    CHECK(svg.find(auc_text) != std::string::npos);
  }
}

TEST_CASE("constant curve maps to the documented pixel coordinates") {
  // y = 50 over [0, 3]: y extent pads to [49, 51], so py(50) is the plot midline.
  ComparisonReport report;
  report.spec = default_spec(1);
  report.context = kCtx;
  SampledSeries series;
  series.method = "solo";
  series.points = {{0, 1.5, 50.0, "ps1"}};
  report.entries.push_back({"solo",
                            150.0,
                            std::nullopt,
                            {0.0, 3.0},
                            1,
                            {},
                            series,
                            FittedCurve::polynomial({50.0}, {0.0, 3.0})});

  const PlotStyle style;  // width 960, margins L70 R230 T30 B60 -> plot 660 x 510
  const std::string svg = render(report, style);
  CHECK(svg.find("M70.0000 285.0000") != std::string::npos);    // left endpoint
  CHECK(svg.find(" L730.0000 285.0000") != std::string::npos);  // right endpoint
  CHECK(svg.find("cx=\"400.0000\" cy=\"285.0000\"") != std::string::npos);  // marker at x=1.5
}

TEST_CASE("rendering is byte-identical across calls") {
  const auto report = four_method_report();
  CHECK(render(report) == render(report));
}

TEST_CASE("crossings draw dashed verticals and violations draw shaded bands") {
  auto report = four_method_report();
  report.crossings.push_back({"ma", "mb", 1.25});
  report.entries[0].bound_violations.push_back(
      {{2.5, 3.0}, 100.0, BoundViolation::Side::Above});
  const std::string svg = render(report);
  CHECK(svg.find("stroke-dasharray=\"4,4\"") != std::string::npos);
  CHECK(svg.find("fill-opacity=\"0.12\"") != std::string::npos);
}

TEST_CASE("empty report refuses to render") {
  ComparisonReport report;
  report.spec = default_spec(1);
  CHECK_THROWS_AS(render(report), Error);
}

TEST_CASE("legend precision follows the style") {
  auto report = four_method_report();
  PlotStyle style;
  style.precision = 2;
  const std::string svg = render(report, style);
  char auc_text[64];
  std::snprintf(auc_text, sizeof(auc_text), "AUC=%.2f", report.entries[0].auc);
  CHECK(svg.find(auc_text) != std::string::npos);
}
