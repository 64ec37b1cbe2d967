// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "psc/fitting.hpp"
#include "psc/model.hpp"
#include "psc/sampling.hpp"

namespace psc {

/// Area under the curve over `range`. Polynomials integrate analytically
/// (the normalized antiderivative scaled by the domain-map Jacobian);
/// polylines use exact trapezoids over segment pieces clipped to the range,
/// which must lie inside the polyline span.
double auc(const FittedCurve& curve, Interval range);

struct RankedAuc {
  std::string method;
  double auc = 0.0;
  int rank = 0;
};

/// Sorts by AUC, descending for Maximize and ascending for Minimize;
/// ties break lexicographically by method name.
std::vector<RankedAuc> rank(std::vector<std::pair<std::string, double>> aucs, Direction direction);

/// All x in `range` where (a - b) changes sign, strictly increasing, each
/// located to within 1e-6 of the range width by a 1024-cell sign scan plus
/// bisection. Roots packed closer than one scan cell cannot be separated;
/// an even number of them inside one cell goes undetected (irrelevant for
/// the low-degree differences this pipeline produces).
std::vector<double> crossings(const FittedCurve& a, const FittedCurve& b, Interval range);

struct BoundViolation {
  enum class Side { Below, Above };
  Interval where;
  double bound = 0.0;
  Side side = Side::Above;
};

/// Maximal sub-intervals of `range` where the curve leaves [bounds.lo, bounds.hi].
/// A non-finite bound disables that side of the check.
std::vector<BoundViolation> bound_check(const FittedCurve& curve, Interval range, Interval bounds);

struct WinnerFlip {
  double x1 = 0.0;
  double x2 = 0.0;
  std::string winner_at_x1;
  std::string winner_at_x2;
};

inline constexpr int kDefaultDiscrepancyGrid = 256;

/// Evaluates every curve on a uniform grid and reports each adjacent pair of
/// grid points whose direction-best method differs. Grid-point ties break to
/// the lexicographically smallest method.
std::vector<WinnerFlip> pointwise_discrepancy(
    std::span<const std::pair<std::string, const FittedCurve*>> curves, Interval range,
    int grid_size, Direction direction);

struct ReportEntry {
  std::string method;
  double auc = 0.0;
  std::optional<double> auc_clamped;  // present when bound violations exist
  Interval auc_range;                 // effective integration range (polyline span can shrink it)
  int rank = 0;
  std::vector<BoundViolation> bound_violations;
  SampledSeries series;
  FittedCurve curve;
};

struct MethodFailure {
  std::string method;
  Errc code = Errc::NoApplicableRecords;
  std::string message;
};

struct Crossing {
  std::string method_a;  // lexicographically smaller method
  std::string method_b;
  double x = 0.0;
};

struct ComparisonReport {
  RunContext context;
  ComparisonSpec spec;
  std::vector<ReportEntry> entries;  // rank order
  std::vector<Crossing> crossings;
  std::vector<WinnerFlip> pointwise_flips;
  std::vector<MethodFailure> failures;
  std::vector<std::string> advisories;
};

/// Full pipeline: sample -> fit -> AUC -> rank -> crossings -> bound check ->
/// point-wise discrepancy, per method. A method whose sampling or fit fails is
/// reported under `failures` while the rest proceed; only when every method
/// fails does compare() throw.
ComparisonReport compare(std::span<const AttackRecord> records, const ComparisonSpec& spec,
                         std::span<const std::string> methods);

/// Bounds a y-metric can physically occupy: [0, 100] for success rate,
/// [0, +inf) for distances and query counts.
Interval natural_bounds(MetricKind kind);

}  // namespace psc
