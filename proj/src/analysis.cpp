// SPDX-License-Identifier: Apache-2.0
#include "psc/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <set>

namespace psc {

namespace {

constexpr int kScanIntervals = 1024;

double crossing_tolerance(Interval range) { return 1e-6 * range.width(); }

// Bisects f over [lo, hi] (opposite signs at the ends) to |hi - lo| <= tol.
template <typename F>
double bisect(F&& f, double lo, double hi, double f_lo, double tol) {
  while (hi - lo > tol) {
    const double mid = 0.5 * (lo + hi);
    const double f_mid = f(mid);
    if (f_mid == 0.0) return mid;
    if ((f_lo < 0) == (f_mid < 0)) {
      lo = mid;
      f_lo = f_mid;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

// All sign changes of f over `range`: coarse scan on kScanIntervals uniform
// cells, then bisection. Exact zeros at grid points are skipped; a change of
// sign across them is still bracketed by the surrounding nonzero samples.
template <typename F>
std::vector<double> sign_changes(F&& f, Interval range, double tol) {
  std::vector<double> roots;
  double prev_x = range.lo;
  double prev_f = f(range.lo);
  for (int i = 1; i <= kScanIntervals; ++i) {
    const double x = (i == kScanIntervals)
                         ? range.hi
                         : range.lo + range.width() * static_cast<double>(i) / kScanIntervals;
    const double fx = f(x);
    if (fx != 0.0) {
      if (prev_f != 0.0 && (prev_f < 0) != (fx < 0)) {
        roots.push_back(bisect(f, prev_x, x, prev_f, tol));
      }
      prev_x = x;
      prev_f = fx;
    }
  }
  return roots;
}

// Maximal sub-intervals where f > 0, with boundaries refined by bisection.
template <typename F>
std::vector<Interval> positive_regions(F&& f, Interval range, double tol) {
  std::vector<double> xs(kScanIntervals + 1);
  std::vector<double> fs(kScanIntervals + 1);
  for (int i = 0; i <= kScanIntervals; ++i) {
    xs[static_cast<std::size_t>(i)] =
        (i == kScanIntervals) ? range.hi
                              : range.lo + range.width() * static_cast<double>(i) / kScanIntervals;
    fs[static_cast<std::size_t>(i)] = f(xs[static_cast<std::size_t>(i)]);
  }

  std::vector<Interval> regions;
  bool open = false;
  double open_at = 0.0;
  for (int i = 0; i <= kScanIntervals; ++i) {
    const bool positive = fs[static_cast<std::size_t>(i)] > 0.0;
    if (positive && !open) {
      double start = xs[static_cast<std::size_t>(i)];
      if (i > 0) {
        start = bisect(f, xs[static_cast<std::size_t>(i - 1)], start,
                       fs[static_cast<std::size_t>(i - 1)], tol);
      }
      open = true;
      open_at = start;
    } else if (!positive && open) {
      const double end = bisect(f, xs[static_cast<std::size_t>(i - 1)],
                                xs[static_cast<std::size_t>(i)],
                                fs[static_cast<std::size_t>(i - 1)], tol);
      regions.push_back({open_at, end});
      open = false;
    }
  }
  if (open) regions.push_back({open_at, range.hi});
  return regions;
}

double polyline_value_at(const FittedCurve::Polyline& line, double x) {
  // Callers guarantee x within the span.
  const auto& pts = line.points;
  auto hi = std::lower_bound(pts.begin(), pts.end(), x,
                             [](const XY& p, double value) { return p.x < value; });
  if (hi != pts.end() && hi->x == x) return hi->y;
  auto lo = hi - 1;
  const double w = (x - lo->x) / (hi->x - lo->x);
  return lo->y + w * (hi->y - lo->y);
}

}  // namespace

double auc(const FittedCurve& curve, Interval range) {
  if (!(range.lo < range.hi)) throw Error(Errc::InvalidRange, "auc range requires lo < hi");

  if (curve.is_polynomial()) {
    const auto& poly = curve.as_polynomial();
    const double half = 0.5 * (poly.domain.hi - poly.domain.lo);
    const double t_lo = curve.normalize(range.lo);
    const double t_hi = curve.normalize(range.hi);
    double sum = 0.0;
    double pow_lo = t_lo;
    double pow_hi = t_hi;
    for (std::size_t i = 0; i < poly.coefficients.size(); ++i) {
      sum += poly.coefficients[i] * (pow_hi - pow_lo) / static_cast<double>(i + 1);
      pow_lo *= t_lo;
      pow_hi *= t_hi;
    }
    return sum * half;
  }

  const auto& line = curve.as_polyline();
  const Interval span = curve.span();
  if (range.lo < span.lo || range.hi > span.hi)
    throw Error(Errc::OutOfDomain, "auc range exceeds the polyline span");

  double area = 0.0;
  const auto& pts = line.points;
  for (std::size_t i = 0; i + 1 < pts.size(); ++i) {
    const double seg_lo = std::max(pts[i].x, range.lo);
    const double seg_hi = std::min(pts[i + 1].x, range.hi);
    if (seg_lo >= seg_hi) continue;
    const double y_lo = polyline_value_at(line, seg_lo);
    const double y_hi = polyline_value_at(line, seg_hi);
    area += 0.5 * (y_lo + y_hi) * (seg_hi - seg_lo);
  }
  return area;
}

std::vector<RankedAuc> rank(std::vector<std::pair<std::string, double>> aucs, Direction direction) {
  if (aucs.empty()) throw Error(Errc::EmptyReport, "rank requires at least one entry");
  for (const auto& [method, value] : aucs) {
    if (!std::isfinite(value))
      throw Error(Errc::InvalidSpec, "non-finite AUC for method '" + method + "'");
  }

  std::stable_sort(aucs.begin(), aucs.end(), [&](const auto& a, const auto& b) {
    if (a.second != b.second) return is_better(a.second, b.second, direction);
    return a.first < b.first;
  });

  std::vector<RankedAuc> ranked;
  ranked.reserve(aucs.size());
  for (std::size_t i = 0; i < aucs.size(); ++i) {
    ranked.push_back({aucs[i].first, aucs[i].second, static_cast<int>(i) + 1});
  }
  return ranked;
}

std::vector<double> crossings(const FittedCurve& a, const FittedCurve& b, Interval range) {
  if (!(range.lo < range.hi)) throw Error(Errc::InvalidRange, "crossings range requires lo < hi");
  const double tol = crossing_tolerance(range);
  auto diff = [&](double x) { return a.evaluate(x) - b.evaluate(x); };
  return sign_changes(diff, range, tol);
}

std::vector<BoundViolation> bound_check(const FittedCurve& curve, Interval range, Interval bounds) {
  if (!(bounds.lo < bounds.hi)) throw Error(Errc::InvalidRange, "bounds require lo < hi");
  const double tol = crossing_tolerance(range);

  std::vector<BoundViolation> violations;
  if (std::isfinite(bounds.lo)) {
    auto below = [&](double x) { return bounds.lo - curve.evaluate(x); };
    for (Interval region : positive_regions(below, range, tol)) {
      violations.push_back({region, bounds.lo, BoundViolation::Side::Below});
    }
  }
  if (std::isfinite(bounds.hi)) {
    auto above = [&](double x) { return curve.evaluate(x) - bounds.hi; };
    for (Interval region : positive_regions(above, range, tol)) {
      violations.push_back({region, bounds.hi, BoundViolation::Side::Above});
    }
  }
  std::sort(violations.begin(), violations.end(),
            [](const BoundViolation& a, const BoundViolation& b) {
              return a.where.lo < b.where.lo;
            });
  return violations;
}

std::vector<WinnerFlip> pointwise_discrepancy(
    std::span<const std::pair<std::string, const FittedCurve*>> curves, Interval range,
    int grid_size, Direction direction) {
  if (grid_size < 2) throw Error(Errc::InvalidSpec, "discrepancy grid_size must be >= 2");
  if (!(range.lo < range.hi)) throw Error(Errc::InvalidRange, "discrepancy range requires lo < hi");

  auto winner_at = [&](double x) {
    const std::string* best_method = nullptr;
    double best_y = 0.0;
    for (const auto& [method, curve] : curves) {
      const double y = curve->evaluate(x);
      if (!best_method || is_better(y, best_y, direction) ||
          (y == best_y && method < *best_method)) {
        best_method = &method;
        best_y = y;
      }
    }
    return *best_method;
  };

  std::vector<WinnerFlip> flips;
  double prev_x = range.lo;
  std::string prev_winner = winner_at(prev_x);
  for (int i = 1; i < grid_size; ++i) {
    const double x = (i == grid_size - 1)
                         ? range.hi
                         : range.lo + range.width() * static_cast<double>(i) / (grid_size - 1);
    std::string winner = winner_at(x);
    if (winner != prev_winner) {
      flips.push_back({prev_x, x, prev_winner, winner});
    }
    prev_x = x;
    prev_winner = std::move(winner);
  }
  return flips;
}

Interval natural_bounds(MetricKind kind) {
  if (kind.tag() == MetricKind::Tag::SuccessRate) return {0.0, 100.0};
  return {0.0, std::numeric_limits<double>::infinity()};
}

namespace {

// AUC of the curve clipped to the bounds: subtract the overshoot above and
// backfill the undershoot below, both exactly, using the violation intervals.
double clamped_auc(const FittedCurve& curve, double raw,
                   std::span<const BoundViolation> violations) {
  double out = raw;
  for (const BoundViolation& v : violations) {
    if (v.where.width() <= 0) continue;
    const double segment = auc(curve, v.where);
    const double flat = v.bound * v.where.width();
    if (v.side == BoundViolation::Side::Above) {
      out -= segment - flat;
    } else {
      out += flat - segment;
    }
  }
  return out;
}

}  // namespace

ComparisonReport compare(std::span<const AttackRecord> records, const ComparisonSpec& spec,
                         std::span<const std::string> methods) {
  spec.validate();
  if (methods.empty()) throw Error(Errc::InvalidSpec, "compare requires at least one method");

  const Direction direction = direction_of(spec.y_axis);

  ComparisonReport report;
  report.spec = spec;

  // Considered records must be individually valid and share one context.
  std::set<std::string> method_set(methods.begin(), methods.end());
  const RunContext* context = nullptr;
  for (const AttackRecord& record : records) {
    if (!method_set.contains(record.method)) continue;
    const auto issues = validate_record(record);
    if (!issues.empty()) {
      throw Error(Errc::ValidationError, "invalid record for method '" + record.method +
                                             "': " + issues.front().message);
    }
    if (!context) {
      context = &record.context;
    } else if (record.context != *context) {
      throw Error(Errc::SpecMismatch, "records span multiple run contexts");
    }
  }
  if (context) report.context = *context;

  std::vector<ReportEntry> entries;
  for (const std::string& method : methods) {
    try {
      SampledSeries series = sample_series(records, spec, method);
      FittedCurve curve = fit(series, spec.order, spec.range);

      // Polylines only cover [first.x, last.x]; integrate over the covered
      // part of the comparison range and record that effective range.
      Interval auc_range = spec.range;
      if (!curve.is_polynomial()) {
        const Interval span = curve.span();
        auc_range = {std::max(spec.range.lo, span.lo), std::min(spec.range.hi, span.hi)};
        if (!(auc_range.lo < auc_range.hi))
          throw Error(Errc::InsufficientPoints,
                      "polyline for method '" + method + "' has zero-width coverage");
      }

      ReportEntry entry{method, 0.0, std::nullopt, auc_range, 0, {}, std::move(series),
                        std::move(curve)};
      entry.auc = auc(entry.curve, auc_range);
      entry.bound_violations = bound_check(entry.curve, auc_range, natural_bounds(spec.y_axis));
      if (!entry.bound_violations.empty()) {
        entry.auc_clamped = clamped_auc(entry.curve, entry.auc, entry.bound_violations);
      }
      entries.push_back(std::move(entry));
    } catch (const Error& e) {
      report.failures.push_back({method, e.code(), e.what()});
    }
  }

  if (entries.empty()) {
    if (!report.failures.empty()) {
      throw Error(report.failures.front().code,
                  "every method failed; first failure: " + report.failures.front().message);
    }
    throw Error(Errc::NoApplicableRecords, "no methods to compare");
  }

  std::vector<std::pair<std::string, double>> aucs;
  for (const ReportEntry& e : entries) aucs.emplace_back(e.method, e.auc);
  for (const RankedAuc& r : rank(std::move(aucs), direction)) {
    for (ReportEntry& e : entries) {
      if (e.method == r.method) e.rank = r.rank;
    }
  }
  std::sort(entries.begin(), entries.end(),
            [](const ReportEntry& a, const ReportEntry& b) { return a.rank < b.rank; });

  // Crossings and point-wise winners live on the range every curve covers.
  if (entries.size() >= 2) {
    Interval common = entries.front().auc_range;
    for (const ReportEntry& e : entries) {
      common.lo = std::max(common.lo, e.auc_range.lo);
      common.hi = std::min(common.hi, e.auc_range.hi);
    }
    if (common.lo < common.hi) {
      std::vector<const ReportEntry*> by_name;
      for (const ReportEntry& e : entries) by_name.push_back(&e);
      std::sort(by_name.begin(), by_name.end(),
                [](const ReportEntry* a, const ReportEntry* b) { return a->method < b->method; });

      for (std::size_t i = 0; i < by_name.size(); ++i) {
        for (std::size_t j = i + 1; j < by_name.size(); ++j) {
          for (double x : crossings(by_name[i]->curve, by_name[j]->curve, common)) {
            report.crossings.push_back({by_name[i]->method, by_name[j]->method, x});
          }
        }
      }

      std::vector<std::pair<std::string, const FittedCurve*>> curves;
      for (const ReportEntry* e : by_name) curves.emplace_back(e->method, &e->curve);
      report.pointwise_flips =
          pointwise_discrepancy(curves, common, kDefaultDiscrepancyGrid, direction);
    }
  }

  if (spec.resolution <= 5 && spec.order != 0) {
    report.advisories.push_back(
        "resolution r <= 5: straight-line connection (order d = 0) is recommended");
  }

  report.entries = std::move(entries);
  return report;
}

}  // namespace psc
