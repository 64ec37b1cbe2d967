// SPDX-License-Identifier: Apache-2.0
//
// Test-only oracles, kept independent of the implementation paths they check:
// exhaustive per-part scans, power-sum polynomial evaluation and composite
// Simpson quadrature.
#pragma once

#include <cmath>
#include <cstddef>
#include <optional>
#include <random>
#include <span>
#include <vector>

#include "psc/fitting.hpp"
#include "psc/model.hpp"
#include "psc/sampling.hpp"

namespace psc::oracle {

// Exhaustive best-point scan over candidates already known to share a part.
inline std::optional<Candidate> brute_force_best(std::span<const Candidate> candidates,
                                                 Direction direction) {
  std::optional<Candidate> best;
  for (const Candidate& c : candidates) {
    if (!best) {
      best = c;
      continue;
    }
    bool better = false;
    if (c.y != best->y) {
      better = direction == Direction::Maximize ? c.y > best->y : c.y < best->y;
    } else if (c.x != best->x) {
      better = c.x < best->x;
    } else {
      better = c.param_set < best->param_set;
    }
    if (better) best = c;
  }
  return best;
}

// Reference sampling: membership decided by interval comparison against the
// partition (linear scan), best point by the exhaustive scan above.
inline std::vector<SampledPoint> brute_force_series(std::span<const AttackRecord> records,
                                                    const ComparisonSpec& spec,
                                                    const std::string& method) {
  const auto parts = partition(spec.range, spec.resolution);
  const Direction direction = direction_of(spec.y_axis);

  std::vector<SampledPoint> points;
  for (const Part& part : parts) {
    std::vector<Candidate> candidates;
    for (const AttackRecord& record : records) {
      if (record.method != method) continue;
      const auto x_it = record.measurements.find(spec.x_axis);
      const auto y_it = record.measurements.find(spec.y_axis);
      if (x_it == record.measurements.end() || y_it == record.measurements.end()) continue;
      if (spec.fixed) {
        const auto f_it = record.measurements.find(spec.fixed->metric);
        if (f_it == record.measurements.end()) continue;
        if (std::abs(f_it->second - spec.fixed->center) > spec.fixed->tolerance) continue;
      }
      if (!part.contains(x_it->second)) continue;
      candidates.push_back({x_it->second, y_it->second, record.param_set});
    }
    if (auto best = brute_force_best(candidates, direction)) {
      points.push_back({part.index, best->x, best->y, best->param_set});
    }
  }
  return points;
}

// Plain power-sum evaluation of the normalized-basis polynomial (no Horner).
inline double power_sum_eval(const FittedCurve& curve, double x) {
  const auto& poly = curve.as_polynomial();
  const double t = curve.normalize(x);
  double sum = 0.0;
  for (std::size_t i = 0; i < poly.coefficients.size(); ++i) {
    sum += poly.coefficients[i] * std::pow(t, static_cast<double>(i));
  }
  return sum;
}

// Composite Simpson quadrature with 2n panels.
template <typename F>
double simpson(F&& f, double a, double b, int n) {
  const int m = 2 * n;
  const double h = (b - a) / m;
  double sum = f(a) + f(b);
  for (int i = 1; i < m; ++i) {
    sum += f(a + h * i) * (i % 2 == 0 ? 2.0 : 4.0);
  }
  return sum * h / 3.0;
}

// Analytic area under a logistic ceiling/(1 + exp(-a(x - b))) over [lo, hi]:
// antiderivative (ceiling/a) * log(1 + exp(a(x - b))).
inline double logistic_area(double scale, double midpoint, double ceiling, double lo, double hi) {
  auto anti = [&](double x) { return ceiling / scale * std::log1p(std::exp(scale * (x - midpoint))); };
  return anti(hi) - anti(lo);
}

}  // namespace psc::oracle
