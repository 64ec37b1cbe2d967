// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "psc/model.hpp"

namespace psc {

/// One of the r equal-width sub-intervals of the comparison range.
/// Parts are half-open [lo, hi); only the last part is right-closed, so the
/// range is tiled exactly with no gaps or overlaps.
struct Part {
  int index = 0;
  double lo = 0.0;
  double hi = 0.0;
  bool closed_hi = false;

  bool contains(double x) const { return x >= lo && (x < hi || (closed_hi && x == hi)); }
};

struct Candidate {
  double x = 0.0;
  double y = 0.0;
  std::string param_set;
};

struct SampledPoint {
  int part_index = 0;
  double x = 0.0;
  double y = 0.0;
  std::string source_param_set;
};

/// Per method, the best point of each non-empty part, in x order.
struct SampledSeries {
  std::string method;
  RunContext context;
  std::vector<SampledPoint> points;
  std::size_t dropped_out_of_range = 0;
};

std::vector<Part> partition(Interval range, int resolution);

/// The candidate with maximal y (Maximize) or minimal y (Minimize).
/// Ties break to the smallest x, then the smallest param_set, so the result
/// is independent of candidate order. Empty input yields nullopt.
std::optional<Candidate> best_point(std::span<const Candidate> candidates, Direction direction);

/// Applies the per-part best-point rule to every record of `method`:
/// keeps records carrying both axis metrics, applies the fixed-metric band
/// when configured, buckets by x into the partition (out-of-range records
/// are dropped and counted), and pools all parameter sets per part.
SampledSeries sample_series(std::span<const AttackRecord> records, const ComparisonSpec& spec,
                            const std::string& method);

}  // namespace psc
