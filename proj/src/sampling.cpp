// SPDX-License-Identifier: Apache-2.0
#include "psc/sampling.hpp"

#include <algorithm>
#include <cmath>

namespace psc {

std::vector<Part> partition(Interval range, int resolution) {
  if (!(range.lo < range.hi)) throw Error(Errc::InvalidRange, "comparison range requires lo < hi");
  if (resolution < 1) throw Error(Errc::InvalidResolution, "resolution r must be a positive integer");

  // Boundaries computed from the full width so adjacent parts share the
  // identical floating-point value and the union equals the range exactly.
  std::vector<Part> parts(static_cast<std::size_t>(resolution));
  const double width = range.hi - range.lo;
  auto boundary = [&](int i) {
    if (i == 0) return range.lo;
    if (i == resolution) return range.hi;
    return range.lo + width * static_cast<double>(i) / static_cast<double>(resolution);
  };
  for (int i = 0; i < resolution; ++i) {
    parts[static_cast<std::size_t>(i)] = {i, boundary(i), boundary(i + 1), i == resolution - 1};
  }
  return parts;
}

namespace {

// Candidate ordering used for tie-breaking: better y first (per direction),
// then smaller x, then smaller param_set.
bool candidate_beats(const Candidate& a, const Candidate& b, Direction dir) {
  if (a.y != b.y) return is_better(a.y, b.y, dir);
  if (a.x != b.x) return a.x < b.x;
  return a.param_set < b.param_set;
}

int part_index_of(double x, Interval range, std::span<const Part> parts) {
  const int r = static_cast<int>(parts.size());
  double scaled = (x - range.lo) / (range.hi - range.lo) * static_cast<double>(r);
  int idx = std::clamp(static_cast<int>(std::floor(scaled)), 0, r - 1);
  // Nudge across boundaries where floating-point rounding disagrees with the
  // stored part edges; total assignment inside the range is required.
  while (idx > 0 && x < parts[static_cast<std::size_t>(idx)].lo) --idx;
  while (idx < r - 1 && x >= parts[static_cast<std::size_t>(idx)].hi) ++idx;
  return idx;
}

}  // namespace

std::optional<Candidate> best_point(std::span<const Candidate> candidates, Direction direction) {
  if (candidates.empty()) return std::nullopt;
  const Candidate* best = &candidates[0];
  for (const Candidate& c : candidates.subspan(1)) {
    if (candidate_beats(c, *best, direction)) best = &c;
  }
  return *best;
}

SampledSeries sample_series(std::span<const AttackRecord> records, const ComparisonSpec& spec,
                            const std::string& method) {
  spec.validate();

  const auto parts = partition(spec.range, spec.resolution);
  const Direction direction = direction_of(spec.y_axis);

  SampledSeries series;
  series.method = method;

  std::vector<std::optional<SampledPoint>> best(parts.size());
  bool saw_method_record = false;

  for (const AttackRecord& record : records) {
    if (record.method != method) continue;
    saw_method_record = true;
    series.context = record.context;

    const auto x_it = record.measurements.find(spec.x_axis);
    const auto y_it = record.measurements.find(spec.y_axis);
    if (x_it == record.measurements.end() || y_it == record.measurements.end()) continue;

    if (spec.fixed) {
      const auto f_it = record.measurements.find(spec.fixed->metric);
      if (f_it == record.measurements.end()) continue;
      if (std::abs(f_it->second - spec.fixed->center) > spec.fixed->tolerance) continue;
    }

    const double x = x_it->second;
    const double y = y_it->second;
    if (!spec.range.contains(x)) {
      ++series.dropped_out_of_range;
      continue;
    }

    const int idx = part_index_of(x, spec.range, parts);
    const Candidate challenger{x, y, record.param_set};
    auto& slot = best[static_cast<std::size_t>(idx)];
    if (!slot || candidate_beats(challenger, Candidate{slot->x, slot->y, slot->source_param_set},
                                 direction)) {
      slot = SampledPoint{idx, x, y, record.param_set};
    }
  }

  for (const auto& slot : best) {
    if (slot) series.points.push_back(*slot);
  }

  if (series.points.empty()) {
    throw Error(Errc::NoApplicableRecords,
                "no applicable records for method '" + method + "'" +
                    (saw_method_record ? " inside the comparison range and filters"
                                       : ": method has no records"));
  }
  return series;
}

}  // namespace psc
