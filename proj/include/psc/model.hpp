// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <compare>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "psc/error.hpp"

namespace psc {

// ---------------------------------------------------------------------------
// Metric kinds
// ---------------------------------------------------------------------------

enum class LpNorm { L0, L1, L2, LInf };

/// One of the measured quantities of an attack run: an Lp perturbation
/// distance, the attack success rate in percent, or the query count.
class MetricKind {
 public:
  enum class Tag { Distance, SuccessRate, QueryCount };

  static MetricKind distance(LpNorm norm) { return MetricKind(Tag::Distance, norm); }
  static MetricKind success_rate() { return MetricKind(Tag::SuccessRate, LpNorm::L0); }
  static MetricKind query_count() { return MetricKind(Tag::QueryCount, LpNorm::L0); }

  Tag tag() const { return tag_; }
  bool is_distance() const { return tag_ == Tag::Distance; }

  LpNorm norm() const;

  /// Canonical wire name: l0, l1, l2, linf, asr, queries.
  std::string_view name() const;
  static std::optional<MetricKind> from_name(std::string_view name);

  auto operator<=>(const MetricKind&) const = default;

 private:
  MetricKind(Tag tag, LpNorm norm) : tag_(tag), norm_(norm) {}

  Tag tag_;
  LpNorm norm_;  // meaningful only for Distance; pinned to L0 otherwise
};

// ---------------------------------------------------------------------------
// Run context
// ---------------------------------------------------------------------------

enum class AttackMode { Targeted, Untargeted };
enum class AttackFamily { Gradient, Score, Decision };

std::string_view mode_name(AttackMode mode);
std::optional<AttackMode> mode_from_name(std::string_view name);
std::string_view family_name(AttackFamily family);
std::optional<AttackFamily> family_from_name(std::string_view name);

/// The experimental setting a record was measured in. Comparisons only
/// combine records with identical contexts; identifiers compare exactly
/// and case-sensitively.
struct RunContext {
  std::string dataset;
  std::string model;
  AttackMode mode = AttackMode::Untargeted;
  AttackFamily attack_family = AttackFamily::Gradient;

  auto operator<=>(const RunContext&) const = default;
};

// ---------------------------------------------------------------------------
// Records
// ---------------------------------------------------------------------------

/// One measured outcome of one attack run. Records with missing metrics are
/// legal at rest; applicability is checked when a comparison is applied.
struct AttackRecord {
  std::string method;
  std::string param_set;
  RunContext context;
  std::map<MetricKind, double> measurements;
  std::map<std::string, std::string> meta;  // unknown input columns, preserved opaquely

  auto operator<=>(const AttackRecord&) const = default;
};

// ---------------------------------------------------------------------------
// Comparison configuration
// ---------------------------------------------------------------------------

struct Interval {
  double lo = 0.0;
  double hi = 0.0;

  double width() const { return hi - lo; }
  bool contains(double x) const { return x >= lo && x <= hi; }

  auto operator<=>(const Interval&) const = default;
};

struct FixedMetric {
  MetricKind metric = MetricKind::success_rate();
  double center = 0.0;
  double tolerance = 0.0;

  auto operator<=>(const FixedMetric&) const = default;
};

/// Full configuration of one comparison: the axes, an optional fixed-metric
/// band for 3-D setups, the comparison range, the resolution r and the
/// fitting order d. The order must be strictly less than the resolution.
struct ComparisonSpec {
  MetricKind x_axis = MetricKind::distance(LpNorm::L2);
  MetricKind y_axis = MetricKind::success_rate();
  std::optional<FixedMetric> fixed;
  Interval range;
  int resolution = 1;
  int order = 5;

  /// Throws on any invariant violation; called before any computation.
  void validate() const;

  auto operator<=>(const ComparisonSpec&) const = default;
};

// ---------------------------------------------------------------------------
// Direction semantics
// ---------------------------------------------------------------------------

enum class Direction { Maximize, Minimize };

/// Higher success rate is better; lower distance or query count is better.
Direction direction_of(MetricKind y_axis);

/// True when `challenger` is strictly better than `incumbent` under `dir`.
inline bool is_better(double challenger, double incumbent, Direction dir) {
  return dir == Direction::Maximize ? challenger > incumbent : challenger < incumbent;
}

// ---------------------------------------------------------------------------
// Record validation
// ---------------------------------------------------------------------------

enum class ValidationCode { OutOfRange, NegativeValue, NonIntegerQueries, EmptyIdentifier };

std::string_view validation_code_name(ValidationCode code);

struct ValidationIssue {
  ValidationCode code;
  std::string field;
  std::string message;
};

/// Empty result means the record satisfies every metric-kind invariant.
std::vector<ValidationIssue> validate_record(const AttackRecord& record);

inline bool is_valid(const AttackRecord& record) { return validate_record(record).empty(); }

}  // namespace psc
