// SPDX-License-Identifier: Apache-2.0
#include "psc/model.hpp"

#include <cmath>

namespace psc {

LpNorm MetricKind::norm() const {
  if (tag_ != Tag::Distance) throw Error(Errc::InvalidSpec, "norm() queried on a non-distance metric");
  return norm_;
}

std::string_view MetricKind::name() const {
  switch (tag_) {
    case Tag::SuccessRate: return "asr";
    case Tag::QueryCount: return "queries";
    case Tag::Distance:
      switch (norm_) {
        case LpNorm::L0: return "l0";
        case LpNorm::L1: return "l1";
        case LpNorm::L2: return "l2";
        case LpNorm::LInf: return "linf";
      }
  }
  return "?";
}

std::optional<MetricKind> MetricKind::from_name(std::string_view name) {
  if (name == "l0") return distance(LpNorm::L0);
  if (name == "l1") return distance(LpNorm::L1);
  if (name == "l2") return distance(LpNorm::L2);
  if (name == "linf") return distance(LpNorm::LInf);
  if (name == "asr") return success_rate();
  if (name == "queries") return query_count();
  return std::nullopt;
}

std::string_view mode_name(AttackMode mode) {
  return mode == AttackMode::Targeted ? "targeted" : "untargeted";
}

std::optional<AttackMode> mode_from_name(std::string_view name) {
  if (name == "targeted") return AttackMode::Targeted;
  if (name == "untargeted") return AttackMode::Untargeted;
  return std::nullopt;
}

std::string_view family_name(AttackFamily family) {
  switch (family) {
    case AttackFamily::Gradient: return "gradient";
    case AttackFamily::Score: return "score";
    case AttackFamily::Decision: return "decision";
  }
  return "?";
}

std::optional<AttackFamily> family_from_name(std::string_view name) {
  if (name == "gradient") return AttackFamily::Gradient;
  if (name == "score") return AttackFamily::Score;
  if (name == "decision") return AttackFamily::Decision;
  return std::nullopt;
}

void ComparisonSpec::validate() const {
  if (!(range.lo < range.hi))
    throw Error(Errc::InvalidRange, "comparison range requires lo < hi");
  if (resolution < 1)
    throw Error(Errc::InvalidResolution, "resolution r must be a positive integer");
  if (order < 0)
    throw Error(Errc::InvalidOrder, "order d must be non-negative");
  if (order >= resolution)
    throw Error(Errc::InvalidOrder,
                "resolution r must be larger than order d (require r > d; got r = " +
                    std::to_string(resolution) + ", d = " + std::to_string(order) + ")");
  if (x_axis == y_axis)
    throw Error(Errc::InvalidSpec, "x_axis and y_axis must differ");
  if (fixed) {
    if (fixed->metric == x_axis || fixed->metric == y_axis)
      throw Error(Errc::InvalidSpec, "fixed metric must differ from both axes");
    if (fixed->tolerance < 0)
      throw Error(Errc::InvalidSpec, "fixed-metric tolerance must be >= 0");
  }
}

Direction direction_of(MetricKind y_axis) {
  return y_axis.tag() == MetricKind::Tag::SuccessRate ? Direction::Maximize : Direction::Minimize;
}

std::string_view validation_code_name(ValidationCode code) {
  switch (code) {
    case ValidationCode::OutOfRange: return "OutOfRange";
    case ValidationCode::NegativeValue: return "NegativeValue";
    case ValidationCode::NonIntegerQueries: return "NonIntegerQueries";
    case ValidationCode::EmptyIdentifier: return "EmptyIdentifier";
  }
  return "?";
}

std::vector<ValidationIssue> validate_record(const AttackRecord& record) {
  std::vector<ValidationIssue> issues;
  auto flag = [&](ValidationCode code, std::string field, std::string message) {
    issues.push_back({code, std::move(field), std::move(message)});
  };

  if (record.method.empty()) flag(ValidationCode::EmptyIdentifier, "method", "method identifier is empty");
  if (record.param_set.empty())
    flag(ValidationCode::EmptyIdentifier, "param_set", "param_set identifier is empty");
  if (record.context.dataset.empty())
    flag(ValidationCode::EmptyIdentifier, "context.dataset", "dataset identifier is empty");
  if (record.context.model.empty())
    flag(ValidationCode::EmptyIdentifier, "context.model", "model identifier is empty");

  for (const auto& [kind, value] : record.measurements) {
    const std::string field = std::string(kind.name());
    if (!std::isfinite(value)) {
      flag(ValidationCode::OutOfRange, field, field + " is not finite");
      continue;
    }
    switch (kind.tag()) {
      case MetricKind::Tag::Distance:
        if (value < 0) flag(ValidationCode::NegativeValue, field, field + " distance must be >= 0");
        break;
      case MetricKind::Tag::SuccessRate:
        if (value < 0 || value > 100)
          flag(ValidationCode::OutOfRange, field, "asr must lie in [0, 100] percent");
        break;
      case MetricKind::Tag::QueryCount:
        if (value < 0) flag(ValidationCode::NegativeValue, field, "queries must be >= 0");
        else if (value != std::floor(value))
          flag(ValidationCode::NonIntegerQueries, field, "queries must be an integer");
        break;
    }
  }
  return issues;
}

}  // namespace psc
