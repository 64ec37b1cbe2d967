// SPDX-License-Identifier: Apache-2.0
#include "psc/simgen.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace psc {

std::uint64_t DeterministicRng::next_u64() {
  // splitmix64 (Steele, Lea, Flood 2014); fixed constants, portable output.
  state_ += 0x9e3779b97f4a7c15ULL;
  std::uint64_t z = state_;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

double DeterministicRng::next_uniform() {
  return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
}

double DeterministicRng::next_gaussian(double mean, double sd) {
  if (has_spare_) {
    has_spare_ = false;
    return mean + sd * spare_;
  }
  double u1 = next_uniform();
  while (u1 == 0.0) u1 = next_uniform();
  const double u2 = next_uniform();
  const double radius = std::sqrt(-2.0 * std::log(u1));
  const double angle = 2.0 * std::numbers::pi * u2;
  spare_ = radius * std::sin(angle);
  has_spare_ = true;
  return mean + sd * radius * std::cos(angle);
}

void CurveModel::validate() const {
  if (noise_sd < 0) throw Error(Errc::InvalidModel, "noise_sd must be >= 0");
  if (const auto* logistic = std::get_if<Logistic>(&shape)) {
    if (!(logistic->scale > 0)) throw Error(Errc::InvalidModel, "logistic scale must be > 0");
    if (!(logistic->ceiling > 0 && logistic->ceiling <= 100))
      throw Error(Errc::InvalidModel, "logistic ceiling must lie in (0, 100]");
  } else {
    const auto& decay = std::get<PowerDecay>(shape);
    if (!(decay.amplitude > 0)) throw Error(Errc::InvalidModel, "power-decay amplitude must be > 0");
    if (!(decay.exponent > 0)) throw Error(Errc::InvalidModel, "power-decay exponent must be > 0");
    if (decay.floor < 0) throw Error(Errc::InvalidModel, "power-decay floor must be >= 0");
  }
}

double true_value(const CurveModel& model, double x) {
  model.validate();
  if (const auto* logistic = std::get_if<Logistic>(&model.shape)) {
    return logistic->ceiling / (1.0 + std::exp(-logistic->scale * (x - logistic->midpoint)));
  }
  const auto& decay = std::get<PowerDecay>(model.shape);
  if (!(x > 0)) throw Error(Errc::OutOfDomain, "power-decay model requires x > 0");
  return decay.floor + decay.amplitude * std::pow(x, -decay.exponent);
}

namespace {

double normalize_for_kind(MetricKind kind, double value) {
  switch (kind.tag()) {
    case MetricKind::Tag::SuccessRate:
      return std::clamp(value, 0.0, 100.0);
    case MetricKind::Tag::Distance:
      return std::max(value, 0.0);
    case MetricKind::Tag::QueryCount:
      return std::max(std::round(value), 0.0);
  }
  return value;
}

}  // namespace

std::vector<AttackRecord> generate_runs(const CurveModel& model, const std::string& method,
                                        std::span<const ParamSet> param_sets,
                                        std::span<const double> xs, MetricKind x_axis,
                                        MetricKind y_axis, const RunContext& context) {
  model.validate();
  DeterministicRng rng(model.seed);

  std::vector<AttackRecord> records;
  records.reserve(param_sets.size() * xs.size());
  for (const ParamSet& ps : param_sets) {
    for (double x : xs) {
      // An x_offset shift of the true curve: evaluate the base model at x - offset.
      const double base = true_value(model, x - ps.x_offset);
      const double noisy =
          model.noise_sd > 0 ? base + rng.next_gaussian(0.0, model.noise_sd) : base;

      AttackRecord record;
      record.method = method;
      record.param_set = ps.id;
      record.context = context;
      record.measurements[x_axis] = normalize_for_kind(x_axis, x);
      record.measurements[y_axis] = normalize_for_kind(y_axis, noisy);
      records.push_back(std::move(record));
    }
  }
  return records;
}

std::pair<CurveModel, CurveModel> crossing_pair(double x_cross, Interval range) {
  if (!(range.lo < range.hi)) throw Error(Errc::InvalidRange, "crossing range requires lo < hi");
  if (!(x_cross > range.lo && x_cross < range.hi))
    throw Error(Errc::InvalidCrossing, "x_cross must lie strictly inside the range");

  // Shared crossing value: both curves equal ceiling/(1 + e^-k) at x_cross.
  // The exponent difference a1*(x - m1) - a2*(x - m2) = (a1 - a2)*(x - x_cross)
  // is strictly monotone, so the true curves intersect exactly once.
  constexpr double kSteepScale = 1.6;
  constexpr double kGentleScale = 0.8;
  constexpr double kCrossExponent = 0.75;

  CurveModel steep{Logistic{kSteepScale, x_cross - kCrossExponent / kSteepScale, 100.0}, 0.0, 0};
  CurveModel gentle{Logistic{kGentleScale, x_cross - kCrossExponent / kGentleScale, 100.0}, 0.0, 1};
  return {steep, gentle};
}

CurveModel underfit_fixture(Interval range) {
  if (!(range.lo < range.hi)) throw Error(Errc::InvalidRange, "fixture range requires lo < hi");
  // Shape expressed relative to the range so the fixture scales with it.
  const double width = range.hi - range.lo;
  return CurveModel{Logistic{8.0 / width, range.lo + 0.3 * width, 100.0}, 0.0, 0};
}

}  // namespace psc
