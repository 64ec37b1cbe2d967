// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "psc/model.hpp"

namespace psc {

/// Portable pseudo-random stream (splitmix64) with Box-Muller gaussians.
/// The output sequence is a pure function of the seed on every platform.
class DeterministicRng {
 public:
  explicit DeterministicRng(std::uint64_t seed) : state_(seed) {}

  std::uint64_t next_u64();
  double next_uniform();  // [0, 1)
  double next_gaussian(double mean, double sd);

 private:
  std::uint64_t state_;
  bool has_spare_ = false;
  double spare_ = 0.0;
};

/// Analytic ground-truth trade-off shapes: a rising logistic for success-rate
/// versus distance, or a power decay for distance versus queries.
struct Logistic {
  double scale = 1.0;     // > 0
  double midpoint = 0.0;
  double ceiling = 100.0;  // in (0, 100]
};

struct PowerDecay {
  double amplitude = 1.0;  // > 0
  double exponent = 1.0;   // > 0
  double floor = 0.0;      // >= 0
};

struct CurveModel {
  std::variant<Logistic, PowerDecay> shape;
  double noise_sd = 0.0;
  std::uint64_t seed = 0;

  void validate() const;
};

/// Noiseless analytic value of the model at x.
double true_value(const CurveModel& model, double x);

struct ParamSet {
  std::string id;
  double x_offset = 0.0;  // shifts the true curve so different sets win different sub-ranges
};

/// One record per (param set, x): y = true_value of the shifted model plus
/// seeded gaussian noise, normalized to the y-axis metric's valid range.
/// Identical inputs produce identical records.
std::vector<AttackRecord> generate_runs(const CurveModel& model, const std::string& method,
                                        std::span<const ParamSet> param_sets,
                                        std::span<const double> xs, MetricKind x_axis,
                                        MetricKind y_axis, const RunContext& context);

/// Two logistic models whose true curves intersect exactly once in `range`,
/// at x_cross. The slopes differ while the crossing value is shared, so the
/// sign of the difference flips exactly there.
std::pair<CurveModel, CurveModel> crossing_pair(double x_cross, Interval range);

/// Logistic steep enough that a cubic fit of its best points leaves [0, 100]
/// while a quintic fit stays inside (tuned for 20 parts over `range`).
CurveModel underfit_fixture(Interval range);

}  // namespace psc
