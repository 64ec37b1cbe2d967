// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <span>
#include <variant>
#include <vector>

#include "psc/model.hpp"
#include "psc/sampling.hpp"

namespace psc {

struct XY {
  double x = 0.0;
  double y = 0.0;

  auto operator<=>(const XY&) const = default;
};

/// Either a least-squares polynomial over the comparison range, expressed in
/// the normalized variable t = (2x - lo - hi)/(hi - lo) in [-1, 1], or a
/// straight-line connection of the sampled points (order 0).
class FittedCurve {
 public:
  struct Polynomial {
    std::vector<double> coefficients;  // alpha_0..alpha_d in the normalized basis
    Interval domain;                   // the comparison range the curve was fitted over
  };
  struct Polyline {
    std::vector<XY> points;  // strictly increasing x
  };

  static FittedCurve polynomial(std::vector<double> coefficients, Interval domain);
  static FittedCurve polyline(std::vector<XY> points);

  bool is_polynomial() const { return std::holds_alternative<Polynomial>(repr_); }
  const Polynomial& as_polynomial() const { return std::get<Polynomial>(repr_); }
  const Polyline& as_polyline() const { return std::get<Polyline>(repr_); }

  int degree() const;

  /// x extent the curve is defined on: the fitted domain for polynomials,
  /// [first.x, last.x] for polylines.
  Interval span() const;

  /// Horner evaluation at the normalized abscissa for polynomials; linear
  /// interpolation between bracketing points for polylines (no extrapolation).
  double evaluate(double x) const;

  /// Polynomial coefficients rewritten in the raw x variable.
  std::vector<double> denormalized_coefficients() const;

  double normalize(double x) const;

 private:
  explicit FittedCurve(std::variant<Polynomial, Polyline> repr) : repr_(std::move(repr)) {}

  std::variant<Polynomial, Polyline> repr_;
};

/// Degree-d least-squares fit over `range` (d >= 1), or the straight-line
/// polyline through the points (d = 0). Requires at least d + 1 points;
/// with exactly d + 1 distinct abscissae the fit interpolates them.
FittedCurve fit_points(std::span<const XY> points, int order, Interval range);

FittedCurve fit(const SampledSeries& series, int order, Interval range);

}  // namespace psc
