// SPDX-License-Identifier: Apache-2.0
#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <random>
#include <set>

#include "oracles.hpp"
#include "psc/fitting.hpp"

using namespace psc;

namespace {

double residual_norm2(std::span<const XY> pts, const FittedCurve& curve) {
  double sum = 0.0;
  for (const XY& p : pts) {
    const double r = curve.evaluate(p.x) - p.y;
    sum += r * r;
  }
  return sum;
}

double eval_coeffs(std::span<const double> coeffs, const FittedCurve& like, double x) {
  // Power-sum evaluation of an arbitrary coefficient vector in the curve's basis.
  const double t = like.normalize(x);
  double sum = 0.0;
  for (std::size_t i = 0; i < coeffs.size(); ++i) sum += coeffs[i] * std::pow(t, double(i));
  return sum;
}

}  // namespace

TEST_CASE("six points on y = 2x + 1 recover the line after de-normalization") {
  std::vector<XY> pts;
  for (double x : {0.0, 0.5, 1.2, 1.9, 2.4, 3.0}) pts.push_back({x, 2.0 * x + 1.0});
  const FittedCurve curve = fit_points(pts, 1, {0.0, 3.0});

  const auto raw = curve.denormalized_coefficients();
  REQUIRE(raw.size() == 2);
  CHECK(raw[0] == doctest::Approx(1.0).epsilon(1e-10));
  CHECK(raw[1] == doctest::Approx(2.0).epsilon(1e-10));
  for (const XY& p : pts) CHECK(std::abs(curve.evaluate(p.x) - p.y) < 1e-9);
}

TEST_CASE("order 0 is a passthrough polyline") {
  const std::vector<XY> pts = {{0.1, 5.0}, {1.0, 40.0}, {2.7, 90.0}};
  const FittedCurve curve = fit_points(pts, 0, {0.0, 3.0});
  REQUIRE(!curve.is_polynomial());
  CHECK(curve.as_polyline().points == pts);
  for (const XY& p : pts) CHECK(curve.evaluate(p.x) == p.y);
}

TEST_CASE("degree-5 fit of a logistic is a local least-squares optimum") {
  std::vector<XY> pts;
  for (int i = 0; i < 20; ++i) {
    const double x = 3.0 * i / 19.0;
    pts.push_back({x, 100.0 / (1.0 + std::exp(-2.5 * (x - 1.5)))});
  }
  const FittedCurve curve = fit_points(pts, 5, {0.0, 3.0});
  const double base = residual_norm2(pts, curve);

  auto coeffs = curve.as_polynomial().coefficients;
  for (std::size_t i = 0; i < coeffs.size(); ++i) {
    for (double delta : {-1e-3, 1e-3}) {
      auto perturbed = coeffs;
      perturbed[i] += delta;
      double sum = 0.0;
      for (const XY& p : pts) {
        const double r = eval_coeffs(perturbed, curve, p.x) - p.y;
        sum += r * r;
      }
      CHECK(sum >= base - 1e-9);
    }
  }
}

TEST_CASE("exactly d + 1 points are interpolated") {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> cd(-20.0, 20.0);
  for (int d = 1; d <= 5; ++d) {
    for (int trial = 0; trial < 20; ++trial) {
      std::vector<double> coeffs;
      for (int i = 0; i <= d; ++i) coeffs.push_back(cd(rng));
      const FittedCurve truth = FittedCurve::polynomial(coeffs, {0.0, 3.0});
      std::vector<XY> pts;
      for (int k = 0; k <= d; ++k) {
        const double x = 3.0 * k / d;
        pts.push_back({x, truth.evaluate(x)});
      }
      const FittedCurve fitcurve = fit_points(pts, d, {0.0, 3.0});
      for (const XY& p : pts) CHECK(std::abs(fitcurve.evaluate(p.x) - p.y) < 1e-6);
    }
  }
}

TEST_CASE("too few points fail loudly with guidance") {
  const std::vector<XY> pts = {{0.0, 0.0}, {1.0, 1.0}, {2.0, 2.0}};
  CHECK_THROWS_WITH_AS(fit_points(pts, 5, {0.0, 3.0}),
                       doctest::Contains("lower the order d or raise the resolution r"), Error);
  try {
    fit_points(pts, 3, {0.0, 3.0});
    FAIL("expected InsufficientPoints");
  } catch (const Error& e) {
    CHECK(e.code() == Errc::InsufficientPoints);
  }
}

TEST_CASE("duplicate abscissae are rejected as degenerate") {
  const std::vector<XY> pts = {{1.0, 0.0}, {1.0, 1.0}, {1.0, 2.0}};
  try {
    fit_points(pts, 2, {0.0, 3.0});
    FAIL("expected DegenerateAbscissae");
  } catch (const Error& e) {
    CHECK(e.code() == Errc::DegenerateAbscissae);
  }
}

TEST_CASE("evaluate matches an independent power-sum oracle") {
  std::mt19937_64 rng(31);
  std::uniform_real_distribution<double> cd(-10.0, 10.0);
  std::vector<double> coeffs;
  for (int i = 0; i <= 5; ++i) coeffs.push_back(cd(rng));
  const FittedCurve curve = FittedCurve::polynomial(coeffs, {0.0, 3.0});
  for (int i = 0; i <= 50; ++i) {
    const double x = 3.0 * i / 50.0;
    CHECK(std::abs(curve.evaluate(x) - oracle::power_sum_eval(curve, x)) < 1e-12);
  }
}

TEST_CASE("constant polynomial evaluates to its constant anywhere") {
  const FittedCurve curve = FittedCurve::polynomial({5.0}, {0.0, 2.0});
  for (double x : {0.0, 0.7, 2.0}) CHECK(curve.evaluate(x) == 5.0);
}

TEST_CASE("polyline midpoint interpolation and domain guard") {
  const FittedCurve line = FittedCurve::polyline({{0.0, 0.0}, {2.0, 100.0}});
  CHECK(line.evaluate(1.0) == 50.0);
  CHECK(line.evaluate(0.0) == 0.0);
  CHECK(line.evaluate(2.0) == 100.0);
  CHECK_THROWS_AS(line.evaluate(2.1), Error);
  CHECK_THROWS_AS(line.evaluate(-0.1), Error);
}

TEST_CASE("polyline construction demands strictly increasing x") {
  CHECK_THROWS_AS(FittedCurve::polyline({{1.0, 0.0}, {1.0, 1.0}}), Error);
  CHECK_THROWS_AS(FittedCurve::polyline({}), Error);
  CHECK_NOTHROW(FittedCurve::polyline({{1.0, 7.0}}));
}

TEST_CASE("property: shifting all y by a constant shifts evaluate by the same constant") {
  std::mt19937_64 rng(47);
  std::uniform_real_distribution<double> xd(0.0, 3.0);
  std::uniform_real_distribution<double> yd(0.0, 100.0);
  std::vector<XY> pts;
  std::set<double> seen;
  while (pts.size() < 12) {
    const double x = xd(rng);
    if (seen.insert(x).second) pts.push_back({x, yd(rng)});
  }
  std::sort(pts.begin(), pts.end(), [](const XY& a, const XY& b) { return a.x < b.x; });

  const double shift = 17.25;
  auto shifted = pts;
  for (XY& p : shifted) p.y += shift;

  for (int d : {1, 3, 5}) {
    const FittedCurve base = fit_points(pts, d, {0.0, 3.0});
    const FittedCurve moved = fit_points(shifted, d, {0.0, 3.0});
    for (int i = 0; i <= 30; ++i) {
      const double x = 3.0 * i / 30.0;
      CHECK(moved.evaluate(x) - base.evaluate(x) == doctest::Approx(shift).epsilon(1e-9));
    }
  }
}

TEST_CASE("fit survives an ill-conditioned wide range") {
  // ImageNet-scale range: normalization keeps the solve well-behaved.
  const Interval range{0.0, 255.0 * 3};
  std::vector<XY> pts;
  for (int i = 0; i < 24; ++i) {
    const double x = range.width() * i / 23.0;
    pts.push_back({x, 100.0 / (1.0 + std::exp(-0.02 * (x - 300.0)))});
  }
  const FittedCurve curve = fit_points(pts, 5, range);
  double worst = 0.0;
  for (const XY& p : pts) worst = std::max(worst, std::abs(curve.evaluate(p.x) - p.y));
  CHECK(worst < 10.0);  // modest model residual, no numerical blow-up
  for (double c : curve.as_polynomial().coefficients) CHECK(std::isfinite(c));
}
