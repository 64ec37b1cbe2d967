// SPDX-License-Identifier: Apache-2.0
#include "psc/fitting.hpp"

#include <algorithm>
#include <cmath>
#include <cstddef>

namespace psc {

namespace {

// Least squares via Householder QR. `a` is row-major m x n with m >= n.
// Solves min ||a z - b||_2; rank deficiency is reported, not patched.
std::vector<double> solve_least_squares(std::vector<double> a, int m, int n, std::vector<double> b) {
  auto at = [&](int row, int col) -> double& { return a[static_cast<std::size_t>(row) * n + col]; };

  for (int k = 0; k < n; ++k) {
    double norm = 0.0;
    for (int i = k; i < m; ++i) norm = std::hypot(norm, at(i, k));
    if (norm == 0.0)
      throw Error(Errc::DegenerateAbscissae, "rank-deficient fitting system (duplicate abscissae?)");

    const double alpha = at(k, k) >= 0 ? -norm : norm;
    // Householder vector v = x - alpha*e1, stored in-place below the diagonal.
    at(k, k) -= alpha;
    double vnorm2 = 0.0;
    for (int i = k; i < m; ++i) vnorm2 += at(i, k) * at(i, k);

    if (vnorm2 > 0.0) {
      for (int j = k + 1; j < n; ++j) {
        double dot = 0.0;
        for (int i = k; i < m; ++i) dot += at(i, k) * at(i, j);
        const double scale = 2.0 * dot / vnorm2;
        for (int i = k; i < m; ++i) at(i, j) -= scale * at(i, k);
      }
      double dot = 0.0;
      for (int i = k; i < m; ++i) dot += at(i, k) * b[static_cast<std::size_t>(i)];
      const double scale = 2.0 * dot / vnorm2;
      for (int i = k; i < m; ++i) b[static_cast<std::size_t>(i)] -= scale * at(i, k);
    }
    at(k, k) = alpha;  // diagonal of R
  }

  double max_diag = 0.0;
  for (int k = 0; k < n; ++k) max_diag = std::max(max_diag, std::abs(at(k, k)));
  for (int k = 0; k < n; ++k) {
    if (std::abs(at(k, k)) < 1e-12 * max_diag)
      throw Error(Errc::DegenerateAbscissae, "rank-deficient fitting system (duplicate abscissae?)");
  }

  std::vector<double> z(static_cast<std::size_t>(n));
  for (int k = n - 1; k >= 0; --k) {
    double sum = b[static_cast<std::size_t>(k)];
    for (int j = k + 1; j < n; ++j) sum -= at(k, j) * z[static_cast<std::size_t>(j)];
    z[static_cast<std::size_t>(k)] = sum / at(k, k);
  }
  return z;
}

}  // namespace

FittedCurve FittedCurve::polynomial(std::vector<double> coefficients, Interval domain) {
  if (coefficients.empty())
    throw Error(Errc::InvalidSpec, "polynomial curve requires at least one coefficient");
  if (!(domain.lo < domain.hi))
    throw Error(Errc::InvalidRange, "polynomial domain requires lo < hi");
  for (double c : coefficients) {
    if (!std::isfinite(c)) throw Error(Errc::InvalidSpec, "polynomial coefficients must be finite");
  }
  return FittedCurve(Polynomial{std::move(coefficients), domain});
}

FittedCurve FittedCurve::polyline(std::vector<XY> points) {
  if (points.empty()) throw Error(Errc::InvalidSpec, "polyline requires at least one point");
  for (std::size_t i = 1; i < points.size(); ++i) {
    if (!(points[i - 1].x < points[i].x))
      throw Error(Errc::InvalidSpec, "polyline points must have strictly increasing x");
  }
  return FittedCurve(Polyline{std::move(points)});
}

int FittedCurve::degree() const {
  if (is_polynomial()) return static_cast<int>(as_polynomial().coefficients.size()) - 1;
  return 0;
}

Interval FittedCurve::span() const {
  if (is_polynomial()) return as_polynomial().domain;
  const auto& pts = as_polyline().points;
  return {pts.front().x, pts.back().x};
}

double FittedCurve::normalize(double x) const {
  const Interval d = as_polynomial().domain;
  return (2.0 * x - d.lo - d.hi) / (d.hi - d.lo);
}

double FittedCurve::evaluate(double x) const {
  if (is_polynomial()) {
    const auto& coeffs = as_polynomial().coefficients;
    const double t = normalize(x);
    double acc = 0.0;
    for (auto it = coeffs.rbegin(); it != coeffs.rend(); ++it) acc = acc * t + *it;
    return acc;
  }

  const auto& pts = as_polyline().points;
  if (x < pts.front().x || x > pts.back().x)
    throw Error(Errc::OutOfDomain, "polyline evaluation outside [first.x, last.x]");
  auto hi = std::lower_bound(pts.begin(), pts.end(), x,
                             [](const XY& p, double value) { return p.x < value; });
  if (hi->x == x) return hi->y;
  auto lo = hi - 1;
  const double w = (x - lo->x) / (hi->x - lo->x);
  return lo->y + w * (hi->y - lo->y);
}

std::vector<double> FittedCurve::denormalized_coefficients() const {
  const auto& poly = as_polynomial();
  const double s = 2.0 / (poly.domain.hi - poly.domain.lo);
  const double q = -(poly.domain.lo + poly.domain.hi) / (poly.domain.hi - poly.domain.lo);

  // Horner in coefficient space: result = result * (q + s x) + alpha_i.
  std::vector<double> out{poly.coefficients.back()};
  for (auto it = poly.coefficients.rbegin() + 1; it != poly.coefficients.rend(); ++it) {
    std::vector<double> next(out.size() + 1, 0.0);
    for (std::size_t i = 0; i < out.size(); ++i) {
      next[i] += out[i] * q;
      next[i + 1] += out[i] * s;
    }
    next[0] += *it;
    out = std::move(next);
  }
  return out;
}

FittedCurve fit_points(std::span<const XY> points, int order, Interval range) {
  if (order < 0) throw Error(Errc::InvalidOrder, "order d must be non-negative");
  if (!(range.lo < range.hi)) throw Error(Errc::InvalidRange, "fitting range requires lo < hi");

  if (order == 0) {
    return FittedCurve::polyline(std::vector<XY>(points.begin(), points.end()));
  }

  const int m = static_cast<int>(points.size());
  const int n = order + 1;
  if (m < n) {
    throw Error(Errc::InsufficientPoints,
                "fit of order " + std::to_string(order) + " needs at least " + std::to_string(n) +
                    " sampled points, got " + std::to_string(m) +
                    "; lower the order d or raise the resolution r");
  }

  const double mid = 0.5 * (range.lo + range.hi);
  const double half = 0.5 * (range.hi - range.lo);
  std::vector<double> a(static_cast<std::size_t>(m) * n);
  std::vector<double> b(static_cast<std::size_t>(m));
  for (int i = 0; i < m; ++i) {
    const double t = (points[static_cast<std::size_t>(i)].x - mid) / half;
    double power = 1.0;
    for (int j = 0; j < n; ++j) {
      a[static_cast<std::size_t>(i) * n + j] = power;
      power *= t;
    }
    b[static_cast<std::size_t>(i)] = points[static_cast<std::size_t>(i)].y;
  }

  return FittedCurve::polynomial(solve_least_squares(std::move(a), m, n, std::move(b)), range);
}

FittedCurve fit(const SampledSeries& series, int order, Interval range) {
  std::vector<XY> pts;
  pts.reserve(series.points.size());
  for (const SampledPoint& p : series.points) pts.push_back({p.x, p.y});
  return fit_points(pts, order, range);
}

}  // namespace psc
