// Wave profiles f(X,Y) with analytic derivatives through third order, and
// evaluators for the two metric forms of an impulsive pp-wave: the
// distributional/regularized one and the continuous one.
#pragma once

#include <cmath>
#include <functional>
#include <string>

#include "ppwave/common.hpp"
#include "ppwave/delta_nets.hpp"

namespace ppwave {

// Symmetric second derivatives of f.
struct Hess2 {
  double xx = 0.0, xy = 0.0, yy = 0.0;

  double laplacian() const { return xx + yy; }
};

// Symmetric third derivatives of f (4 independent components).
struct Third2 {
  double xxx = 0.0, xxy = 0.0, xyy = 0.0, yyy = 0.0;
};

// A profile must supply analytic derivatives; nothing is differentiated
// numerically on the evaluation path.
struct WaveProfile {
  std::string name;
  std::function<double(double, double)> eval;
  std::function<Vec2(double, double)> grad;
  std::function<Hess2(double, double)> hess;
  std::function<Third2(double, double)> third;
};

enum class BuiltinProfile { quadratic_saddle, quartic_negative };

inline WaveProfile builtin_profile(BuiltinProfile which) {
  WaveProfile p;
  switch (which) {
    case BuiltinProfile::quadratic_saddle:
      p.name = "quadratic_saddle";
      p.eval = [](double X, double Y) { return X * X - Y * Y; };
      p.grad = [](double X, double Y) { return Vec2{2.0 * X, -2.0 * Y}; };
      p.hess = [](double, double) { return Hess2{2.0, 0.0, -2.0}; };
      p.third = [](double, double) { return Third2{}; };
      return p;
    case BuiltinProfile::quartic_negative:
      p.name = "quartic_negative";
      p.eval = [](double X, double Y) { return -0.5 * (X * X * X * X + Y * Y * Y * Y); };
      p.grad = [](double X, double Y) { return Vec2{-2.0 * X * X * X, -2.0 * Y * Y * Y}; };
      p.hess = [](double X, double Y) { return Hess2{-6.0 * X * X, 0.0, -6.0 * Y * Y}; };
      p.third = [](double X, double Y) { return Third2{-12.0 * X, 0.0, 0.0, -12.0 * Y}; };
      return p;
  }
  throw config_error("unknown builtin profile");
}

inline WaveProfile builtin_profile(const std::string& name) {
  if (name == "quadratic_saddle") return builtin_profile(BuiltinProfile::quadratic_saddle);
  if (name == "quartic_negative") return builtin_profile(BuiltinProfile::quartic_negative);
  throw config_error("unknown profile name: " + name);
}

inline WaveProfile zero_profile() {
  WaveProfile p;
  p.name = "zero";
  p.eval = [](double, double) { return 0.0; };
  p.grad = [](double, double) { return Vec2{0.0, 0.0}; };
  p.hess = [](double, double) { return Hess2{}; };
  p.third = [](double, double) { return Third2{}; };
  return p;
}

// Coordinates ordered (U, X, Y, V).
struct SpacetimePoint {
  double U = 0.0, X = 0.0, Y = 0.0, V = 0.0;

  Vec4 as_vec() const { return {U, X, Y, V}; }
  static SpacetimePoint from_vec(const Vec4& v) { return {v[0], v[1], v[2], v[3]}; }
};

inline Vec4 operator-(const SpacetimePoint& a, const SpacetimePoint& b) {
  return a.as_vec() - b.as_vec();
}

struct MetricComponents {
  Mat4 g;  // symmetric, coordinate order (U, X, Y, V)
};

// Continuous form of the metric. All terms switch on with the kink u+ = max(U,0); below
// the shock the metric is flat.
inline MetricComponents metric_continuous(const WaveProfile& f, const SpacetimePoint& p) {
  const double up = u_plus(p.U);
  const Hess2 h = f.hess(p.X, p.Y);
  MetricComponents m;
  m.g(0, 3) = m.g(3, 0) = -0.5;
  m.g(1, 1) = (1.0 + 0.5 * h.xx * up) * (1.0 + 0.5 * h.xx * up) + 0.25 * h.xy * h.xy * up * up;
  m.g(2, 2) = (1.0 + 0.5 * h.yy * up) * (1.0 + 0.5 * h.yy * up) + 0.25 * h.xy * h.xy * up * up;
  // dX dY carries (2 u+ f_xy + 1/2 f_xy (lap f) u+^2); halved in the symmetric matrix.
  const double cross = h.xy * up + 0.25 * h.xy * h.laplacian() * up * up;
  m.g(1, 2) = m.g(2, 1) = cross;
  return m;
}

// Regularized distributional form: flat transverse part, profile times the
// mollified delta in g_UU.
inline MetricComponents metric_regularized(const WaveProfile& f, const StrictDeltaNet& net,
                                           double eps, const SpacetimePoint& p) {
  if (!(eps > 0.0)) throw domain_error("metric_regularized: eps must be positive");
  MetricComponents m;
  m.g(0, 0) = f.eval(p.X, p.Y) * net.eval(eps, p.U);
  m.g(0, 3) = m.g(3, 0) = -0.5;
  m.g(1, 1) = 1.0;
  m.g(2, 2) = 1.0;
  return m;
}

}  // namespace ppwave
