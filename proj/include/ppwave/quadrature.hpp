// Adaptive Gauss-Kronrod 15(7) quadrature on finite intervals.
#pragma once

#include <cmath>
#include <functional>
#include <string>
#include <vector>

#include "ppwave/common.hpp"

namespace ppwave {

struct QuadResult {
  double value = 0.0;
  double error = 0.0;      // accumulated error estimate
  int intervals = 0;       // accepted subintervals
};

namespace detail {

// Nodes on [-1,1] and weights of the 15-point Kronrod rule with the embedded
// 7-point Gauss rule (QUADPACK values).
inline const double kGk15Nodes[8] = {
    0.991455371120813, 0.949107912342759, 0.864864423359769, 0.741531185599394,
    0.586087235467691, 0.405845151377397, 0.207784955007898, 0.000000000000000};
inline const double kGk15WeightsK[8] = {
    0.022935322010529, 0.063092092629979, 0.104790010322250, 0.140653259715525,
    0.169004726639267, 0.190350578064785, 0.204432940075298, 0.209482141084728};
inline const double kGk15WeightsG[4] = {
    0.129484966168870, 0.279705391489277, 0.381830050505119, 0.417959183673469};

struct GkEstimate {
  double kronrod, gauss;
};

inline GkEstimate gk15(const std::function<double(double)>& fn, double a, double b) {
  const double c = 0.5 * (a + b);
  const double h = 0.5 * (b - a);
  double resk = 0.0, resg = 0.0;
  for (int i = 0; i < 8; ++i) {
    const double dx = h * kGk15Nodes[i];
    double fsum;
    if (i == 7) {
      fsum = fn(c);
    } else {
      fsum = fn(c - dx) + fn(c + dx);
    }
    resk += kGk15WeightsK[i] * fsum;
    // odd-indexed nodes (incl. the centre) carry the embedded Gauss-7 rule
    if (i % 2 == 1) resg += kGk15WeightsG[i / 2] * fsum;
  }
  return {resk * h, resg * h};
}

}  // namespace detail

// Integrates fn over [a,b] to absolute tolerance abs_tol by recursive
// bisection; throws numerical_error when the subdivision budget is exhausted.
inline QuadResult integrate_adaptive(const std::function<double(double)>& fn, double a,
                                     double b, double abs_tol, int max_intervals = 4000) {
  if (!(abs_tol > 0.0)) throw domain_error("integrate_adaptive: abs_tol must be positive");
  if (a == b) return {0.0, 0.0, 0};

  struct Seg {
    double a, b, value, error;
  };

  auto estimate = [&fn](double x0, double x1) -> Seg {
    const auto e = detail::gk15(fn, x0, x1);
    return {x0, x1, e.kronrod, std::abs(e.kronrod - e.gauss)};
  };

  std::vector<Seg> work{estimate(a, b)};
  QuadResult res;
  const double total_width = std::abs(b - a);
  int used = 1;
  while (!work.empty()) {
    Seg s = work.back();
    work.pop_back();
    const double local_tol = abs_tol * std::abs(s.b - s.a) / total_width;
    if (s.error <= std::max(local_tol, 1e-300) || std::abs(s.b - s.a) < 1e-15 * total_width) {
      res.value += s.value;
      res.error += s.error;
      res.intervals += 1;
      continue;
    }
    if (used >= max_intervals)
      throw numerical_error("quadrature failed to converge on [" + format_g17(a) + "," +
                            format_g17(b) + "] (interval budget exhausted)");
    const double mid = 0.5 * (s.a + s.b);
    work.push_back(estimate(s.a, mid));
    work.push_back(estimate(mid, s.b));
    used += 1;
  }
  return res;
}

}  // namespace ppwave
