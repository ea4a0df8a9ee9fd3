// Uniform-convergence monitors: sup-norm tables for s_eps -> s and for the
// U-derivative of t_eps away from the shock, the three-condition hypothesis
// check used to lift derivative convergence to uniform convergence, and the
// metric pullback comparison. Sup norms are grid maxima at a fixed resolution
// with one refinement pass near the maximizer; tables report fitted slopes as
// information only and never assert a rate.
#pragma once

#include <cmath>
#include <functional>
#include <vector>

#include "ppwave/common.hpp"
#include "ppwave/profiles.hpp"
#include "ppwave/transform.hpp"

namespace ppwave {

struct ConvergenceRow {
  double eps = 0.0;
  double sup = 0.0;
};

struct ConvergenceTable {
  Box region;          // 4d box (U, X, Y, V)
  double u_gap = 0.0;  // excluded slab |U| < u_gap (0 = none)
  int resolution = 0;
  std::vector<ConvergenceRow> rows;  // decreasing eps
  double fitted_slope = 0.0;

  double final_sup() const { return rows.empty() ? 0.0 : rows.back().sup; }
};

namespace detail {

// Max over components of |a - b| for the last three components (the first is
// U on both sides, identically).
inline double point_gap(const SpacetimePoint& a, const SpacetimePoint& b) {
  return std::max({std::abs(a.X - b.X), std::abs(a.Y - b.Y), std::abs(a.V - b.V)});
}

// Sup of fn over the (U, X, Y) part of a 4d region on an n^3 grid with one
// refinement pass near the maximizer. The monitored differences are affine in
// V with unit coefficient on both sides, so V drops out of every gap and the
// V axis is sampled at its midpoint.
inline double sup_gap_3d(const Box& region, int res,
                         const std::function<double(double, double, double)>& fn,
                         const std::vector<double>& u_axis) {
  double best = -1.0;
  double bu = 0, bx = 0, by = 0;
  const auto xs = linspace(region.lo[1], region.hi[1], res);
  const auto ys = linspace(region.lo[2], region.hi[2], res);
  for (double U : u_axis)
    for (double X : xs)
      for (double Y : ys) {
        const double v = fn(U, X, Y);
        if (v > best) {
          best = v;
          bu = U;
          bx = X;
          by = Y;
        }
      }
  // refinement: re-sample the surrounding cell at double density
  auto span = [](const std::vector<double>& axis) {
    return axis.size() > 1 ? axis[1] - axis[0] : 0.0;
  };
  const double hx = span(xs), hy = span(ys);
  double hu = 0.0;
  for (size_t i = 0; i + 1 < u_axis.size(); ++i)
    if (u_axis[i] <= bu && bu <= u_axis[i + 1]) hu = u_axis[i + 1] - u_axis[i];
  for (double U : linspace(bu - 0.5 * hu, bu + 0.5 * hu, 5))
    for (double X : linspace(std::max(region.lo[1], bx - hx), std::min(region.hi[1], bx + hx), 5))
      for (double Y : linspace(std::max(region.lo[2], by - hy), std::min(region.hi[2], by + hy), 5))
        best = std::max(best, fn(U, X, Y));
  return best;
}

}  // namespace detail

// sup | s_eps - s | over the region, per eps. The region may include U = 0.
inline ConvergenceTable converge_s(const EvaluatorFamily& fam, const Box& region, int res = 33,
                                   int threads = 1) {
  if (region.dim() != 4) throw domain_error("converge_s: region must be 4d");
  ConvergenceTable table;
  table.region = region;
  table.resolution = res;
  table.rows.resize(fam.size());
  const double Vmid = 0.5 * (region.lo[3] + region.hi[3]);
  const auto u_axis = linspace(region.lo[0], region.hi[0], res);
  parallel_for(fam.size(), threads, [&](size_t m) {
    const TransformEvaluator& ev = fam.at(m);
    const double sup = detail::sup_gap_3d(region, res,
        [&](double U, double X, double Y) {
          const SpacetimePoint p{U, X, Y, Vmid};
          return detail::point_gap(ev.s_eps(p), s_closed(fam.profile, p));
        },
        u_axis);
    table.rows[m] = {ev.eps(), sup};
  });
  if (table.rows.size() >= 2) {
    std::vector<double> e, s;
    for (const auto& r : table.rows) {
      e.push_back(r.eps);
      s.push_back(std::max(r.sup, 1e-300));
    }
    table.fitted_slope = fit_loglog(e, s).slope;
  }
  return table;
}

// sup | d/dU t_eps - d/dU t | over the region with the slab |U| < u_gap
// removed (the closed derivative jumps at U = 0).
inline ConvergenceTable converge_derivatives(const EvaluatorFamily& fam, const Box& region,
                                             double u_gap, int res = 33, int threads = 1) {
  if (region.dim() != 4) throw domain_error("converge_derivatives: region must be 4d");
  if (!(u_gap > 0.0))
    throw domain_error("converge_derivatives: region touches U = 0 (u_gap must be positive)");
  ConvergenceTable table;
  table.region = region;
  table.u_gap = u_gap;
  table.resolution = res;
  // gapped U axis: keep grid values with |U| >= u_gap, ensure both edges present
  std::vector<double> u_axis;
  for (double U : linspace(region.lo[0], region.hi[0], res))
    if (std::abs(U) >= u_gap) u_axis.push_back(U);
  if (region.lo[0] < -u_gap) u_axis.push_back(-u_gap);
  if (region.hi[0] > u_gap) u_axis.push_back(u_gap);
  std::sort(u_axis.begin(), u_axis.end());
  if (u_axis.empty()) throw domain_error("converge_derivatives: empty gapped region");

  table.rows.resize(fam.size());
  parallel_for(fam.size(), threads, [&](size_t m) {
    const TransformEvaluator& ev = fam.at(m);
    const double sup = detail::sup_gap_3d(region, res,
        [&](double U, double X, double Y) {
          const double Uc = std::abs(U) < u_gap ? (U < 0 ? -u_gap : u_gap) : U;
          const SpacetimePoint p{Uc, X, Y, 0.0};
          const SweepState st = ev.sweep(X, Y).state_at(Uc);
          const double vdot =
              fam.profile.eval(st.x.x, st.x.y) * ev.net().eval(ev.eps(), Uc) + st.c;
          const Vec4 cd = t_closed_du(fam.profile, p);
          return std::max({std::abs(st.xdot.x - cd[1]), std::abs(st.xdot.y - cd[2]),
                           std::abs(vdot - cd[3])});
        },
        u_axis);
    table.rows[m] = {ev.eps(), sup};
  });
  if (table.rows.size() >= 2) {
    std::vector<double> e, s;
    for (const auto& r : table.rows) {
      e.push_back(r.eps);
      s.push_back(std::max(r.sup, 1e-300));
    }
    table.fitted_slope = fit_loglog(e, s).slope;
  }
  return table;
}

// ---------------------------------------------------------------------------
// Hypothesis check for lifting derivative convergence to uniform convergence:
// (1) convergence on K x {c} with c < 0, (2) derivative convergence away from
// 0, (3) uniform boundedness of the derivative gap near 0.
// ---------------------------------------------------------------------------

struct GlmFamily {
  int base_dim = 0;  // dimension of the K box (all variables except the last)
  std::function<double(const std::vector<double>&, double, double)> value;  // (xbase, t, eps)
  std::function<double(const std::vector<double>&, double, double)> dt;    // d/dt
  std::function<double(const std::vector<double>&, double)> limit_value;
  std::function<double(const std::vector<double>&, double)> limit_dt;
};

struct GlmKonvReport {
  std::vector<double> eps;
  std::vector<double> cond1_sup;  // |f_eps - f| on K x {c}
  std::vector<double> cond2_sup;  // |d f_eps - d f| on the gapped region
  std::vector<double> cond3_sup;  // |d f_eps - d f| on K x ([-d,d] \ {0})
  double cond3_fitted_slope = 0.0;
  bool cond1_ok = false, cond2_ok = false, cond3_ok = false;
};

inline GlmKonvReport check_glm_konv_hypotheses(const GlmFamily& fam, const Box& K, double c,
                                               double d, const EpsSchedule& sched, int res = 17,
                                               double gap = 0.1, double final_tol = 1e-2) {
  if (!(c < 0.0)) throw domain_error("check_glm_konv_hypotheses: c must be negative");
  if (!(d > 0.0)) throw domain_error("check_glm_konv_hypotheses: d must be positive");
  sched.validate();
  if (static_cast<int>(K.dim()) != fam.base_dim)
    throw domain_error("check_glm_konv_hypotheses: K dimension mismatch");
  GlmKonvReport rep;
  std::vector<int> kgrid(K.dim(), res);

  // half-offset t grid never contains 0
  std::vector<double> t_near;
  for (int k = 0; k < res; ++k) {
    const double t = d * (k + 0.5) / res;
    t_near.push_back(t);
    t_near.push_back(-t);
  }
  std::vector<double> t_far;
  for (double t : t_near)
    if (std::abs(t) >= gap) t_far.push_back(t);

  for (double eps : sched.values) {
    double s1 = 0.0, s2 = 0.0, s3 = 0.0;
    for_each_grid_point(K, kgrid, [&](const std::vector<double>& x) {
      s1 = std::max(s1, std::abs(fam.value(x, c, eps) - fam.limit_value(x, c)));
      for (double t : t_far) s2 = std::max(s2, std::abs(fam.dt(x, t, eps) - fam.limit_dt(x, t)));
      for (double t : t_near) s3 = std::max(s3, std::abs(fam.dt(x, t, eps) - fam.limit_dt(x, t)));
    });
    rep.eps.push_back(eps);
    rep.cond1_sup.push_back(s1);
    rep.cond2_sup.push_back(s2);
    rep.cond3_sup.push_back(s3);
  }
  auto decreasing_to = [&](const std::vector<double>& v) {
    for (size_t i = 1; i < v.size(); ++i)
      if (v[i] > 1.1 * v[i - 1] + 1e-14) return false;
    return v.back() < final_tol;
  };
  rep.cond1_ok = decreasing_to(rep.cond1_sup);
  rep.cond2_ok = decreasing_to(rep.cond2_sup);
  std::vector<double> clamped;
  for (double v : rep.cond3_sup) clamped.push_back(std::max(v, 1e-300));
  rep.cond3_fitted_slope = fit_loglog(rep.eps, clamped).slope;
  rep.cond3_ok = rep.cond3_fitted_slope >= -0.1;
  return rep;
}

// The (w_eps, w) pair as a hypothesis-check family on (X, Y, U) with V = 0.
inline GlmFamily glm_family_w(const EvaluatorFamily& fam) {
  GlmFamily g;
  g.base_dim = 2;
  auto find = [fam](double eps) -> const TransformEvaluator& {
    for (size_t i = 0; i < fam.size(); ++i)
      if (fam.at(i).eps() == eps) return fam.at(i);
    throw domain_error("glm_family_w: eps not in family");
  };
  g.value = [fam, find](const std::vector<double>& x, double t, double eps) {
    return find(eps).w_eps({t, x[0], x[1], 0.0});
  };
  g.dt = [fam, find](const std::vector<double>& x, double t, double eps) {
    return find(eps).sweep(x[0], x[1]).state_at(t).c;  // d/dU w_eps
  };
  g.limit_value = [fam](const std::vector<double>& x, double t) {
    return w_closed(fam.profile, {t, x[0], x[1], 0.0});
  };
  g.limit_dt = [fam](const std::vector<double>& x, double t) {
    const Vec2 gr = fam.profile.grad(x[0], x[1]);
    return 0.25 * (gr.x * gr.x + gr.y * gr.y) * heaviside(t);
  };
  return g;
}

// ---------------------------------------------------------------------------
// Pullback of the regularized metric under t_eps against the continuous form.
// ---------------------------------------------------------------------------

struct PullbackResult {
  MetricComponents pulled;
  MetricComponents target;
  double max_abs_gap = 0.0;
};

inline PullbackResult pullback_check(const TransformEvaluator& ev, const SpacetimePoint& p) {
  if (!(std::abs(p.U) > ev.eps()))
    throw domain_error("pullback_check: |U| must exceed eps so the delta term vanishes");
  const JacobianSample js = ev.jacobian(p);
  const SpacetimePoint image = ev.t_eps(p);
  const MetricComponents reg = metric_regularized(ev.profile(), ev.net(), ev.eps(), image);
  PullbackResult res;
  res.pulled.g = transpose(js.J) * reg.g * js.J;
  res.target = metric_continuous(ev.profile(), p);
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j)
      res.max_abs_gap = std::max(res.max_abs_gap, std::abs(res.pulled.g(i, j) - res.target.g(i, j)));
  return res;
}

}  // namespace ppwave
