// Numerical inversion of the regularized transformation: stability of image
// sets under small perturbations, construction of a domain box P and target
// cylinder Q with closure(Q) inside t_eps(P) for all small scheduled eps, and
// structured damped-Newton point inversion with composition certificates.
// The inverse is partial by design: it errors outside its certified domain
// instead of extending by a constant.
#pragma once

#include <cmath>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "ppwave/common.hpp"
#include "ppwave/injectivity.hpp"
#include "ppwave/transform.hpp"

namespace ppwave {

// ---------------------------------------------------------------------------
// Cylinders B_delta(first three components) x (center_V +- eta)
// ---------------------------------------------------------------------------

struct CylinderSet {
  SpacetimePoint center;
  double radius_spatial = 0.0;  // delta, for (U, X, Y)
  double half_height = 0.0;     // eta, for V

  bool valid() const { return radius_spatial > 0.0 && half_height > 0.0; }

  double margin_of(const SpacetimePoint& p) const {
    const double dr = std::sqrt((p.U - center.U) * (p.U - center.U) +
                                (p.X - center.X) * (p.X - center.X) +
                                (p.Y - center.Y) * (p.Y - center.Y));
    return std::min(radius_spatial - dr, half_height - std::abs(p.V - center.V));
  }

  bool contains(const SpacetimePoint& p, double margin = 0.0) const {
    return margin_of(p) > margin;
  }
};

// The domain box P = (-beta, gamma) x R x I.
struct DomainBoxP {
  double beta = 0.0, gamma = 0.0;
  Box R;  // 2d transverse box (open interior is used)
  double I_lo = 0.0, I_hi = 0.0;

  double margin_of(const SpacetimePoint& p) const {
    double m = std::min(p.U + beta, gamma - p.U);
    m = std::min(m, std::min(p.X - R.lo[0], R.hi[0] - p.X));
    m = std::min(m, std::min(p.Y - R.lo[1], R.hi[1] - p.Y));
    m = std::min(m, std::min(p.V - I_lo, I_hi - p.V));
    return m;
  }

  bool contains(const SpacetimePoint& p, double margin = 0.0) const {
    return margin_of(p) > margin;
  }
};

// ---------------------------------------------------------------------------
// Structured Newton inversion. The first component is copied, the transverse
// block is solved by damped Newton with the variational Jacobian, and V is
// recovered exactly from the affine structure.
// ---------------------------------------------------------------------------

class newton_failure : public numerical_error {
 public:
  newton_failure(const std::string& msg, const SpacetimePoint& last)
      : numerical_error(msg), last_iterate(last) {}
  SpacetimePoint last_iterate;
};

struct NewtonOptions {
  double tol = 1e-11;       // on the spatial residual
  int max_iter = 40;
  double det_floor = 1e-8;  // singularity guard at the seed and iterates
  std::optional<Box> trust_xy;  // iterates must remain inside when present
};

inline SpacetimePoint newton_invert(const TransformEvaluator& ev, const SpacetimePoint& q,
                                    const SpacetimePoint& seed, const NewtonOptions& opts = {}) {
  if (q.U <= -ev.eps()) return q;  // identity region
  double X = seed.X, Y = seed.Y;
  const double U = q.U;

  auto spatial = [&](double x, double y) -> Vec2 {
    const SweepState st = ev.sweep(x, y).state_at(U);
    return {st.x.x - q.X, st.x.y - q.Y};
  };
  auto spatial_jac = [&](double x, double y) -> Mat2 {
    const SweepState st = ev.sweep(x, y).state_at(U);
    return {st.Dx[0], st.Dx[1], st.Dx[2], st.Dx[3]};
  };

  {
    const Mat2 J0 = spatial_jac(X, Y);
    if (std::abs(det(J0)) <= opts.det_floor)
      throw newton_failure("newton_invert: singular jacobian at seed (|det|=" +
                               format_g17(std::abs(det(J0))) + ")",
                           {U, X, Y, q.V});
  }

  // A candidate is admissible when it stays inside the trust region and the
  // evaluator accepts it; stepping outside counts as a failed step.
  auto admissible = [&](double x, double y) {
    return !opts.trust_xy || opts.trust_xy->contains({x, y});
  };
  if (!admissible(X, Y))
    throw newton_failure("newton_invert: seed outside the trust region", {U, X, Y, q.V});

  Vec2 r = spatial(X, Y);
  double rn = norm(r);
  int it = 0;
  for (; it < opts.max_iter && rn > opts.tol; ++it) {
    const Mat2 J = spatial_jac(X, Y);
    if (std::abs(det(J)) <= opts.det_floor)
      throw newton_failure("newton_invert: singular jacobian at iterate", {U, X, Y, q.V});
    const Vec2 step = solve(J, {-r.x, -r.y});
    double t = 1.0;
    double nX = X, nY = Y, nrn = rn;
    bool improved = false;
    for (int halve = 0; halve < 12; ++halve) {
      const double cX = X + t * step.x;
      const double cY = Y + t * step.y;
      if (admissible(cX, cY)) {
        try {
          const Vec2 cr = spatial(cX, cY);
          const double crn = norm(cr);
          if (crn < rn) {
            nX = cX;
            nY = cY;
            r = cr;
            nrn = crn;
            improved = true;
            break;
          }
        } catch (const domain_error&) {
          // candidate outside the admissible transverse domain
        }
      }
      t *= 0.5;
    }
    if (!improved)
      throw newton_failure("newton_invert: no admissible residual decrease (last residual " +
                               format_g17(rn) + ")",
                           {U, X, Y, q.V});
    X = nX;
    Y = nY;
    rn = nrn;
  }
  if (rn > opts.tol)
    throw newton_failure("newton_invert: max iterations exceeded (residual " + format_g17(rn) + ")",
                         {U, X, Y, q.V});
  const double V = q.V - ev.v_offset(U, X, Y);
  return {U, X, Y, V};
}

// Closed-form transverse inverse used for Newton seeding: solves the shadow
// map's spatial block for a target, starting from the target itself.
inline std::optional<SpacetimePoint> invert_closed(const WaveProfile& f, const SpacetimePoint& q,
                                                   double tol = 1e-12, int max_iter = 60) {
  double X = q.X, Y = q.Y;
  const double up = u_plus(q.U);
  for (int it = 0; it < max_iter; ++it) {
    const Vec2 g = f.grad(X, Y);
    const Vec2 r{X + 0.5 * g.x * up - q.X, Y + 0.5 * g.y * up - q.Y};
    if (norm(r) <= tol) {
      const SpacetimePoint img = t_closed(f, {q.U, X, Y, 0.0});
      return SpacetimePoint{q.U, X, Y, q.V - img.V};
    }
    const Hess2 h = f.hess(X, Y);
    const Mat2 J{1.0 + 0.5 * h.xx * up, 0.5 * h.xy * up, 0.5 * h.xy * up, 1.0 + 0.5 * h.yy * up};
    if (std::abs(det(J)) < 1e-12) return std::nullopt;
    const Vec2 step = solve(J, {-r.x, -r.y});
    X += step.x;
    Y += step.y;
  }
  return std::nullopt;
}

// Same, for the split map s (V recovered against w instead of v).
inline std::optional<SpacetimePoint> invert_s_closed(const WaveProfile& f, const SpacetimePoint& q,
                                                     double tol = 1e-12, int max_iter = 60) {
  auto sol = invert_closed(f, q, tol, max_iter);
  if (!sol) return std::nullopt;
  sol->V = q.V - w_closed(f, {q.U, sol->X, sol->Y, 0.0});
  return sol;
}

// ---------------------------------------------------------------------------
// Stability of image sets: if g stays within (delta, eta) of an injective f
// in the split sup-norms on A = f^{-1}(closure(W_{delta,eta})), then
// closure(W) lies in the interior of g(A). Checked on sampled grids; Newton
// divergence on a target is reported as an inclusion failure, not thrown.
// ---------------------------------------------------------------------------

struct StabilityInstance {
  int dim = 0;
  std::function<std::vector<double>(const std::vector<double>&)> f, g;
  std::function<std::optional<std::vector<double>>(const std::vector<double>&)> f_solve;
  std::function<std::optional<std::vector<double>>(const std::vector<double>&,
                                                   const std::vector<double>&)>
      g_solve;  // (target, seed)
  std::vector<std::vector<double>> W_grid;  // samples of closure(W)
  std::vector<std::vector<double>> A_grid;  // samples of A
  std::function<double(const std::vector<double>&)> A_margin;  // > 0 strictly inside A
  double delta = 0.0, eta = 0.0;
};

struct StabilityReport {
  bool pre_ok = false;          // f injective on samples, W solvable under f
  bool hypotheses_ok = false;   // split sup-norm bounds
  bool inclusion_ok = false;    // every W sample attained by g from inside A
  bool conclusion_claimed = false;
  double sup_hat = 0.0;   // sup |g_hat - f_hat| over A
  double sup_last = 0.0;  // sup |g_n - f_n| over A
  double margin = std::numeric_limits<double>::infinity();  // min interior margin of solutions
  std::vector<std::vector<double>> failures;                // unattained targets
};

inline StabilityReport stability_check(const StabilityInstance& inst,
                                       double newton_residual_tol = 1e-10) {
  StabilityReport rep;
  const int n = inst.dim;
  auto split_norms = [n](const std::vector<double>& a, const std::vector<double>& b) {
    double hat = 0.0;
    for (int i = 0; i < n - 1; ++i) hat += (a[static_cast<size_t>(i)] - b[static_cast<size_t>(i)]) *
                                           (a[static_cast<size_t>(i)] - b[static_cast<size_t>(i)]);
    return std::pair<double, double>{std::sqrt(hat),
                                     std::abs(a[static_cast<size_t>(n - 1)] - b[static_cast<size_t>(n - 1)])};
  };

  // pre-check: injectivity of f on the A samples, and solvability of W under f
  rep.pre_ok = true;
  std::vector<std::vector<double>> fimg;
  fimg.reserve(inst.A_grid.size());
  for (const auto& x : inst.A_grid) fimg.push_back(inst.f(x));
  for (size_t i = 0; i < fimg.size() && rep.pre_ok; ++i)
    for (size_t j = i + 1; j < fimg.size(); ++j) {
      double d2 = 0.0, din = 0.0;
      for (int c = 0; c < n; ++c) {
        d2 += (fimg[i][static_cast<size_t>(c)] - fimg[j][static_cast<size_t>(c)]) *
              (fimg[i][static_cast<size_t>(c)] - fimg[j][static_cast<size_t>(c)]);
        din += (inst.A_grid[i][static_cast<size_t>(c)] - inst.A_grid[j][static_cast<size_t>(c)]) *
               (inst.A_grid[i][static_cast<size_t>(c)] - inst.A_grid[j][static_cast<size_t>(c)]);
      }
      if (d2 < 1e-18 && din > 1e-18) {
        rep.pre_ok = false;
        break;
      }
    }
  for (const auto& w : inst.W_grid) {
    if (!inst.f_solve(w)) {
      rep.pre_ok = false;
      break;
    }
  }

  for (const auto& x : inst.A_grid) {
    const auto [h, l] = split_norms(inst.g(x), inst.f(x));
    rep.sup_hat = std::max(rep.sup_hat, h);
    rep.sup_last = std::max(rep.sup_last, l);
  }
  rep.hypotheses_ok = rep.pre_ok && rep.sup_hat < inst.delta && rep.sup_last < inst.eta;
  if (!rep.hypotheses_ok) return rep;  // conclusion not claimed

  rep.inclusion_ok = true;
  for (const auto& w : inst.W_grid) {
    const auto seed = inst.f_solve(w);
    std::optional<std::vector<double>> x = seed ? inst.g_solve(w, *seed) : std::nullopt;
    bool ok = false;
    if (x) {
      const auto gx = inst.g(*x);
      double res2 = 0.0;
      for (int c = 0; c < n; ++c)
        res2 += (gx[static_cast<size_t>(c)] - w[static_cast<size_t>(c)]) *
                (gx[static_cast<size_t>(c)] - w[static_cast<size_t>(c)]);
      const double m = inst.A_margin(*x);
      if (std::sqrt(res2) < newton_residual_tol && m > 0.0) {
        ok = true;
        rep.margin = std::min(rep.margin, m);
      }
    }
    if (!ok) {
      rep.inclusion_ok = false;
      rep.failures.push_back(w);
    }
  }
  rep.conclusion_claimed = rep.hypotheses_ok && rep.inclusion_ok;
  return rep;
}

// ---------------------------------------------------------------------------
// Inversion data: P, Q, the certified eps0 and the anchors.
// ---------------------------------------------------------------------------

struct InversionData {
  DomainBoxP P;
  CylinderSet Q;
  double eps0 = std::numeric_limits<double>::quiet_NaN();
  SpacetimePoint anchor_p, anchor_q;
  double delta = 0.0, eta = 0.0;
  double certified_alpha = 0.0;  // injectivity certificate feeding gamma
  std::vector<double> certified_eps;  // scheduled eps <= eps0 that passed
};

struct InversionOptions {
  double lambda = 0.2;          // enlargement of R for the injectivity scan
  double gamma_factor = 0.9;    // gamma = gamma_factor * certified alpha (capped by beta)
  double eta_safety = 1.1;      // eta exceeds the sampled sup by this factor
  std::vector<double> delta_grid = {0.3, 0.25, 0.2, 0.15, 0.125, 0.1, 0.075, 0.05, 0.025};
  int sphere_res = 8;           // latitude bands on sampled ball shells
  int cylinder_res = 4;         // shells / V-levels on sampled cylinders
  double inclusion_margin = 1e-9;
  double newton_residual = 1e-8;  // certification threshold
  PropertyEOptions property_e;
  int threads = 1;
};

class constructive_failure : public numerical_error {
 public:
  explicit constructive_failure(const std::string& msg) : numerical_error(msg) {}
};

namespace detail {

// Sample points of a solid ball in R^3 (shells of latitude/longitude plus the
// centre); the outermost shell carries the boundary.
inline std::vector<Vec4> ball3_samples(double cU, double cX, double cY, double radius, int bands) {
  std::vector<Vec4> pts;
  pts.push_back({cU, cX, cY, 0.0});
  for (int shell = 1; shell <= 3; ++shell) {
    const double r = radius * shell / 3.0;
    for (int i = 0; i <= bands; ++i) {
      const double th = M_PI * i / bands;
      const int nphi = std::max(1, static_cast<int>(std::lround(2.0 * bands * std::sin(th))) + 1);
      for (int j = 0; j < nphi; ++j) {
        const double ph = 2.0 * M_PI * j / nphi;
        pts.push_back({cU + r * std::cos(th), cX + r * std::sin(th) * std::cos(ph),
                       cY + r * std::sin(th) * std::sin(ph), 0.0});
      }
    }
  }
  return pts;
}

inline std::vector<SpacetimePoint> cylinder_samples(const CylinderSet& c, int res) {
  std::vector<SpacetimePoint> pts;
  const auto shells = ball3_samples(c.center.U, c.center.X, c.center.Y, c.radius_spatial, 2 * res);
  for (double v : linspace(c.center.V - c.half_height, c.center.V + c.half_height, 2 * res + 1))
    for (const auto& s : shells) pts.push_back({s[0], s[1], s[2], v});
  return pts;
}

}  // namespace detail

// Builds P = (-beta, gamma) x R x I around an anchor on the shock plane and a
// cylinder Q around its split image, then certifies closure(Q) inside
// t_eps(P) per scheduled eps through the stability check plus Newton
// inversion of a Q grid. Constructive failures name the violated inclusion.
inline InversionData build_inversion_data(const EvaluatorFamily& fam, const SpacetimePoint& p,
                                          const Box& R_box, double beta,
                                          const std::pair<double, double>& I,
                                          const InversionOptions& opts = {}) {
  if (std::abs(p.U) > 1e-12)
    throw domain_error("build_inversion_data: anchor must lie on the hyperplane U = 0");
  if (R_box.dim() != 2) throw domain_error("build_inversion_data: R must be 2d");
  if (!R_box.contains({p.X, p.Y}))
    throw domain_error("build_inversion_data: R must contain the anchor's transverse part");
  if (!(beta > 0.0)) throw domain_error("build_inversion_data: beta must be positive");
  if (!(I.first < p.V && p.V < I.second))
    throw domain_error("build_inversion_data: I must contain the anchor's V");
  if (fam.size() == 0) throw domain_error("build_inversion_data: empty evaluator family");

  const WaveProfile& f = fam.profile;
  const SpacetimePoint q = s_closed(f, p);

  // gamma from the certified injectivity slab on the enlarged box
  const Box R_lambda = R_box.inflated(opts.lambda);
  std::vector<double> alpha_search;
  for (int k = 18; k >= 1; --k) alpha_search.push_back(0.05 * k);
  const PropertyEResult prop_e = check_property_E(fam, R_lambda, alpha_search, opts.property_e);
  if (!prop_e.certified)
    throw constructive_failure("build_inversion_data: no injectivity slab certified over R_lambda");
  const double gamma = std::min(opts.gamma_factor * prop_e.alpha, beta);

  // the split closed map must be solvable on cylinders around q; helper for
  // pulling back samples
  auto pull_back = [&](const Vec4& w) -> std::optional<SpacetimePoint> {
    if (!(w[0] > -beta && w[0] < gamma)) return std::nullopt;
    auto sol = invert_s_closed(f, {w[0], w[1], w[2], 0.0});
    if (!sol) return std::nullopt;
    if (!R_box.contains({sol->X, sol->Y}, opts.inclusion_margin)) return std::nullopt;
    return sol;
  };

  // delta search: largest grid value whose 3-ball pulls back into
  // (-beta,gamma) x R and whose induced V-range fits inside I
  double delta = 0.0, eta = 0.0;
  std::string failure = "delta grid exhausted";
  std::vector<double> dgrid = opts.delta_grid;
  std::sort(dgrid.rbegin(), dgrid.rend());
  bool found = false;
  for (double d : dgrid) {
    // inclusion: closed ball of radius 3 delta around q_hat inside
    // s_hat((-beta,gamma) x R)
    const auto ball3d = detail::ball3_samples(q.U, q.X, q.Y, 3.0 * d, opts.sphere_res);
    bool ok = true;
    for (const auto& w : ball3d)
      if (!pull_back(w)) {
        ok = false;
        failure = "B_{3delta}(q_hat) not contained in s_hat((-beta,gamma) x R) at delta=" +
                  format_g17(d);
        break;
      }
    if (!ok) continue;

    // eta from the sampled sup of |v_eps - w| over the pullback of the
    // 2-delta ball (the region entering the stability hypothesis),
    // max over the schedule
    double sup_gap = 0.0;
    const auto ball2d = detail::ball3_samples(q.U, q.X, q.Y, 2.0 * d, opts.sphere_res);
    for (size_t m = 0; m < fam.size(); ++m)
      for (const auto& w : ball2d) {
        const auto x = pull_back(w);
        if (!x) continue;
        const SpacetimePoint pt{x->U, x->X, x->Y, 0.0};
        sup_gap = std::max(sup_gap,
                           std::abs(fam.at(m).t_eps(pt).V - w_closed(f, pt)));
      }
    const double e = std::max(d, opts.eta_safety * sup_gap);

    // V-inclusion: the pullback of the (3 delta, 2 eta + delta) cylinder must
    // keep V inside I
    ok = true;
    for (const auto& w : ball3d) {
      const auto x = pull_back(w);
      if (!x) continue;
      const double off = w_closed(f, {x->U, x->X, x->Y, 0.0});
      const double v_lo = q.V - (2.0 * e + d) - off;
      const double v_hi = q.V + (2.0 * e + d) - off;
      if (v_lo < I.first + opts.inclusion_margin || v_hi > I.second - opts.inclusion_margin) {
        ok = false;
        failure = "I too small: pullback of B^Z_{3delta,2eta+delta}(q) escapes I at delta=" +
                  format_g17(d) + " (needs [" + format_g17(v_lo) + "," + format_g17(v_hi) + "])";
        break;
      }
    }
    if (!ok) continue;
    delta = d;
    eta = e;
    found = true;
    break;
  }
  if (!found) throw constructive_failure("build_inversion_data: " + failure);

  InversionData data;
  data.P = DomainBoxP{beta, gamma, R_box, I.first, I.second};
  data.Q = CylinderSet{q, delta, eta};
  data.anchor_p = p;
  data.anchor_q = q;
  data.delta = delta;
  data.eta = eta;
  data.certified_alpha = prop_e.alpha;

  // per-eps certification: stability gate with (s_closed, t_eps) in the roles
  // of (f, g), targets on a Q grid, inverses required interior to A and P
  const CylinderSet A_cyl{q, 2.0 * delta, 2.0 * eta};  // image-space description of A
  const auto W_samples = detail::cylinder_samples(data.Q, opts.cylinder_res);
  const auto A_samples_img = detail::cylinder_samples(A_cyl, opts.cylinder_res);

  std::vector<std::vector<double>> W_grid, A_grid;
  for (const auto& w : W_samples) W_grid.push_back({w.U, w.X, w.Y, w.V});
  for (const auto& a : A_samples_img) {
    auto x = invert_s_closed(f, a);
    if (!x) throw constructive_failure("build_inversion_data: A sample not solvable under s");
    A_grid.push_back({x->U, x->X, x->Y, x->V});
  }

  std::vector<char> eps_ok(fam.size(), 0);
  for (size_t m = 0; m < fam.size(); ++m) {
    const TransformEvaluator& ev = fam.at(m);
    StabilityInstance inst;
    inst.dim = 4;
    inst.f = [&f](const std::vector<double>& x) {
      const SpacetimePoint r = s_closed(f, {x[0], x[1], x[2], x[3]});
      return std::vector<double>{r.U, r.X, r.Y, r.V};
    };
    inst.g = [&ev](const std::vector<double>& x) {
      const SpacetimePoint r = ev.t_eps({x[0], x[1], x[2], x[3]});
      return std::vector<double>{r.U, r.X, r.Y, r.V};
    };
    inst.f_solve = [&f](const std::vector<double>& w) -> std::optional<std::vector<double>> {
      auto sol = invert_s_closed(f, {w[0], w[1], w[2], w[3]});
      if (!sol) return std::nullopt;
      return std::vector<double>{sol->U, sol->X, sol->Y, sol->V};
    };
    inst.g_solve = [&ev](const std::vector<double>& w, const std::vector<double>& seed)
        -> std::optional<std::vector<double>> {
      try {
        const SpacetimePoint r =
            newton_invert(ev, {w[0], w[1], w[2], w[3]}, {seed[0], seed[1], seed[2], seed[3]});
        return std::vector<double>{r.U, r.X, r.Y, r.V};
      } catch (const numerical_error&) {
        return std::nullopt;
      }
    };
    inst.W_grid = W_grid;
    inst.A_grid = A_grid;
    inst.A_margin = [&f, &A_cyl](const std::vector<double>& x) {
      return A_cyl.margin_of(s_closed(f, {x[0], x[1], x[2], x[3]}));
    };
    inst.delta = delta;
    inst.eta = eta;
    const StabilityReport rep = stability_check(inst, opts.newton_residual);
    if (!rep.conclusion_claimed) continue;

    // the recovered preimages must land inside P
    bool inside = true;
    for (const auto& w : W_grid) {
      const auto seed = inst.f_solve(w);
      const auto x = seed ? inst.g_solve(w, *seed) : std::nullopt;
      if (!x || !data.P.contains({(*x)[0], (*x)[1], (*x)[2], (*x)[3]})) {
        inside = false;
        break;
      }
    }
    if (inside) eps_ok[m] = 1;
  }

  std::optional<size_t> first_ok;
  for (size_t m = fam.size(); m-- > 0;) {
    if (!eps_ok[m]) break;
    first_ok = m;
  }
  if (!first_ok)
    throw constructive_failure(
        "build_inversion_data: no scheduled eps certified the inclusion closure(Q) in t_eps(P)");
  data.eps0 = fam.at(*first_ok).eps();
  for (size_t m = *first_ok; m < fam.size(); ++m) data.certified_eps.push_back(fam.at(m).eps());
  return data;
}

// ---------------------------------------------------------------------------
// Composition residuals over the certified data, per scheduled eps <= eps0.
// ---------------------------------------------------------------------------

struct CompositionReport {
  std::vector<double> eps;
  std::vector<double> forward_residual;    // max |t(t^{-1}(q)) - q| on the Q grid
  std::vector<double> roundtrip_residual;  // max |t^{-1}(t(p)) - p| on the A grid
};

inline CompositionReport composition_residuals(const InversionData& data,
                                               const EvaluatorFamily& fam,
                                               const InversionOptions& opts = {}) {
  CompositionReport rep;
  const auto q_samples = detail::cylinder_samples(data.Q, opts.cylinder_res);
  const CylinderSet A_cyl{data.anchor_q, 2.0 * data.delta, 2.0 * data.eta};
  const auto a_samples_img = detail::cylinder_samples(A_cyl, opts.cylinder_res);
  std::vector<SpacetimePoint> a_samples;
  for (const auto& a : a_samples_img) {
    auto x = invert_s_closed(fam.profile, a);
    if (x) a_samples.push_back(*x);
  }
  for (size_t m = 0; m < fam.size(); ++m) {
    const TransformEvaluator& ev = fam.at(m);
    if (ev.eps() > data.eps0) continue;
    double fwd = 0.0, rt = 0.0;
    for (const auto& qs : q_samples) {
      const auto seed = invert_s_closed(fam.profile, qs);
      if (!seed) continue;
      const SpacetimePoint pr = newton_invert(ev, qs, *seed);
      fwd = std::max(fwd, norm(ev.t_eps(pr) - qs));
    }
    for (const auto& ps : a_samples) {
      const SpacetimePoint img = ev.t_eps(ps);
      const auto seed = invert_closed(fam.profile, img);
      if (!seed) continue;
      const SpacetimePoint back = newton_invert(ev, img, *seed);
      rt = std::max(rt, norm(back - ps));
    }
    rep.eps.push_back(ev.eps());
    rep.forward_residual.push_back(fwd);
    rep.roundtrip_residual.push_back(rt);
  }
  return rep;
}

}  // namespace ppwave
