// Injectivity regions for the closed transformation, brute-force collision
// certification of injectivity slabs for the regularized family, and the
// principal-minor certificate that feeds the univalence argument.
#pragma once

#include <cmath>
#include <functional>
#include <optional>
#include <vector>

#include "ppwave/common.hpp"
#include "ppwave/transform.hpp"

namespace ppwave {

// ---------------------------------------------------------------------------
// Injectivity region W = { U < min(b_cap, 1/h(X,Y)) } where h(X,Y) is the
// supremum of || (1/2) Hess f || over the closed ball of radius |(X,Y)|.
// ---------------------------------------------------------------------------

struct InjectivityRegion {
  std::function<double(double, double)> h_eval;
  double b_cap = std::numeric_limits<double>::infinity();

  bool contains(double U, double X, double Y) const {
    const double h = h_eval(X, Y);
    const double cap = h > 0.0 ? std::min(b_cap, 1.0 / h) : b_cap;
    return U < cap;
  }
};

// Numeric envelope: dense polar sampling of the ball with one refinement pass
// around the maximizer.
inline double spectral_envelope(const WaveProfile& f, double X, double Y, int n_r = 33,
                                int n_theta = 65) {
  const double R = std::hypot(X, Y);
  auto norm_at = [&f](double x, double y) {
    const Hess2 h = f.hess(x, y);
    return spectral_norm_sym2(0.5 * h.xx, 0.5 * h.xy, 0.5 * h.yy);
  };
  double best = norm_at(0.0, 0.0);
  double br = 0.0, bt = 0.0;
  for (double r : linspace(0.0, R, n_r))
    for (double th : linspace(0.0, 2.0 * M_PI, n_theta)) {
      const double v = norm_at(r * std::cos(th), r * std::sin(th));
      if (v > best) {
        best = v;
        br = r;
        bt = th;
      }
    }
  const double dr = R / std::max(1, n_r - 1);
  const double dt = 2.0 * M_PI / (n_theta - 1);
  for (double r : linspace(std::max(0.0, br - dr), std::min(R, br + dr), 9))
    for (double th : linspace(bt - dt, bt + dt, 9))
      best = std::max(best, norm_at(r * std::cos(th), r * std::sin(th)));
  return best;
}

// use_analytic selects the closed-form envelope for the builtin profiles; the
// sampled envelope is always available for cross-checks.
inline InjectivityRegion injectivity_region(const WaveProfile& f, double b_cap,
                                            bool use_analytic = true) {
  InjectivityRegion reg;
  reg.b_cap = b_cap;
  if (use_analytic && f.name == "quadratic_saddle") {
    reg.h_eval = [](double, double) { return 1.0; };
    return reg;
  }
  if (use_analytic && f.name == "quartic_negative") {
    reg.h_eval = [](double X, double Y) { return 3.0 * (X * X + Y * Y); };
    return reg;
  }
  WaveProfile fc = f;
  reg.h_eval = [fc](double X, double Y) { return spectral_envelope(fc, X, Y); };
  return reg;
}

// ---------------------------------------------------------------------------
// Collision scans. Since the first image component is the parameter U itself,
// only points in the same U-slice can collide; the scan therefore groups by
// slice and compares spatial images pairwise.
// ---------------------------------------------------------------------------

struct CollisionPair {
  double eps = 0.0;  // 0 marks the closed map
  SpacetimePoint a, b;
  double image_dist = 0.0;
};

struct PropertyEOptions {
  double U_far = 2.0;
  int n_grid = 9;
  double sep_threshold = 1e-9;
  int threads = 1;
};

struct PropertyEResult {
  bool certified = false;
  double alpha = std::numeric_limits<double>::quiet_NaN();
  double eps0 = std::numeric_limits<double>::quiet_NaN();
  std::vector<double> admitted_eps;
  std::vector<CollisionPair> collisions;  // from the largest failing alpha, if any
};

namespace detail {

// Scans one U-slice of the spatial map; appends violating pairs.
inline void scan_slice(const std::vector<Vec2>& inputs, const std::vector<Vec2>& images, double U,
                       double eps_tag, double sep_threshold, std::vector<CollisionPair>& out) {
  for (size_t i = 0; i < images.size(); ++i)
    for (size_t j = i + 1; j < images.size(); ++j) {
      const double d = norm(images[i] - images[j]);
      if (d < sep_threshold)
        out.push_back({eps_tag,
                       {U, inputs[i].x, inputs[i].y, 0.0},
                       {U, inputs[j].x, inputs[j].y, 0.0},
                       d});
    }
}

}  // namespace detail

// Largest alpha from the search grid such that the spatial family (closed map
// included) shows no image collisions on (-U_far, alpha] x K x {0}. eps0 is
// the largest admitted eps from which the whole tail of the schedule passes.
inline PropertyEResult check_property_E(const EvaluatorFamily& fam, const Box& K,
                                        const std::vector<double>& alpha_search,
                                        const PropertyEOptions& opts = {}) {
  if (K.dim() != 2) throw domain_error("check_property_E: K must be 2d");
  PropertyEResult res;
  res.admitted_eps = fam.eps_values();
  if (res.admitted_eps.empty()) return res;

  std::vector<Vec2> xy;
  for (double X : linspace(K.lo[0], K.hi[0], opts.n_grid))
    for (double Y : linspace(K.lo[1], K.hi[1], opts.n_grid)) xy.push_back({X, Y});

  std::vector<double> alphas = alpha_search;
  std::sort(alphas.rbegin(), alphas.rend());

  for (double alpha : alphas) {
    std::vector<double> slices(static_cast<size_t>(opts.n_grid));
    for (int k = 0; k < opts.n_grid; ++k)
      slices[static_cast<size_t>(k)] =
          -opts.U_far + (alpha + opts.U_far) * (k + 1.0) / opts.n_grid;

    std::vector<CollisionPair> found;
    // closed map first: the shadow must be injective on the slab as well
    for (double U : slices) {
      std::vector<Vec2> images;
      images.reserve(xy.size());
      for (const Vec2& q : xy) {
        const SpacetimePoint t = t_closed(fam.profile, {U, q.x, q.y, 0.0});
        images.push_back({t.X, t.Y});
      }
      detail::scan_slice(xy, images, U, 0.0, opts.sep_threshold, found);
    }
    std::vector<char> eps_pass(fam.size(), 1);
    std::vector<std::vector<CollisionPair>> per_eps(fam.size());
    parallel_for(fam.size(), opts.threads, [&](size_t m) {
      std::vector<CollisionPair>& local = per_eps[m];
      for (double U : slices) {
        std::vector<Vec2> images;
        images.reserve(xy.size());
        for (const Vec2& q : xy) {
          const SpacetimePoint t = fam.at(m).t_eps({U, q.x, q.y, 0.0});
          images.push_back({t.X, t.Y});
        }
        detail::scan_slice(xy, images, U, fam.at(m).eps(), opts.sep_threshold, local);
      }
      if (!local.empty()) eps_pass[m] = 0;
    });
    for (const auto& local : per_eps) found.insert(found.end(), local.begin(), local.end());

    bool closed_ok = true;
    for (const auto& c : found)
      if (c.eps == 0.0) closed_ok = false;
    // largest eps0 whose whole tail passes
    std::optional<size_t> first_ok;
    for (size_t m = fam.size(); m-- > 0;) {
      if (!eps_pass[m]) break;
      first_ok = m;
    }
    if (closed_ok && first_ok) {
      res.certified = true;
      res.alpha = alpha;
      res.eps0 = fam.at(*first_ok).eps();
      res.collisions.clear();
      return res;
    }
    if (res.collisions.empty()) res.collisions = found;
  }
  return res;
}

// ---------------------------------------------------------------------------
// Principal-minor certificate: all four leading minors of D t_eps within
// (1-delta, 1+delta) on the sampled slab (-U_far, eta] x K for all admitted
// eps <= eps0.
// ---------------------------------------------------------------------------

struct MinorCertificateOptions {
  double U_far = 2.0;
  int n_u = 17;
  int n_xy = 9;
  std::vector<double> eta_grid = {0.5, 0.45, 0.4, 0.35, 0.3, 0.25, 0.2, 0.15, 0.1, 0.05};
  int threads = 1;
};

struct MinorCertificate {
  Box K;
  double delta = 0.0;
  bool certified = false;
  double eta = std::numeric_limits<double>::quiet_NaN();
  double eps0 = std::numeric_limits<double>::quiet_NaN();
  double worst_minor_deviation = 0.0;  // over the certified slab and schedule
};

inline MinorCertificate minor_certificate(const EvaluatorFamily& fam, const Box& K, double delta,
                                          const MinorCertificateOptions& opts = {}) {
  if (!(delta > 0.0 && delta < 1.0)) throw domain_error("minor_certificate: delta must be in (0,1)");
  MinorCertificate cert;
  cert.K = K;
  cert.delta = delta;
  if (fam.size() == 0) return cert;

  std::vector<Vec2> xy;
  for (double X : linspace(K.lo[0], K.hi[0], opts.n_xy))
    for (double Y : linspace(K.lo[1], K.hi[1], opts.n_xy)) xy.push_back({X, Y});

  std::vector<double> etas = opts.eta_grid;
  std::sort(etas.rbegin(), etas.rend());

  for (double eta : etas) {
    std::vector<double> deviations(fam.size(), 0.0);
    parallel_for(fam.size(), opts.threads, [&](size_t m) {
      double worst = 0.0;
      for (int k = 0; k < opts.n_u; ++k) {
        const double U = -opts.U_far + (eta + opts.U_far) * (k + 1.0) / opts.n_u;
        for (const Vec2& q : xy) {
          const JacobianSample js = fam.at(m).jacobian({U, q.x, q.y, 0.0});
          for (double mr : js.minors) worst = std::max(worst, std::abs(mr - 1.0));
        }
      }
      deviations[m] = worst;
    });
    std::optional<size_t> first_ok;
    for (size_t m = fam.size(); m-- > 0;) {
      if (!(deviations[m] < delta)) break;
      first_ok = m;
    }
    if (first_ok) {
      cert.certified = true;
      cert.eta = eta;
      cert.eps0 = fam.at(*first_ok).eps();
      double worst = 0.0;
      for (size_t m = *first_ok; m < fam.size(); ++m) worst = std::max(worst, deviations[m]);
      cert.worst_minor_deviation = worst;
      return cert;
    }
  }
  return cert;
}

}  // namespace ppwave
