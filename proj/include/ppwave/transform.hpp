// The regularized coordinate transformation t_eps on R^4, its closed-form
// shadow t, the auxiliary split maps s_eps / s / w, and the variational
// Jacobian. t_eps fixes the first coordinate, acts on (X,Y) through the
// zero-initial-speed geodesic, and is affine in V with unit coefficient.
#pragma once

#include <map>
#include <memory>
#include <shared_mutex>
#include <utility>

#include "ppwave/common.hpp"
#include "ppwave/delta_nets.hpp"
#include "ppwave/geodesics.hpp"
#include "ppwave/profiles.hpp"

namespace ppwave {

// ---------------------------------------------------------------------------
// Closed forms (pointwise shadows; H(0) = 0 by convention)
// ---------------------------------------------------------------------------

inline SpacetimePoint t_closed(const WaveProfile& f, const SpacetimePoint& p) {
  const Vec2 g = f.grad(p.X, p.Y);
  const double up = u_plus(p.U);
  return {p.U, p.X + 0.5 * g.x * up, p.Y + 0.5 * g.y * up,
          p.V + f.eval(p.X, p.Y) * heaviside(p.U) + 0.25 * (g.x * g.x + g.y * g.y) * up};
}

inline double w_closed(const WaveProfile& f, const SpacetimePoint& p) {
  const Vec2 g = f.grad(p.X, p.Y);
  return p.V + 0.25 * (g.x * g.x + g.y * g.y) * u_plus(p.U);
}

inline SpacetimePoint s_closed(const WaveProfile& f, const SpacetimePoint& p) {
  const SpacetimePoint t = t_closed(f, p);
  return {t.U, t.X, t.Y, w_closed(f, p)};
}

// d/dU of the closed transformation, valid off the shock plane U = 0.
inline Vec4 t_closed_du(const WaveProfile& f, const SpacetimePoint& p) {
  const Vec2 g = f.grad(p.X, p.Y);
  const double H = heaviside(p.U);
  return {1.0, 0.5 * g.x * H, 0.5 * g.y * H, 0.25 * (g.x * g.x + g.y * g.y) * H};
}

struct JacobianSample {
  Mat4 J;
  std::array<double, 4> minors{};  // leading principal minors
};

// ---------------------------------------------------------------------------
// Evaluator: one geodesic sweep per transverse point (X,Y), memoized behind a
// shared mutex so concurrent evaluations at distinct points proceed.
// ---------------------------------------------------------------------------

class TransformEvaluator {
 public:
  TransformEvaluator(WaveProfile f, StrictDeltaNet net, double eps, int steps_per_eps,
                     Box domain_xy)
      : f_(std::move(f)),
        net_(std::move(net)),
        eps_(eps),
        steps_(steps_per_eps),
        domain_xy_(std::move(domain_xy)) {
    if (domain_xy_.dim() != 2) throw domain_error("transform evaluator: domain box must be 2d");
    if (!(eps > 0.0)) throw domain_error("transform evaluator: eps must be positive");
    if (steps_per_eps < 64) throw domain_error("transform evaluator: steps_per_eps must be >= 64");
    eps_K_ = geodesic_eps_threshold(f_, net_, domain_xy_, 0.0);
    if (eps_ > eps_K_)
      throw domain_error("transform evaluator: eps=" + format_g17(eps_) +
                         " exceeds admission threshold eps_K=" + format_g17(eps_K_) +
                         " for the domain box");
  }

  double eps() const { return eps_; }
  double eps_threshold() const { return eps_K_; }
  const WaveProfile& profile() const { return f_; }
  const StrictDeltaNet& net() const { return net_; }
  const Box& domain() const { return domain_xy_; }

  SpacetimePoint t_eps(const SpacetimePoint& p) const {
    if (p.U <= -eps_) return p;  // identity below the support
    const GeodesicSweep& sw = sweep(p.X, p.Y);
    const SweepState st = sw.state_at(p.U);
    return {p.U, st.x.x, st.x.y, p.V + (st.A + st.B)};
  }

  SpacetimePoint s_eps(const SpacetimePoint& p) const {
    if (p.U <= -eps_) return p;
    const GeodesicSweep& sw = sweep(p.X, p.Y);
    const SweepState st = sw.state_at(p.U);
    return {p.U, st.x.x, st.x.y, p.V + st.B};
  }

  double w_eps(const SpacetimePoint& p) const { return s_eps(p).V; }

  // The term separating t_eps from s_eps: int_{-eps}^{U} f(x_eps) delta_eps.
  double h_eps(const SpacetimePoint& p) const {
    if (p.U <= -eps_) return 0.0;
    return sweep(p.X, p.Y).state_at(p.U).A;
  }

  // V-offset of the fourth component: t_eps(p).V = p.V + v_offset(U,X,Y).
  double v_offset(double U, double X, double Y) const {
    if (U <= -eps_) return 0.0;
    const SweepState st = sweep(X, Y).state_at(U);
    return st.A + st.B;
  }

  JacobianSample jacobian(const SpacetimePoint& p) const {
    JacobianSample js;
    if (p.U <= -eps_) {
      js.J = Mat4::identity();
      js.minors = {1.0, 1.0, 1.0, 1.0};
      return js;
    }
    const GeodesicSweep& sw = sweep(p.X, p.Y);
    const SweepState st = sw.state_at(p.U);
    Mat4& J = js.J;
    J(0, 0) = 1.0;
    J(1, 0) = st.xdot.x;
    J(2, 0) = st.xdot.y;
    J(1, 1) = st.Dx[0];
    J(1, 2) = st.Dx[1];
    J(2, 1) = st.Dx[2];
    J(2, 2) = st.Dx[3];
    J(3, 0) = f_.eval(st.x.x, st.x.y) * net_.eval(eps_, p.U) + st.c;
    J(3, 1) = st.dA[0] + st.dB[0];
    J(3, 2) = st.dA[1] + st.dB[1];
    J(3, 3) = 1.0;
    js.minors = principal_minors(J);
    return js;
  }

  // Memoized sweep for one transverse point; admission is re-checked for
  // points outside the construction-time domain box.
  const GeodesicSweep& sweep(double X, double Y) const {
    const std::pair<double, double> key{X, Y};
    {
      std::shared_lock lk(mu_);
      auto it = cache_.find(key);
      if (it != cache_.end()) return *it->second;
    }
    std::vector<double> xy{X, Y};
    if (!domain_xy_.contains(xy)) {
      const Box here(xy, xy);
      const double thr = geodesic_eps_threshold(f_, net_, here, 0.0);
      if (eps_ > thr)
        throw domain_error("transform evaluator: point (" + format_g17(X) + "," + format_g17(Y) +
                           ") outside domain box and eps exceeds its threshold " + format_g17(thr));
    }
    auto sw = std::make_shared<GeodesicSweep>(f_, net_, eps_,
                                              InitialData{{X, Y}, {0.0, 0.0}, 0.0, 0.0}, steps_);
    std::unique_lock lk(mu_);
    return *cache_.emplace(key, std::move(sw)).first->second;
  }

 private:
  WaveProfile f_;
  StrictDeltaNet net_;
  double eps_;
  int steps_;
  Box domain_xy_;
  double eps_K_ = 0.0;
  mutable std::shared_mutex mu_;
  mutable std::map<std::pair<double, double>, std::shared_ptr<const GeodesicSweep>> cache_;
};

// A schedule of evaluators sharing profile/net/domain. Scheduled eps values
// above the admission threshold of the domain box are skipped and recorded.
struct EvaluatorFamily {
  WaveProfile profile;
  StrictDeltaNet net;
  Box domain_xy;
  int steps_per_eps = 64;
  std::vector<std::shared_ptr<TransformEvaluator>> members;  // decreasing eps
  std::vector<double> skipped_eps;
  double eps_threshold = 0.0;

  const TransformEvaluator& at(size_t i) const { return *members[i]; }
  size_t size() const { return members.size(); }
  std::vector<double> eps_values() const {
    std::vector<double> v;
    for (const auto& m : members) v.push_back(m->eps());
    return v;
  }
};

inline EvaluatorFamily make_family(const WaveProfile& f, const StrictDeltaNet& net,
                                   const EpsSchedule& sched, int steps_per_eps,
                                   const Box& domain_xy) {
  sched.validate();
  EvaluatorFamily fam;
  fam.profile = f;
  fam.net = net;
  fam.domain_xy = domain_xy;
  fam.steps_per_eps = steps_per_eps;
  fam.eps_threshold = geodesic_eps_threshold(f, net, domain_xy, 0.0);
  for (double eps : sched.values) {
    if (eps > fam.eps_threshold) {
      fam.skipped_eps.push_back(eps);
      continue;
    }
    fam.members.push_back(
        std::make_shared<TransformEvaluator>(f, net, eps, steps_per_eps, domain_xy));
  }
  return fam;
}

}  // namespace ppwave
