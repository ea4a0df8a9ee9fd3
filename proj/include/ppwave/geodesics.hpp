// Geodesics of the regularized impulsive pp-wave metric. The transverse
// system  x'' = (1/2) grad f(x) delta_eps(u)  is integrated by classical RK4
// on [-eps, eps] with a fixed step tied to eps; outside the mollifier support
// the motion is free and assembled in closed form. The v component is
// recovered from its integral representation
//   v(u) = v0 + v0'(u+1) + int f(x) delta_eps + int int sum_i d_i f(x) x_i' delta_eps,
// so the derivative of the mollifier is never evaluated. First-order
// variational data with respect to the transverse initial position is
// co-integrated on the same grid.
#pragma once

#include <cmath>
#include <cstring>
#include <string>
#include <vector>

#include "ppwave/common.hpp"
#include "ppwave/delta_nets.hpp"
#include "ppwave/profiles.hpp"

namespace ppwave {

struct InitialData {
  Vec2 x0{};
  Vec2 xdot0{};
  double v0 = 0.0;
  double vdot0 = 0.0;
};

// ---------------------------------------------------------------------------
// Existence bound: alpha = min( b / (C ||g|| + |x0'|), 1/(2 L C), 1 ) on the
// ball I of radius b + |x0'| + Q around the initial position. Solutions are
// global once eps <= alpha/2, which is the admission threshold used below.
// ---------------------------------------------------------------------------

struct ExistenceBound {
  double b = 0.0;
  double I_radius = 0.0;
  double L = 0.0;
  double alpha = 0.0;
  double Q = 0.0;
};

inline ExistenceBound existence_bound(double g_sup, double g_lip, double xdot0_norm, double b,
                                      double C, double Q) {
  if (!(b > 0.0)) throw domain_error("existence_bound: b must be positive");
  if (!(C > 0.0)) throw domain_error("existence_bound: C must be positive");
  if (g_lip < 0.0) throw domain_error("existence_bound: Lipschitz constant must be >= 0");
  const double inf = std::numeric_limits<double>::infinity();
  const double denom1 = C * g_sup + xdot0_norm;
  const double cand1 = denom1 > 0.0 ? b / denom1 : inf;
  const double cand2 = g_lip > 0.0 ? 1.0 / (2.0 * g_lip * C) : inf;
  ExistenceBound e;
  e.b = b;
  e.Q = Q;
  e.I_radius = b + xdot0_norm + Q;
  e.L = g_lip;
  e.alpha = std::min({cand1, cand2, 1.0});
  return e;
}

// Evaluates the bound for g = (1/2) grad f over a compact box of transverse
// initial positions: ||g|| and its Lipschitz constant are grid maxima over
// the bounding box of K enlarged by the ball radius (a superset of I(K), so
// the resulting alpha is conservative).
inline ExistenceBound existence_bound_for_profile(const WaveProfile& f, const Box& x0_box,
                                                  double xdot0_norm, double C, double b = 1.0,
                                                  int res = 65) {
  if (x0_box.dim() != 2) throw domain_error("existence_bound_for_profile: box must be 2d");
  const double r = b + xdot0_norm;
  const Box I = x0_box.inflated(r);
  double g_sup = 0.0, g_lip = 0.0;
  for_each_grid_point(I, {res, res}, [&](const std::vector<double>& p) {
    const Vec2 g = 0.5 * f.grad(p[0], p[1]);
    const Hess2 h = f.hess(p[0], p[1]);
    g_sup = std::max(g_sup, norm(g));
    g_lip = std::max(g_lip, spectral_norm_sym2(0.5 * h.xx, 0.5 * h.xy, 0.5 * h.yy));
  });
  if (!std::isfinite(g_sup) || !std::isfinite(g_lip))
    throw numerical_error("existence_bound_for_profile: profile derivatives not finite on I");
  return existence_bound(g_sup, g_lip, xdot0_norm, b, C, 0.0);
}

// Admission threshold eps_K = alpha(K)/2 for transverse initial positions in
// x0_box with initial speeds bounded by xdot0_norm.
inline double geodesic_eps_threshold(const WaveProfile& f, const StrictDeltaNet& net,
                                     const Box& x0_box, double xdot0_norm = 0.0, double b = 1.0) {
  return 0.5 * existence_bound_for_profile(f, x0_box, xdot0_norm, net.C, b).alpha;
}

// ---------------------------------------------------------------------------
// Dense sweep through the mollifier support with full state:
// position/velocity, the two cumulative integrals feeding v, and the
// variational block d x / d x0.
// ---------------------------------------------------------------------------

namespace detail {

// 21 state components: x(2) xd(2) A c B Dx(4) Dxd(4) dA(2) dc(2) dB(2)
constexpr int kStateSize = 21;

struct RhsOut {
  double d[kStateSize];
};

inline void geodesic_rhs(const WaveProfile& f, const StrictDeltaNet& net, double eps, double u,
                         const double* s, double* out) {
  const double delta = net.eval(eps, u);
  const double X = s[0], Y = s[1];
  const Vec2 g = f.grad(X, Y);
  const Hess2 h = f.hess(X, Y);
  const double fv = f.eval(X, Y);
  // x' = xd
  out[0] = s[2];
  out[1] = s[3];
  // xd' = (1/2) grad f(x) delta
  out[2] = 0.5 * g.x * delta;
  out[3] = 0.5 * g.y * delta;
  // A' = f(x) delta
  out[4] = fv * delta;
  // c' = sum_i d_i f(x) xd_i delta
  out[5] = (g.x * s[2] + g.y * s[3]) * delta;
  // B' = c
  out[6] = s[5];
  // Dx' = Dxd ; Dxd'_{ij} = (1/2) sum_m h_{mi} Dx_{mj} delta
  const double* Dx = s + 7;
  const double* Dxd = s + 11;
  out[7] = Dxd[0];
  out[8] = Dxd[1];
  out[9] = Dxd[2];
  out[10] = Dxd[3];
  const double hm[2][2] = {{h.xx, h.xy}, {h.xy, h.yy}};
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j)
      out[11 + 2 * i + j] = 0.5 * (hm[0][i] * Dx[0 + j] + hm[1][i] * Dx[2 + j]) * delta;
  // dA'_j = sum_i g_i Dx_{ij} delta
  out[15] = (g.x * Dx[0] + g.y * Dx[2]) * delta;
  out[16] = (g.x * Dx[1] + g.y * Dx[3]) * delta;
  // dc'_j = sum_i ( sum_m h_{mi} Dx_{mj} xd_i + g_i Dxd_{ij} ) delta
  for (int j = 0; j < 2; ++j) {
    double acc = 0.0;
    for (int i = 0; i < 2; ++i) {
      const double hx = hm[0][i] * Dx[0 + j] + hm[1][i] * Dx[2 + j];
      acc += hx * s[2 + i] + (i == 0 ? g.x : g.y) * Dxd[2 * i + j];
    }
    out[17 + j] = acc * delta;
  }
  // dB'_j = dc_j
  out[19] = s[17];
  out[20] = s[18];
}

}  // namespace detail

// Full state of the sweep at one parameter value.
struct SweepState {
  double u = 0.0;
  Vec2 x{}, xdot{}, acc{};
  double A = 0.0, Adot = 0.0;  // int f(x) delta and its integrand
  double c = 0.0, cdot = 0.0;  // inner integral and its integrand
  double B = 0.0;              // outer integral (B' = c)
  double Dx[4] = {1, 0, 0, 1};
  double Dxd[4] = {0, 0, 0, 0};
  double dA[2] = {0, 0};
  double dc[2] = {0, 0};
  double dB[2] = {0, 0};
};

class GeodesicSweep {
 public:
  GeodesicSweep(WaveProfile f, StrictDeltaNet net, double eps, InitialData init,
                int steps_per_eps)
      : f_(std::move(f)), net_(std::move(net)), eps_(eps), init_(init), steps_(steps_per_eps) {
    if (!(eps > 0.0)) throw domain_error("geodesic sweep: eps must be positive");
    if (steps_per_eps < 64) throw domain_error("geodesic sweep: steps_per_eps must be >= 64");
    integrate();
  }

  double eps() const { return eps_; }
  const InitialData& init() const { return init_; }

  // State at arbitrary u: affine continuation outside [-eps, eps], cubic
  // Hermite interpolation on the stored fine grid inside.
  SweepState state_at(double u) const {
    SweepState st;
    st.u = u;
    if (u <= -eps_) {
      st.x = init_.x0 + (u + 1.0) * init_.xdot0;
      st.xdot = init_.xdot0;
      return st;
    }
    if (u >= eps_) {
      const Node& n = nodes_.back();
      const double du = u - eps_;
      st.x = {n.s[0] + n.s[2] * du, n.s[1] + n.s[3] * du};
      st.xdot = {n.s[2], n.s[3]};
      st.A = n.s[4];
      st.c = n.s[5];
      st.B = n.s[6] + n.s[5] * du;
      for (int k = 0; k < 4; ++k) {
        st.Dx[k] = n.s[7 + k] + n.s[11 + k] * du;
        st.Dxd[k] = n.s[11 + k];
      }
      for (int j = 0; j < 2; ++j) {
        st.dA[j] = n.s[15 + j];
        st.dc[j] = n.s[17 + j];
        st.dB[j] = n.s[19 + j] + n.s[17 + j] * du;
      }
      return st;
    }
    const double h = eps_ / steps_;
    size_t k = static_cast<size_t>(std::floor((u + eps_) / h));
    k = std::min(k, nodes_.size() - 2);
    const Node& a = nodes_[k];
    const Node& b = nodes_[k + 1];
    const double width = b.u - a.u;
    const double t = (u - a.u) / width;
    double s[detail::kStateSize];
    for (int i = 0; i < detail::kStateSize; ++i)
      s[i] = hermite(a.s[i], a.d[i], b.s[i], b.d[i], t, width);
    st.x = {s[0], s[1]};
    st.xdot = {s[2], s[3]};
    st.A = s[4];
    st.c = s[5];
    st.B = s[6];
    for (int i = 0; i < 4; ++i) {
      st.Dx[i] = s[7 + i];
      st.Dxd[i] = s[11 + i];
    }
    for (int j = 0; j < 2; ++j) {
      st.dA[j] = s[15 + j];
      st.dc[j] = s[17 + j];
      st.dB[j] = s[19 + j];
    }
    // integrand values at the interpolated state
    const double delta = net_.eval(eps_, u);
    const Vec2 g = f_.grad(st.x.x, st.x.y);
    st.acc = {0.5 * g.x * delta, 0.5 * g.y * delta};
    st.Adot = f_.eval(st.x.x, st.x.y) * delta;
    st.cdot = (g.x * st.xdot.x + g.y * st.xdot.y) * delta;
    return st;
  }

  double v_at(double u) const {
    const SweepState st = state_at(u);
    return init_.v0 + init_.vdot0 * (u + 1.0) + st.A + st.B;
  }

  double vdot_at(double u) const {
    const SweepState st = state_at(u);
    return init_.vdot0 + f_.eval(st.x.x, st.x.y) * net_.eval(eps_, u) + st.c;
  }

  const std::vector<double>& node_u() const { return node_u_; }

 private:
  struct Node {
    double u;
    double s[detail::kStateSize];
    double d[detail::kStateSize];  // RHS at the node
  };

  static double hermite(double y0, double d0, double y1, double d1, double t, double h) {
    const double t2 = t * t, t3 = t2 * t;
    return (2 * t3 - 3 * t2 + 1) * y0 + (t3 - 2 * t2 + t) * h * d0 + (-2 * t3 + 3 * t2) * y1 +
           (t3 - t2) * h * d1;
  }

  void integrate() {
    const int n = 2 * steps_;
    const double h = eps_ / steps_;
    nodes_.resize(static_cast<size_t>(n) + 1);
    double s[detail::kStateSize] = {0};
    s[0] = init_.x0.x + init_.xdot0.x * (1.0 - eps_);
    s[1] = init_.x0.y + init_.xdot0.y * (1.0 - eps_);
    s[2] = init_.xdot0.x;
    s[3] = init_.xdot0.y;
    s[7] = s[10] = 1.0;  // Dx = I

    double k1[detail::kStateSize], k2[detail::kStateSize], k3[detail::kStateSize],
        k4[detail::kStateSize], tmp[detail::kStateSize];
    auto rhs = [this](double u, const double* in, double* out) {
      detail::geodesic_rhs(f_, net_, eps_, u, in, out);
    };
    double u = -eps_;
    rhs(u, s, k1);
    store_node(0, u, s, k1);
    for (int step = 0; step < n; ++step) {
      // u_k computed from the index so the final node lands on +eps exactly
      u = -eps_ + h * step;
      const double u_next = (step + 1 == n) ? eps_ : -eps_ + h * (step + 1);
      rhs(u, s, k1);
      for (int i = 0; i < detail::kStateSize; ++i) tmp[i] = s[i] + 0.5 * h * k1[i];
      rhs(u + 0.5 * h, tmp, k2);
      for (int i = 0; i < detail::kStateSize; ++i) tmp[i] = s[i] + 0.5 * h * k2[i];
      rhs(u + 0.5 * h, tmp, k3);
      for (int i = 0; i < detail::kStateSize; ++i) tmp[i] = s[i] + h * k3[i];
      rhs(u_next, tmp, k4);
      for (int i = 0; i < detail::kStateSize; ++i)
        s[i] += h / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
      for (int i = 0; i < detail::kStateSize; ++i)
        if (!std::isfinite(s[i]))
          throw numerical_error("geodesic blow-up at u=" + format_g17(u_next) +
                                " (eps=" + format_g17(eps_) + ")");
      rhs(u_next, s, k1);
      store_node(static_cast<size_t>(step) + 1, u_next, s, k1);
    }
  }

  void store_node(size_t idx, double u, const double* s, const double* d) {
    Node& nd = nodes_[idx];
    nd.u = u;
    std::memcpy(nd.s, s, sizeof(nd.s));
    std::memcpy(nd.d, d, sizeof(nd.d));
    if (node_u_.size() <= idx) node_u_.resize(idx + 1);
    node_u_[idx] = u;
  }

  WaveProfile f_;
  StrictDeltaNet net_;
  double eps_;
  InitialData init_;
  int steps_;
  std::vector<Node> nodes_;
  std::vector<double> node_u_;
};

// ---------------------------------------------------------------------------
// Public trajectory type: flat segments are exact affine formulas, the kick
// region carries the fine integration grid.
// ---------------------------------------------------------------------------

struct GeodesicTrajectory {
  std::vector<double> u;
  std::vector<Vec2> x, xdot;
  std::vector<double> v, vdot;
  double eps = 0.0;
  size_t i_minus_eps = 0, i_plus_eps = 0;  // indices of the -eps / +eps samples
};

inline GeodesicTrajectory integrate_geodesic(const WaveProfile& f, const StrictDeltaNet& net,
                                             double eps, const InitialData& init, double u_end,
                                             int steps_per_eps, int flat_samples = 9) {
  if (!(eps > 0.0)) throw domain_error("integrate_geodesic: eps must be positive");
  if (!(u_end > eps)) throw domain_error("integrate_geodesic: u_end must exceed eps");
  if (steps_per_eps < 64) throw domain_error("integrate_geodesic: steps_per_eps must be >= 64");
  // admission threshold from the existence bound at this initial datum
  const Box here({init.x0.x, init.x0.y}, {init.x0.x, init.x0.y});
  const double eps_K = geodesic_eps_threshold(f, net, here, norm(init.xdot0));
  if (eps > eps_K)
    throw domain_error("integrate_geodesic: eps=" + format_g17(eps) +
                       " exceeds admission threshold eps_K=" + format_g17(eps_K));

  GeodesicSweep sweep(f, net, eps, init, steps_per_eps);
  GeodesicTrajectory tr;
  tr.eps = eps;
  auto push = [&](double u) {
    const SweepState st = sweep.state_at(u);
    tr.u.push_back(u);
    tr.x.push_back(st.x);
    tr.xdot.push_back(st.xdot);
    tr.v.push_back(sweep.v_at(u));
    tr.vdot.push_back(sweep.vdot_at(u));
  };
  for (double u : linspace(-1.0, -eps, flat_samples)) {
    if (u < -eps) push(u);
  }
  tr.i_minus_eps = tr.u.size();
  for (double u : sweep.node_u()) push(u);
  tr.i_plus_eps = tr.u.size() - 1;
  for (double u : linspace(eps, u_end, flat_samples)) {
    if (u > eps) push(u);
  }
  return tr;
}

// Closed-form limit of the geodesic as eps -> 0, with the step value at the
// shock fixed to H(0) = 0.
struct GeodesicLimit {
  Vec2 x{};
  double v = 0.0;
};

inline GeodesicLimit geodesic_limit(const WaveProfile& f, const InitialData& init, double u) {
  const Vec2 arg = init.x0 + init.xdot0;
  const Vec2 g = f.grad(arg.x, arg.y);
  const double up = u_plus(u);
  const double H = heaviside(u);
  GeodesicLimit lim;
  lim.x = {init.x0.x + init.xdot0.x * (1.0 + u) + 0.5 * g.x * up,
           init.x0.y + init.xdot0.y * (1.0 + u) + 0.5 * g.y * up};
  lim.v = init.v0 + init.vdot0 * (1.0 + u) + f.eval(arg.x, arg.y) * H +
          (g.x * (init.xdot0.x + 0.25 * g.x) + g.y * (init.xdot0.y + 0.25 * g.y)) * up;
  return lim;
}

}  // namespace ppwave
