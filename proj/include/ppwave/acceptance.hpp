// Acceptance suite: ten end-to-end criteria with pinned tolerances, each
// reported as one pass/fail line. Used by both the dedicated test binary and
// the `accept` CLI subcommand.
#pragma once

#include <chrono>
#include <cmath>
#include <sstream>
#include <string>
#include <vector>

#include "ppwave/common.hpp"
#include "ppwave/convergence.hpp"
#include "ppwave/delta_nets.hpp"
#include "ppwave/eps_nets.hpp"
#include "ppwave/geodesics.hpp"
#include "ppwave/injectivity.hpp"
#include "ppwave/inversion.hpp"
#include "ppwave/profiles.hpp"
#include "ppwave/transform.hpp"

namespace ppwave {

struct CriterionResult {
  int id = 0;
  std::string name;
  bool pass = false;
  std::string detail;
  double runtime_s = 0.0;
};

namespace acceptance_detail {

class Timer {
 public:
  Timer() : t0_(std::chrono::steady_clock::now()) {}
  double seconds() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0_).count();
  }

 private:
  std::chrono::steady_clock::time_point t0_;
};

inline bool strictly_decreasing(const std::vector<double>& v) {
  for (size_t i = 1; i < v.size(); ++i)
    if (!(v[i] < v[i - 1])) return false;
  return true;
}

inline bool decreasing_with_slack(const std::vector<double>& v, double slack = 0.10) {
  for (size_t i = 1; i < v.size(); ++i)
    if (v[i] > (1.0 + slack) * v[i - 1] + 1e-15) return false;
  return true;
}

inline bool rel_close(double a, double b, double tol) {
  return std::abs(a - b) <= tol * std::max({1.0, std::abs(a), std::abs(b)});
}

}  // namespace acceptance_detail

struct AcceptanceSettings {
  uint64_t seed = 20240211;
  int steps_per_eps = 64;
  int threads = 1;
};

// 1. Strict delta net conditions for the bump and cosine_squared nets.
inline CriterionResult criterion_delta_nets(const AcceptanceSettings&) {
  acceptance_detail::Timer timer;
  CriterionResult r{1, "strict delta net suite", false, "", 0.0};
  const auto sched = EpsSchedule::geometric(0.1, 0.5, 4);
  bool ok = true;
  std::ostringstream detail;
  for (const char* kind : {"bump", "cosine_squared"}) {
    const auto net = model_net(std::string(kind));
    const auto rep = check_strict_delta(net, sched, 1e-12);
    double max_mass_err = 0.0;
    for (double e : rep.mass_error) max_mass_err = std::max(max_mass_err, e);
    double l1_min = rep.l1[0], l1_max = rep.l1[0];
    for (double v : rep.l1) {
      l1_min = std::min(l1_min, v);
      l1_max = std::max(l1_max, v);
    }
    const bool net_ok = rep.support_ok && max_mass_err < 1e-10 && (l1_max - l1_min) < 1e-8;
    ok = ok && net_ok;
    detail << kind << ": support_ok=" << (rep.support_ok ? "yes" : "no")
           << " max_mass_err=" << format_g17(max_mass_err)
           << " l1_spread=" << format_g17(l1_max - l1_min) << "; ";
  }
  r.runtime_s = timer.seconds();
  r.pass = ok && r.runtime_s < 1.0;
  r.detail = detail.str() + "runtime=" + format_g17(r.runtime_s) + "s (<1s)";
  return r;
}

// 2. Geodesic limit oracle at u = 1 for the quadratic saddle.
inline CriterionResult criterion_geodesic_limit(const AcceptanceSettings& s) {
  acceptance_detail::Timer timer;
  CriterionResult r{2, "geodesic limit oracle", false, "", 0.0};
  const auto f = builtin_profile(BuiltinProfile::quadratic_saddle);
  const auto net = model_net(ModelNet::bump);
  const InitialData init{{1.0, 1.0}, {0.0, 0.0}, 0.0, 0.0};
  std::vector<double> ex, ev;
  for (double eps : EpsSchedule::geometric(0.1, 0.5, 4).values) {
    const auto tr = integrate_geodesic(f, net, eps, init, 1.0, s.steps_per_eps);
    ex.push_back(std::hypot(tr.x.back().x - 2.0, tr.x.back().y - 0.0));
    ev.push_back(std::abs(tr.v.back() - 2.0));
  }
  r.runtime_s = timer.seconds();
  const bool ok = acceptance_detail::strictly_decreasing(ex) &&
                  acceptance_detail::strictly_decreasing(ev) && ex.back() < 1e-2 &&
                  ev.back() < 1e-2;
  r.pass = ok && r.runtime_s < 5.0;
  r.detail = "final |x_eps(1)-(2,0)|=" + format_g17(ex.back()) +
             " final |v_eps(1)-2|=" + format_g17(ev.back()) + " runtime=" +
             format_g17(r.runtime_s) + "s (<5s)";
  return r;
}

// 3. Variational Jacobian against central differences; structural identities.
inline CriterionResult criterion_jacobian(const AcceptanceSettings& s) {
  acceptance_detail::Timer timer;
  CriterionResult r{3, "jacobian consistency", false, "", 0.0};
  const auto f = builtin_profile(BuiltinProfile::quadratic_saddle);
  const auto net = model_net(ModelNet::bump);
  const double eps = 0.05, h = 1e-5;
  TransformEvaluator ev(f, net, eps, s.steps_per_eps, Box({-0.6, -0.6}, {0.6, 0.6}));
  CounterRng rng(s.seed);
  const Box box({-0.5, -0.5, -0.5, -0.5}, {0.5, 0.5, 0.5, 0.5});
  double worst_rel = 0.0, worst_det_gap = 0.0, worst_minor1 = 0.0;
  bool ok = true;
  for (int n = 0; n < 100; ++n) {
    const auto pt = rng.point_in(box);
    const SpacetimePoint p{pt[0], pt[1], pt[2], pt[3]};
    const JacobianSample js = ev.jacobian(p);
    for (int col = 0; col < 4; ++col) {
      Vec4 pp = p.as_vec(), pm = p.as_vec();
      pp[static_cast<size_t>(col)] += h;
      pm[static_cast<size_t>(col)] -= h;
      const Vec4 fp = ev.t_eps(SpacetimePoint::from_vec(pp)).as_vec();
      const Vec4 fm = ev.t_eps(SpacetimePoint::from_vec(pm)).as_vec();
      for (int row = 0; row < 4; ++row) {
        const double fd = (fp[static_cast<size_t>(row)] - fm[static_cast<size_t>(row)]) / (2.0 * h);
        const double an = js.J(row, col);
        const double rel = std::abs(an - fd) / std::max({1.0, std::abs(an), std::abs(fd)});
        worst_rel = std::max(worst_rel, rel);
        if (rel > 1e-4) ok = false;
      }
    }
    worst_minor1 = std::max(worst_minor1, std::abs(js.minors[0] - 1.0));
    if (js.minors[0] != 1.0) ok = false;
    const double spatial = js.J(1, 1) * js.J(2, 2) - js.J(1, 2) * js.J(2, 1);
    const double gap = std::abs(det4(js.J) - spatial);
    worst_det_gap = std::max(worst_det_gap, gap);
    if (gap > 1e-12 * std::max(1.0, std::abs(spatial))) ok = false;
  }
  r.runtime_s = timer.seconds();
  r.pass = ok;
  r.detail = "worst FD rel err=" + format_g17(worst_rel) + " worst |detJ - det2|=" +
             format_g17(worst_det_gap);
  return r;
}

// 4. Principal-minor certificate for the quadratic saddle.
inline CriterionResult criterion_minor_certificate(const AcceptanceSettings& s) {
  acceptance_detail::Timer timer;
  CriterionResult r{4, "minor certificate", false, "", 0.0};
  const auto f = builtin_profile(BuiltinProfile::quadratic_saddle);
  const auto net = model_net(ModelNet::bump);
  const Box K({-1, -1}, {1, 1});
  const auto fam = make_family(f, net, EpsSchedule::geometric(0.1, 0.5, 4), s.steps_per_eps, K);
  MinorCertificateOptions opts;
  opts.threads = s.threads;
  const auto cert = minor_certificate(fam, K, 0.5, opts);
  r.runtime_s = timer.seconds();
  r.pass = cert.certified && cert.eta >= 0.2 && cert.eps0 >= 0.0125 &&
           cert.worst_minor_deviation < 0.5;
  r.detail = "certified=" + std::string(cert.certified ? "yes" : "no") +
             " eta=" + format_g17(cert.eta) + " eps0=" + format_g17(cert.eps0) +
             " worst_dev=" + format_g17(cert.worst_minor_deviation);
  return r;
}

// 5. Injectivity regions and the quartic collapsing triple.
inline CriterionResult criterion_injectivity_regions(const AcceptanceSettings& s) {
  acceptance_detail::Timer timer;
  CriterionResult r{5, "injectivity regions", false, "", 0.0};
  bool ok = true;
  double worst_rel = 0.0;
  for (const char* name : {"quadratic_saddle", "quartic_negative"}) {
    const auto f = builtin_profile(std::string(name));
    const auto analytic = injectivity_region(f, std::numeric_limits<double>::infinity(), true);
    const auto numeric = injectivity_region(f, std::numeric_limits<double>::infinity(), false);
    for (double theta : {0.0, M_PI / 6, M_PI / 3, M_PI / 2, 2 * M_PI / 3}) {
      for (double rad : linspace(0.25, 2.0, 8)) {
        const double X = rad * std::cos(theta), Y = rad * std::sin(theta);
        const double ha = analytic.h_eval(X, Y);
        const double hn = numeric.h_eval(X, Y);
        const double rel = std::abs(ha - hn) / std::max(std::abs(ha), 1e-12);
        worst_rel = std::max(worst_rel, rel);
        if (rel > 1e-3) ok = false;
      }
    }
  }
  // collapsing triple of the quartic at eta = 0.25, tracked to the smallest
  // admitted eps of a deep schedule
  const auto fq = builtin_profile(BuiltinProfile::quartic_negative);
  const auto net = model_net(ModelNet::bump);
  const Box K({-2, -2}, {2, 2});
  const auto fam = make_family(fq, net, EpsSchedule::geometric(0.1, 0.5, 9), s.steps_per_eps, K);
  double min_pair = std::numeric_limits<double>::infinity();
  if (fam.size() == 0) {
    ok = false;
  } else {
    const auto& ev = fam.at(fam.size() - 1);
    const double eta = 0.25, a = 1.0 / std::sqrt(eta);
    const SpacetimePoint tr[3] = {{eta, 0, 0, 0}, {eta, a, a, 0}, {eta, -a, -a, 0}};
    SpacetimePoint img[3];
    for (int i = 0; i < 3; ++i) img[i] = ev.t_eps(tr[i]);
    for (int i = 0; i < 3; ++i)
      for (int j = i + 1; j < 3; ++j)
        min_pair = std::min(min_pair, std::hypot(img[i].X - img[j].X, img[i].Y - img[j].Y));
    if (!(min_pair < 1e-2)) ok = false;
  }
  r.runtime_s = timer.seconds();
  r.pass = ok;
  r.detail = "worst h rel err=" + format_g17(worst_rel) +
             " quartic triple min image dist=" + format_g17(min_pair);
  return r;
}

// 6. Uniform-convergence tables for s and the U-derivative.
inline CriterionResult criterion_convergence_tables(const AcceptanceSettings& s) {
  acceptance_detail::Timer timer;
  CriterionResult r{6, "convergence tables", false, "", 0.0};
  const auto f = builtin_profile(BuiltinProfile::quadratic_saddle);
  const auto net = model_net(ModelNet::bump);
  const Box region({-1, -1, -1, -1}, {1, 1, 1, 1});
  const Box xy({-1, -1}, {1, 1});
  const auto fam = make_family(f, net, EpsSchedule::geometric(0.1, 0.5, 4), s.steps_per_eps, xy);
  const auto ts = converge_s(fam, region, 33, s.threads);
  const auto td = converge_derivatives(fam, region, 0.1, 33, s.threads);
  std::vector<double> sv, dv;
  for (const auto& row : ts.rows) sv.push_back(row.sup);
  for (const auto& row : td.rows) dv.push_back(row.sup);
  r.runtime_s = timer.seconds();
  const bool ok = acceptance_detail::decreasing_with_slack(sv) &&
                  acceptance_detail::decreasing_with_slack(dv) && sv.back() < 1e-2 &&
                  dv.back() < 1e-2;
  r.pass = ok && r.runtime_s < 60.0;
  r.detail = "final sup|s_eps-s|=" + format_g17(sv.back()) + " final sup|du t_eps - du t|=" +
             format_g17(dv.back()) + " runtime=" + format_g17(r.runtime_s) + "s (<60s)";
  return r;
}

// 7. Pullback equivalence at a fixed point above the shock.
inline CriterionResult criterion_pullback(const AcceptanceSettings& s) {
  acceptance_detail::Timer timer;
  CriterionResult r{7, "pullback equivalence", false, "", 0.0};
  const auto f = builtin_profile(BuiltinProfile::quadratic_saddle);
  const auto net = model_net(ModelNet::bump);
  const SpacetimePoint p{0.5, 0.3, 0.4, 0.0};
  const Box xy({-0.5, -0.5}, {1.0, 1.0});
  const auto fam = make_family(f, net, EpsSchedule::geometric(0.1, 0.5, 4), s.steps_per_eps, xy);
  double final_gap = 0.0, du_row_max = 0.0;
  Mat4 pulled;
  for (size_t m = 0; m < fam.size(); ++m) {
    const auto res = pullback_check(fam.at(m), p);
    final_gap = res.max_abs_gap;
    pulled = res.pulled.g;
  }
  du_row_max = std::max({std::abs(pulled(0, 0)), std::abs(pulled(0, 1)), std::abs(pulled(0, 2))});
  const bool targets_ok =
      acceptance_detail::rel_close(pulled(1, 1), 2.25, 1e-2) &&
      acceptance_detail::rel_close(pulled(2, 2), 0.25, 1e-2) && std::abs(pulled(1, 2)) < 1e-2 &&
      std::abs(pulled(0, 3) + 0.5) < 1e-2;
  r.runtime_s = timer.seconds();
  r.pass = final_gap < 1e-2 && du_row_max < 1e-2 && targets_ok;
  r.detail = "final max gap=" + format_g17(final_gap) + " dU-row max=" + format_g17(du_row_max) +
             " g_XX=" + format_g17(pulled(1, 1)) + " g_YY=" + format_g17(pulled(2, 2));
  return r;
}

// 8. Inversion data construction and round trips.
inline CriterionResult criterion_inversion(const AcceptanceSettings& s) {
  acceptance_detail::Timer timer;
  CriterionResult r{8, "inversion round trip", false, "", 0.0};
  const auto f = builtin_profile(BuiltinProfile::quadratic_saddle);
  const auto net = model_net(ModelNet::bump);
  const SpacetimePoint p{0.0, 1.0, 1.0, 0.0};
  const Box R({0, 0}, {2, 2});
  const auto fam =
      make_family(f, net, EpsSchedule::geometric(0.1, 0.5, 4), s.steps_per_eps, R.inflated(0.25));
  InversionOptions opts;
  opts.threads = s.threads;
  std::ostringstream detail;
  try {
    const auto data = build_inversion_data(fam, p, R, 1.0, {-4.0, 4.0}, opts);
    bool ok = data.Q.valid() && !data.certified_eps.empty();
    detail << "delta=" << format_g17(data.delta) << " eta=" << format_g17(data.eta)
           << " eps0=" << format_g17(data.eps0) << " gamma=" << format_g17(data.P.gamma);

    // 200 seeded random round trips in P for every certified eps
    CounterRng rng(s.seed + 8);
    double worst_rt = 0.0;
    std::vector<SpacetimePoint> probes;
    for (int n = 0; n < 200; ++n)
      probes.push_back({rng.uniform(-data.P.beta, data.P.gamma),
                        rng.uniform(data.P.R.lo[0], data.P.R.hi[0]),
                        rng.uniform(data.P.R.lo[1], data.P.R.hi[1]),
                        rng.uniform(data.P.I_lo, data.P.I_hi)});
    for (size_t m = 0; m < fam.size(); ++m) {
      if (fam.at(m).eps() > data.eps0) continue;
      const auto& ev = fam.at(m);
      for (const auto& pr : probes) {
        const SpacetimePoint q = ev.t_eps(pr);
        const auto seed = invert_closed(f, q);
        if (!seed) {
          ok = false;
          continue;
        }
        const SpacetimePoint back = newton_invert(ev, q, *seed);
        worst_rt = std::max(worst_rt, norm(back - pr));
      }
    }
    if (!(worst_rt < 1e-6)) ok = false;
    detail << " worst random round trip=" << format_g17(worst_rt);

    const auto comp = composition_residuals(data, fam, opts);
    double worst_comp = 0.0;
    for (double v : comp.forward_residual) worst_comp = std::max(worst_comp, v);
    for (double v : comp.roundtrip_residual) worst_comp = std::max(worst_comp, v);
    if (!(worst_comp < 1e-8)) ok = false;
    detail << " worst composition residual=" << format_g17(worst_comp);
    r.pass = ok;
  } catch (const std::exception& e) {
    r.pass = false;
    detail << "construction failed: " << e.what();
  }
  r.runtime_s = timer.seconds();
  r.detail = detail.str();
  return r;
}

// 9. Stability theorem instance: identity plus translation in the plane.
inline CriterionResult criterion_stability(const AcceptanceSettings&) {
  acceptance_detail::Timer timer;
  CriterionResult r{9, "stability theorem instance", false, "", 0.0};
  const double delta = 0.5, eta = 0.5;

  auto make_instance = [&](double shift) {
    StabilityInstance inst;
    inst.dim = 2;
    inst.f = [](const std::vector<double>& x) { return x; };
    inst.g = [shift](const std::vector<double>& x) {
      return std::vector<double>{x[0] + shift, x[1]};
    };
    inst.f_solve = [](const std::vector<double>& w) -> std::optional<std::vector<double>> {
      return w;
    };
    inst.g_solve = [shift](const std::vector<double>& w, const std::vector<double>&)
        -> std::optional<std::vector<double>> {
      return std::vector<double>{w[0] - shift, w[1]};
    };
    // W = closed unit disc at the origin; A = W + [-delta,delta]x[-eta,eta]
    for (double rad : linspace(0.0, 1.0, 5))
      for (double th : linspace(0.0, 2 * M_PI, 17)) {
        if (rad == 0.0 && th > 0.0) continue;
        inst.W_grid.push_back({rad * std::cos(th), rad * std::sin(th)});
      }
    auto rect_dist = [=](const std::vector<double>& x) {
      const double dx = std::max(std::abs(x[0]) - delta, 0.0);
      const double dy = std::max(std::abs(x[1]) - eta, 0.0);
      return std::hypot(dx, dy);
    };
    for (double X : linspace(-1.0 - delta, 1.0 + delta, 13))
      for (double Y : linspace(-1.0 - eta, 1.0 + eta, 13))
        if (rect_dist({X, Y}) <= 1.0) inst.A_grid.push_back({X, Y});
    inst.A_margin = [rect_dist](const std::vector<double>& x) { return 1.0 - rect_dist(x); };
    inst.delta = delta;
    inst.eta = eta;
    return inst;
  };

  const auto ok_rep = stability_check(make_instance(0.3 * delta));
  const auto bad_rep = stability_check(make_instance(2.0 * delta));
  r.runtime_s = timer.seconds();
  r.pass = ok_rep.hypotheses_ok && ok_rep.inclusion_ok && ok_rep.conclusion_claimed &&
           !bad_rep.hypotheses_ok && !bad_rep.conclusion_claimed;
  r.detail = "base: hyp=" + std::string(ok_rep.hypotheses_ok ? "ok" : "FAIL") +
             " incl=" + std::string(ok_rep.inclusion_ok ? "ok" : "FAIL") +
             " margin=" + format_g17(ok_rep.margin) +
             "; doubled-past-delta: hyp=" + std::string(bad_rep.hypotheses_ok ? "CLAIMED" : "rejected");
  return r;
}

// 10. Growth-order estimator sanity on known families.
inline CriterionResult criterion_growth_orders(const AcceptanceSettings&) {
  acceptance_detail::Timer timer;
  CriterionResult r{10, "growth-order estimator sanity", false, "", 0.0};
  const auto sched = EpsSchedule::geometric(0.1, 0.5, 6);
  const Box K({-1.0}, {1.0});
  const auto net = model_net(ModelNet::bump);
  const MultiIndex a0{0};

  auto fit_for = [&](const std::function<double(double, double)>& fn) {
    const auto sampled = sample_family(
        K, {129}, sched, 1,
        [&](const std::vector<double>& x, double e) { return std::vector<double>{fn(x[0], e)}; });
    return estimate_growth_order(sampled, a0).fitted_exponent;
  };
  const double e_const = fit_for([](double, double) { return 1.0; });
  const double e_delta = fit_for([&](double x, double e) { return net.eval(e, x); });
  const double e_eps2 = fit_for([](double x, double e) { return e * e * std::sin(x); });
  r.runtime_s = timer.seconds();
  r.pass = std::abs(e_const - 0.0) < 0.05 && std::abs(e_delta + 1.0) < 0.05 &&
           std::abs(e_eps2 - 2.0) < 0.05;
  r.detail = "exponents: const=" + format_g17(e_const) + " delta=" + format_g17(e_delta) +
             " eps^2=" + format_g17(e_eps2);
  return r;
}

inline std::vector<CriterionResult> run_acceptance(const AcceptanceSettings& s = {}) {
  return {criterion_delta_nets(s),    criterion_geodesic_limit(s),
          criterion_jacobian(s),      criterion_minor_certificate(s),
          criterion_injectivity_regions(s), criterion_convergence_tables(s),
          criterion_pullback(s),      criterion_inversion(s),
          criterion_stability(s),     criterion_growth_orders(s)};
}

inline std::string format_criterion_line(const CriterionResult& r) {
  std::ostringstream os;
  os << (r.pass ? "PASS" : "FAIL") << " criterion " << r.id << " (" << r.name << "): " << r.detail;
  return os.str();
}

}  // namespace ppwave
