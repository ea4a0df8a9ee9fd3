#include <catch2/catch_amalgamated.hpp>

#include "ppwave/inversion.hpp"

using namespace ppwave;

namespace {
const WaveProfile kQuad = builtin_profile(BuiltinProfile::quadratic_saddle);
const StrictDeltaNet kBump = model_net(ModelNet::bump);
}  // namespace

TEST_CASE("newton_invert is the identity below the support") {
  TransformEvaluator ev(kQuad, kBump, 0.05, 64, Box({-1, -1}, {1, 1}));
  const SpacetimePoint q{-0.2, 0.4, -0.1, 3.0};
  const auto p = newton_invert(ev, q, {q.U, 0.0, 0.0, 0.0});
  CHECK(p.U == q.U);
  CHECK(p.X == q.X);
  CHECK(p.Y == q.Y);
  CHECK(p.V == q.V);
}

TEST_CASE("static geodesic through the origin inverts exactly") {
  TransformEvaluator ev(kQuad, kBump, 0.05, 64, Box({-1, -1}, {1, 1}));
  const SpacetimePoint q{0.0, 0.0, 0.0, 0.0};
  const auto p = newton_invert(ev, q, q);
  CHECK(p.X == 0.0);
  CHECK(p.Y == 0.0);
  CHECK(p.V == 0.0);
}

TEST_CASE("round trip through the forward map on random points") {
  TransformEvaluator ev(kQuad, kBump, 0.05, 64, Box({-1, -1}, {1, 1}));
  CounterRng rng(3);
  for (int n = 0; n < 20; ++n) {
    const SpacetimePoint p{rng.uniform(-1.0, 0.8), rng.uniform(-1, 1), rng.uniform(-1, 1),
                           rng.uniform(-2, 2)};
    const SpacetimePoint q = ev.t_eps(p);
    const auto seed = invert_closed(kQuad, q);
    REQUIRE(seed.has_value());
    const auto back = newton_invert(ev, q, *seed);
    CHECK(norm(back - p) < 1e-6);
  }
}

TEST_CASE("newton_invert error contracts") {
  SECTION("singular jacobian at the seed") {
    TransformEvaluator ev(kQuad, kBump, 0.05, 64, Box({-1, -1}, {1, 1}));
    NewtonOptions opts;
    opts.det_floor = 10.0;  // every finite spatial block is 'singular' under this floor
    CHECK_THROWS_AS(newton_invert(ev, {0.3, 0.1, 0.1, 0.0}, {0.3, 0.0, 0.0, 0.0}, opts),
                    newton_failure);
  }
  SECTION("iteration budget is enforced") {
    TransformEvaluator ev(kQuad, kBump, 0.05, 64, Box({-1, -1}, {1, 1}));
    NewtonOptions opts;
    opts.max_iter = 0;
    try {
      newton_invert(ev, {0.5, 0.3, 0.3, 0.0}, {0.5, 0.0, 0.0, 0.0}, opts);
      FAIL("expected newton_failure");
    } catch (const newton_failure& e) {
      CHECK(std::string(e.what()).find("max iterations") != std::string::npos);
      CHECK(e.last_iterate.U == 0.5);
    }
  }
  SECTION("iterate leaving the trust region aborts instead of extrapolating") {
    // the quartic transverse map folds; a target beyond the fold forces the
    // iteration out of the trusted branch
    const auto quart = builtin_profile(BuiltinProfile::quartic_negative);
    TransformEvaluator ev(quart, kBump, 0.005, 64, Box({-1.5, -1.5}, {1.5, 1.5}));
    NewtonOptions opts;
    opts.trust_xy = Box({0.0, 0.0}, {1.5, 1.5});
    bool threw = false;
    try {
      newton_invert(ev, {0.3, 1.2, 0.5, 0.0}, {0.3, 1.0, 0.5, 0.0}, opts);
    } catch (const newton_failure& e) {
      threw = true;
      CHECK(std::isfinite(e.last_iterate.X));
    }
    CHECK(threw);
  }
}

TEST_CASE("stability check on the identity-plus-translation instance") {
  const double delta = 0.5, eta = 0.5;
  auto rect_dist = [=](const std::vector<double>& x) {
    const double dx = std::max(std::abs(x[0]) - delta, 0.0);
    const double dy = std::max(std::abs(x[1]) - eta, 0.0);
    return std::hypot(dx, dy);
  };
  auto make_instance = [&](double shift, bool solver_hole) {
    StabilityInstance inst;
    inst.dim = 2;
    inst.f = [](const std::vector<double>& x) { return x; };
    inst.g = [shift](const std::vector<double>& x) {
      return std::vector<double>{x[0] + shift, x[1]};
    };
    inst.f_solve = [](const std::vector<double>& w) -> std::optional<std::vector<double>> {
      return w;
    };
    inst.g_solve = [shift, solver_hole](const std::vector<double>& w, const std::vector<double>&)
        -> std::optional<std::vector<double>> {
      if (solver_hole && w[0] > 0.9) return std::nullopt;  // simulated Newton divergence
      return std::vector<double>{w[0] - shift, w[1]};
    };
    for (double rad : linspace(0.0, 1.0, 5))
      for (double th : linspace(0.0, 2 * M_PI, 17)) {
        if (rad == 0.0 && th > 0.0) continue;
        inst.W_grid.push_back({rad * std::cos(th), rad * std::sin(th)});
      }
    for (double X : linspace(-1.5, 1.5, 13))
      for (double Y : linspace(-1.5, 1.5, 13))
        if (rect_dist({X, Y}) <= 1.0) inst.A_grid.push_back({X, Y});
    inst.A_margin = [rect_dist](const std::vector<double>& x) { return 1.0 - rect_dist(x); };
    inst.delta = delta;
    inst.eta = eta;
    return inst;
  };

  SECTION("zero perturbation: trivial pass with the expected margin") {
    const auto rep = stability_check(make_instance(0.0, false));
    CHECK(rep.hypotheses_ok);
    CHECK(rep.inclusion_ok);
    CHECK(rep.margin == Catch::Approx(0.5).margin(1e-12));  // dist(f^-1(W), boundary of A)
  }
  SECTION("translation below delta passes") {
    const auto rep = stability_check(make_instance(0.3 * delta, false));
    CHECK(rep.conclusion_claimed);
  }
  SECTION("perturbation of size 2 delta fails the hypothesis gate") {
    const auto rep = stability_check(make_instance(2.0 * delta, false));
    CHECK_FALSE(rep.hypotheses_ok);
    CHECK_FALSE(rep.conclusion_claimed);
  }
  SECTION("solver divergence surfaces as inclusion failure with witnesses") {
    const auto rep = stability_check(make_instance(0.1, true));
    CHECK(rep.hypotheses_ok);
    CHECK_FALSE(rep.inclusion_ok);
    CHECK_FALSE(rep.failures.empty());
    for (const auto& w : rep.failures) CHECK(w[0] > 0.9);
  }
}

TEST_CASE("inversion data for the zero profile is trivial") {
  const auto fam = make_family(zero_profile(), kBump, EpsSchedule::geometric(0.1, 0.5, 4), 64,
                               Box({-1.5, -1.5}, {1.5, 1.5}));
  const auto data = build_inversion_data(fam, {0, 0, 0, 0}, Box({-1, -1}, {1, 1}), 1.0, {-2, 2});
  CHECK(data.eps0 == 0.1);  // the whole schedule certifies
  CHECK(data.Q.valid());
  CHECK(data.anchor_q.U == 0.0);
  CHECK(data.anchor_q.V == 0.0);
  const auto comp = composition_residuals(data, fam);
  for (double r : comp.forward_residual) CHECK(r < 1e-12);
  for (double r : comp.roundtrip_residual) CHECK(r < 1e-12);
}

TEST_CASE("inversion data around the quadratic anchor") {
  const Box R({0, 0}, {2, 2});
  const auto fam =
      make_family(kQuad, kBump, EpsSchedule::geometric(0.1, 0.5, 4), 64, R.inflated(0.25));
  const SpacetimePoint p{0.0, 1.0, 1.0, 0.0};
  const auto data = build_inversion_data(fam, p, R, 1.0, {-4.0, 4.0});
  CHECK(data.Q.valid());
  CHECK(data.P.gamma <= data.certified_alpha);
  CHECK(data.eta >= data.delta);
  REQUIRE_FALSE(data.certified_eps.empty());

  SECTION("inverse images of the Q grid nest strictly inside P") {
    for (size_t m = 0; m < fam.size(); ++m) {
      if (fam.at(m).eps() > data.eps0) continue;
      for (const auto& qs : detail::cylinder_samples(data.Q, 3)) {
        const auto seed = invert_s_closed(kQuad, qs);
        REQUIRE(seed.has_value());
        const auto pr = newton_invert(fam.at(m), qs, *seed);
        CHECK(data.P.margin_of(pr) > 0.0);
      }
    }
  }
  SECTION("round trips inside P at every certified eps") {
    CounterRng rng(77);
    for (size_t m = 0; m < fam.size(); ++m) {
      if (fam.at(m).eps() > data.eps0) continue;
      for (int n = 0; n < 25; ++n) {
        const SpacetimePoint pr{rng.uniform(-1.0, data.P.gamma), rng.uniform(0.0, 2.0),
                                rng.uniform(0.0, 2.0), rng.uniform(-4.0, 4.0)};
        const SpacetimePoint q = fam.at(m).t_eps(pr);
        const auto seed = invert_closed(kQuad, q);
        REQUIRE(seed.has_value());
        CHECK(norm(newton_invert(fam.at(m), q, *seed) - pr) < 1e-6);
      }
    }
  }
  SECTION("composition residuals stay at the Newton tolerance") {
    const auto comp = composition_residuals(data, fam);
    REQUIRE_FALSE(comp.eps.empty());
    for (double r : comp.forward_residual) CHECK(r < 1e-8);
    for (double r : comp.roundtrip_residual) CHECK(r < 1e-8);
  }
}

TEST_CASE("constructive failures name the violated inclusion") {
  const SpacetimePoint p{0.0, 1.0, 1.0, 0.0};

  SECTION("transverse box too small") {
    const Box R({0.9, 0.9}, {1.1, 1.1});
    const auto fam =
        make_family(kQuad, kBump, EpsSchedule::geometric(0.1, 0.5, 4), 64, R.inflated(0.25));
    try {
      build_inversion_data(fam, p, R, 1.0, {-4.0, 4.0});
      FAIL("expected constructive_failure");
    } catch (const constructive_failure& e) {
      CHECK(std::string(e.what()).find("B_{3delta}") != std::string::npos);
    }
  }
  SECTION("V interval too small") {
    const Box R({0, 0}, {2, 2});
    const auto fam =
        make_family(kQuad, kBump, EpsSchedule::geometric(0.1, 0.5, 4), 64, R.inflated(0.25));
    try {
      build_inversion_data(fam, p, R, 1.0, {-0.05, 0.05});
      FAIL("expected constructive_failure");
    } catch (const constructive_failure& e) {
      CHECK(std::string(e.what()).find("I too small") != std::string::npos);
    }
  }
  SECTION("anchor off the shock plane is rejected") {
    const Box R({0, 0}, {2, 2});
    const auto fam =
        make_family(kQuad, kBump, EpsSchedule::geometric(0.1, 0.5, 4), 64, R.inflated(0.25));
    CHECK_THROWS_AS(build_inversion_data(fam, {0.2, 1, 1, 0}, R, 1.0, {-4.0, 4.0}), domain_error);
  }
}
