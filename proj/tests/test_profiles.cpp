#include <catch2/catch_amalgamated.hpp>

#include "ppwave/delta_nets.hpp"
#include "ppwave/profiles.hpp"

using namespace ppwave;

TEST_CASE("builtin profiles evaluate with exact analytic derivatives") {
  const auto quad = builtin_profile(BuiltinProfile::quadratic_saddle);
  CHECK(quad.eval(2.0, 3.0) == -5.0);
  CHECK(quad.grad(2.0, 3.0).x == 4.0);
  CHECK(quad.grad(2.0, 3.0).y == -6.0);
  CHECK(quad.hess(0.7, -0.3).xx == 2.0);
  CHECK(quad.hess(0.7, -0.3).yy == -2.0);
  CHECK(quad.hess(0.7, -0.3).xy == 0.0);

  const auto quart = builtin_profile(BuiltinProfile::quartic_negative);
  CHECK(quart.grad(1.0, 1.0).x == -2.0);
  CHECK(quart.grad(1.0, 1.0).y == -2.0);
  CHECK(quart.eval(1.0, 2.0) == -8.5);
}

TEST_CASE("unknown profile name is a configuration error") {
  CHECK_THROWS_AS(builtin_profile("cubic_mystery"), config_error);
}

TEST_CASE("analytic derivatives agree with central differences on random probes") {
  const double h = 1e-5;
  CounterRng rng(91);
  for (const char* name : {"quadratic_saddle", "quartic_negative"}) {
    const auto f = builtin_profile(std::string(name));
    for (int n = 0; n < 1000; ++n) {
      const double X = rng.uniform(-2.0, 2.0);
      const double Y = rng.uniform(-2.0, 2.0);
      const Vec2 g = f.grad(X, Y);
      const double gx_fd = (f.eval(X + h, Y) - f.eval(X - h, Y)) / (2 * h);
      const double gy_fd = (f.eval(X, Y + h) - f.eval(X, Y - h)) / (2 * h);
      const double scale = std::max({1.0, std::abs(g.x), std::abs(g.y)});
      CHECK(std::abs(g.x - gx_fd) <= 1e-6 * scale);
      CHECK(std::abs(g.y - gy_fd) <= 1e-6 * scale);

      const Hess2 hess = f.hess(X, Y);
      const double hxx_fd = (f.grad(X + h, Y).x - f.grad(X - h, Y).x) / (2 * h);
      const double hxy_fd = (f.grad(X, Y + h).x - f.grad(X, Y - h).x) / (2 * h);
      const double hyy_fd = (f.grad(X, Y + h).y - f.grad(X, Y - h).y) / (2 * h);
      const double hscale = std::max({1.0, std::abs(hess.xx), std::abs(hess.yy)});
      CHECK(std::abs(hess.xx - hxx_fd) <= 1e-6 * hscale);
      CHECK(std::abs(hess.xy - hxy_fd) <= 1e-6 * hscale);
      CHECK(std::abs(hess.yy - hyy_fd) <= 1e-6 * hscale);

      const Third2 th = f.third(X, Y);
      const double txxx_fd = (f.hess(X + h, Y).xx - f.hess(X - h, Y).xx) / (2 * h);
      const double tyyy_fd = (f.hess(X, Y + h).yy - f.hess(X, Y - h).yy) / (2 * h);
      const double tscale = std::max({1.0, std::abs(th.xxx), std::abs(th.yyy)});
      CHECK(std::abs(th.xxx - txxx_fd) <= 1e-5 * tscale);
      CHECK(std::abs(th.yyy - tyyy_fd) <= 1e-5 * tscale);
    }
  }
}

TEST_CASE("continuous metric matches hand values for the quadratic saddle") {
  const auto f = builtin_profile(BuiltinProfile::quadratic_saddle);
  const auto m = metric_continuous(f, {0.5, 0.0, 0.0, 0.0});
  CHECK(m.g(1, 1) == Catch::Approx(2.25).margin(1e-15));
  CHECK(m.g(2, 2) == Catch::Approx(0.25).margin(1e-15));
  CHECK(m.g(1, 2) == 0.0);
  CHECK(m.g(0, 3) == -0.5);
  CHECK(m.g(3, 3) == 0.0);

  SECTION("flat below the shock") {
    const auto flat = metric_continuous(f, {-0.7, 1.0, 2.0, 3.0});
    CHECK(flat.g(1, 1) == 1.0);
    CHECK(flat.g(2, 2) == 1.0);
    CHECK(flat.g(0, 0) == 0.0);
  }
  SECTION("degenerates at the caustic value") {
    const auto caustic = metric_continuous(f, {1.0, 0.3, -0.2, 0.0});
    CHECK(caustic.g(2, 2) == 0.0);
  }
}

TEST_CASE("continuous metric cross term for a profile with mixed second derivative") {
  // f = X^2 Y: f_xy = 2X, lap f = 2Y; the dX dY coefficient is
  // 2 u+ f_xy + (1/2) f_xy (lap f) u+^2, halved in the matrix.
  WaveProfile f;
  f.name = "mixed";
  f.eval = [](double X, double Y) { return X * X * Y; };
  f.grad = [](double X, double Y) { return Vec2{2 * X * Y, X * X}; };
  f.hess = [](double X, double Y) { return Hess2{2 * Y, 2 * X, 0.0}; };
  f.third = [](double, double) { return Third2{0.0, 2.0, 0.0, 0.0}; };
  const double U = 0.5, X = 0.3, Y = 0.4;
  const auto m = metric_continuous(f, {U, X, Y, 0.0});
  CHECK(m.g(1, 2) == Catch::Approx(2 * X * U + X * Y * U * U).margin(1e-15));
  CHECK(m.g(1, 2) == Catch::Approx(0.33).margin(1e-15));
}

TEST_CASE("regularized metric follows the mollified delta") {
  const auto f = builtin_profile(BuiltinProfile::quadratic_saddle);
  const auto net = model_net(ModelNet::bump);
  const double eps = 0.05;

  SECTION("vanishes outside the support") {
    for (double U : {0.06, -0.051, 1.0, -2.0}) {
      const auto m = metric_regularized(f, net, eps, {U, 2.0, 3.0, 0.0});
      CHECK(m.g(0, 0) == 0.0);
    }
  }
  SECTION("profile times delta at the shock") {
    const auto m = metric_regularized(f, net, eps, {0.0, 2.0, 3.0, 0.0});
    CHECK(m.g(0, 0) == Catch::Approx(-5.0 * net.eval(eps, 0.0)).epsilon(1e-14));
  }
  SECTION("fixed structure") {
    const auto m = metric_regularized(f, net, eps, {0.3, 1.0, -1.0, 7.0});
    CHECK(m.g(3, 3) == 0.0);
    CHECK(m.g(0, 3) == -0.5);
    CHECK(m.g(1, 1) == 1.0);
    CHECK(m.g(2, 2) == 1.0);
  }
  SECTION("eps must be positive") {
    CHECK_THROWS_AS(metric_regularized(f, net, 0.0, {0, 0, 0, 0}), domain_error);
  }
}

TEST_CASE("both metric forms are flat below the support") {
  const auto net = model_net(ModelNet::cosine_squared);
  CounterRng rng(17);
  for (const char* name : {"quadratic_saddle", "quartic_negative"}) {
    const auto f = builtin_profile(std::string(name));
    for (int n = 0; n < 50; ++n) {
      const double eps = rng.uniform(0.01, 0.2);
      const SpacetimePoint p{rng.uniform(-2.0, -eps - 1e-9), rng.uniform(-2.0, 2.0),
                             rng.uniform(-2.0, 2.0), rng.uniform(-2.0, 2.0)};
      const auto cont = metric_continuous(f, p);
      const auto reg = metric_regularized(f, net, eps, p);
      for (int i = 0; i < 4; ++i)
        for (int j = 0; j < 4; ++j) CHECK(cont.g(i, j) == reg.g(i, j));
    }
  }
}
