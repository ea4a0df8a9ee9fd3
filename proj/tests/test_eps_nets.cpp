#include <catch2/catch_amalgamated.hpp>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "ppwave/eps_nets.hpp"
#include "ppwave/geodesics.hpp"

using namespace ppwave;

namespace {

SampledNet scalar_net(const std::function<double(double, double)>& fn,
                      const EpsSchedule& sched = EpsSchedule::geometric(0.1, 0.5, 5)) {
  return sample_family(Box({-1.0}, {1.0}), {129}, sched, 1,
                       [&](const std::vector<double>& x, double e) {
                         return std::vector<double>{fn(x[0], e)};
                       });
}

}  // namespace

TEST_CASE("growth-order estimator recovers known exponents") {
  const auto net = model_net(ModelNet::bump);
  const MultiIndex a0{0};
  const auto r_const = estimate_growth_order(scalar_net([](double x, double) { return std::sin(x); }), a0);
  CHECK(std::abs(r_const.fitted_exponent) < 0.05);
  CHECK(r_const.classification == GrowthClass::bounded);

  const auto r_delta =
      estimate_growth_order(scalar_net([&](double x, double e) { return net.eval(e, x); }), a0);
  CHECK(r_delta.fitted_exponent == Catch::Approx(-1.0).margin(0.05));
  CHECK(r_delta.classification == GrowthClass::moderate);
  CHECK(r_delta.order == 1);

  const auto r_eps2 =
      estimate_growth_order(scalar_net([](double x, double e) { return e * e * std::sin(x); }), a0);
  CHECK(r_eps2.fitted_exponent == Catch::Approx(2.0).margin(0.05));
  CHECK(r_eps2.classification == GrowthClass::decaying);
  CHECK(r_eps2.order == 2);
}

TEST_CASE("growth order needs at least three schedule points") {
  EpsSchedule tiny;
  tiny.values = {0.1, 0.05};
  CHECK_THROWS_AS(estimate_growth_order(scalar_net([](double, double) { return 1.0; }, tiny),
                                        MultiIndex{0}),
                  domain_error);
}

TEST_CASE("missing derivative order is an error") {
  const auto net = scalar_net([](double, double) { return 1.0; });
  CHECK_THROWS_AS(estimate_growth_order(net, MultiIndex{2}), domain_error);
}

TEST_CASE("multiplying a net by eps^c shifts the fitted exponent by c") {
  auto base = [](double x, double e) { return std::cos(x) + 2.0 + 0.0 * e; };
  const double s0 =
      estimate_growth_order(scalar_net(base), MultiIndex{0}).fitted_exponent;
  for (int c : {1, 2}) {
    auto scaled = [base, c](double x, double e) { return std::pow(e, c) * base(x, e); };
    const double sc = estimate_growth_order(scalar_net(scaled), MultiIndex{0}).fitted_exponent;
    CHECK(std::abs(sc - s0 - c) < 0.05);
  }
}

TEST_CASE("c-boundedness: constant family into its own value box") {
  const auto net = sample_family(Box({-1.0}, {1.0}), {65}, EpsSchedule::geometric(0.1, 0.5, 4), 2,
                                 [](const std::vector<double>& x, double) {
                                   return std::vector<double>{std::sin(x[0]), std::cos(x[0])};
                                 });
  const auto res = check_cbounded(net, Box({-1.0, -1.0}, {1.0, 1.0}));
  CHECK(res.ok);
  CHECK(res.threshold_eps == Catch::Approx(0.1));
  CHECK(res.witness_hull.hi[1] <= 1.0);
}

TEST_CASE("c-boundedness: x/eps escapes every fixed box") {
  const auto net = sample_family(Box({0.0}, {1.0}), {65}, EpsSchedule::geometric(0.1, 0.5, 4), 1,
                                 [](const std::vector<double>& x, double e) {
                                   return std::vector<double>{x[0] / e};
                                 });
  const auto res = check_cbounded(net, Box({0.0}, {10.0}));
  CHECK_FALSE(res.ok);
  REQUIRE(res.escape_point.has_value());
  CHECK((*res.escape_point)[0] > 10.0);
}

TEST_CASE("c-boundedness is monotone under box enlargement") {
  const auto net = sample_family(Box({0.0}, {1.0}), {33}, EpsSchedule::geometric(0.1, 0.5, 4), 1,
                                 [](const std::vector<double>& x, double e) {
                                   return std::vector<double>{x[0] * (1.0 + e)};
                                 });
  bool prev = false;
  for (double hi : {0.5, 1.2, 5.0, 50.0}) {
    const bool ok = check_cbounded(net, Box({-hi}, {hi})).ok;
    CHECK((ok || !prev));  // enlarging never flips true -> false
    prev = ok;
  }
  CHECK(prev);
}

TEST_CASE("geodesic transverse family is c-bounded on a compact set") {
  const auto f = builtin_profile(BuiltinProfile::quadratic_saddle);
  const auto net = model_net(ModelNet::bump);
  const auto sched = EpsSchedule::geometric(0.1, 0.5, 3);
  const auto sampled = sample_family(
      Box({-1.0, -1.0, -1.0}, {1.0, 1.0, 1.0}), {5, 5, 5}, sched, 2,
      [&](const std::vector<double>& p, double e) {
        GeodesicSweep sweep(f, net, e, InitialData{{p[0], p[1]}, {0, 0}, 0, 0}, 64);
        const SweepState st = sweep.state_at(p[2]);
        return std::vector<double>{st.x.x, st.x.y};
      });
  const auto res = check_cbounded(sampled, Box({-4.0, -4.0}, {4.0, 4.0}));
  CHECK(res.ok);
}

TEST_CASE("strict non-zeroness reports per-eps infima and an exponent fit") {
  const auto ones = scalar_net([](double, double) { return 1.0; });
  const auto r1 = check_strictly_nonzero(ones);
  for (double v : r1.inf_per_eps) CHECK(v == 1.0);
  CHECK(r1.surrogate_ok);
  CHECK(std::abs(r1.fitted_lower_exponent) < 1e-9);

  const auto eps_net = scalar_net([](double, double e) { return e; });
  const auto r2 = check_strictly_nonzero(eps_net);
  CHECK(r2.fitted_lower_exponent == Catch::Approx(1.0).margin(0.01));
  CHECK(r2.N == 1);
  CHECK(r2.surrogate_ok);

  const auto vanishing = scalar_net([](double x, double) { return x; });
  CHECK_FALSE(check_strictly_nonzero(vanishing).surrogate_ok);
}

TEST_CASE("sup_on_box refinement catches an off-grid maximizer") {
  // narrow bump centred between coarse grid nodes
  const double c = 0.5 + 1.0 / 64.0;
  auto fn = [c](const std::vector<double>& p) {
    return std::exp(-((p[0] - c) * (p[0] - c)) / 1e-3);
  };
  const double coarse_only = [&] {
    double best = 0;
    for (double x : linspace(0.0, 1.0, 33)) best = std::max(best, fn({x}));
    return best;
  }();
  const double refined = sup_on_box(fn, Box({0.0}, {1.0}), 33);
  CHECK(refined > coarse_only);
  CHECK(refined == Catch::Approx(1.0).margin(0.05));
}

TEST_CASE("csv emitters carry the table and the fit diagnostics") {
  const auto net = scalar_net([](double x, double e) { return e * std::cos(x); });
  const auto rep = estimate_growth_order(net, MultiIndex{0});
  const auto path = (std::filesystem::temp_directory_path() / "ppwave_growth.csv").string();
  write_growth_csv(path, net, rep);
  std::ifstream in(path);
  std::ostringstream os;
  os << in.rdbuf();
  const std::string text = os.str();
  CHECK(text.rfind("eps,sup_norm", 0) == 0);
  CHECK(text.find("# fitted_exponent") != std::string::npos);

  const auto nz = check_strictly_nonzero(net);
  const auto path2 = (std::filesystem::temp_directory_path() / "ppwave_inf.csv").string();
  write_nonzero_csv(path2, net, nz);
  std::ifstream in2(path2);
  std::ostringstream os2;
  os2 << in2.rdbuf();
  CHECK(os2.str().find("# fitted_lower_exponent") != std::string::npos);
}
