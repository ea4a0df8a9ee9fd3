// Experiment configuration and the runners behind the CLI subcommands.
// Config is a single JSON file; every run echoes the effective configuration
// and writes CSV tables / JSON certificates with fixed 17-significant-digit
// float formatting so identical configs produce identical bytes.
#pragma once

#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include <json.hpp>

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

using json = nlohmann::ordered_json;

struct ExperimentConfig {
  std::string profile = "quadratic_saddle";
  std::string net = "bump";
  double eps_start = 0.1;
  double eps_ratio = 0.5;
  int eps_count = 4;
  int steps_per_eps = 64;
  uint64_t seed = 20240211;
  int threads = 1;
  std::string out_dir = "out";

  // region boxes and grids
  std::vector<double> domain_xy = {-1.0, 1.0, -1.0, 1.0};       // lo/hi pairs (X, Y)
  std::vector<double> convergence_box = {-1, 1, -1, 1, -1, 1, -1, 1};  // (U,X,Y,V)
  double derivative_gap = 0.1;
  int convergence_res = 33;
  std::vector<double> injectivity_K = {-1.0, 1.0, -1.0, 1.0};
  int collision_grid = 9;
  double minor_delta = 0.5;
  std::vector<double> geodesic_init = {1.0, 1.0, 0.0, 0.0, 0.0, 0.0};  // x0, xdot0, v0, vdot0
  double geodesic_u_end = 1.0;
  std::vector<double> pullback_point = {0.5, 0.3, 0.4, 0.0};
  std::vector<double> transform_points;  // flat (U,X,Y,V) tuples; empty = grid mode
  bool transform_jacobian = true;

  // inversion experiment
  std::vector<double> inversion_anchor = {0.0, 1.0, 1.0, 0.0};
  std::vector<double> inversion_R = {0.0, 2.0, 0.0, 2.0};
  double inversion_beta = 1.0;
  std::vector<double> inversion_I = {-4.0, 4.0};

  // tolerances (acceptance thresholds are pinned in acceptance.hpp; these
  // drive the standalone subcommands)
  double delta_check_tol = 1e-12;

  EpsSchedule schedule() const { return EpsSchedule::geometric(eps_start, eps_ratio, eps_count); }
  Box domain_box() const { return Box({domain_xy[0], domain_xy[2]}, {domain_xy[1], domain_xy[3]}); }
  Box convergence_region() const {
    return Box({convergence_box[0], convergence_box[2], convergence_box[4], convergence_box[6]},
               {convergence_box[1], convergence_box[3], convergence_box[5], convergence_box[7]});
  }
  Box injectivity_box() const {
    return Box({injectivity_K[0], injectivity_K[2]}, {injectivity_K[1], injectivity_K[3]});
  }
  Box inversion_R_box() const {
    return Box({inversion_R[0], inversion_R[2]}, {inversion_R[1], inversion_R[3]});
  }
};

namespace detail {

inline void expect_pairs(const std::vector<double>& v, size_t pairs, const std::string& field) {
  if (v.size() != 2 * pairs) throw config_error("config field " + field + ": expected " +
                                                std::to_string(2 * pairs) + " numbers");
  for (size_t i = 0; i < pairs; ++i)
    if (!(v[2 * i] <= v[2 * i + 1]))
      throw config_error("config field " + field + ": lo > hi in pair " + std::to_string(i));
}

template <typename T>
void read_field(const json& j, const std::string& key, T& dst) {
  if (j.contains(key)) dst = j.at(key).get<T>();
}

}  // namespace detail

inline void validate(const ExperimentConfig& c) {
  if (!(c.eps_start > 0.0)) throw config_error("config field eps.start: must be positive");
  if (!(c.eps_ratio > 0.0 && c.eps_ratio < 1.0))
    throw config_error("config field eps.ratio: schedule must be decreasing (ratio in (0,1))");
  if (c.eps_count < 3) throw config_error("config field eps.count: must be >= 3");
  if (c.steps_per_eps < 64) throw config_error("config field steps_per_eps: must be >= 64");
  if (c.threads < 1) throw config_error("config field threads: must be >= 1");
  if (!(c.delta_check_tol > 0.0)) throw config_error("config field tolerances.delta_check: must be positive");
  if (!(c.derivative_gap > 0.0)) throw config_error("config field derivative_gap: must be positive");
  if (c.convergence_res < 3) throw config_error("config field convergence_res: must be >= 3");
  if (c.collision_grid < 3) throw config_error("config field collision_grid: must be >= 3");
  if (!(c.minor_delta > 0.0 && c.minor_delta < 1.0))
    throw config_error("config field minor_delta: must be in (0,1)");
  detail::expect_pairs(c.domain_xy, 2, "domain_xy");
  detail::expect_pairs(c.convergence_box, 4, "convergence_box");
  detail::expect_pairs(c.injectivity_K, 2, "injectivity_K");
  detail::expect_pairs(c.inversion_R, 2, "inversion_R");
  detail::expect_pairs(c.inversion_I, 1, "inversion_I");
  if (c.geodesic_init.size() != 6) throw config_error("config field geodesic_init: expected 6 numbers");
  if (c.pullback_point.size() != 4) throw config_error("config field pullback_point: expected 4 numbers");
  if (c.transform_points.size() % 4 != 0)
    throw config_error("config field transform_points: expected flat (U,X,Y,V) tuples");
  if (c.inversion_anchor.size() != 4) throw config_error("config field inversion_anchor: expected 4 numbers");
  if (!(c.inversion_beta > 0.0)) throw config_error("config field inversion_beta: must be positive");
  builtin_profile(c.profile);  // rejects unknown names
  model_net(c.net);
}

inline ExperimentConfig parse_config(const json& j) {
  ExperimentConfig c;
  detail::read_field(j, "profile", c.profile);
  detail::read_field(j, "net", c.net);
  if (j.contains("eps")) {
    const auto& e = j.at("eps");
    detail::read_field(e, "start", c.eps_start);
    detail::read_field(e, "ratio", c.eps_ratio);
    detail::read_field(e, "count", c.eps_count);
  }
  detail::read_field(j, "steps_per_eps", c.steps_per_eps);
  detail::read_field(j, "seed", c.seed);
  detail::read_field(j, "threads", c.threads);
  detail::read_field(j, "out_dir", c.out_dir);
  detail::read_field(j, "domain_xy", c.domain_xy);
  detail::read_field(j, "convergence_box", c.convergence_box);
  detail::read_field(j, "derivative_gap", c.derivative_gap);
  detail::read_field(j, "convergence_res", c.convergence_res);
  detail::read_field(j, "injectivity_K", c.injectivity_K);
  detail::read_field(j, "collision_grid", c.collision_grid);
  detail::read_field(j, "minor_delta", c.minor_delta);
  detail::read_field(j, "geodesic_init", c.geodesic_init);
  detail::read_field(j, "geodesic_u_end", c.geodesic_u_end);
  detail::read_field(j, "pullback_point", c.pullback_point);
  detail::read_field(j, "transform_points", c.transform_points);
  detail::read_field(j, "transform_jacobian", c.transform_jacobian);
  detail::read_field(j, "inversion_anchor", c.inversion_anchor);
  detail::read_field(j, "inversion_R", c.inversion_R);
  detail::read_field(j, "inversion_beta", c.inversion_beta);
  detail::read_field(j, "inversion_I", c.inversion_I);
  if (j.contains("tolerances")) detail::read_field(j.at("tolerances"), "delta_check", c.delta_check_tol);
  validate(c);
  return c;
}

inline ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw config_error("cannot open config file: " + path);
  json j;
  try {
    in >> j;
  } catch (const std::exception& e) {
    throw config_error(std::string("config parse error: ") + e.what());
  }
  return parse_config(j);
}

inline json effective_config(const ExperimentConfig& c) {
  json j;
  j["profile"] = c.profile;
  j["net"] = c.net;
  j["eps"] = {{"start", c.eps_start}, {"ratio", c.eps_ratio}, {"count", c.eps_count}};
  j["steps_per_eps"] = c.steps_per_eps;
  j["seed"] = c.seed;
  j["threads"] = c.threads;
  j["out_dir"] = c.out_dir;
  j["domain_xy"] = c.domain_xy;
  j["convergence_box"] = c.convergence_box;
  j["derivative_gap"] = c.derivative_gap;
  j["convergence_res"] = c.convergence_res;
  j["injectivity_K"] = c.injectivity_K;
  j["collision_grid"] = c.collision_grid;
  j["minor_delta"] = c.minor_delta;
  j["geodesic_init"] = c.geodesic_init;
  j["geodesic_u_end"] = c.geodesic_u_end;
  j["pullback_point"] = c.pullback_point;
  j["transform_points"] = c.transform_points;
  j["transform_jacobian"] = c.transform_jacobian;
  j["inversion_anchor"] = c.inversion_anchor;
  j["inversion_R"] = c.inversion_R;
  j["inversion_beta"] = c.inversion_beta;
  j["inversion_I"] = c.inversion_I;
  j["tolerances"] = {{"delta_check", c.delta_check_tol}};
  return j;
}

// ---------------------------------------------------------------------------
// Runners. Each writes its artifacts under out_dir and returns a short
// human-readable summary.
// ---------------------------------------------------------------------------

namespace detail {

inline void write_text(const std::filesystem::path& p, const std::string& text) {
  std::ofstream out(p);
  if (!out) throw config_error("cannot open output file: " + p.string());
  out << text;
}

inline void echo_config(const ExperimentConfig& c, const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);
  write_text(dir / "effective_config.json", effective_config(c).dump(2) + "\n");
}

}  // namespace detail

inline std::string run_delta_check(const ExperimentConfig& c) {
  const std::filesystem::path dir(c.out_dir);
  detail::echo_config(c, dir);
  const auto net = model_net(c.net);
  const auto rep = check_strict_delta(net, c.schedule(), c.delta_check_tol);
  CsvWriter csv((dir / "delta_check.csv").string(), {"eps", "mass_error", "l1"});
  for (size_t i = 0; i < rep.eps.size(); ++i) csv.row({rep.eps[i], rep.mass_error[i], rep.l1[i]});
  return "delta-check: support_ok=" + std::string(rep.support_ok ? "true" : "false") +
         " l1_bound=" + format_g17(rep.l1_bound);
}

inline std::string run_geodesic(const ExperimentConfig& c) {
  const std::filesystem::path dir(c.out_dir);
  detail::echo_config(c, dir);
  const auto f = builtin_profile(c.profile);
  const auto net = model_net(c.net);
  const auto& gi = c.geodesic_init;
  const InitialData init{{gi[0], gi[1]}, {gi[2], gi[3]}, gi[4], gi[5]};
  for (double eps : c.schedule().values) {
    const auto tr = integrate_geodesic(f, net, eps, init, c.geodesic_u_end, c.steps_per_eps);
    CsvWriter csv((dir / ("geodesic_eps_" + format_g17(eps) + ".csv")).string(),
                  {"u", "x1", "x2", "v", "xdot1", "xdot2"});
    for (size_t i = 0; i < tr.u.size(); ++i)
      csv.row({tr.u[i], tr.x[i].x, tr.x[i].y, tr.v[i], tr.xdot[i].x, tr.xdot[i].y});
  }
  return "geodesic: wrote " + std::to_string(c.schedule().values.size()) + " trajectories";
}

inline std::string run_transform(const ExperimentConfig& c) {
  const std::filesystem::path dir(c.out_dir);
  detail::echo_config(c, dir);
  const auto f = builtin_profile(c.profile);
  const auto net = model_net(c.net);
  const auto fam = make_family(f, net, c.schedule(), c.steps_per_eps, c.domain_box());

  std::vector<std::string> header = {"eps", "U", "X", "Y", "V", "tU", "tX", "tY", "tV"};
  if (c.transform_jacobian)
    for (const char* col : {"J10", "J11", "J12", "J20", "J21", "J22", "J30", "J31", "J32",
                            "minor1", "minor2", "minor3", "minor4"})
      header.push_back(col);
  CsvWriter csv((dir / "transform.csv").string(), header);

  // explicit points from the config, or a grid over the domain box
  std::vector<SpacetimePoint> points;
  if (!c.transform_points.empty()) {
    for (size_t i = 0; i + 4 <= c.transform_points.size(); i += 4)
      points.push_back({c.transform_points[i], c.transform_points[i + 1],
                        c.transform_points[i + 2], c.transform_points[i + 3]});
  } else {
    const Box region = c.convergence_region();
    for (double U : linspace(region.lo[0], region.hi[0], 5))
      for (double X : linspace(c.domain_xy[0], c.domain_xy[1], 5))
        for (double Y : linspace(c.domain_xy[2], c.domain_xy[3], 5)) points.push_back({U, X, Y, 0.0});
  }

  for (size_t m = 0; m < fam.size(); ++m) {
    const auto& ev = fam.at(m);
    for (const SpacetimePoint& p : points) {
      const SpacetimePoint t = ev.t_eps(p);
      std::vector<double> row = {ev.eps(), p.U, p.X, p.Y, p.V, t.U, t.X, t.Y, t.V};
      if (c.transform_jacobian) {
        const JacobianSample js = ev.jacobian(p);
        for (double v : {js.J(1, 0), js.J(1, 1), js.J(1, 2), js.J(2, 0), js.J(2, 1), js.J(2, 2),
                         js.J(3, 0), js.J(3, 1), js.J(3, 2), js.minors[0], js.minors[1],
                         js.minors[2], js.minors[3]})
          row.push_back(v);
      }
      csv.row(row);
    }
  }
  return "transform: wrote " + std::to_string(points.size()) + " points for " +
         std::to_string(fam.size()) + " eps values";
}

inline std::string run_injectivity(const ExperimentConfig& c) {
  const std::filesystem::path dir(c.out_dir);
  detail::echo_config(c, dir);
  const auto f = builtin_profile(c.profile);
  const auto net = model_net(c.net);
  const Box K = c.injectivity_box();
  const auto fam = make_family(f, net, c.schedule(), c.steps_per_eps, K);

  std::vector<double> alpha_search;
  for (int k = 18; k >= 1; --k) alpha_search.push_back(0.05 * k);
  PropertyEOptions popts;
  popts.n_grid = c.collision_grid;
  popts.threads = c.threads;
  const auto prop_e = check_property_E(fam, K, alpha_search, popts);
  MinorCertificateOptions mopts;
  mopts.threads = c.threads;
  const auto cert = minor_certificate(fam, K, c.minor_delta, mopts);

  json j;
  j["profile"] = c.profile;
  j["K"] = c.injectivity_K;
  j["admitted_eps"] = prop_e.admitted_eps;
  j["property_E"] = {{"certified", prop_e.certified},
                     {"alpha", prop_e.alpha},
                     {"eps0", prop_e.eps0},
                     {"collisions", json::array()}};
  for (const auto& col : prop_e.collisions) {
    j["property_E"]["collisions"].push_back(
        {{"eps", col.eps},
         {"a", {col.a.U, col.a.X, col.a.Y, col.a.V}},
         {"b", {col.b.U, col.b.X, col.b.Y, col.b.V}},
         {"image_dist", col.image_dist}});
  }
  j["minor_certificate"] = {{"certified", cert.certified},
                            {"delta", cert.delta},
                            {"eta", cert.eta},
                            {"eps0", cert.eps0},
                            {"worst_minor_deviation", cert.worst_minor_deviation}};
  detail::write_text(dir / "injectivity.json", j.dump(2) + "\n");
  return "injectivity: property_E " + std::string(prop_e.certified ? "certified" : "not certified") +
         ", minors " + std::string(cert.certified ? "certified" : "not certified");
}

inline std::string run_convergence(const ExperimentConfig& c) {
  const std::filesystem::path dir(c.out_dir);
  detail::echo_config(c, dir);
  const auto f = builtin_profile(c.profile);
  const auto net = model_net(c.net);
  const Box region = c.convergence_region();
  const Box xy({region.lo[1], region.lo[2]}, {region.hi[1], region.hi[2]});
  const auto fam = make_family(f, net, c.schedule(), c.steps_per_eps, xy);
  const auto ts = converge_s(fam, region, c.convergence_res, c.threads);
  const auto td = converge_derivatives(fam, region, c.derivative_gap, c.convergence_res, c.threads);
  CsvWriter s_csv((dir / "s_convergence.csv").string(), {"eps", "sup_norm"});
  for (const auto& r : ts.rows) s_csv.row({r.eps, r.sup});
  CsvWriter d_csv((dir / "derivative_convergence.csv").string(), {"eps", "sup_norm"});
  for (const auto& r : td.rows) d_csv.row({r.eps, r.sup});
  return "convergence: final sup(s)=" + format_g17(ts.final_sup()) +
         " final sup(du)=" + format_g17(td.final_sup());
}

inline std::string run_pullback(const ExperimentConfig& c) {
  const std::filesystem::path dir(c.out_dir);
  detail::echo_config(c, dir);
  const auto f = builtin_profile(c.profile);
  const auto net = model_net(c.net);
  const auto& pp = c.pullback_point;
  const SpacetimePoint p{pp[0], pp[1], pp[2], pp[3]};
  const Box xy({p.X - 0.5, p.Y - 0.5}, {p.X + 0.5, p.Y + 0.5});
  const auto fam = make_family(f, net, c.schedule(), c.steps_per_eps, xy);
  static const char* names[4] = {"U", "X", "Y", "V"};
  CsvWriter csv((dir / "pullback.csv").string(), {"eps", "entry", "pulled", "target", "gap"});
  double final_gap = 0.0;
  for (size_t m = 0; m < fam.size(); ++m) {
    const auto res = pullback_check(fam.at(m), p);
    for (int i = 0; i < 4; ++i)
      for (int j = i; j < 4; ++j)
        csv.row_mixed({format_g17(fam.at(m).eps()), std::string(names[i]) + names[j],
                       format_g17(res.pulled.g(i, j)), format_g17(res.target.g(i, j)),
                       format_g17(std::abs(res.pulled.g(i, j) - res.target.g(i, j)))});
    final_gap = res.max_abs_gap;
  }
  return "pullback: final max gap=" + format_g17(final_gap);
}

inline std::string run_invert(const ExperimentConfig& c) {
  const std::filesystem::path dir(c.out_dir);
  detail::echo_config(c, dir);
  const auto f = builtin_profile(c.profile);
  const auto net = model_net(c.net);
  const auto& an = c.inversion_anchor;
  const SpacetimePoint p{an[0], an[1], an[2], an[3]};
  const Box R = c.inversion_R_box();
  const auto fam = make_family(f, net, c.schedule(), c.steps_per_eps, R.inflated(0.2));
  InversionOptions opts;
  opts.threads = c.threads;
  const auto data = build_inversion_data(fam, p, R, c.inversion_beta,
                                         {c.inversion_I[0], c.inversion_I[1]}, opts);
  const auto comp = composition_residuals(data, fam, opts);

  json j;
  j["anchor_p"] = {data.anchor_p.U, data.anchor_p.X, data.anchor_p.Y, data.anchor_p.V};
  j["anchor_q"] = {data.anchor_q.U, data.anchor_q.X, data.anchor_q.Y, data.anchor_q.V};
  j["P"] = {{"beta", data.P.beta},
            {"gamma", data.P.gamma},
            {"R", c.inversion_R},
            {"I", c.inversion_I}};
  j["Q"] = {{"center", {data.Q.center.U, data.Q.center.X, data.Q.center.Y, data.Q.center.V}},
            {"radius_spatial", data.Q.radius_spatial},
            {"half_height", data.Q.half_height}};
  j["delta"] = data.delta;
  j["eta"] = data.eta;
  j["eps0"] = data.eps0;
  j["certified_alpha"] = data.certified_alpha;
  j["certified_eps"] = data.certified_eps;
  detail::write_text(dir / "inversion_certificate.json", j.dump(2) + "\n");

  CsvWriter csv((dir / "inversion_residuals.csv").string(),
                {"eps", "forward_residual", "roundtrip_residual"});
  for (size_t i = 0; i < comp.eps.size(); ++i)
    csv.row({comp.eps[i], comp.forward_residual[i], comp.roundtrip_residual[i]});
  return "invert: eps0=" + format_g17(data.eps0) + " delta=" + format_g17(data.delta) +
         " eta=" + format_g17(data.eta);
}

}  // namespace ppwave
