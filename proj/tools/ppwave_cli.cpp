// Experiment runner. Subcommands: delta-check, geodesic, transform,
// injectivity, invert, convergence, pullback, accept.
// Exit codes: 0 ok, 1 validation error, 2 numerical failure, 3 acceptance failure.
#include <cstdio>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "ppwave/acceptance.hpp"
#include "ppwave/experiment.hpp"

namespace {

struct GlobalFlags {
  std::string config_path;
  std::string out_dir;
  long long seed = -1;
  int threads = 0;
};

ppwave::ExperimentConfig resolve_config(const GlobalFlags& flags) {
  ppwave::ExperimentConfig cfg;
  if (!flags.config_path.empty()) cfg = ppwave::load_config(flags.config_path);
  if (!flags.out_dir.empty()) cfg.out_dir = flags.out_dir;
  if (flags.seed >= 0) cfg.seed = static_cast<uint64_t>(flags.seed);
  if (flags.threads > 0) cfg.threads = flags.threads;
  ppwave::validate(cfg);
  return cfg;
}

int run_accept(const ppwave::ExperimentConfig& cfg) {
  ppwave::AcceptanceSettings settings;
  settings.seed = cfg.seed;
  settings.steps_per_eps = cfg.steps_per_eps;
  settings.threads = cfg.threads;
  const auto results = ppwave::run_acceptance(settings);
  bool all = true;
  for (const auto& r : results) {
    std::cout << ppwave::format_criterion_line(r) << "\n";
    all = all && r.pass;
  }
  std::cout << (all ? "ACCEPTANCE: all criteria passed" : "ACCEPTANCE: failures present") << "\n";
  return all ? 0 : 3;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Impulsive pp-wave coordinate-transformation toolkit"};
  app.require_subcommand(1);
  app.fallthrough();

  GlobalFlags flags;
  app.add_option("--config", flags.config_path, "path to a JSON experiment config");
  app.add_option("--out", flags.out_dir, "output directory (overrides config)");
  app.add_option("--seed", flags.seed, "probe seed (overrides config)");
  app.add_option("--threads", flags.threads, "worker threads (overrides config)");

  const std::vector<std::string> subcommands = {"delta-check", "geodesic", "transform",
                                                "injectivity", "invert",   "convergence",
                                                "pullback",    "accept"};
  for (const auto& name : subcommands) app.add_subcommand(name);

  CLI11_PARSE(app, argc, argv);
  const std::string sub = app.get_subcommands().front()->get_name();

  try {
    const auto cfg = resolve_config(flags);
    if (sub == "accept") return run_accept(cfg);
    std::string summary;
    if (sub == "delta-check") summary = ppwave::run_delta_check(cfg);
    else if (sub == "geodesic") summary = ppwave::run_geodesic(cfg);
    else if (sub == "transform") summary = ppwave::run_transform(cfg);
    else if (sub == "injectivity") summary = ppwave::run_injectivity(cfg);
    else if (sub == "invert") summary = ppwave::run_invert(cfg);
    else if (sub == "convergence") summary = ppwave::run_convergence(cfg);
    else if (sub == "pullback") summary = ppwave::run_pullback(cfg);
    std::cout << summary << "\n";
    return 0;
  } catch (const ppwave::config_error& e) {
    std::cerr << "validation error: " << e.what() << "\n";
    return 1;
  } catch (const ppwave::domain_error& e) {
    std::cerr << "validation error: " << e.what() << "\n";
    return 1;
  } catch (const ppwave::numerical_error& e) {
    std::cerr << "numerical failure: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
}
