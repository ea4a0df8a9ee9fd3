// Sampled eps-parameterized function families, with empirical probes for the
// asymptotic notions: growth order of sup-norms, compact boundedness, and
// strict non-zeroness. A finite schedule can only witness these properties,
// never decide them; every result here is a fitted-slope report.
#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <map>
#include <optional>
#include <vector>

#include "ppwave/common.hpp"
#include "ppwave/delta_nets.hpp"

namespace ppwave {

using MultiIndex = std::vector<int>;

struct SampledNet {
  Box domain_box;
  std::vector<int> grid;          // points per axis
  std::vector<double> eps;        // decreasing schedule
  int ncomp = 1;
  // derivative multi-index -> per-eps flattened samples (grid-major, then component)
  std::map<MultiIndex, std::vector<std::vector<double>>> values;

  size_t points() const {
    size_t n = 1;
    for (int r : grid) n *= static_cast<size_t>(r);
    return n;
  }
};

// Samples a scalar family u_eps(x); `derivs` lists additional derivative
// callables keyed by multi-index.
inline SampledNet sample_family(
    const Box& box, const std::vector<int>& grid, const EpsSchedule& sched, int ncomp,
    const std::function<std::vector<double>(const std::vector<double>&, double)>& fn,
    const std::map<MultiIndex, std::function<std::vector<double>(const std::vector<double>&, double)>>&
        derivs = {}) {
  sched.validate();
  SampledNet net;
  net.domain_box = box;
  net.grid = grid;
  net.eps = sched.values;
  net.ncomp = ncomp;
  auto sample_one = [&](const std::function<std::vector<double>(const std::vector<double>&, double)>& f) {
    std::vector<std::vector<double>> per_eps;
    for (double e : sched.values) {
      std::vector<double> vals;
      vals.reserve(net.points() * static_cast<size_t>(ncomp));
      for_each_grid_point(box, grid, [&](const std::vector<double>& p) {
        const auto v = f(p, e);
        vals.insert(vals.end(), v.begin(), v.end());
      });
      per_eps.push_back(std::move(vals));
    }
    return per_eps;
  };
  net.values[MultiIndex(box.dim(), 0)] = sample_one(fn);
  for (const auto& [alpha, f] : derivs) net.values[alpha] = sample_one(f);
  return net;
}

enum class GrowthClass { bounded, moderate, decaying };

struct GrowthReport {
  double fitted_exponent = 0.0;  // slope of log sup-norm against log eps
  double residual = 0.0;
  GrowthClass classification = GrowthClass::bounded;
  int order = 0;  // N for moderate (sup ~ eps^-N), m for decaying (sup ~ eps^m)
  std::vector<double> sup_per_eps;
  std::vector<int> grid_resolution;  // the sup is a grid maximum at this resolution
};

inline GrowthReport estimate_growth_order(const SampledNet& net, const MultiIndex& alpha) {
  auto it = net.values.find(alpha);
  if (it == net.values.end())
    throw domain_error("estimate_growth_order: no samples for requested derivative order");
  if (net.eps.size() < 3)
    throw domain_error("estimate_growth_order: need at least 3 schedule points");
  GrowthReport rep;
  rep.grid_resolution = net.grid;
  bool all_zero = true;
  for (const auto& vals : it->second) {
    double sup = 0.0;
    for (double v : vals) sup = std::max(sup, std::abs(v));
    rep.sup_per_eps.push_back(sup);
    if (sup != 0.0) all_zero = false;
  }
  if (all_zero) {
    // identically-zero family: decays faster than any power
    rep.fitted_exponent = std::numeric_limits<double>::infinity();
    rep.classification = GrowthClass::decaying;
    rep.order = std::numeric_limits<int>::max();
    return rep;
  }
  const auto fit = fit_loglog(net.eps, rep.sup_per_eps);
  rep.fitted_exponent = fit.slope;
  rep.residual = fit.residual;
  if (fit.slope >= 0.9) {
    rep.classification = GrowthClass::decaying;
    rep.order = static_cast<int>(std::lround(fit.slope));
  } else if (fit.slope >= -0.1) {
    rep.classification = GrowthClass::bounded;
    rep.order = 0;
  } else {
    rep.classification = GrowthClass::moderate;
    rep.order = static_cast<int>(std::ceil(-fit.slope - 1e-9));
  }
  return rep;
}

struct CBoundedResult {
  bool ok = false;
  double threshold_eps = 0.0;      // largest scheduled eps from which containment holds
  Box witness_hull;                // hull of samples over the contained suffix
  std::optional<std::vector<double>> escape_point;  // a sample outside the target box
  double escape_eps = 0.0;
};

// True iff below some scheduled threshold every sampled value lies in the
// (closed) target box; the witness is the componentwise hull.
inline CBoundedResult check_cbounded(const SampledNet& net, const Box& target_box) {
  const auto it = net.values.find(MultiIndex(net.domain_box.dim(), 0));
  if (it == net.values.end()) throw domain_error("check_cbounded: missing base samples");
  if (static_cast<size_t>(net.ncomp) != target_box.dim())
    throw domain_error("check_cbounded: target box dimension must match component count");

  const size_t ne = net.eps.size();
  std::vector<Box> hulls(ne);
  std::vector<bool> inside(ne, true);
  std::vector<std::vector<double>> escapes(ne);
  for (size_t k = 0; k < ne; ++k) {
    const auto& vals = it->second[k];
    std::vector<double> lo(static_cast<size_t>(net.ncomp), std::numeric_limits<double>::infinity());
    std::vector<double> hi(static_cast<size_t>(net.ncomp), -std::numeric_limits<double>::infinity());
    for (size_t i = 0; i + static_cast<size_t>(net.ncomp) <= vals.size(); i += static_cast<size_t>(net.ncomp)) {
      std::vector<double> v(vals.begin() + static_cast<long>(i),
                            vals.begin() + static_cast<long>(i) + net.ncomp);
      for (int c = 0; c < net.ncomp; ++c) {
        lo[static_cast<size_t>(c)] = std::min(lo[static_cast<size_t>(c)], v[static_cast<size_t>(c)]);
        hi[static_cast<size_t>(c)] = std::max(hi[static_cast<size_t>(c)], v[static_cast<size_t>(c)]);
      }
      if (!target_box.contains(v) && inside[k]) {
        inside[k] = false;
        escapes[k] = v;
      }
    }
    hulls[k] = Box(lo, hi);
  }
  // containment must hold on a suffix of the schedule (all smaller eps)
  CBoundedResult res;
  size_t first_ok = ne;
  for (size_t k = ne; k-- > 0;) {
    if (!inside[k]) break;
    first_ok = k;
  }
  if (first_ok == ne) {
    res.ok = false;
    // witness the escape at the smallest failing eps
    for (size_t k = ne; k-- > 0;) {
      if (!inside[k]) {
        res.escape_point = escapes[k];
        res.escape_eps = net.eps[k];
        break;
      }
    }
    return res;
  }
  res.ok = true;
  res.threshold_eps = net.eps[first_ok];
  Box hull = hulls[first_ok];
  for (size_t k = first_ok + 1; k < ne; ++k)
    for (size_t c = 0; c < hull.lo.size(); ++c) {
      hull.lo[c] = std::min(hull.lo[c], hulls[k].lo[c]);
      hull.hi[c] = std::max(hull.hi[c], hulls[k].hi[c]);
    }
  res.witness_hull = hull;
  return res;
}

struct NonzeroReport {
  std::vector<double> inf_per_eps;
  double fitted_lower_exponent = 0.0;
  double C = 0.0;  // lower-envelope constant for inf >= C * eps^N
  int N = 0;
  bool surrogate_ok = false;  // all sampled infima strictly positive
};

inline NonzeroReport check_strictly_nonzero(const SampledNet& net) {
  if (net.ncomp != 1) throw domain_error("check_strictly_nonzero: scalar nets only");
  const auto it = net.values.find(MultiIndex(net.domain_box.dim(), 0));
  if (it == net.values.end()) throw domain_error("check_strictly_nonzero: missing base samples");
  NonzeroReport rep;
  for (const auto& vals : it->second) {
    double inf = std::numeric_limits<double>::infinity();
    for (double v : vals) inf = std::min(inf, std::abs(v));
    rep.inf_per_eps.push_back(inf);
  }
  const auto fit = fit_loglog(net.eps, rep.inf_per_eps);
  rep.fitted_lower_exponent = fit.slope;
  rep.N = std::max(0, static_cast<int>(std::ceil(fit.slope - 0.05)));
  rep.surrogate_ok = true;
  double c = std::numeric_limits<double>::infinity();
  for (size_t k = 0; k < net.eps.size(); ++k) {
    if (!(rep.inf_per_eps[k] > 0.0)) rep.surrogate_ok = false;
    c = std::min(c, rep.inf_per_eps[k] / std::pow(net.eps[k], rep.N));
  }
  rep.C = rep.surrogate_ok ? c : 0.0;
  return rep;
}

// CSV emitters: one row per eps with the monitored statistic, followed by a
// comment row carrying the log-log fit diagnostics.
inline void write_growth_csv(const std::string& path, const SampledNet& net,
                             const GrowthReport& rep) {
  CsvWriter csv(path, {"eps", "sup_norm"});
  for (size_t k = 0; k < net.eps.size(); ++k) csv.row({net.eps[k], rep.sup_per_eps[k]});
  csv.row_mixed({"# fitted_exponent", format_g17(rep.fitted_exponent)});
  csv.row_mixed({"# fit_residual", format_g17(rep.residual)});
}

inline void write_nonzero_csv(const std::string& path, const SampledNet& net,
                              const NonzeroReport& rep) {
  CsvWriter csv(path, {"eps", "inf"});
  for (size_t k = 0; k < net.eps.size(); ++k) csv.row({net.eps[k], rep.inf_per_eps[k]});
  csv.row_mixed({"# fitted_lower_exponent", format_g17(rep.fitted_lower_exponent)});
}

// Grid maximum of |fn| over a box with one local refinement pass around the
// coarse maximizer. Deterministic surrogate for a sup-norm on a compact set.
inline double sup_on_box(const std::function<double(const std::vector<double>&)>& fn,
                         const Box& box, int res) {
  const size_t d = box.dim();
  std::vector<int> grid(d, res);
  double best = -std::numeric_limits<double>::infinity();
  std::vector<double> arg(d, 0.0);
  for_each_grid_point(box, grid, [&](const std::vector<double>& p) {
    const double v = std::abs(fn(p));
    if (v > best) {
      best = v;
      arg = p;
    }
  });
  // one refinement pass: resample the cell neighbourhood of the maximizer
  Box local = box;
  for (size_t i = 0; i < d; ++i) {
    const double h = (box.hi[i] - box.lo[i]) / std::max(1, res - 1);
    local.lo[i] = std::max(box.lo[i], arg[i] - h);
    local.hi[i] = std::min(box.hi[i], arg[i] + h);
  }
  std::vector<int> fine(d, 5);
  for_each_grid_point(local, fine, [&](const std::vector<double>& p) {
    best = std::max(best, std::abs(fn(p)));
  });
  return best;
}

}  // namespace ppwave
