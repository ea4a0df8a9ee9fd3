// Strict delta nets generated by scaling a fixed mollifier, plus numerical
// verification of the three defining conditions: support confinement, unit
// mass in the limit, and a uniform L1 bound.
#pragma once

#include <cmath>
#include <functional>
#include <string>
#include <vector>

#include "ppwave/common.hpp"
#include "ppwave/quadrature.hpp"

namespace ppwave {

struct Mollifier {
  std::string name;
  std::function<double(double)> rho;  // smooth, supported in [-1,1]
  double mass = 0.0;                  // integral of rho
  double l1 = 0.0;                    // integral of |rho|
};

inline Mollifier make_mollifier(const std::string& name, std::function<double(double)> rho,
                                double quad_tol = 1e-13) {
  Mollifier m;
  m.name = name;
  m.rho = std::move(rho);
  m.mass = integrate_adaptive(m.rho, -1.0, 1.0, quad_tol).value;
  m.l1 = integrate_adaptive([&m](double x) { return std::abs(m.rho(x)); }, -1.0, 1.0, quad_tol).value;
  if (std::abs(m.mass) < 1e-12) throw config_error("mollifier has (numerically) zero mass: " + name);
  return m;
}

// delta_eps(x) = rho(x/eps) / (eps * normalizer). With normalizer = mass the
// net has unit mass for every eps; the L1 bound C = l1/|normalizer| is
// eps-independent by substitution.
struct StrictDeltaNet {
  Mollifier mollifier;
  double normalizer = 1.0;
  double C = 0.0;

  double eval(double eps, double x) const {
    if (!(eps > 0.0)) throw domain_error("delta net: eps must be positive");
    if (std::abs(x) >= eps) return 0.0;  // support confined to [-eps, eps]
    return mollifier.rho(x / eps) / (eps * normalizer);
  }
};

enum class ModelNet { bump, cosine_squared, asymmetric_bump };

inline StrictDeltaNet model_net(ModelNet kind) {
  Mollifier m;
  switch (kind) {
    case ModelNet::bump:
      m = make_mollifier("bump", [](double x) {
        if (std::abs(x) >= 1.0) return 0.0;
        return std::exp(-1.0 / (1.0 - x * x));
      });
      break;
    case ModelNet::cosine_squared:
      m = make_mollifier("cosine_squared", [](double x) {
        if (std::abs(x) >= 1.0) return 0.0;
        const double c = std::cos(0.5 * M_PI * x);
        return c * c;
      });
      break;
    case ModelNet::asymmetric_bump:
      // bump recentred at 0.3 with half-width 0.5; not an even function
      m = make_mollifier("asymmetric_bump", [](double x) {
        const double t = (x - 0.3) / 0.5;
        if (std::abs(t) >= 1.0) return 0.0;
        return std::exp(-1.0 / (1.0 - t * t));
      });
      break;
  }
  StrictDeltaNet net;
  net.mollifier = m;
  net.normalizer = m.mass;
  net.C = m.l1 / std::abs(m.mass);
  return net;
}

inline StrictDeltaNet model_net(const std::string& name) {
  if (name == "bump") return model_net(ModelNet::bump);
  if (name == "cosine_squared") return model_net(ModelNet::cosine_squared);
  if (name == "asymmetric_bump") return model_net(ModelNet::asymmetric_bump);
  throw config_error("unknown delta net kind: " + name);
}

struct EpsSchedule {
  std::vector<double> values;  // strictly decreasing, all positive

  static EpsSchedule geometric(double start, double ratio, int count) {
    if (!(start > 0.0)) throw config_error("eps schedule: start must be positive");
    if (!(ratio > 0.0 && ratio < 1.0)) throw config_error("eps schedule: ratio must be in (0,1)");
    if (count < 1) throw config_error("eps schedule: count must be >= 1");
    EpsSchedule s;
    double v = start;
    for (int i = 0; i < count; ++i) {
      s.values.push_back(v);
      v *= ratio;
    }
    return s;
  }

  void validate() const {
    if (values.empty()) throw config_error("eps schedule: empty");
    for (size_t i = 0; i < values.size(); ++i) {
      if (!(values[i] > 0.0)) throw config_error("eps schedule: values must be positive");
      if (i > 0 && !(values[i] < values[i - 1]))
        throw config_error("eps schedule: values must be strictly decreasing");
    }
  }

  double smallest() const { return values.back(); }
};

struct DeltaCheckReport {
  bool support_ok = false;
  std::vector<double> eps;
  std::vector<double> mass_error;  // |integral - 1| per eps
  std::vector<double> l1;          // integral of |delta_eps| per eps
  double l1_bound = 0.0;           // max over the schedule
};

// Verifies the three strict-delta-net conditions along a schedule. `tol` is
// the quadrature tolerance; failures to converge surface as numerical_error
// naming the offending eps.
inline DeltaCheckReport check_strict_delta(const StrictDeltaNet& net, const EpsSchedule& sched,
                                           double tol) {
  if (!(tol > 0.0)) throw domain_error("check_strict_delta: tol must be positive");
  sched.validate();
  DeltaCheckReport rep;
  rep.support_ok = true;
  for (double eps : sched.values) {
    // 64 probes outside the support, half on each side
    for (int k = 1; k <= 32; ++k) {
      const double x = eps * (1.0 + static_cast<double>(k) / 32.0);
      if (net.eval(eps, x) != 0.0 || net.eval(eps, -x) != 0.0) rep.support_ok = false;
    }
    double mass, l1;
    try {
      mass = integrate_adaptive([&](double x) { return net.eval(eps, x); }, -eps, eps, tol).value;
      l1 = integrate_adaptive([&](double x) { return std::abs(net.eval(eps, x)); }, -eps, eps, tol).value;
    } catch (const numerical_error& e) {
      throw numerical_error("delta-net quadrature failed at eps=" + format_g17(eps) + ": " + e.what());
    }
    rep.eps.push_back(eps);
    rep.mass_error.push_back(std::abs(mass - 1.0));
    rep.l1.push_back(l1);
    rep.l1_bound = std::max(rep.l1_bound, l1);
  }
  return rep;
}

}  // namespace ppwave
