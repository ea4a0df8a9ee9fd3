// Core utilities shared across the library: error types, small fixed-size
// linear algebra, axis-aligned boxes, deterministic counter-based random
// probes, log-log fitting, CSV emission and a minimal parallel-for.
#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <functional>
#include <limits>
#include <mutex>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

namespace ppwave {

// ---------------------------------------------------------------------------
// Error taxonomy. config_error: bad user input / configuration (exit 1).
// domain_error: violated operation precondition (exit 1). numerical_error:
// runtime numerical failure such as blow-up, quadrature budget exhaustion or
// Newton non-convergence (exit 2).
// ---------------------------------------------------------------------------

class config_error : public std::runtime_error {
 public:
  explicit config_error(const std::string& msg) : std::runtime_error(msg) {}
};

class domain_error : public std::runtime_error {
 public:
  explicit domain_error(const std::string& msg) : std::runtime_error(msg) {}
};

class numerical_error : public std::runtime_error {
 public:
  explicit numerical_error(const std::string& msg) : std::runtime_error(msg) {}
};

// ---------------------------------------------------------------------------
// Small vectors and matrices
// ---------------------------------------------------------------------------

struct Vec2 {
  double x = 0.0, y = 0.0;

  double& operator[](int i) { return i == 0 ? x : y; }
  double operator[](int i) const { return i == 0 ? x : y; }
};

inline Vec2 operator+(Vec2 a, Vec2 b) { return {a.x + b.x, a.y + b.y}; }
inline Vec2 operator-(Vec2 a, Vec2 b) { return {a.x - b.x, a.y - b.y}; }
inline Vec2 operator*(double s, Vec2 a) { return {s * a.x, s * a.y}; }
inline double dot(Vec2 a, Vec2 b) { return a.x * b.x + a.y * b.y; }
inline double norm(Vec2 a) { return std::hypot(a.x, a.y); }

using Vec4 = std::array<double, 4>;

inline Vec4 operator-(const Vec4& a, const Vec4& b) {
  return {a[0] - b[0], a[1] - b[1], a[2] - b[2], a[3] - b[3]};
}
inline double norm(const Vec4& a) {
  return std::sqrt(a[0] * a[0] + a[1] * a[1] + a[2] * a[2] + a[3] * a[3]);
}

struct Mat2 {
  // row-major: a b / c d
  double a = 0.0, b = 0.0, c = 0.0, d = 0.0;
};

inline double det(const Mat2& m) { return m.a * m.d - m.b * m.c; }

// Solves m z = r; throws numerical_error on a vanishing determinant.
inline Vec2 solve(const Mat2& m, Vec2 r) {
  const double dm = det(m);
  if (dm == 0.0 || !std::isfinite(dm))
    throw numerical_error("singular 2x2 system");
  return {(r.x * m.d - r.y * m.b) / dm, (m.a * r.y - m.c * r.x) / dm};
}

// Spectral norm of a symmetric 2x2 matrix [[a,b],[b,c]].
inline double spectral_norm_sym2(double a, double b, double c) {
  const double mean = 0.5 * (a + c);
  const double rad = std::hypot(0.5 * (a - c), b);
  return std::abs(mean) + rad;
}

struct Mat4 {
  std::array<double, 16> m{};  // row-major

  double& operator()(int i, int j) { return m[static_cast<size_t>(4 * i + j)]; }
  double operator()(int i, int j) const { return m[static_cast<size_t>(4 * i + j)]; }

  static Mat4 identity() {
    Mat4 r;
    for (int i = 0; i < 4; ++i) r(i, i) = 1.0;
    return r;
  }
};

inline Mat4 operator*(const Mat4& a, const Mat4& b) {
  Mat4 r;
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j) {
      double s = 0.0;
      for (int k = 0; k < 4; ++k) s += a(i, k) * b(k, j);
      r(i, j) = s;
    }
  return r;
}

inline Mat4 transpose(const Mat4& a) {
  Mat4 r;
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j) r(i, j) = a(j, i);
  return r;
}

inline double det3(double a00, double a01, double a02, double a10, double a11,
                   double a12, double a20, double a21, double a22) {
  return a00 * (a11 * a22 - a12 * a21) - a01 * (a10 * a22 - a12 * a20) +
         a02 * (a10 * a21 - a11 * a20);
}

// Determinant by cofactor expansion along the first row.
inline double det4(const Mat4& a) {
  double s = 0.0;
  for (int j = 0; j < 4; ++j) {
    double sub[9];
    int k = 0;
    for (int i = 1; i < 4; ++i)
      for (int c = 0; c < 4; ++c) {
        if (c == j) continue;
        sub[k++] = a(i, c);
      }
    const double minor = det3(sub[0], sub[1], sub[2], sub[3], sub[4], sub[5],
                              sub[6], sub[7], sub[8]);
    s += ((j % 2 == 0) ? 1.0 : -1.0) * a(0, j) * minor;
  }
  return s;
}

// Leading principal minors of orders 1..4.
inline std::array<double, 4> principal_minors(const Mat4& a) {
  std::array<double, 4> r{};
  r[0] = a(0, 0);
  r[1] = a(0, 0) * a(1, 1) - a(0, 1) * a(1, 0);
  r[2] = det3(a(0, 0), a(0, 1), a(0, 2), a(1, 0), a(1, 1), a(1, 2), a(2, 0),
              a(2, 1), a(2, 2));
  r[3] = det4(a);
  return r;
}

// ---------------------------------------------------------------------------
// Axis-aligned boxes in R^k and tensor grids
// ---------------------------------------------------------------------------

struct Box {
  std::vector<double> lo, hi;

  Box() = default;
  Box(std::vector<double> l, std::vector<double> h) : lo(std::move(l)), hi(std::move(h)) {
    if (lo.size() != hi.size()) throw config_error("box: lo/hi dimension mismatch");
    for (size_t i = 0; i < lo.size(); ++i)
      if (!(lo[i] <= hi[i])) throw config_error("box: lo > hi on axis " + std::to_string(i));
  }

  size_t dim() const { return lo.size(); }

  bool contains(const std::vector<double>& p, double margin = 0.0) const {
    for (size_t i = 0; i < lo.size(); ++i)
      if (p[i] < lo[i] + margin || p[i] > hi[i] - margin) return false;
    return true;
  }

  // Distance from p to the complement, measured per axis (<=0 outside).
  double interior_margin(const std::vector<double>& p) const {
    double m = std::numeric_limits<double>::infinity();
    for (size_t i = 0; i < lo.size(); ++i)
      m = std::min(m, std::min(p[i] - lo[i], hi[i] - p[i]));
    return m;
  }

  Box inflated(double r) const {
    Box b = *this;
    for (size_t i = 0; i < lo.size(); ++i) {
      b.lo[i] -= r;
      b.hi[i] += r;
    }
    return b;
  }
};

inline std::vector<double> linspace(double a, double b, int n) {
  std::vector<double> v(static_cast<size_t>(n));
  if (n == 1) {
    v[0] = 0.5 * (a + b);
    return v;
  }
  for (int i = 0; i < n; ++i)
    v[static_cast<size_t>(i)] = a + (b - a) * static_cast<double>(i) / (n - 1);
  v.back() = b;
  return v;
}

// Visits every node of the tensor grid with `res` points per axis.
inline void for_each_grid_point(const Box& box, const std::vector<int>& res,
                                const std::function<void(const std::vector<double>&)>& fn) {
  const size_t d = box.dim();
  if (res.size() != d) throw config_error("grid resolution dimension mismatch");
  std::vector<std::vector<double>> axes(d);
  size_t total = 1;
  for (size_t i = 0; i < d; ++i) {
    axes[i] = linspace(box.lo[i], box.hi[i], res[i]);
    total *= static_cast<size_t>(res[i]);
  }
  std::vector<double> p(d);
  for (size_t idx = 0; idx < total; ++idx) {
    size_t rem = idx;
    for (size_t i = 0; i < d; ++i) {
      const size_t n = static_cast<size_t>(res[i]);
      p[i] = axes[i][rem % n];
      rem /= n;
    }
    fn(p);
  }
}

// ---------------------------------------------------------------------------
// Deterministic counter-based pseudo-random probes (splitmix64)
// ---------------------------------------------------------------------------

inline uint64_t splitmix64(uint64_t z) {
  z += 0x9e3779b97f4a7c15ull;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
  return z ^ (z >> 31);
}

class CounterRng {
 public:
  explicit CounterRng(uint64_t seed) : seed_(seed) {}

  // Value depends only on (seed, counter); calls advance the counter.
  double uniform() {
    const uint64_t bits = splitmix64(seed_ ^ splitmix64(counter_++));
    return static_cast<double>(bits >> 11) * (1.0 / 9007199254740992.0);
  }

  double uniform(double a, double b) { return a + (b - a) * uniform(); }

  std::vector<double> point_in(const Box& box) {
    std::vector<double> p(box.dim());
    for (size_t i = 0; i < p.size(); ++i) p[i] = uniform(box.lo[i], box.hi[i]);
    return p;
  }

  uint64_t seed() const { return seed_; }

 private:
  uint64_t seed_;
  uint64_t counter_ = 0;
};

// ---------------------------------------------------------------------------
// Least-squares line fit in log-log coordinates
// ---------------------------------------------------------------------------

struct LogLogFit {
  double slope = 0.0;
  double intercept = 0.0;  // of log(y) against log(x)
  double residual = 0.0;   // RMS of fit residuals in log space
};

inline LogLogFit fit_loglog(const std::vector<double>& x, const std::vector<double>& y) {
  if (x.size() != y.size() || x.size() < 2)
    throw domain_error("fit_loglog: need at least 2 samples");
  const size_t n = x.size();
  std::vector<double> lx(n), ly(n);
  for (size_t i = 0; i < n; ++i) {
    if (!(x[i] > 0.0)) throw domain_error("fit_loglog: nonpositive abscissa");
    lx[i] = std::log(x[i]);
    // Clamp so that identically-zero families fit as steeply decaying
    // rather than producing NaNs.
    ly[i] = std::log(std::max(y[i], 1e-300));
  }
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (size_t i = 0; i < n; ++i) {
    sx += lx[i];
    sy += ly[i];
    sxx += lx[i] * lx[i];
    sxy += lx[i] * ly[i];
  }
  const double dn = static_cast<double>(n);
  const double denom = dn * sxx - sx * sx;
  LogLogFit fit;
  fit.slope = (dn * sxy - sx * sy) / denom;
  fit.intercept = (sy - fit.slope * sx) / dn;
  double ss = 0;
  for (size_t i = 0; i < n; ++i) {
    const double r = ly[i] - (fit.intercept + fit.slope * lx[i]);
    ss += r * r;
  }
  fit.residual = std::sqrt(ss / dn);
  return fit;
}

// ---------------------------------------------------------------------------
// Output formatting: all floats printed with 17 significant digits so that
// repeated runs are byte-identical.
// ---------------------------------------------------------------------------

inline std::string format_g17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

class CsvWriter {
 public:
  CsvWriter(const std::string& path, const std::vector<std::string>& header) : out_(path) {
    if (!out_) throw config_error("cannot open output file: " + path);
    for (size_t i = 0; i < header.size(); ++i) out_ << (i ? "," : "") << header[i];
    out_ << "\n";
  }

  void row(const std::vector<double>& vals) {
    for (size_t i = 0; i < vals.size(); ++i) out_ << (i ? "," : "") << format_g17(vals[i]);
    out_ << "\n";
  }

  void row_mixed(const std::vector<std::string>& vals) {
    for (size_t i = 0; i < vals.size(); ++i) out_ << (i ? "," : "") << vals[i];
    out_ << "\n";
  }

 private:
  std::ofstream out_;
};

// ---------------------------------------------------------------------------
// Minimal static-partition parallel for. Results must be written to
// preallocated per-index slots so the reduction order is fixed and output
// stays deterministic for any thread count.
// ---------------------------------------------------------------------------

inline void parallel_for(size_t n, int threads, const std::function<void(size_t)>& body) {
  if (threads <= 1 || n <= 1) {
    for (size_t i = 0; i < n; ++i) body(i);
    return;
  }
  const size_t nt = std::min<size_t>(static_cast<size_t>(threads), n);
  std::vector<std::thread> pool;
  pool.reserve(nt);
  std::exception_ptr first_error;
  std::mutex err_mu;
  for (size_t t = 0; t < nt; ++t) {
    pool.emplace_back([&, t]() {
      try {
        for (size_t i = t; i < n; i += nt) body(i);
      } catch (...) {
        std::lock_guard<std::mutex> lk(err_mu);
        if (!first_error) first_error = std::current_exception();
      }
    });
  }
  for (auto& th : pool) th.join();
  if (first_error) std::rethrow_exception(first_error);
}

// Kink function and Heaviside step with the value at 0 fixed to 0.
inline double u_plus(double u) { return u > 0.0 ? u : 0.0; }
inline double heaviside(double u) { return u > 0.0 ? 1.0 : 0.0; }

}  // namespace ppwave
