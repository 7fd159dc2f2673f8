#pragma once

#include <cmath>
#include <functional>
#include <limits>
#include <vector>

#include "qchan/linalg.hpp"
#include "qchan/rng.hpp"
#include "qchan/threads.hpp"

namespace qchan {

/// Evenly spread unit directions: the full circle for dim 2, a Fibonacci
/// spiral for dim 3. dim 1 returns both signs.
inline std::vector<RealVec> sphere_grid(int dim, int count) {
  std::vector<RealVec> dirs;
  if (dim == 1) {
    RealVec plus(1), minus(1);
    plus << 1.0;
    minus << -1.0;
    dirs = {plus, minus};
    return dirs;
  }
  if (dim == 2) {
    dirs.reserve(static_cast<std::size_t>(count));
    for (int k = 0; k < count; ++k) {
      double a = 2.0 * M_PI * k / count;
      RealVec s(2);
      s << std::cos(a), std::sin(a);
      dirs.push_back(s);
    }
    return dirs;
  }
  if (dim == 3) {
    dirs.reserve(static_cast<std::size_t>(count));
    const double golden = M_PI * (3.0 - std::sqrt(5.0));
    for (int k = 0; k < count; ++k) {
      double z = 1.0 - 2.0 * (k + 0.5) / count;
      double r = std::sqrt(std::max(0.0, 1.0 - z * z));
      double a = golden * k;
      RealVec s(3);
      s << r * std::cos(a), r * std::sin(a), z;
      dirs.push_back(s);
    }
    return dirs;
  }
  // higher dimensions: deterministic Gaussian directions
  Rng rng(0x51D5u, static_cast<std::uint64_t>(dim));
  dirs.reserve(static_cast<std::size_t>(count));
  for (int k = 0; k < count; ++k) {
    RealVec s(dim);
    double nrm = 0.0;
    do {
      for (int i = 0; i < dim; ++i) s[i] = rng.normal();
      nrm = s.norm();
    } while (nrm < 1e-12);
    dirs.push_back(s / nrm);
  }
  return dirs;
}

struct AscentOptions {
  int max_iters = 200;
  double init_step = 0.1;
  double min_step = 1e-12;
  double f_tol = 1e-13;
  int patience = 4;
};

/// Projected gradient ascent on the unit sphere in R^n with numerical
/// gradients and step halving. Objectives may return -inf to veto a point.
inline std::pair<RealVec, double> ascend_on_sphere(
    const std::function<double(const RealVec&)>& f, RealVec x, const AscentOptions& opt = {}) {
  auto normalize = [](RealVec v) {
    double n = v.norm();
    if (n < 1e-14) {
      v.setZero();
      v[0] = 1.0;
      return v;
    }
    return RealVec(v / n);
  };
  x = normalize(x);
  double fx = f(x);
  if (!std::isfinite(fx)) return {x, fx};
  double step = opt.init_step;
  int stale = 0;
  const int n = static_cast<int>(x.size());
  for (int iter = 0; iter < opt.max_iters && stale < opt.patience; ++iter) {
    RealVec g(n);
    const double h = 1e-6;
    for (int i = 0; i < n; ++i) {
      RealVec xp = x, xm = x;
      xp[i] += h;
      xm[i] -= h;
      double fp = f(normalize(xp));
      double fm = f(normalize(xm));
      if (!std::isfinite(fp) || !std::isfinite(fm)) {
        g[i] = 0.0;
        continue;
      }
      g[i] = (fp - fm) / (2.0 * h);
    }
    // tangent component only
    g -= g.dot(x) * x;
    double gn = g.norm();
    if (gn < 1e-14) break;
    bool improved = false;
    while (step >= opt.min_step) {
      RealVec cand = normalize(x + (step / gn) * g);
      double fc = f(cand);
      if (std::isfinite(fc) && fc > fx + opt.f_tol * std::max(1.0, std::abs(fx))) {
        x = cand;
        fx = fc;
        step = std::min(step * 1.5, 1.0);
        improved = true;
        break;
      }
      step *= 0.5;
    }
    if (!improved) {
      ++stale;
      step = std::max(step, opt.min_step * 8);
    } else {
      stale = 0;
    }
  }
  return {x, fx};
}

struct MultistartResult {
  RealVec best_x;
  double best_value = -std::numeric_limits<double>::infinity();
  int restarts_used = 0;
};

/// Independent restarts (optionally seeded with fixed starting points first),
/// each ascended separately; ties resolve to the lowest restart index so the
/// outcome is independent of scheduling.
inline MultistartResult multistart_on_sphere(
    const std::function<double(const RealVec&)>& f, int dim, int restarts, std::uint64_t seed,
    const std::vector<RealVec>& fixed_starts = {}, const AscentOptions& opt = {}) {
  int total = restarts;
  std::vector<double> values(static_cast<std::size_t>(total),
                             -std::numeric_limits<double>::infinity());
  std::vector<RealVec> args(static_cast<std::size_t>(total));
  parallel_for(static_cast<std::size_t>(total), [&](std::size_t r) {
    RealVec x0(dim);
    if (r < fixed_starts.size()) {
      x0 = fixed_starts[r];
    } else {
      Rng rng(seed, r);
      for (int i = 0; i < dim; ++i) x0[i] = rng.normal();
    }
    auto [x, v] = ascend_on_sphere(f, x0, opt);
    values[r] = v;
    args[r] = x;
  });
  MultistartResult out;
  out.restarts_used = total;
  for (int r = 0; r < total; ++r) {
    if (values[static_cast<std::size_t>(r)] > out.best_value) {
      out.best_value = values[static_cast<std::size_t>(r)];
      out.best_x = args[static_cast<std::size_t>(r)];
    }
  }
  return out;
}

/// Least-squares slope of y against x.
inline double ls_slope(const std::vector<double>& x, const std::vector<double>& y) {
  if (x.size() != y.size() || x.size() < 2)
    throw std::invalid_argument("ls_slope: need at least two points");
  double mx = 0, my = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= static_cast<double>(x.size());
  my /= static_cast<double>(x.size());
  double sxy = 0, sxx = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxy += (x[i] - mx) * (y[i] - my);
    sxx += (x[i] - mx) * (x[i] - mx);
  }
  if (sxx == 0) throw std::invalid_argument("ls_slope: degenerate abscissae");
  return sxy / sxx;
}

}  // namespace qchan
