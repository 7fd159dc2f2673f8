#pragma once

#include <cmath>
#include <optional>
#include <vector>

#include "qchan/family.hpp"
#include "qchan/optim.hpp"

namespace qchan {

/// Rate of a metrology-derived lower bound: (1 - eps) * v * beta / 2 qubits
/// per log2 n, where beta is the mean-squared-error exponent of the family.
struct RateStatement {
  int v = 1;
  double beta = 1.0;
  double eps_threshold = 0.0;
  double rate = 0.0;
  enum class Kind { simulation, communication } kind = Kind::simulation;
};

inline RateStatement theorem1_rate(int v, double beta, double eps) {
  if (eps < 0.0 || eps >= 1.0) throw std::invalid_argument("rate: eps must be in [0,1)");
  if (beta <= 0.0) throw std::invalid_argument("rate: beta must be positive");
  if (v < 1) throw std::invalid_argument("rate: v must be >= 1");
  RateStatement r;
  r.v = v;
  r.beta = beta;
  r.eps_threshold = eps;
  r.rate = (1.0 - eps) * v * beta / 2.0;
  r.kind = RateStatement::Kind::simulation;
  return r;
}

/// Same functional, tagged as the program-communication special case.
inline RateStatement corollary1_rate(int v, double beta, double eps) {
  RateStatement r = theorem1_rate(v, beta, eps);
  r.kind = RateStatement::Kind::communication;
  return r;
}

struct CostFit {
  double rate = 0.0;      // bits per log2 n
  double residual = 0.0;  // rms deviation from the fitted line
  int points_used = 0;
};

/// Surrogate for the regularized cost limsup: least-squares slope of bits
/// against log2 n over the top decade of n. Requires at least three samples
/// spanning two decades.
inline CostFit regularized_cost_estimate(const std::vector<std::pair<double, double>>& samples) {
  if (samples.size() < 3)
    throw std::invalid_argument("regularized_cost_estimate: need at least 3 samples");
  for (std::size_t i = 1; i < samples.size(); ++i)
    if (!(samples[i].first > samples[i - 1].first))
      throw std::invalid_argument("regularized_cost_estimate: n must be strictly increasing");
  double n_min = samples.front().first, n_max = samples.back().first;
  if (n_max < 100.0 * n_min * (1.0 - 1e-12))
    throw std::invalid_argument("regularized_cost_estimate: samples must span two decades");
  std::vector<double> x, y;
  for (const auto& [n, bits] : samples) {
    if (n >= n_max / 10.0 * (1.0 - 1e-12)) {
      x.push_back(std::log2(n));
      y.push_back(bits);
    }
  }
  if (x.size() < 2) {
    // top decade holds a single sample; widen to the two largest n
    x.clear();
    y.clear();
    for (std::size_t i = samples.size() - 2; i < samples.size(); ++i) {
      x.push_back(std::log2(samples[i].first));
      y.push_back(samples[i].second);
    }
  }
  CostFit fit;
  fit.points_used = static_cast<int>(x.size());
  fit.rate = ls_slope(x, y);
  double mx = 0, my = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= static_cast<double>(x.size());
  my /= static_cast<double>(x.size());
  double ss = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    double pred = my + fit.rate * (x[i] - mx);
    ss += (y[i] - pred) * (y[i] - pred);
  }
  fit.residual = std::sqrt(ss / static_cast<double>(x.size()));
  return fit;
}

/// Plain least-squares slope of bits against log2 n over all samples.
inline double cost_rate_full_fit(const std::vector<std::pair<double, double>>& samples) {
  std::vector<double> x, y;
  for (const auto& [n, bits] : samples) {
    x.push_back(std::log2(n));
    y.push_back(bits);
  }
  return ls_slope(x, y);
}

inline double binary_entropy(double p) {
  if (p < 0.0 || p > 1.0) throw std::invalid_argument("binary_entropy: p must be in [0,1]");
  // canonicalize on the smaller argument so h(p) and h(1-p) evaluate the
  // same expression
  double lo = std::min(p, 1.0 - p);
  double hi = std::max(p, 1.0 - p);
  if (lo == 0.0) return 0.0;
  return -lo * std::log2(lo) - hi * std::log2(hi);
}

enum class BetaClass { sql_one, heisenberg_two, unknown };

/// Classifies the error exponent of a family: constant Choi support means
/// the standard-quantum-limit exponent 1; unitary-tagged families carry
/// exponent 2. Nothing is inferred numerically.
inline BetaClass classify_beta(const ChannelFamily& f,
                               const std::vector<RealVec>& sample_points = {}) {
  std::vector<RealVec> pts = sample_points.empty() ? box_sample_grid(f) : sample_points;
  if (check_condition_support_constant(f, pts)) return BetaClass::sql_one;
  if (f.unitary_tagged) return BetaClass::heisenberg_two;
  return BetaClass::unknown;
}

inline double beta_value(BetaClass c) {
  switch (c) {
    case BetaClass::sql_one: return 1.0;
    case BetaClass::heisenberg_two: return 2.0;
    default: throw std::invalid_argument("beta_value: class unknown; supply beta explicitly");
  }
}

}  // namespace qchan
