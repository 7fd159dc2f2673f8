#pragma once

#include <algorithm>
#include <cstdint>
#include <cstring>
#include <functional>
#include <map>
#include <numeric>
#include <optional>
#include <vector>

#include "qchan/bounds.hpp"
#include "qchan/channel.hpp"
#include "qchan/family.hpp"
#include "qchan/rng.hpp"
#include "qchan/threads.hpp"

namespace qchan {

/// Conditional law of an estimate given the true parameter. Discrete support;
/// sample_count > 0 marks an empirical law built from that many draws.
struct EstimatorDistribution {
  std::vector<RealVec> points;
  std::vector<double> probs;
  RealVec conditioned_on;
  std::int64_t sample_count = 0;

  void validate() const {
    if (points.size() != probs.size() || points.empty())
      throw std::invalid_argument("estimator distribution: empty or mismatched support");
    double sum = 0.0;
    for (double p : probs) {
      if (p < 0.0) throw std::invalid_argument("estimator distribution: negative probability");
      sum += p;
    }
    if (std::abs(sum - 1.0) > 1e-12)
      throw std::invalid_argument("estimator distribution: probabilities do not sum to 1");
  }
};

/// Radius of the smallest ball around the true value that captures the
/// estimate with confidence p: the p-quantile of the distance law, reported
/// as the conservative (upper) quantile on ties.
inline double inaccuracy(double p, const EstimatorDistribution& dist) {
  if (p <= 0.0 || p >= 1.0) throw std::invalid_argument("inaccuracy: p must be in (0,1)");
  dist.validate();
  std::vector<std::pair<double, double>> dp;
  dp.reserve(dist.points.size());
  for (std::size_t i = 0; i < dist.points.size(); ++i)
    dp.emplace_back((dist.points[i] - dist.conditioned_on).norm(), dist.probs[i]);
  std::sort(dp.begin(), dp.end(),
            [](const auto& a, const auto& b) { return a.first < b.first; });
  double cum = 0.0;
  for (const auto& [d, pr] : dp) {
    cum += pr;
    if (cum >= p - 1e-15) return d;
  }
  return dp.back().first;
}

inline double mse_of_distribution(const EstimatorDistribution& dist) {
  dist.validate();
  double mse = 0.0;
  for (std::size_t i = 0; i < dist.points.size(); ++i)
    mse += dist.probs[i] * (dist.points[i] - dist.conditioned_on).squaredNorm();
  return mse;
}

struct ChebyshevCheck {
  double lhs = 0.0;
  double rhs = 0.0;
  bool ok = false;
};

/// Inaccuracy against the Chebyshev-type bound sqrt(MSE / (1 - p)).
inline ChebyshevCheck chebyshev_bound_check(const EstimatorDistribution& dist, double p) {
  ChebyshevCheck c;
  c.lhs = inaccuracy(p, dist);
  c.rhs = std::sqrt(mse_of_distribution(dist) / (1.0 - p));
  c.ok = c.lhs <= c.rhs + 1e-12;
  return c;
}

struct ContinuityCheck {
  bool ok = false;
  bool skipped = false;
  double lower = 0.0, middle = 0.0, upper = 0.0;
};

/// For two distributions induced by the same measurement on states eps-close
/// in trace norm, the inaccuracies interleave:
/// delta_a(p - eps) <= delta_b(p) <= delta_a(p + eps).
inline ContinuityCheck continuity_check(const EstimatorDistribution& dist_a,
                                        const EstimatorDistribution& dist_b, double eps,
                                        double p) {
  ContinuityCheck c;
  if (p - eps <= 0.0 || p + eps >= 1.0) {
    c.skipped = true;
    c.ok = true;
    return c;
  }
  c.lower = inaccuracy(p - eps, dist_a);
  c.middle = inaccuracy(p, dist_b);
  c.upper = inaccuracy(p + eps, dist_a);
  c.ok = c.lower <= c.middle + 1e-12 && c.middle <= c.upper + 1e-12;
  return c;
}

/// Volume of the v-dimensional Euclidean ball of radius delta.
inline double ball_volume(int v, double delta) {
  if (v < 1 || delta < 0.0) throw std::invalid_argument("ball_volume: bad arguments");
  return std::pow(std::sqrt(M_PI) * delta, v) / std::tgamma(0.5 * v + 1.0);
}

struct MiBounds {
  double bound1 = 0.0;
  double bound2 = 0.0;
  bool condition_ok = false;
};

/// Lower bounds on the mutual information between an estimate and the true
/// parameter, given the prior entropy H_T (bits), the confidence level p, the
/// worst-case inaccuracy delta_p, and the box volume. bound2 is the weakened
/// closed form and never exceeds bound1 when the validity condition holds.
inline MiBounds mutual_info_lower_bounds(double h_t, double p, double delta_p, int v,
                                         double box_volume) {
  if (p <= 0.0 || p >= 1.0) throw std::invalid_argument("mutual_info: p must be in (0,1)");
  if (delta_p <= 0.0 || box_volume <= 0.0)
    throw std::invalid_argument("mutual_info: delta_p and volume must be positive");
  MiBounds out;
  double big = std::pow(2.0, v) * box_volume;
  double ball = ball_volume(v, delta_p);
  out.condition_ok = ball <= p * big;  // log((1-p)/p) <= log((big - ball)/ball)
  double neg_inf = -std::numeric_limits<double>::infinity();
  out.bound1 = (big - ball) > 0.0
                   ? h_t - p * std::log2(ball / p) - (1.0 - p) * std::log2((big - ball) / (1.0 - p))
                   : neg_inf;
  out.bound2 = h_t - p * v * std::log2(std::sqrt(M_PI) * delta_p) +
               p * std::log2(std::tgamma(0.5 * v + 1.0)) - (1.0 - p) * std::log2(big) -
               binary_entropy(p);
  return out;
}

struct MseRecord {
  RealMat matrix;
  double trace = 0.0;
  enum class Method { exact_enumeration, monte_carlo } method = Method::exact_enumeration;

  void validate() const {
    if (matrix.rows() != matrix.cols())
      throw std::invalid_argument("mse record: matrix must be square");
    RealMat sym = 0.5 * (matrix + matrix.transpose());
    Eigen::SelfAdjointEigenSolver<RealMat> es(sym);
    if (es.eigenvalues().minCoeff() < -1e-10 * std::max(1.0, es.eigenvalues().maxCoeff()))
      throw std::invalid_argument("mse record: matrix must be positive semidefinite");
  }
};

/// Exact Born-rule evaluation of the mean squared error matrix for an
/// explicit POVM over the output of n channel uses on a (possibly entangled)
/// probe with a reference system.
inline MseRecord mse_matrix(const Mat& probe, const ChannelFamily& f, const RealVec& t,
                            const std::vector<std::pair<Mat, RealVec>>& povm, int n) {
  Channel c = f.eval(t);
  Channel cn = tensor_power(c, n);
  if (probe.rows() != probe.cols()) throw DimensionError("mse_matrix: probe must be square");
  if (probe.rows() % cn.d_in != 0)
    throw DimensionError("mse_matrix: probe dimension incompatible with channel uses");
  Eigen::Index d_ref = probe.rows() / cn.d_in;
  Eigen::Index d_out_total = cn.d_out * d_ref;
  Mat completeness = Mat::Zero(d_out_total, d_out_total);
  for (const auto& [effect, est] : povm) {
    if (effect.rows() != d_out_total || effect.cols() != d_out_total)
      throw DimensionError("mse_matrix: effect dimension mismatch");
    if (est.size() != f.v) throw DimensionError("mse_matrix: estimate dimension mismatch");
    completeness += effect;
  }
  if (max_abs(completeness - Mat::Identity(d_out_total, d_out_total)) > 1e-8)
    throw std::invalid_argument("mse_matrix: POVM is not complete");
  // mixed probes are handled by applying the channel to each eigenvector
  EigH ep = eig_hermitian(probe);
  Mat rho_out = Mat::Zero(d_out_total, d_out_total);
  for (Eigen::Index k = 0; k < ep.values.size(); ++k) {
    if (ep.values[k] <= 1e-15) continue;
    rho_out += ep.values[k] *
               apply_choi_bipartite(cn.choi, cn.d_in, cn.d_out, ep.vectors.col(k), d_ref);
  }
  MseRecord rec;
  rec.matrix = RealMat::Zero(f.v, f.v);
  for (const auto& [effect, est] : povm) {
    double prob = std::max(0.0, std::real((effect * rho_out).trace()));
    RealVec err = t - est;
    rec.matrix += prob * (err * err.transpose());
  }
  rec.trace = rec.matrix.trace();
  rec.method = MseRecord::Method::exact_enumeration;
  rec.validate();
  return rec;
}

/// A product estimation strategy: one probe and one POVM per channel use,
/// with an estimator that reads only the outcome counts.
struct ProductStrategy {
  Mat probe;                 // single-copy input state
  std::vector<Mat> effects;  // single-copy POVM on the output
  std::function<RealVec(const std::vector<std::int64_t>&, std::int64_t)> estimate;
};

/// Single-copy MLE strategy for flip-type Pauli families: probe |0><0|,
/// measure in the computational basis, estimate the flip rate by frequency.
inline ProductStrategy mle_flip_strategy() {
  ProductStrategy s;
  s.probe = Mat::Zero(2, 2);
  s.probe(0, 0) = 1.0;
  Mat e0 = Mat::Zero(2, 2), e1 = Mat::Zero(2, 2);
  e0(0, 0) = 1.0;
  e1(1, 1) = 1.0;
  s.effects = {e0, e1};
  s.estimate = [](const std::vector<std::int64_t>& counts, std::int64_t n) {
    RealVec t(1);
    t[0] = static_cast<double>(counts[1]) / static_cast<double>(n);
    return t;
  };
  return s;
}

inline std::vector<double> outcome_probabilities(const ChannelFamily& f, const RealVec& t,
                                                 const ProductStrategy& s) {
  Channel c = f.eval(t);
  Mat out = apply_channel(c, s.probe);
  std::vector<double> q;
  double sum = 0.0;
  for (const Mat& e : s.effects) {
    double p = std::max(0.0, std::real((e * out).trace()));
    q.push_back(p);
    sum += p;
  }
  if (std::abs(sum - 1.0) > 1e-8)
    throw std::invalid_argument("strategy: single-copy POVM is not complete on this output");
  for (double& p : q) p /= sum;
  return q;
}

/// Exact MSE of a counts-only product strategy by enumeration of outcome
/// types; feasible for small n or few outcomes.
inline MseRecord exact_product_mse(const ChannelFamily& f, const RealVec& t,
                                   const ProductStrategy& s, std::int64_t n) {
  std::vector<double> q = outcome_probabilities(f, t, s);
  const std::size_t m = q.size();
  double type_count = 1.0;
  for (std::size_t i = 1; i < m; ++i) type_count *= (static_cast<double>(n) + i) / i;
  if (type_count > 2e6)
    throw std::invalid_argument("exact_product_mse: too many outcome types; use sampling");
  MseRecord rec;
  rec.matrix = RealMat::Zero(f.v, f.v);
  rec.method = MseRecord::Method::exact_enumeration;
  std::vector<std::int64_t> counts(m, 0);
  double lgn = std::lgamma(static_cast<double>(n) + 1.0);
  std::function<void(std::size_t, std::int64_t)> rec_fn = [&](std::size_t sym,
                                                              std::int64_t left) {
    if (sym == m - 1) {
      counts[sym] = left;
      double lp = lgn;
      bool impossible = false;
      for (std::size_t i = 0; i < m; ++i) {
        lp -= std::lgamma(static_cast<double>(counts[i]) + 1.0);
        if (counts[i] > 0) {
          if (q[i] <= 0.0) {
            impossible = true;
            break;
          }
          lp += static_cast<double>(counts[i]) * std::log(q[i]);
        }
      }
      if (!impossible) {
        double prob = std::exp(lp);
        RealVec err = s.estimate(counts, n) - t;
        rec.matrix += prob * (err * err.transpose());
      }
      return;
    }
    for (std::int64_t k = 0; k <= left; ++k) {
      counts[sym] = k;
      rec_fn(sym + 1, left - k);
    }
  };
  rec_fn(0, n);
  rec.trace = rec.matrix.trace();
  rec.validate();
  return rec;
}

/// Exact conditional law of the estimate for a counts-only strategy.
inline EstimatorDistribution exact_product_distribution(const ChannelFamily& f, const RealVec& t,
                                                        const ProductStrategy& s,
                                                        std::int64_t n) {
  std::vector<double> q = outcome_probabilities(f, t, s);
  if (q.size() != 2)
    throw std::invalid_argument("exact_product_distribution: two-outcome strategies only");
  EstimatorDistribution dist;
  dist.conditioned_on = t;
  double lgn = std::lgamma(static_cast<double>(n) + 1.0);
  for (std::int64_t k = 0; k <= n; ++k) {
    double lp;
    if (q[1] == 0.0)
      lp = k == 0 ? 0.0 : -std::numeric_limits<double>::infinity();
    else if (q[1] == 1.0)
      lp = k == n ? 0.0 : -std::numeric_limits<double>::infinity();
    else
      lp = lgn - std::lgamma(static_cast<double>(k) + 1.0) -
           std::lgamma(static_cast<double>(n - k) + 1.0) + k * std::log(q[1]) +
           (n - k) * std::log(q[0]);
    dist.points.push_back(s.estimate({n - k, k}, n));
    dist.probs.push_back(std::exp(lp));
  }
  double sum = std::accumulate(dist.probs.begin(), dist.probs.end(), 0.0);
  for (double& p : dist.probs) p /= sum;
  return dist;
}

struct ExperimentReport {
  double mse_empirical = 0.0;
  double mse_stderr = 0.0;
  double inaccuracy_p = 0.0;
  double mi_empirical = 0.0;
  double mi_stderr = 0.0;
  double mi_worst_inaccuracy = 0.0;  // worst empirical inaccuracy over the prior grid
  MiBounds mi_bounds;
  std::int64_t trials = 0;
  std::int64_t mi_trials_per_point = 0;
  int mi_grid_points = 0;
  double confidence = 0.0;
};

namespace detail {

inline std::int64_t sample_counts_binlike(const std::vector<double>& q, std::int64_t n, Rng& rng,
                                          std::vector<std::int64_t>& counts) {
  std::fill(counts.begin(), counts.end(), 0);
  for (std::int64_t i = 0; i < n; ++i) {
    double u = rng.uniform();
    double cum = 0.0;
    std::size_t pick = q.size() - 1;
    for (std::size_t j = 0; j < q.size(); ++j) {
      cum += q[j];
      if (u < cum) {
        pick = j;
        break;
      }
    }
    ++counts[pick];
  }
  return 0;
}

inline double plugin_entropy_bits(const std::map<std::int64_t, std::int64_t>& hist,
                                  double total) {
  double h = 0.0;
  for (const auto& [k, c] : hist) {
    if (c > 0) {
      double p = static_cast<double>(c) / total;
      h -= p * std::log2(p);
    }
  }
  return h;
}

}  // namespace detail

/// Monte-Carlo estimation experiment for a counts-only product strategy:
/// empirical MSE with standard error, empirical inaccuracy at confidence p,
/// and the plug-in mutual information (Miller-Madow corrected) against a
/// uniform prior over a grid of true values. Deterministic per seed; trial
/// streams are indexed so the run order never matters.
inline ExperimentReport estimation_experiment(const ChannelFamily& f, const ProductStrategy& s,
                                              const RealVec& t, std::int64_t n,
                                              std::int64_t trials, std::uint64_t seed,
                                              double confidence = 0.9, int mi_grid = 64,
                                              std::int64_t mi_trials_per_point = 0) {
  if (f.v != 1)
    throw std::invalid_argument("estimation_experiment: one-parameter families only");
  if (trials < 2) throw std::invalid_argument("estimation_experiment: need at least 2 trials");
  std::vector<double> q = outcome_probabilities(f, t, s);
  ExperimentReport rep;
  rep.trials = trials;
  rep.confidence = confidence;
  std::vector<double> sq_err(static_cast<std::size_t>(trials));
  std::vector<double> dist_err(static_cast<std::size_t>(trials));
  parallel_for(static_cast<std::size_t>(trials), [&](std::size_t i) {
    Rng rng(seed, i);
    std::vector<std::int64_t> counts(q.size(), 0);
    detail::sample_counts_binlike(q, n, rng, counts);
    RealVec err = s.estimate(counts, n) - t;
    sq_err[i] = err.squaredNorm();
    dist_err[i] = err.norm();
  });
  double mean = 0.0;
  for (double x : sq_err) mean += x;
  mean /= static_cast<double>(trials);
  double var = 0.0;
  for (double x : sq_err) var += (x - mean) * (x - mean);
  var /= static_cast<double>(trials - 1);
  rep.mse_empirical = mean;
  rep.mse_stderr = std::sqrt(var / static_cast<double>(trials));
  std::sort(dist_err.begin(), dist_err.end());
  std::size_t idx = static_cast<std::size_t>(
      std::ceil(confidence * static_cast<double>(trials)));
  if (idx < 1) idx = 1;
  if (idx > dist_err.size()) idx = dist_err.size();
  rep.inaccuracy_p = dist_err[idx - 1];

  // mutual information against a uniform prior over a grid of true values
  rep.mi_grid_points = mi_grid;
  if (mi_trials_per_point <= 0)
    mi_trials_per_point = std::max<std::int64_t>(100, trials / std::max(1, mi_grid));
  rep.mi_trials_per_point = mi_trials_per_point;
  auto [lo, hi] = f.box[0];
  std::vector<RealVec> grid_t;
  for (int g = 0; g < mi_grid; ++g) {
    RealVec tt(1);
    tt[0] = lo + (hi - lo) * (g + 0.5) / mi_grid;
    grid_t.push_back(tt);
  }
  struct Cell {
    std::map<std::int64_t, std::int64_t> est_hist;  // key: bit pattern of the estimate
    std::vector<double> dists;
  };
  std::vector<Cell> cells(static_cast<std::size_t>(mi_grid));
  parallel_for(static_cast<std::size_t>(mi_grid), [&](std::size_t g) {
    std::vector<double> qg = outcome_probabilities(f, grid_t[g], s);
    std::vector<std::int64_t> counts(qg.size(), 0);
    Cell& cell = cells[g];
    cell.dists.reserve(static_cast<std::size_t>(mi_trials_per_point));
    for (std::int64_t i = 0; i < mi_trials_per_point; ++i) {
      Rng rng(derive_seed(seed, 0xA11CE + g), static_cast<std::uint64_t>(i));
      detail::sample_counts_binlike(qg, n, rng, counts);
      RealVec est = s.estimate(counts, n);
      double val = est[0];
      std::int64_t key;
      static_assert(sizeof(double) == sizeof(std::int64_t));
      std::memcpy(&key, &val, sizeof(key));
      ++cell.est_hist[key];
      cell.dists.push_back((est - grid_t[g]).norm());
    }
  });
  auto mi_of = [&](int half) {
    // half: 0 = all trials, 1 = first half, 2 = second half
    std::map<std::int64_t, std::int64_t> marg;
    std::map<std::pair<int, std::int64_t>, std::int64_t> joint;
    double total = 0.0;
    for (int g = 0; g < mi_grid; ++g) {
      std::int64_t i0 = 0, i1 = mi_trials_per_point;
      if (half == 1) i1 = mi_trials_per_point / 2;
      if (half == 2) i0 = mi_trials_per_point / 2;
      // rebuild histograms trial by trial for the halves
      if (half == 0) {
        for (const auto& [k, c] : cells[static_cast<std::size_t>(g)].est_hist) {
          marg[k] += c;
          joint[{g, k}] += c;
          total += static_cast<double>(c);
        }
      } else {
        std::vector<double> qg = outcome_probabilities(f, grid_t[static_cast<std::size_t>(g)], s);
        std::vector<std::int64_t> counts(qg.size(), 0);
        for (std::int64_t i = i0; i < i1; ++i) {
          Rng rng(derive_seed(seed, 0xA11CE + static_cast<std::uint64_t>(g)),
                  static_cast<std::uint64_t>(i));
          detail::sample_counts_binlike(qg, n, rng, counts);
          RealVec est = s.estimate(counts, n);
          double val = est[0];
          std::int64_t key;
          std::memcpy(&key, &val, sizeof(key));
          ++marg[key];
          ++joint[{g, key}];
          total += 1.0;
        }
      }
    }
    double h_t_prior = std::log2(static_cast<double>(mi_grid));
    double h_est = detail::plugin_entropy_bits(marg, total);
    double h_joint = 0.0;
    for (const auto& [k, c] : joint) {
      double p = static_cast<double>(c) / total;
      h_joint -= p * std::log2(p);
    }
    double mi = h_t_prior + h_est - h_joint;
    // Miller-Madow correction
    double kx = static_cast<double>(mi_grid), ky = static_cast<double>(marg.size()),
           kxy = static_cast<double>(joint.size());
    mi += ((kx - 1.0) + (ky - 1.0) - (kxy - 1.0)) * log2_e / (2.0 * total);
    return mi;
  };
  rep.mi_empirical = mi_of(0);
  double m1 = mi_of(1), m2 = mi_of(2);
  rep.mi_stderr = 0.5 * std::abs(m1 - m2) + 1e-6;
  double worst = 0.0;
  for (auto& cell : cells) {
    std::sort(cell.dists.begin(), cell.dists.end());
    std::size_t j = static_cast<std::size_t>(
        std::ceil(confidence * static_cast<double>(cell.dists.size())));
    if (j < 1) j = 1;
    if (j > cell.dists.size()) j = cell.dists.size();
    worst = std::max(worst, cell.dists[j - 1]);
  }
  rep.mi_worst_inaccuracy = worst;
  double volume = hi - lo;
  rep.mi_bounds = mutual_info_lower_bounds(std::log2(volume), confidence,
                                           std::max(worst, 1e-12), 1, volume);
  return rep;
}

}  // namespace qchan
