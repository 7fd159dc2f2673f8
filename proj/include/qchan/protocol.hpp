#pragma once

#include <bit>
#include <cstdint>
#include <optional>
#include <vector>

#include "qchan/bounds.hpp"
#include "qchan/divergence.hpp"
#include "qchan/fisher.hpp"

namespace qchan {

/// Cubic lattice discretization of the parameter box: the points of
/// (spacing * Z^v) that fall inside the closed box, with
/// spacing = n^(-alpha-1/2) / sqrt(v * J_max). The lattice is anchored at
/// the origin, not re-centred on the box.
struct DiscretizationGrid {
  double spacing = 0.0;
  int v = 1;
  double n = 1.0;
  double alpha = 0.5;
  double j_r_max = 0.0;
  std::vector<std::pair<std::int64_t, std::int64_t>> z_range;  // per axis, inclusive
  std::vector<std::pair<double, double>> box;

  std::uint64_t num_points() const {
    std::uint64_t total = 1;
    for (const auto& [lo, hi] : z_range) {
      std::uint64_t count = static_cast<std::uint64_t>(hi - lo + 1);
      if (count != 0 && total > (std::uint64_t(1) << 62) / count)
        throw std::overflow_error("grid: point count exceeds 2^62");
      total *= count;
    }
    return total;
  }

  /// ceil(log2(number of points)); the bits needed to index a lattice point.
  int cost_bits() const {
    std::uint64_t n_pts = num_points();
    if (n_pts <= 1) return 0;
    return static_cast<int>(std::bit_width(n_pts - 1));
  }

  /// Materializes the lattice; guarded so huge grids are never expanded.
  std::vector<RealVec> enumerate_points(std::uint64_t limit = 1u << 20) const {
    std::uint64_t total = num_points();
    if (total > limit) throw std::invalid_argument("grid: too many points to enumerate");
    std::vector<RealVec> pts;
    pts.reserve(static_cast<std::size_t>(total));
    std::vector<std::int64_t> z;
    for (const auto& [lo, hi] : z_range) z.push_back(lo);
    while (true) {
      RealVec t(v);
      for (int i = 0; i < v; ++i) t[i] = spacing * static_cast<double>(z[static_cast<std::size_t>(i)]);
      pts.push_back(t);
      int axis = v - 1;  // last axis fastest: lexicographic order
      while (axis >= 0) {
        if (++z[static_cast<std::size_t>(axis)] <= z_range[static_cast<std::size_t>(axis)].second)
          break;
        z[static_cast<std::size_t>(axis)] = z_range[static_cast<std::size_t>(axis)].first;
        --axis;
      }
      if (axis < 0) break;
    }
    return pts;
  }
};

/// Builds the lattice for n uses at rate parameter alpha. J_max may be passed
/// in when already computed; otherwise it is estimated from the family.
inline DiscretizationGrid build_grid(const ChannelFamily& f, double n, double alpha,
                                     double j_max = -1.0) {
  if (n < 1.0) throw std::invalid_argument("build_grid: n must be >= 1");
  if (alpha <= 0.0) throw std::invalid_argument("build_grid: alpha must be positive");
  if (j_max < 0.0) {
    try {
      j_max = jr_max(f);
    } catch (const InfiniteFisher&) {
      throw std::invalid_argument(
          "build_grid: the RLD norm diverges on the family (constant-support assumptions "
          "violated)");
    }
  }
  if (!(j_max > 0.0))
    throw std::invalid_argument(
        "build_grid: the RLD norm vanishes on the family (nontrivial parameter dependence "
        "required)");
  if (!std::isfinite(j_max) || j_max > 1e12)
    throw std::invalid_argument("build_grid: the RLD norm diverges on the family");
  DiscretizationGrid g;
  g.v = f.v;
  g.n = n;
  g.alpha = alpha;
  g.j_r_max = j_max;
  g.box = f.box;
  g.spacing = std::pow(n, -alpha - 0.5) / std::sqrt(static_cast<double>(f.v) * j_max);
  for (int i = 0; i < f.v; ++i) {
    auto [lo, hi] = f.box[static_cast<std::size_t>(i)];
    // closed-box inclusion with a relative band on the lattice ratio, so an
    // edge that lands on a lattice point up to rounding is kept
    double rlo = lo / g.spacing, rhi = hi / g.spacing;
    double band = 1e-9 * std::max({1.0, std::abs(rlo), std::abs(rhi)});
    std::int64_t zlo = static_cast<std::int64_t>(std::ceil(rlo - band));
    std::int64_t zhi = static_cast<std::int64_t>(std::floor(rhi + band));
    if (zhi < zlo)
      throw std::logic_error("build_grid: empty lattice intersection on a nonempty box");
    g.z_range.emplace_back(zlo, zhi);
  }
  return g;
}

/// Nearest lattice point to t, per axis, clamped to the box range; an exact
/// midpoint tie resolves to the smaller coordinate so the encoding is
/// deterministic. The returned point always satisfies the distance contract
/// ||t_n - t|| < n^(-alpha-1/2) / sqrt(J_max).
inline RealVec encode(const RealVec& t, const DiscretizationGrid& g) {
  if (t.size() != g.v) throw DimensionError("encode: parameter dimension mismatch");
  for (int i = 0; i < g.v; ++i) {
    auto [lo, hi] = g.box[static_cast<std::size_t>(i)];
    if (t[i] < lo - 1e-12 || t[i] > hi + 1e-12)
      throw std::invalid_argument("encode: t outside the box");
  }
  RealVec tn(g.v);
  for (int i = 0; i < g.v; ++i) {
    auto [zlo, zhi] = g.z_range[static_cast<std::size_t>(i)];
    double ratio = t[i] / g.spacing;
    std::int64_t zf = static_cast<std::int64_t>(std::floor(ratio));
    double d_lo = t[i] - static_cast<double>(zf) * g.spacing;
    double d_hi = static_cast<double>(zf + 1) * g.spacing - t[i];
    std::int64_t z = d_lo <= d_hi ? zf : zf + 1;  // tie -> smaller coordinate
    z = std::max(zlo, std::min(zhi, z));
    tn[i] = g.spacing * static_cast<double>(z);
  }
  double dist = (tn - t).norm();
  double bound = std::pow(g.n, -g.alpha - 0.5) / std::sqrt(g.j_r_max);
  if (!(dist < bound))
    throw std::logic_error("encode: lattice distance contract violated");
  return tn;
}

/// Measure-and-operate decoding collapses to a classical lookup of the
/// lattice label; applying the indexed channel to each input realizes it.
inline std::vector<Mat> decode_apply(const RealVec& t_n, const ChannelFamily& f,
                                     const std::vector<Mat>& inputs) {
  Channel c = f.eval(t_n);
  std::vector<Mat> out;
  out.reserve(inputs.size());
  for (const Mat& rho : inputs) out.push_back(apply_channel(c, rho));
  return out;
}

/// Divergence-chain upper bound on the n-use diamond error between the
/// encoded and the true channel.
inline PinskerBound error_upper(const ChannelFamily& f, const RealVec& t, const RealVec& t_n,
                                double n) {
  return pinsker_error_upper_bound(f.eval(t_n), f.eval(t), n);
}

namespace detail {

inline double log_pmf_binom(double n, double k, double lp, double lq) {
  return std::lgamma(n + 1.0) - std::lgamma(k + 1.0) - std::lgamma(n - k + 1.0) + k * lp +
         (n - k) * lq;
}

inline double abs_exp_diff(double la, double lb) {
  // |e^la - e^lb| without cancellation
  if (la < lb) std::swap(la, lb);
  if (la == -std::numeric_limits<double>::infinity()) return 0.0;
  return std::exp(la) * (-std::expm1(lb - la));
}

/// l1 distance between Binomial(n, p) and Binomial(n, q).
inline double binom_l1(std::int64_t n, double p, double q) {
  if (p == q) return 0.0;
  auto lg = [](double x) { return x > 0.0 ? std::log(x) : -std::numeric_limits<double>::infinity(); };
  double lp = lg(p), lpc = lg(1.0 - p), lq = lg(q), lqc = lg(1.0 - q);
  double total = 0.0;
  for (std::int64_t k = 0; k <= n; ++k) {
    double la = (p == 0.0 && k == 0)   ? 0.0
                : (p == 1.0 && k == n) ? 0.0
                : (p == 0.0 || p == 1.0)
                    ? -std::numeric_limits<double>::infinity()
                    : log_pmf_binom(double(n), double(k), lp, lpc);
    double lb = (q == 0.0 && k == 0)   ? 0.0
                : (q == 1.0 && k == n) ? 0.0
                : (q == 0.0 || q == 1.0)
                    ? -std::numeric_limits<double>::infinity()
                    : log_pmf_binom(double(n), double(k), lq, lqc);
    total += abs_exp_diff(la, lb);
  }
  return total;
}

/// l1 distance between n-fold products of two finite distributions that may
/// share a lumped common-symbol mass. Enumerates count types recursively.
inline double multinomial_l1(const std::vector<double>& pa, const std::vector<double>& pb,
                             std::int64_t n) {
  const std::size_t s = pa.size();
  std::vector<double> la(s), lb(s);
  for (std::size_t i = 0; i < s; ++i) {
    la[i] = pa[i] > 0 ? std::log(pa[i]) : -std::numeric_limits<double>::infinity();
    lb[i] = pb[i] > 0 ? std::log(pb[i]) : -std::numeric_limits<double>::infinity();
  }
  double total = 0.0;
  std::vector<std::int64_t> counts(s, 0);
  double lgn = std::lgamma(double(n) + 1.0);
  std::function<void(std::size_t, std::int64_t)> rec = [&](std::size_t sym, std::int64_t left) {
    if (sym == s - 1) {
      counts[sym] = left;
      double lcoef = lgn;
      for (std::size_t i = 0; i < s; ++i) lcoef -= std::lgamma(double(counts[i]) + 1.0);
      double lpa = lcoef, lpb = lcoef;
      for (std::size_t i = 0; i < s; ++i) {
        if (counts[i] > 0) {
          lpa += double(counts[i]) * la[i];
          lpb += double(counts[i]) * lb[i];
        }
      }
      total += abs_exp_diff(lpa, lpb);
      return;
    }
    for (std::int64_t k = 0; k <= left; ++k) {
      counts[sym] = k;
      rec(sym + 1, left - k);
    }
  };
  rec(0, n);
  return total;
}

}  // namespace detail

/// Exact n-use diamond distance between two Pauli channels: the l1 distance
/// of the n-fold products of their probability 4-vectors. Symbols with equal
/// likelihood ratio a_i/b_i are merged first (the l1 distance of product laws
/// is invariant under such lumping), so equal-component and depolarizing-type
/// pairs collapse to a single binomial convolution.
inline double exact_error_pauli(const PauliProbs& a, const PauliProbs& b, std::int64_t n) {
  if (n < 1) throw std::invalid_argument("exact_error_pauli: n must be >= 1");
  for (int i = 0; i < 4; ++i) {
    if (a[static_cast<std::size_t>(i)] < -1e-12 || b[static_cast<std::size_t>(i)] < -1e-12)
      throw std::invalid_argument("exact_error_pauli: negative probability");
  }
  std::vector<double> da, db;
  for (int i = 0; i < 4; ++i) {
    double x = std::max(0.0, a[static_cast<std::size_t>(i)]);
    double y = std::max(0.0, b[static_cast<std::size_t>(i)]);
    if (x + y <= 1e-15) continue;
    bool merged = false;
    for (std::size_t j = 0; j < da.size(); ++j) {
      // same likelihood ratio: x/y == da[j]/db[j] by cross-multiplication
      double cross = x * db[j] - y * da[j];
      double scale = std::max({x * db[j], y * da[j], 1e-30});
      if (std::abs(cross) <= 1e-13 * scale) {
        da[j] += x;
        db[j] += y;
        merged = true;
        break;
      }
    }
    if (!merged) {
      da.push_back(x);
      db.push_back(y);
    }
  }
  if (da.size() <= 1) return 0.0;
  const std::size_t s = da.size();
  if (s == 2) return detail::binom_l1(n, da[0] / (da[0] + da[1]), db[0] / (db[0] + db[1]));
  std::int64_t cap = s == 3 ? 2000 : 400;
  if (n > cap)
    throw std::invalid_argument("exact_error_pauli: n too large for exact type enumeration");
  return detail::multinomial_l1(da, db, n);
}

namespace detail {

/// Adjoint lift used by the diamond-distance see-saw: for fixed dual operator
/// o on H_out (x) H_R, returns z on H_in (x) H_R with
/// <psi| z |psi> = Tr[o ((Delta (x) I)(psi psi†))].
inline Mat seesaw_adjoint(const Mat& delta, Eigen::Index d_in, Eigen::Index d_out, const Mat& o,
                          Eigen::Index d_ref) {
  Mat z = Mat::Zero(d_in * d_ref, d_in * d_ref);
  for (Eigen::Index l = 0; l < d_in; ++l)
    for (Eigen::Index bp = 0; bp < d_ref; ++bp)
      for (Eigen::Index k = 0; k < d_in; ++k)
        for (Eigen::Index bb = 0; bb < d_ref; ++bb) {
          Cplx sum = 0;
          for (Eigen::Index al = 0; al < d_out; ++al)
            for (Eigen::Index be = 0; be < d_out; ++be)
              sum += delta(al * d_in + k, be * d_in + l) * o(be * d_ref + bp, al * d_ref + bb);
          z(l * d_ref + bp, k * d_ref + bb) = sum;
        }
  return z;
}

}  // namespace detail

/// Certified lower bound on the diamond distance: alternating maximization of
/// Tr[O ((A-B) (x) I)(psi)] over dual operators O with -I <= O <= I and pure
/// probes psi. The maximally entangled probe seeds the first restart.
inline double diamond_lower(const Channel& a, const Channel& b, int restarts = 8,
                            std::uint64_t seed = default_seed) {
  if (a.d_in != b.d_in || a.d_out != b.d_out)
    throw DimensionError("diamond_lower: channels must share dimensions");
  const Eigen::Index d_in = a.d_in, d_out = a.d_out, d_ref = a.d_in;
  Mat delta = a.choi - b.choi;
  if (max_abs(delta) < 1e-15) return 0.0;
  std::vector<double> results(static_cast<std::size_t>(restarts), 0.0);
  parallel_for(static_cast<std::size_t>(restarts), [&](std::size_t r) {
    Vec psi;
    if (r == 0) {
      psi = max_entangled_unnormalized(d_in);
    } else {
      Rng rng(seed, r);
      psi = Vec(d_in * d_ref);
      for (Eigen::Index i = 0; i < psi.size(); ++i) psi[i] = Cplx(rng.normal(), rng.normal());
    }
    psi /= psi.norm();
    double best = 0.0;
    for (int iter = 0; iter < 200; ++iter) {
      Mat x = apply_choi_bipartite(delta, d_in, d_out, psi, d_ref);
      EigH ex = eig_hermitian(hermitize(x));
      double val = ex.values.cwiseAbs().sum();
      Mat o = Mat::Zero(x.rows(), x.cols());
      for (Eigen::Index kk = 0; kk < ex.values.size(); ++kk)
        o += (ex.values[kk] >= 0 ? 1.0 : -1.0) *
             (ex.vectors.col(kk) * ex.vectors.col(kk).adjoint());
      if (val <= best + 1e-13 * std::max(1.0, best)) {
        best = std::max(best, val);
        break;
      }
      best = val;
      Mat z = detail::seesaw_adjoint(delta, d_in, d_out, o, d_ref);
      EigH ez = eig_hermitian(hermitize(z));
      psi = ez.vectors.col(ez.values.size() - 1);
    }
    results[r] = best;
  });
  double best = 0.0;
  for (double v : results) best = std::max(best, v);
  return best;
}

/// One execution record of the lattice protocol.
struct ProtocolRun {
  double n = 1.0;
  double alpha = 0.5;
  RealVec t;
  RealVec t_n;
  double spacing = 0.0;
  std::uint64_t num_points = 0;
  int cost_bits = 0;
  double err_upper = 2.0;
  std::optional<double> err_exact;  // Pauli families only
  std::optional<double> err_lower;  // variational bound, n = 1 only
  double thm1_rate = 0.0;
};

/// Runs the lattice protocol for each n in the list and records cost and
/// error figures along with the metrology rate v*beta/2 for comparison.
inline std::vector<ProtocolRun> protocol_sweep(const ChannelFamily& f, double alpha,
                                               const RealVec& t,
                                               const std::vector<double>& n_list,
                                               std::uint64_t seed = default_seed,
                                               double j_max = -1.0,
                                               std::optional<double> beta_override = {}) {
  if (j_max < 0.0) j_max = jr_max(f);
  double beta;
  if (beta_override) {
    beta = *beta_override;
  } else {
    beta = beta_value(classify_beta(f));
  }
  double rate = static_cast<double>(f.v) * beta / 2.0;
  std::vector<ProtocolRun> runs(n_list.size());
  parallel_for(n_list.size(), [&](std::size_t i) {
    double n = n_list[i];
    ProtocolRun run;
    run.n = n;
    run.alpha = alpha;
    run.t = t;
    run.thm1_rate = rate;
    DiscretizationGrid g = build_grid(f, n, alpha, j_max);
    run.spacing = g.spacing;
    run.num_points = g.num_points();
    run.cost_bits = g.cost_bits();
    run.t_n = encode(t, g);
    run.err_upper = error_upper(f, t, run.t_n, n).value;
    if (f.pauli_probs) {
      run.err_exact = exact_error_pauli(f.pauli_probs(run.t_n), f.pauli_probs(t),
                                        static_cast<std::int64_t>(n));
    }
    if (n == 1.0) {
      run.err_lower = diamond_lower(f.eval(run.t_n), f.eval(t), 8, derive_seed(seed, i));
    }
    if (run.err_exact && *run.err_exact > run.err_upper + 1e-9)
      throw std::logic_error("protocol: exact error exceeds the divergence upper bound");
    if (run.err_lower && run.err_exact && *run.err_lower > *run.err_exact + 1e-7)
      throw std::logic_error("protocol: variational lower bound exceeds the exact error");
    runs[i] = std::move(run);
  });
  return runs;
}

}  // namespace qchan
