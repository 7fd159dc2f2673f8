#pragma once

#include <functional>
#include <optional>
#include <vector>

#include "qchan/divergence.hpp"
#include "qchan/family.hpp"
#include "qchan/optim.hpp"

namespace qchan {

/// A parametric family of density operators.
struct StateFamily {
  int v = 1;
  std::vector<std::pair<double, double>> box;
  std::function<Mat(const RealVec&)> eval;
  std::function<Mat(const RealVec&, int)> derivative;  // optional
};

struct FisherReport {
  double value = 0.0;
  RealVec direction;  // unit vector achieving the maximum
  enum class Method { choi_closed, variational } method = Method::choi_closed;
  int grid_resolution = 0;
  int restarts = 0;
};

namespace detail {

inline Mat state_derivative(const StateFamily& f, const RealVec& t, int i, double h) {
  if (f.derivative) return f.derivative(t, i);
  if (h <= 0.0) {
    double w = f.box.empty() ? 1.0
                             : f.box[static_cast<std::size_t>(i)].second -
                                   f.box[static_cast<std::size_t>(i)].first;
    h = 1e-4 * std::max(w, 1e-8);
  }
  RealVec tp = t, tm = t;
  tp[i] += h;
  tm[i] -= h;
  return (f.eval(tp) - f.eval(tm)) / (2.0 * h);
}

/// Operator norm of a Hermitian v x v matrix acting on real vectors:
/// sup over real unit s of the Euclidean norm of J s.
inline double real_direction_op_norm(const Mat& j) {
  RealMat r = j.real();
  RealMat k = j.imag();
  RealMat g = r.transpose() * r + k.transpose() * k;
  Eigen::SelfAdjointEigenSolver<RealMat> es(0.5 * (g + g.transpose()));
  return std::sqrt(std::max(0.0, es.eigenvalues().maxCoeff()));
}

}  // namespace detail

/// RLD Fisher information matrix of a state family at t:
/// J_ij = Tr[(d_i rho) rho^+ (d_j rho)], support-restricted inverse,
/// Hermitian part as a real matrix. Infinite (moving support) is signalled.
inline RealMat rld_fisher_states(const StateFamily& f, const RealVec& t, double h = 0.0) {
  Mat rho = hermitize(f.eval(t));
  std::vector<Mat> d(static_cast<std::size_t>(f.v));
  for (int i = 0; i < f.v; ++i)
    d[static_cast<std::size_t>(i)] = hermitize(detail::state_derivative(f, t, i, h));
  SupportProjector sp = support_projector(rho);
  for (int i = 0; i < f.v; ++i) {
    const Mat& di = d[static_cast<std::size_t>(i)];
    if (max_abs(di) <= 1e-14) continue;
    if (weight_outside_support(di, sp) > 1e-7)
      throw InfiniteFisher("rld_fisher_states: derivative support leaves the state support");
  }
  Mat inv = pinv_on_support(rho);
  Mat j(f.v, f.v);
  for (int i = 0; i < f.v; ++i)
    for (int k = 0; k < f.v; ++k)
      j(i, k) = (d[static_cast<std::size_t>(i)] * inv * d[static_cast<std::size_t>(k)]).trace();
  j = hermitize(j);
  return j.real();
}

/// The v x v array of operators M_ij = Tr_out[(d_i C) C^+ (d_j C)], the
/// quadratic form behind the channel RLD norm. Requires the directional
/// derivatives to stay inside the Choi support.
struct QuadraticFormTensor {
  int v = 0;
  Eigen::Index d_in = 0;
  std::vector<Mat> m;  // row-major v*v

  const Mat& at(int i, int j) const { return m[static_cast<std::size_t>(i * v + j)]; }

  Mat directional(const RealVec& s) const {
    Mat out = Mat::Zero(d_in, d_in);
    for (int i = 0; i < v; ++i)
      for (int j = 0; j < v; ++j) out += s[i] * s[j] * at(i, j);
    return hermitize(out);
  }

  double directional_value(const RealVec& s) const { return op_norm_inf(directional(s)); }
};

inline QuadraticFormTensor quadratic_form_tensor(const ChannelFamily& f, const RealVec& t) {
  Channel c = f.eval(t);
  SupportProjector sp = support_projector(c.choi);
  std::vector<Mat> d(static_cast<std::size_t>(f.v));
  for (int i = 0; i < f.v; ++i) {
    RealVec e = RealVec::Zero(f.v);
    e[i] = 1.0;
    Mat di = hermitize(choi_derivative(f, t, e));
    if (max_abs(di) > 1e-14 && weight_outside_support(di, sp) > 1e-7)
      throw InfiniteFisher("quadratic_form_tensor: derivative support leaves the Choi support");
    d[static_cast<std::size_t>(i)] = std::move(di);
  }
  Mat inv = pinv_on_support(c.choi);
  QuadraticFormTensor q;
  q.v = f.v;
  q.d_in = c.d_in;
  q.m.resize(static_cast<std::size_t>(f.v) * static_cast<std::size_t>(f.v));
  for (int i = 0; i < f.v; ++i)
    for (int j = 0; j < f.v; ++j) {
      Mat core = partial_trace(
          Mat(d[static_cast<std::size_t>(i)] * inv * d[static_cast<std::size_t>(j)]), c.d_out,
          c.d_in, Factor::second);
      q.m[static_cast<std::size_t>(i * f.v + j)] = core;
    }
  // symmetrize M_ij against M_ji†
  for (int i = 0; i < f.v; ++i)
    for (int j = i; j < f.v; ++j) {
      Mat sym = 0.5 * (q.m[static_cast<std::size_t>(i * f.v + j)] +
                       q.m[static_cast<std::size_t>(j * f.v + i)].adjoint());
      q.m[static_cast<std::size_t>(i * f.v + j)] = sym;
      q.m[static_cast<std::size_t>(j * f.v + i)] = sym.adjoint();
    }
  return q;
}

/// Channel RLD Fisher information norm: maximum over unit directions of the
/// operator norm of the quadratic form. Exact for v = 1; dense sphere grid
/// plus local ascent for v in {2, 3}; multistart ascent beyond.
inline FisherReport rld_norm_channel(const ChannelFamily& f, const RealVec& t,
                                     int grid_resolution = 10000) {
  QuadraticFormTensor q = quadratic_form_tensor(f, t);
  FisherReport rep;
  rep.method = FisherReport::Method::choi_closed;
  rep.grid_resolution = grid_resolution;
  if (f.v == 1) {
    RealVec plus(1), minus(1);
    plus << 1.0;
    minus << -1.0;
    double vp = q.directional_value(plus);
    double vm = q.directional_value(minus);
    rep.value = std::max(vp, vm);
    rep.direction = vp >= vm ? plus : minus;
    rep.grid_resolution = 2;
    return rep;
  }
  auto objective = [&](const RealVec& s) { return q.directional_value(s); };
  std::vector<RealVec> grid = sphere_grid(f.v, grid_resolution);
  std::vector<double> vals(grid.size());
  parallel_for(grid.size(), [&](std::size_t i) { vals[i] = objective(grid[i]); });
  std::vector<std::size_t> order(grid.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::partial_sort(order.begin(), order.begin() + std::min<std::size_t>(10, order.size()),
                    order.end(), [&](std::size_t a, std::size_t b) { return vals[a] > vals[b]; });
  RealVec best = grid[order[0]];
  double best_val = vals[order[0]];
  AscentOptions opt;
  opt.max_iters = 50;
  for (std::size_t k = 0; k < std::min<std::size_t>(10, order.size()); ++k) {
    auto [s, val] = ascend_on_sphere(objective, grid[order[k]], opt);
    if (val > best_val) {
      best_val = val;
      best = s;
    }
  }
  rep.value = best_val;
  rep.direction = best;
  return rep;
}

namespace detail {

/// RLD Fisher matrix of the output family induced by a fixed pure probe.
inline Mat probe_output_fisher(const ChannelFamily& f, const RealVec& t, const Vec& psi) {
  Channel c = f.eval(t);
  Vec p = psi / psi.norm();
  Mat rho = hermitize(apply_channel_bipartite(c, p, c.d_in));
  std::vector<Mat> d(static_cast<std::size_t>(f.v));
  for (int i = 0; i < f.v; ++i) {
    RealVec e = RealVec::Zero(f.v);
    e[i] = 1.0;
    Mat dchoi = choi_derivative(f, t, e);
    d[static_cast<std::size_t>(i)] =
        hermitize(apply_choi_bipartite(dchoi, c.d_in, c.d_out, p, c.d_in));
  }
  SupportProjector sp = support_projector(rho);
  for (int i = 0; i < f.v; ++i) {
    if (max_abs(d[static_cast<std::size_t>(i)]) <= 1e-14) continue;
    if (weight_outside_support(d[static_cast<std::size_t>(i)], sp) > 1e-7)
      throw InfiniteFisher("probe output family has moving support");
  }
  // coarse cutoff: ill-conditioned probe outputs must not let the ascent
  // ride inverse noise above the closed form
  Mat inv = pinv_on_support(rho, 1e-6);
  Mat j(f.v, f.v);
  for (int i = 0; i < f.v; ++i)
    for (int k = 0; k < f.v; ++k)
      j(i, k) = (d[static_cast<std::size_t>(i)] * inv * d[static_cast<std::size_t>(k)]).trace();
  return hermitize(j);
}

}  // namespace detail

/// Variational route to the channel RLD norm: maximize the output-family
/// Fisher norm over pure probes on H_in (x) H_in. The maximally entangled
/// probe is the first start. Lower-bounds the closed form.
inline FisherReport rld_norm_channel_variational(const ChannelFamily& f, const RealVec& t,
                                                 int restarts = 32,
                                                 std::uint64_t seed = default_seed) {
  Channel c0 = f.eval(t);
  const Eigen::Index dim_c = c0.d_in * c0.d_in;
  auto objective = [&](const RealVec& x) {
    Vec psi = detail::real_to_complex(x);
    if (psi.norm() < 1e-12) return -std::numeric_limits<double>::infinity();
    try {
      return detail::real_direction_op_norm(detail::probe_output_fisher(f, t, psi));
    } catch (const InfiniteFisher&) {
      return -std::numeric_limits<double>::infinity();
    }
  };
  Vec ent = max_entangled_unnormalized(c0.d_in);
  ent /= ent.norm();
  MultistartResult res = multistart_on_sphere(objective, static_cast<int>(2 * dim_c), restarts,
                                              seed, {detail::complex_to_real(ent)});
  if (!std::isfinite(res.best_value))
    throw InfiniteFisher("rld_norm_channel_variational: every probe produced moving support");
  FisherReport rep;
  rep.method = FisherReport::Method::variational;
  rep.restarts = res.restarts_used;
  rep.value = std::max(0.0, res.best_value);
  rep.direction = RealVec::Zero(f.v);  // direction implicit in the probe route
  return rep;
}

/// SLD Fisher information matrix, solved spectrally: in the eigenbasis of
/// rho, L_{ab} = 2 (d rho)_{ab} / (lambda_a + lambda_b) wherever the
/// denominator is nonzero; a blocked entry with nonzero numerator means the
/// information diverges.
inline RealMat sld_fisher_states(const StateFamily& f, const RealVec& t, double h = 0.0) {
  Mat rho = hermitize(f.eval(t));
  EigH eg = eig_hermitian(rho);
  const Eigen::Index d = rho.rows();
  double lmax = std::max(0.0, eg.values.maxCoeff());
  double lam_tol = 1e-12 * std::max(1.0, lmax);
  std::vector<Mat> l(static_cast<std::size_t>(f.v));
  for (int i = 0; i < f.v; ++i) {
    Mat dr = hermitize(detail::state_derivative(f, t, i, h));
    Mat dr_eig = eg.vectors.adjoint() * dr * eg.vectors;
    double scale = std::max(1e-300, max_abs(dr_eig));
    Mat li = Mat::Zero(d, d);
    for (Eigen::Index a = 0; a < d; ++a)
      for (Eigen::Index b = 0; b < d; ++b) {
        double denom = std::max(0.0, eg.values[a]) + std::max(0.0, eg.values[b]);
        if (denom > lam_tol) {
          li(a, b) = 2.0 * dr_eig(a, b) / denom;
        } else if (std::abs(dr_eig(a, b)) > 1e-9 * scale) {
          throw InfiniteFisher("sld_fisher_states: derivative hits a blocked eigenpair");
        }
      }
    l[static_cast<std::size_t>(i)] = eg.vectors * li * eg.vectors.adjoint();
  }
  RealMat j(f.v, f.v);
  for (int i = 0; i < f.v; ++i)
    for (int k = 0; k < f.v; ++k) {
      Cplx tr = (rho * (l[static_cast<std::size_t>(i)] * l[static_cast<std::size_t>(k)] +
                        l[static_cast<std::size_t>(k)] * l[static_cast<std::size_t>(i)]))
                    .trace();
      j(i, k) = 0.5 * tr.real();
    }
  return 0.5 * (j + j.transpose());
}

/// Fisher information of a pure state under a phase rotation generated by h:
/// 4 (  <h^2> - <h>^2 ).
inline double qfi_pure_phase(const Vec& probe, const Mat& generator) {
  double nrm = probe.norm();
  if (std::abs(nrm - 1.0) > 1e-9)
    throw std::invalid_argument("qfi_pure_phase: probe must be normalized");
  if (generator.rows() != probe.size() || generator.cols() != probe.size())
    throw DimensionError("qfi_pure_phase: generator dimension mismatch");
  Vec hp = generator * probe;
  double h1 = std::real(probe.dot(hp));
  double h2 = std::real(hp.dot(hp));
  return 4.0 * (h2 - h1 * h1);
}

struct TaylorCheck {
  double slope = 0.0;                   // log-log slope of D2 against epsilon
  double coefficient = 0.0;             // D2 / eps^2 at the smallest epsilon
  std::vector<std::pair<double, double>> samples;  // (epsilon, D2 bits)
};

/// Samples D2(C_{t + eps dir} || C_t) over a list of step sizes and fits the
/// quadratic vanishing rate. For families with constant support the
/// value behaves as eps^2 times the directional Fisher form (in bits).
inline TaylorCheck taylor_check_d2(const ChannelFamily& f, const RealVec& t, const RealVec& dir,
                                   const std::vector<double>& eps_list) {
  TaylorCheck out;
  Channel base = f.eval(t);
  double min_eps = std::numeric_limits<double>::infinity();
  for (double eps : eps_list) {
    RealVec tp = t + eps * dir;
    if (!point_in_box(f, tp))
      throw std::invalid_argument("taylor_check_d2: step leaves the box");
    double d2 = d2_channels_bits_stable(f.eval(tp), base);
    out.samples.emplace_back(eps, d2);
    if (eps < min_eps) {
      min_eps = eps;
      out.coefficient = d2 / (eps * eps);
    }
  }
  std::vector<double> lx, ly;
  for (auto& [eps, d2] : out.samples) {
    if (d2 > 1e-300) {
      lx.push_back(std::log(eps));
      ly.push_back(std::log(d2));
    }
  }
  out.slope = lx.size() >= 2 ? ls_slope(lx, ly) : 0.0;
  return out;
}

/// Supremum of the RLD norm over the box, by grid scan plus golden-section
/// refinement around the best point. Values beyond 1e12 or an infinite
/// signal anywhere classify the family as incompatible with the
/// constant-support protocol assumptions.
inline double jr_max(const ChannelFamily& f, int grid_per_axis = 0) {
  if (grid_per_axis <= 0) {
    grid_per_axis = f.v == 1 ? 1000 : (f.v == 2 ? 31 : 10);
  }
  const int scan_dirs = f.v == 1 ? 2 : 200;
  auto norm_at = [&](const RealVec& t, int dirs) {
    FisherReport r = rld_norm_channel(f, t, dirs);
    if (!std::isfinite(r.value) || r.value > 1e12)
      throw InfiniteFisher("jr_max: family is not compatible (norm diverges)");
    return r.value;
  };
  std::vector<RealVec> grid = box_sample_grid(f, grid_per_axis, 1000);
  double best = 0.0;
  RealVec best_t = grid.front();
  std::vector<double> vals(grid.size());
  parallel_for(grid.size(), [&](std::size_t i) { vals[i] = norm_at(grid[i], scan_dirs); });
  for (std::size_t i = 0; i < grid.size(); ++i) {
    if (vals[i] > best) {
      best = vals[i];
      best_t = grid[i];
    }
  }
  // refine axis by axis around the best grid point
  const double gr = (std::sqrt(5.0) - 1.0) / 2.0;
  RealVec t = best_t;
  for (int round = 0; round < 2; ++round) {
    for (int axis = 0; axis < f.v; ++axis) {
      auto [lo_box, hi_box] = f.box[static_cast<std::size_t>(axis)];
      double step = (hi_box - lo_box) / std::max(1, grid_per_axis - 1);
      double lo = std::max(lo_box, t[axis] - step);
      double hi = std::min(hi_box, t[axis] + step);
      auto eval1 = [&](double x) {
        RealVec tt = t;
        tt[axis] = x;
        return norm_at(tt, scan_dirs);
      };
      double a = lo, b = hi;
      double c = b - gr * (b - a), d = a + gr * (b - a);
      double fc = eval1(c), fd = eval1(d);
      for (int it = 0; it < 40 && (b - a) > 1e-12 * std::max(1.0, std::abs(b)); ++it) {
        if (fc > fd) {
          b = d;
          d = c;
          fd = fc;
          c = b - gr * (b - a);
          fc = eval1(c);
        } else {
          a = c;
          c = d;
          fc = fd;
          d = a + gr * (b - a);
          fd = eval1(d);
        }
      }
      double mid = 0.5 * (a + b);
      double fm = eval1(mid);
      double cand[3] = {fc, fd, fm};
      double xs[3] = {c, d, mid};
      for (int k = 0; k < 3; ++k) {
        if (cand[k] > best) {
          best = cand[k];
          t[axis] = xs[k];
        }
      }
    }
  }
  // settle the winner at full direction resolution
  if (f.v > 1) best = std::max(best, norm_at(t, 10000));
  return best;
}

}  // namespace qchan
