#pragma once

#include <array>
#include <cmath>
#include <functional>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "qchan/channel.hpp"

namespace qchan {

using PauliProbs = std::array<double, 4>;  // (p_0, p_x, p_y, p_z)
using PauliProbabilityMap = std::function<PauliProbs(const RealVec&)>;

/// A parametric channel family over a closed box of R^v. eval must be a pure
/// function; derivative, when present, returns the Choi derivative along
/// parameter axis i.
struct ChannelFamily {
  int v = 1;
  std::vector<std::pair<double, double>> box;
  std::function<Channel(const RealVec&)> eval;
  std::function<Mat(const RealVec&, int)> derivative;  // optional
  std::string name;
  bool unitary_tagged = false;
  PauliProbabilityMap pauli_probs;  // set for Pauli-type families
};

inline double box_width(const ChannelFamily& f, int axis) {
  return f.box[static_cast<std::size_t>(axis)].second -
         f.box[static_cast<std::size_t>(axis)].first;
}

inline bool point_in_box(const ChannelFamily& f, const RealVec& t, double slack = 1e-12) {
  if (t.size() != f.v) return false;
  for (int i = 0; i < f.v; ++i) {
    auto [lo, hi] = f.box[static_cast<std::size_t>(i)];
    if (t[i] < lo - slack || t[i] > hi + slack) return false;
  }
  return true;
}

inline RealVec box_midpoint(const ChannelFamily& f) {
  RealVec t(f.v);
  for (int i = 0; i < f.v; ++i)
    t[i] = 0.5 * (f.box[static_cast<std::size_t>(i)].first +
                  f.box[static_cast<std::size_t>(i)].second);
  return t;
}

inline Channel pauli_channel(const PauliProbs& p) {
  for (double x : p)
    if (x < -1e-12) throw std::invalid_argument("pauli_channel: negative probability");
  double sum = p[0] + p[1] + p[2] + p[3];
  if (std::abs(sum - 1.0) > 1e-12)
    throw std::invalid_argument("pauli_channel: probabilities do not sum to 1");
  std::vector<Mat> kraus;
  const Mat sigmas[4] = {pauli_i(), pauli_x(), pauli_y(), pauli_z()};
  for (int b = 0; b < 4; ++b)
    if (p[static_cast<std::size_t>(b)] > 0.0)
      kraus.push_back(std::sqrt(p[static_cast<std::size_t>(b)]) * sigmas[b]);
  if (kraus.empty()) throw std::invalid_argument("pauli_channel: all probabilities vanish");
  return choi_from_kraus(kraus, 2, 2);
}

/// Rectangular sample grid over the box: per-axis count chosen so the total
/// stays at or below `cap` (10 per axis for v <= 3 with cap 1000). Endpoints
/// of the closed box are included.
inline std::vector<RealVec> box_sample_grid(const ChannelFamily& f, int per_axis = 10,
                                            int cap = 1000) {
  int k = per_axis;
  auto total = [&](int kk) {
    double tot = 1;
    for (int i = 0; i < f.v; ++i) tot *= kk;
    return tot;
  };
  while (k > 2 && total(k) > cap) --k;
  std::vector<RealVec> points;
  std::vector<int> idx(static_cast<std::size_t>(f.v), 0);
  while (true) {
    RealVec t(f.v);
    for (int i = 0; i < f.v; ++i) {
      auto [lo, hi] = f.box[static_cast<std::size_t>(i)];
      t[i] = k == 1 ? 0.5 * (lo + hi) : lo + (hi - lo) * idx[static_cast<std::size_t>(i)] / (k - 1);
    }
    points.push_back(t);
    int axis = 0;
    while (axis < f.v) {
      if (++idx[static_cast<std::size_t>(axis)] < k) break;
      idx[static_cast<std::size_t>(axis)] = 0;
      ++axis;
    }
    if (axis == f.v) break;
  }
  return points;
}

namespace detail {

/// Central finite difference of the probability map along axis i. Exact for
/// maps that are linear in the parameters.
inline PauliProbs pauli_map_derivative(const PauliProbabilityMap& map, const RealVec& t, int i,
                                       double h) {
  RealVec tp = t, tm = t;
  tp[i] += h;
  tm[i] -= h;
  PauliProbs a = map(tp), b = map(tm);
  PauliProbs d{};
  for (int k = 0; k < 4; ++k)
    d[static_cast<std::size_t>(k)] =
        (a[static_cast<std::size_t>(k)] - b[static_cast<std::size_t>(k)]) / (2.0 * h);
  return d;
}

inline Mat bell_projector(int b) {
  const Mat sigmas[4] = {pauli_i(), pauli_x(), pauli_y(), pauli_z()};
  Vec v = vec_row_major(sigmas[b]);
  return 0.5 * (v * v.adjoint());
}

}  // namespace detail

/// Wraps a probability map into a channel family with analytic Choi
/// derivatives assembled from finite differences of the probability 4-vector.
/// The map is validated on a sample grid over the box.
inline ChannelFamily pauli_family(PauliProbabilityMap map,
                                  std::vector<std::pair<double, double>> box,
                                  std::string name = "pauli") {
  ChannelFamily f;
  f.v = static_cast<int>(box.size());
  f.box = std::move(box);
  f.name = std::move(name);
  f.pauli_probs = map;
  for (const RealVec& t : box_sample_grid(f)) {
    PauliProbs p = map(t);
    double sum = 0.0;
    for (double x : p) {
      if (x < -1e-12)
        throw std::invalid_argument("pauli_family: probability leaves the simplex inside the box");
      sum += x;
    }
    if (std::abs(sum - 1.0) > 1e-12)
      throw std::invalid_argument("pauli_family: probabilities do not sum to 1 on the box");
  }
  f.eval = [map](const RealVec& t) { return pauli_channel(map(t)); };
  // step large enough that subtractive cancellation stays near 1e-12
  std::vector<double> hs;
  for (std::size_t i = 0; i < f.box.size(); ++i)
    hs.push_back(1e-4 * std::max(f.box[i].second - f.box[i].first, 1e-4));
  f.derivative = [map, hs](const RealVec& t, int i) {
    PauliProbs dp = detail::pauli_map_derivative(map, t, i, hs[static_cast<std::size_t>(i)]);
    Mat d = Mat::Zero(4, 4);
    for (int b = 0; b < 4; ++b)
      d += 2.0 * dp[static_cast<std::size_t>(b)] * detail::bell_projector(b);
    return d;
  };
  return f;
}

/// Bit-flip family: (1-t) id + t X, one parameter.
inline ChannelFamily bitflip_family(std::pair<double, double> box = {0.2, 0.8}) {
  return pauli_family([](const RealVec& t) { return PauliProbs{1.0 - t[0], t[0], 0.0, 0.0}; },
                      {box}, "bitflip");
}

/// Three-parameter Pauli family (t_1, t_2, t_3) -> (1 - sum, t_1, t_2, t_3).
inline ChannelFamily pauli3_family(std::vector<std::pair<double, double>> box = {
                                       {0.1, 0.2}, {0.1, 0.2}, {0.1, 0.2}}) {
  return pauli_family(
      [](const RealVec& t) {
        return PauliProbs{1.0 - t[0] - t[1] - t[2], t[0], t[1], t[2]};
      },
      std::move(box), "pauli3");
}

/// Depolarizing family lambda -> (1 - 3 lambda/4) id + (lambda/4)(X + Y + Z).
inline ChannelFamily depolarizing_family(std::pair<double, double> box = {0.1, 0.9}) {
  return pauli_family(
      [](const RealVec& t) {
        double l = t[0];
        return PauliProbs{1.0 - 0.75 * l, 0.25 * l, 0.25 * l, 0.25 * l};
      },
      {box}, "depolarizing");
}

/// Z-rotation unitary family U_theta = exp(-i theta Z / 2). Rank-one Choi
/// operator whose support moves with theta.
inline ChannelFamily rotation_family(std::pair<double, double> box = {0.1, 1.2}) {
  ChannelFamily f;
  f.v = 1;
  f.box = {box};
  f.name = "rotation";
  f.unitary_tagged = true;
  auto unitary = [](double theta) {
    Mat u = Mat::Zero(2, 2);
    u(0, 0) = std::exp(Cplx(0, -theta / 2));
    u(1, 1) = std::exp(Cplx(0, theta / 2));
    return u;
  };
  f.eval = [unitary](const RealVec& t) {
    return choi_from_kraus({unitary(t[0])}, 2, 2);
  };
  f.derivative = [unitary](const RealVec& t, int) {
    Mat u = unitary(t[0]);
    Mat du = Cplx(0, -0.5) * (pauli_z() * u);
    Vec v = vec_row_major(u), dv = vec_row_major(du);
    Mat d = dv * v.adjoint() + v * dv.adjoint();
    return d;
  };
  return f;
}

/// Constant-output family C_t(rho) = Tr[rho] |psi_t><psi_t| with
/// |psi_t> = cos t |0> + sin t |1>; the Choi support rotates with t.
inline ChannelFamily constant_pure_family(std::pair<double, double> box = {0.2, 1.0}) {
  ChannelFamily f;
  f.v = 1;
  f.box = {box};
  f.name = "constant_pure";
  auto ket = [](double t) {
    Vec psi(2);
    psi << std::cos(t), std::sin(t);
    return psi;
  };
  f.eval = [ket](const RealVec& t) {
    Vec psi = ket(t[0]);
    Mat k0(2, 2), k1(2, 2);
    k0.setZero();
    k1.setZero();
    k0.col(0) = psi;
    k1.col(1) = psi;
    return choi_from_kraus({k0, k1}, 2, 2);
  };
  f.derivative = [ket](const RealVec& t, int) {
    Vec psi = ket(t[0]);
    Vec dpsi(2);
    dpsi << -std::sin(t[0]), std::cos(t[0]);
    Mat dproj = dpsi * psi.adjoint() + psi * dpsi.adjoint();
    return kron(dproj, Mat::Identity(2, 2));
  };
  return f;
}

/// Family that ignores its parameter; used as the degenerate exemplar.
inline ChannelFamily constant_family(Channel c, std::pair<double, double> box = {0.0, 1.0}) {
  ChannelFamily f;
  f.v = 1;
  f.box = {box};
  f.name = "constant";
  f.eval = [c](const RealVec&) { return c; };
  f.derivative = [d = c.choi.rows()](const RealVec&, int) { return Mat::Zero(d, d); };
  return f;
}

/// Directional Choi derivative. Uses the family's analytic derivative when
/// present, otherwise the central difference at step h (default
/// 1e-4 of the box width along the direction). Requires t +- h dir in the box.
inline Mat choi_derivative(const ChannelFamily& f, const RealVec& t, const RealVec& dir,
                           double h = 0.0) {
  if (t.size() != f.v || dir.size() != f.v)
    throw DimensionError("choi_derivative: dimension mismatch");
  if (f.derivative) {
    Mat d;
    for (int i = 0; i < f.v; ++i) {
      Mat di = f.derivative(t, i);
      if (i == 0)
        d = dir[i] * di;
      else
        d += dir[i] * di;
    }
    return d;
  }
  if (h <= 0.0) {
    double width_along = 0.0;
    for (int i = 0; i < f.v; ++i) width_along += std::abs(dir[i]) * box_width(f, i);
    h = 1e-4 * std::max(width_along, 1e-8);
  }
  RealVec tp = t + h * dir, tm = t - h * dir;
  if (!point_in_box(f, tp) || !point_in_box(f, tm))
    throw std::invalid_argument("choi_derivative: step leaves the box");
  return (f.eval(tp).choi - f.eval(tm).choi) / (2.0 * h);
}

/// Support-constancy check over sample points: every pair of Choi supports
/// must contain each other.
inline bool check_condition_support_constant(const ChannelFamily& f,
                                             const std::vector<RealVec>& points) {
  if (points.size() < 2)
    return true;
  std::vector<SupportProjector> sp;
  sp.reserve(points.size());
  for (const RealVec& t : points) sp.push_back(support_projector(f.eval(t).choi));
  for (std::size_t i = 0; i < sp.size(); ++i)
    for (std::size_t j = i + 1; j < sp.size(); ++j) {
      if (sp[i].rank != sp[j].rank) return false;
      if (!support_contains(sp[i], sp[j]) || !support_contains(sp[j], sp[i])) return false;
    }
  return true;
}

/// Directional-derivative support check at an interior point: for each
/// sampled direction, the derivative must live inside the Choi support.
inline bool check_condition_derivative_support(const ChannelFamily& f, const RealVec& t,
                                               const std::vector<RealVec>& directions) {
  SupportProjector sp = support_projector(f.eval(t).choi);
  for (const RealVec& dir : directions) {
    Mat d = choi_derivative(f, t, dir);
    double scale = max_abs(d);
    if (scale <= 1e-14) continue;  // zero derivative is trivially contained
    SupportProjector sd = support_projector(hermitize(d * d.adjoint()));
    if (!support_contains(sp, sd)) return false;
  }
  return true;
}

/// Canonical direction set: the coordinate axes plus the diagonal.
inline std::vector<RealVec> default_directions(int v) {
  std::vector<RealVec> dirs;
  for (int i = 0; i < v; ++i) {
    RealVec e = RealVec::Zero(v);
    e[i] = 1.0;
    dirs.push_back(e);
  }
  if (v > 1) dirs.push_back(RealVec::Constant(v, 1.0 / std::sqrt(double(v))));
  return dirs;
}

}  // namespace qchan
