#pragma once

#include <vector>

#include "qchan/linalg.hpp"

namespace qchan {

/// A channel in Choi form. The Choi operator lives on H_out (x) H_in, built
/// from the unnormalized maximally entangled vector sum_k |k>|k>, so that
/// tracing out the output factor gives the identity on H_in.
struct Channel {
  Eigen::Index d_in = 0;
  Eigen::Index d_out = 0;
  Mat choi;
};

inline Mat pauli_i() { return Mat::Identity(2, 2); }
inline Mat pauli_x() {
  Mat m(2, 2);
  m << 0, 1, 1, 0;
  return m;
}
inline Mat pauli_y() {
  Mat m(2, 2);
  m << Cplx(0, 0), Cplx(0, -1), Cplx(0, 1), Cplx(0, 0);
  return m;
}
inline Mat pauli_z() {
  Mat m(2, 2);
  m << 1, 0, 0, -1;
  return m;
}

/// Unnormalized maximally entangled vector sum_k |k>|k> on C^d (x) C^d.
inline Vec max_entangled_unnormalized(Eigen::Index d) {
  Vec v = Vec::Zero(d * d);
  for (Eigen::Index k = 0; k < d; ++k) v(k * d + k) = 1.0;
  return v;
}

/// Row-major vectorization; equals (K (x) I) applied to sum_k |k>|k>.
inline Vec vec_row_major(const Mat& k) {
  Vec v(k.rows() * k.cols());
  for (Eigen::Index i = 0; i < k.rows(); ++i)
    for (Eigen::Index j = 0; j < k.cols(); ++j) v(i * k.cols() + j) = k(i, j);
  return v;
}

/// Checks positivity and the marginal normalization of a Choi operator.
inline void validate_channel(const Channel& c, double psd_tol = 1e-9, double norm_tol = 1e-8) {
  if (c.d_in < 1 || c.d_out < 1 || c.choi.rows() != c.d_out * c.d_in ||
      c.choi.cols() != c.d_out * c.d_in)
    throw DimensionError("channel: Choi operator has wrong dimensions");
  EigH eg = eig_hermitian(c.choi);
  double lmax = std::max(1.0, eg.values.cwiseAbs().maxCoeff());
  if (eg.values.minCoeff() < -psd_tol * lmax)
    throw std::invalid_argument("channel: Choi operator is not positive semidefinite");
  Mat marginal = partial_trace(c.choi, c.d_out, c.d_in, Factor::second);
  if (max_abs(marginal - Mat::Identity(c.d_in, c.d_in)) > norm_tol)
    throw std::invalid_argument("channel: Choi marginal is not the identity");
}

/// Builds the Choi operator sum_k vec(K_k) vec(K_k)† from a Kraus set.
inline Channel choi_from_kraus(const std::vector<Mat>& kraus, Eigen::Index d_in,
                               Eigen::Index d_out) {
  if (kraus.empty()) throw std::invalid_argument("choi_from_kraus: empty Kraus set");
  Mat comp = Mat::Zero(d_in, d_in);
  for (const Mat& k : kraus) {
    if (k.rows() != d_out || k.cols() != d_in)
      throw DimensionError("choi_from_kraus: Kraus operator has wrong shape");
    comp += k.adjoint() * k;
  }
  if (max_abs(comp - Mat::Identity(d_in, d_in)) > 1e-9)
    throw std::invalid_argument("choi_from_kraus: Kraus set is not trace-preserving");
  Channel c{d_in, d_out, Mat::Zero(d_out * d_in, d_out * d_in)};
  for (const Mat& k : kraus) {
    Vec v = vec_row_major(k);
    c.choi += v * v.adjoint();
  }
  return c;
}

/// Applies the map with the given Choi operator to a state on H_in.
inline Mat apply_choi(const Mat& choi, Eigen::Index d_in, Eigen::Index d_out, const Mat& rho) {
  if (rho.rows() != d_in || rho.cols() != d_in)
    throw DimensionError("apply_choi: state dimension mismatch");
  Mat sandwich = choi * kron(Mat::Identity(d_out, d_out), rho.transpose());
  return partial_trace(sandwich, d_out, d_in, Factor::first);
}

inline Mat apply_channel(const Channel& c, const Mat& rho) {
  return apply_choi(c.choi, c.d_in, c.d_out, rho);
}

/// Applies (M (x) I_R) to the pure state |psi> on H_in (x) H_R, where M is
/// the map with the given Choi-like operator (any operator on H_out (x) H_in;
/// differences of Choi operators are allowed). Uses the identity
/// (M (x) I)(psi psi†) = (I (x) F) choi (I (x) F)†  with  F = Psi^T,
/// Psi being the d_in x d_R coefficient matrix of |psi>.
inline Mat apply_choi_bipartite(const Mat& choi_like, Eigen::Index d_in, Eigen::Index d_out,
                                const Vec& psi, Eigen::Index d_ref) {
  if (psi.size() != d_in * d_ref)
    throw DimensionError("apply_choi_bipartite: probe dimension mismatch");
  Mat f(d_ref, d_in);
  for (Eigen::Index a = 0; a < d_in; ++a)
    for (Eigen::Index b = 0; b < d_ref; ++b) f(b, a) = psi(a * d_ref + b);
  Mat lift = kron(Mat::Identity(d_out, d_out), f);
  return lift * choi_like * lift.adjoint();
}

inline Mat apply_channel_bipartite(const Channel& c, const Vec& psi, Eigen::Index d_ref) {
  return apply_choi_bipartite(c.choi, c.d_in, c.d_out, psi, d_ref);
}

/// Choi operator of the tensor product channel. The Kronecker product of the
/// two Choi operators carries factors in the order (out_a, in_a, out_b, in_b);
/// an explicit index bijection reorders them to (out_a, out_b, in_a, in_b).
inline Channel tensor_channel(const Channel& a, const Channel& b) {
  Mat k = kron(a.choi, b.choi);
  const Eigen::Index oa = a.d_out, ia = a.d_in, ob = b.d_out, ib = b.d_in;
  const Eigen::Index dim = oa * ia * ob * ib;
  std::vector<Eigen::Index> perm(static_cast<std::size_t>(dim));
  for (Eigen::Index x_oa = 0; x_oa < oa; ++x_oa)
    for (Eigen::Index x_ia = 0; x_ia < ia; ++x_ia)
      for (Eigen::Index x_ob = 0; x_ob < ob; ++x_ob)
        for (Eigen::Index x_ib = 0; x_ib < ib; ++x_ib) {
          Eigen::Index src = ((x_oa * ia + x_ia) * ob + x_ob) * ib + x_ib;
          Eigen::Index dst = ((x_oa * ob + x_ob) * ia + x_ia) * ib + x_ib;
          perm[static_cast<std::size_t>(src)] = dst;
        }
  Mat out(dim, dim);
  for (Eigen::Index r = 0; r < dim; ++r)
    for (Eigen::Index c = 0; c < dim; ++c)
      out(perm[static_cast<std::size_t>(r)], perm[static_cast<std::size_t>(c)]) = k(r, c);
  return Channel{ia * ib, oa * ob, std::move(out)};
}

/// n-fold tensor power of a channel.
inline Channel tensor_power(const Channel& c, int n) {
  if (n < 1) throw std::invalid_argument("tensor_power: n must be >= 1");
  Channel out = c;
  for (int i = 1; i < n; ++i) out = tensor_channel(out, c);
  return out;
}

}  // namespace qchan
