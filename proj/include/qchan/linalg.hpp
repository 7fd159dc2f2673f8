#pragma once

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <complex>
#include <stdexcept>
#include <string>

namespace qchan {

using Cplx = std::complex<double>;
using Mat = Eigen::MatrixXcd;
using Vec = Eigen::VectorXcd;
using RealMat = Eigen::MatrixXd;
using RealVec = Eigen::VectorXd;

inline constexpr double log2_e = 1.4426950408889634;

struct DimensionError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

/// Thrown when a divergence is requested between operators whose supports are
/// not nested; the value is infinite rather than a number.
struct SupportViolation : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Thrown when a Fisher quantity diverges (moving support, blocked SLD).
struct InfiniteFisher : std::runtime_error {
  using std::runtime_error::runtime_error;
};

inline double max_abs(const Mat& m) {
  return m.size() == 0 ? 0.0 : m.cwiseAbs().maxCoeff();
}

inline bool is_hermitian(const Mat& m, double rel_tol = 1e-9) {
  if (m.rows() != m.cols()) return false;
  double scale = std::max(1.0, max_abs(m));
  return max_abs(m - m.adjoint()) <= rel_tol * scale;
}

inline Mat hermitize(const Mat& m) { return 0.5 * (m + m.adjoint()); }

struct EigH {
  RealVec values;  // ascending
  Mat vectors;     // columns, orthonormal
};

/// Hermitian eigendecomposition; the single spectral primitive everything
/// else (norms, pseudo-inverse, supports) is built on.
inline EigH eig_hermitian(const Mat& m, double herm_tol = 1e-9) {
  if (m.rows() != m.cols()) throw DimensionError("eig_hermitian: matrix must be square");
  if (!is_hermitian(m, herm_tol))
    throw std::invalid_argument("eig_hermitian: input is not Hermitian within tolerance");
  Eigen::SelfAdjointEigenSolver<Mat> es(hermitize(m));
  if (es.info() != Eigen::Success) throw std::runtime_error("eig_hermitian: solver failed");
  return {es.eigenvalues(), es.eigenvectors()};
}

inline Mat kron(const Mat& a, const Mat& b) {
  Mat out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i)
    for (Eigen::Index j = 0; j < a.cols(); ++j)
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
  return out;
}

enum class Factor { first, second };

/// Partial trace of an operator on a tensor product with factor dimensions
/// (d1, d2), composite index i1*d2 + i2. Keeps the requested factor.
inline Mat partial_trace(const Mat& m, Eigen::Index d1, Eigen::Index d2, Factor keep) {
  if (d1 < 1 || d2 < 1 || m.rows() != d1 * d2 || m.cols() != d1 * d2)
    throw DimensionError("partial_trace: matrix is not (d1*d2) x (d1*d2)");
  if (keep == Factor::first) {
    Mat out = Mat::Zero(d1, d1);
    for (Eigen::Index i = 0; i < d1; ++i)
      for (Eigen::Index j = 0; j < d1; ++j) {
        Cplx s = 0;
        for (Eigen::Index k = 0; k < d2; ++k) s += m(i * d2 + k, j * d2 + k);
        out(i, j) = s;
      }
    return out;
  }
  Mat out = Mat::Zero(d2, d2);
  for (Eigen::Index i = 0; i < d2; ++i)
    for (Eigen::Index j = 0; j < d2; ++j) {
      Cplx s = 0;
      for (Eigen::Index k = 0; k < d1; ++k) s += m(k * d2 + i, k * d2 + j);
      out(i, j) = s;
    }
  return out;
}

/// Singular values computed through the Hermitian eigendecomposition of m†m.
inline RealVec singular_values(const Mat& m) {
  Eigen::SelfAdjointEigenSolver<Mat> es(Mat(m.adjoint() * m));
  if (es.info() != Eigen::Success) throw std::runtime_error("singular_values: solver failed");
  return es.eigenvalues().cwiseMax(0.0).cwiseSqrt();
}

/// Largest singular value.
inline double op_norm_inf(const Mat& m) {
  if (m.size() == 0) return 0.0;
  return singular_values(m).maxCoeff();
}

/// Sum of singular values; defined for square operators.
inline double trace_norm(const Mat& m) {
  if (m.rows() != m.cols()) throw DimensionError("trace_norm: matrix must be square");
  if (m.size() == 0) return 0.0;
  return singular_values(m).sum();
}

/// Moore-Penrose inverse of a Hermitian PSD operator, keeping eigenvalues
/// above rel_tol * lambda_max. The zero matrix maps to the zero matrix.
inline Mat pinv_on_support(const Mat& m, double rel_tol = 1e-10) {
  EigH eg = eig_hermitian(m);
  const Eigen::Index d = m.rows();
  double lmax = 0.0;
  for (Eigen::Index k = 0; k < d; ++k) lmax = std::max(lmax, std::abs(eg.values[k]));
  Mat out = Mat::Zero(d, d);
  if (lmax == 0.0) return out;
  for (Eigen::Index k = 0; k < d; ++k) {
    if (eg.values[k] > rel_tol * lmax)
      out += (1.0 / eg.values[k]) * (eg.vectors.col(k) * eg.vectors.col(k).adjoint());
  }
  return out;
}

struct SupportProjector {
  Mat projector;
  Eigen::Index rank = 0;
  double tolerance = 0.0;
};

/// Projector onto the span of eigenvectors with |eigenvalue| > abs_tol.
/// abs_tol < 0 selects the default cutoff 1e-9 * lambda_max.
inline SupportProjector support_projector(const Mat& m, double abs_tol = -1.0) {
  EigH eg = eig_hermitian(m);
  const Eigen::Index d = m.rows();
  double lmax = 0.0;
  for (Eigen::Index k = 0; k < d; ++k) lmax = std::max(lmax, std::abs(eg.values[k]));
  if (abs_tol < 0.0) abs_tol = 1e-9 * lmax;
  SupportProjector sp;
  sp.projector = Mat::Zero(d, d);
  sp.tolerance = abs_tol;
  for (Eigen::Index k = 0; k < d; ++k) {
    if (std::abs(eg.values[k]) > abs_tol) {
      sp.projector += eg.vectors.col(k) * eg.vectors.col(k).adjoint();
      ++sp.rank;
    }
  }
  return sp;
}

/// True iff the support of b lies inside the support of a.
inline bool support_contains(const SupportProjector& a, const SupportProjector& b,
                             double tol = 1e-7) {
  Mat eye = Mat::Identity(a.projector.rows(), a.projector.cols());
  return op_norm_inf((eye - a.projector) * b.projector) <= tol;
}

/// Mass of m outside the projector, relative to the total mass of m.
inline double weight_outside_support(const Mat& m, const SupportProjector& p) {
  Mat eye = Mat::Identity(p.projector.rows(), p.projector.cols());
  Mat q = eye - p.projector;
  double outside = op_norm_inf(q * m);
  double scale = std::max(1e-300, op_norm_inf(m));
  return outside / scale;
}

}  // namespace qchan
