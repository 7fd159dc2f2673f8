#pragma once

#include "qchan/channel.hpp"
#include "qchan/family.hpp"
#include "qchan/rng.hpp"

namespace qchan {

inline Vec random_pure_state(Rng& rng, Eigen::Index dim) {
  Vec psi(dim);
  for (Eigen::Index i = 0; i < dim; ++i) psi[i] = Cplx(rng.normal(), rng.normal());
  return psi / psi.norm();
}

inline Mat random_density(Rng& rng, Eigen::Index dim) {
  Mat g(dim, dim);
  for (Eigen::Index i = 0; i < dim; ++i)
    for (Eigen::Index j = 0; j < dim; ++j) g(i, j) = Cplx(rng.normal(), rng.normal());
  Mat rho = g * g.adjoint();
  return rho / rho.trace().real();
}

/// Random full-rank channel: a Gaussian Choi seed pushed to positive definite
/// and renormalized so the input marginal is the identity.
inline Channel random_full_rank_channel(Rng& rng, Eigen::Index d = 2,
                                        double floor_weight = 0.3) {
  Mat g(d * d, d * d);
  for (Eigen::Index i = 0; i < d * d; ++i)
    for (Eigen::Index j = 0; j < d * d; ++j) g(i, j) = Cplx(rng.normal(), rng.normal());
  Mat w = g * g.adjoint() + floor_weight * Mat::Identity(d * d, d * d);
  Mat marginal = partial_trace(w, d, d, Factor::second);
  EigH em = eig_hermitian(marginal);
  Mat half_inv = Mat::Zero(d, d);
  for (Eigen::Index k = 0; k < d; ++k)
    half_inv += (1.0 / std::sqrt(em.values[k])) * (em.vectors.col(k) * em.vectors.col(k).adjoint());
  Mat lift = kron(Mat::Identity(d, d), half_inv);
  Channel c{d, d, hermitize(lift * w * lift.adjoint())};
  validate_channel(c);
  return c;
}

inline PauliProbs random_pauli_probs(Rng& rng, double floor_p = 0.05) {
  PauliProbs p{};
  double sum = 0.0;
  for (int i = 0; i < 4; ++i) {
    p[static_cast<std::size_t>(i)] = floor_p + rng.uniform();
    sum += p[static_cast<std::size_t>(i)];
  }
  for (int i = 0; i < 4; ++i) p[static_cast<std::size_t>(i)] /= sum;
  return p;
}

}  // namespace qchan
