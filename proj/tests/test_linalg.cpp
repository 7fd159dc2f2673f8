#include <catch2/catch_amalgamated.hpp>

#include "qchan/linalg.hpp"
#include "qchan/channel.hpp"
#include "qchan/sampling.hpp"

using namespace qchan;

namespace {

Mat bell_proj(int b) {
  const Mat sig[4] = {pauli_i(), pauli_x(), pauli_y(), pauli_z()};
  Vec v = vec_row_major(sig[b]);
  return 0.5 * (v * v.adjoint());
}

Mat random_psd(Rng& rng, Eigen::Index d, Eigen::Index rank) {
  Mat g(d, rank);
  for (Eigen::Index i = 0; i < d; ++i)
    for (Eigen::Index j = 0; j < rank; ++j) g(i, j) = Cplx(rng.normal(), rng.normal());
  return g * g.adjoint();
}

}  // namespace

TEST_CASE("kron basics") {
  REQUIRE(max_abs(kron(Mat::Identity(2, 2), Mat::Identity(2, 2)) - Mat::Identity(4, 4)) == 0.0);

  Mat d1 = Mat::Zero(2, 2), d2 = Mat::Zero(2, 2);
  d1.diagonal() << 1, 2;
  d2.diagonal() << 3, 4;
  Mat k = kron(d1, d2);
  Mat want = Mat::Zero(4, 4);
  want.diagonal() << 3, 4, 6, 8;
  REQUIRE(max_abs(k - want) == 0.0);

  // X (x) X leaves the unnormalized maximally entangled vector fixed
  Vec id_vec = max_entangled_unnormalized(2);
  Vec moved = kron(pauli_x(), pauli_x()) * id_vec;
  REQUIRE(max_abs(Mat(moved - id_vec)) <= 1e-15);
}

TEST_CASE("partial trace conventions") {
  Vec ent = max_entangled_unnormalized(2) / std::sqrt(2.0);
  Mat proj = ent * ent.adjoint();
  Mat marg = partial_trace(proj, 2, 2, Factor::second);
  REQUIRE(max_abs(marg - 0.5 * Mat::Identity(2, 2)) <= 1e-15);

  // identity-channel Choi has identity marginal over the output factor
  Channel id = choi_from_kraus({Mat::Identity(2, 2)}, 2, 2);
  REQUIRE(max_abs(partial_trace(id.choi, 2, 2, Factor::second) - Mat::Identity(2, 2)) <= 1e-14);

  Rng rng(42);
  Mat a = random_psd(rng, 3, 3), b = random_psd(rng, 2, 2);
  Mat kept = partial_trace(kron(a, b), 3, 2, Factor::first);
  REQUIRE(max_abs(kept - b.trace() * a) <= 1e-12);

  // trace is preserved whichever factor is kept
  Mat m = random_psd(rng, 6, 6);
  for (Factor f : {Factor::first, Factor::second}) {
    Mat pt = partial_trace(m, 2, 3, f);
    REQUIRE(std::abs((pt.trace() - m.trace()).real()) <= 1e-12 * std::abs(m.trace().real()));
  }

  REQUIRE_THROWS_AS(partial_trace(Mat::Identity(5, 5), 2, 2, Factor::first), DimensionError);
}

TEST_CASE("hermitian eigendecomposition") {
  EigH ez = eig_hermitian(pauli_z());
  REQUIRE(ez.values[0] == Catch::Approx(-1.0).margin(1e-14));
  REQUIRE(ez.values[1] == Catch::Approx(1.0).margin(1e-14));

  // bit-flip Choi at p = 0.3: rank two with eigenvalues 2p and 2(1-p)
  Mat choi = 2.0 * (0.7 * bell_proj(0) + 0.3 * bell_proj(1));
  EigH ec = eig_hermitian(choi);
  REQUIRE(ec.values[0] == Catch::Approx(0.0).margin(1e-12));
  REQUIRE(ec.values[1] == Catch::Approx(0.0).margin(1e-12));
  REQUIRE(ec.values[2] == Catch::Approx(0.6).margin(1e-12));
  REQUIRE(ec.values[3] == Catch::Approx(1.4).margin(1e-12));

  EigH zero = eig_hermitian(Mat::Zero(3, 3));
  REQUIRE(zero.values.cwiseAbs().maxCoeff() == 0.0);

  Mat bad(2, 2);
  bad << 0, 1, 0, 0;
  REQUIRE_THROWS_AS(eig_hermitian(bad), std::invalid_argument);

  // reconstruction error stays at solver precision
  Rng rng(7);
  Mat h = hermitize(random_psd(rng, 8, 8) - random_psd(rng, 8, 8));
  EigH eh = eig_hermitian(h);
  Mat rebuilt = eh.vectors * eh.values.asDiagonal().toDenseMatrix().cast<Cplx>() *
                eh.vectors.adjoint();
  REQUIRE(op_norm_inf(h - rebuilt) <= 1e-9 * std::max(1.0, op_norm_inf(h)));
}

TEST_CASE("pseudo-inverse on the support") {
  Mat d = Mat::Zero(2, 2);
  d(0, 0) = 2.0;
  Mat p = pinv_on_support(d);
  REQUIRE(p(0, 0).real() == Catch::Approx(0.5).margin(1e-14));
  REQUIRE(max_abs(p) == Catch::Approx(0.5).margin(1e-14));

  REQUIRE(max_abs(pinv_on_support(Mat::Identity(4, 4)) - Mat::Identity(4, 4)) <= 1e-14);
  REQUIRE(max_abs(pinv_on_support(Mat::Zero(3, 3))) == 0.0);

  // bit-flip Choi at p = 1/2 has both support eigenvalues equal to one
  Mat choi = bell_proj(0) * 2.0 * 0.5 + bell_proj(1) * 2.0 * 0.5;
  Mat support = bell_proj(0) + bell_proj(1);
  REQUIRE(max_abs(pinv_on_support(choi) - support) <= 1e-12);

  // all four Moore-Penrose identities on random PSD matrices
  Rng rng(11);
  for (Eigen::Index dim : {2, 5, 16}) {
    Mat m = random_psd(rng, dim, dim / 2 + 1);
    Mat mp = pinv_on_support(m);
    REQUIRE(op_norm_inf(m * mp * m - m) <= 1e-8 * std::max(1.0, op_norm_inf(m)));
    REQUIRE(op_norm_inf(mp * m * mp - mp) <= 1e-8 * std::max(1.0, op_norm_inf(mp)));
    REQUIRE(op_norm_inf(Mat((m * mp).adjoint()) - m * mp) <= 1e-8);
    REQUIRE(op_norm_inf(Mat((mp * m).adjoint()) - mp * m) <= 1e-8);
  }
}

TEST_CASE("norms") {
  REQUIRE(op_norm_inf(pauli_x()) == Catch::Approx(1.0).margin(1e-12));
  REQUIRE(trace_norm(pauli_x()) == Catch::Approx(2.0).margin(1e-12));

  Mat rho = Mat::Zero(2, 2), sig = Mat::Zero(2, 2);
  rho(0, 0) = 1.0;
  sig.diagonal() << 0.5, 0.5;
  REQUIRE(trace_norm(rho - sig) == Catch::Approx(1.0).margin(1e-12));

  REQUIRE(op_norm_inf(Cplx(-2.5, 0) * Mat::Identity(3, 3)) == Catch::Approx(2.5).margin(1e-12));
  REQUIRE_THROWS_AS(trace_norm(Mat::Zero(2, 3)), DimensionError);

  // on Hermitian inputs the operator norm is the largest |eigenvalue|
  Rng rng(5);
  for (int k = 0; k < 20; ++k) {
    Mat h = hermitize(random_psd(rng, 4, 4) - random_psd(rng, 4, 4));
    EigH eh = eig_hermitian(h);
    REQUIRE(op_norm_inf(h) ==
            Catch::Approx(eh.values.cwiseAbs().maxCoeff()).margin(1e-9 * (1 + op_norm_inf(h))));
  }
}

TEST_CASE("support projectors") {
  SupportProjector full = support_projector(Mat::Identity(3, 3));
  REQUIRE(full.rank == 3);
  Rng rng(9);
  SupportProjector any = support_projector(random_psd(rng, 3, 2));
  REQUIRE(support_contains(full, any));

  Mat k0 = Mat::Zero(2, 2), k1 = Mat::Zero(2, 2);
  k0(0, 0) = 1.0;
  k1(1, 1) = 1.0;
  REQUIRE_FALSE(support_contains(support_projector(k0), support_projector(k1)));

  // bit-flip Choi supports agree across the parameter
  Mat c1 = 2.0 * (0.7 * bell_proj(0) + 0.3 * bell_proj(1));
  Mat c2 = 2.0 * (0.4 * bell_proj(0) + 0.6 * bell_proj(1));
  SupportProjector s1 = support_projector(c1), s2 = support_projector(c2);
  REQUIRE(s1.rank == 2);
  REQUIRE(s2.rank == 2);
  REQUIRE(support_contains(s1, s2));
  REQUIRE(support_contains(s2, s1));

  // projector invariants
  REQUIRE(op_norm_inf(s1.projector * s1.projector - s1.projector) <= 1e-10);

  // reflexivity and transitivity on a nested random set
  Mat a = random_psd(rng, 4, 1), b = a + random_psd(rng, 4, 2), c = b + random_psd(rng, 4, 4);
  SupportProjector pa = support_projector(a), pb = support_projector(b),
                   pc = support_projector(c);
  REQUIRE(support_contains(pa, pa));
  REQUIRE(support_contains(pb, pa));
  REQUIRE(support_contains(pc, pb));
  REQUIRE(support_contains(pc, pa));
}
