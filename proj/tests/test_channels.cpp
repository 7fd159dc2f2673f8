#include <catch2/catch_amalgamated.hpp>

#include "qchan/family.hpp"
#include "qchan/sampling.hpp"

using namespace qchan;

namespace {

Mat bell_proj(int b) {
  const Mat sig[4] = {pauli_i(), pauli_x(), pauli_y(), pauli_z()};
  Vec v = vec_row_major(sig[b]);
  return 0.5 * (v * v.adjoint());
}

RealVec pt(double x) {
  RealVec t(1);
  t << x;
  return t;
}

}  // namespace

TEST_CASE("choi from kraus") {
  Channel id = choi_from_kraus({Mat::Identity(2, 2)}, 2, 2);
  Vec ent = max_entangled_unnormalized(2);
  REQUIRE(max_abs(id.choi - ent * ent.adjoint()) <= 1e-15);
  EigH e = eig_hermitian(id.choi);
  REQUIRE(e.values[3] == Catch::Approx(2.0).margin(1e-12));
  REQUIRE(e.values[2] == Catch::Approx(0.0).margin(1e-12));

  Channel bf = pauli_channel({0.7, 0.3, 0.0, 0.0});
  REQUIRE(max_abs(bf.choi - 2.0 * (0.7 * bell_proj(0) + 0.3 * bell_proj(1))) <= 1e-14);

  Channel dep = pauli_channel({0.25, 0.25, 0.25, 0.25});
  REQUIRE(max_abs(dep.choi - 0.5 * Mat::Identity(4, 4)) <= 1e-14);

  Mat half = 0.5 * Mat::Identity(2, 2);
  REQUIRE_THROWS_AS(choi_from_kraus({half}, 2, 2), std::invalid_argument);
}

TEST_CASE("pauli family construction") {
  ChannelFamily bf = bitflip_family({0.2, 0.8});
  REQUIRE(bf.v == 1);
  validate_channel(bf.eval(pt(0.3)));

  ChannelFamily p3 = pauli3_family();
  REQUIRE(p3.v == 3);
  validate_channel(p3.eval(RealVec::Constant(3, 0.15)));

  REQUIRE_THROWS_AS(
      pauli_family([](const RealVec& t) { return PauliProbs{1.1 - t[0], t[0], -0.1, 0.0}; },
                   {{0.2, 0.8}}),
      std::invalid_argument);
}

TEST_CASE("channel application") {
  ChannelFamily bf = bitflip_family();
  Mat zero_state = Mat::Zero(2, 2);
  zero_state(0, 0) = 1.0;
  Mat out = apply_channel(bf.eval(pt(0.3)), zero_state);
  REQUIRE(out(0, 0).real() == Catch::Approx(0.7).margin(1e-13));
  REQUIRE(out(1, 1).real() == Catch::Approx(0.3).margin(1e-13));

  // the maximally entangled probe reproduces the Choi operator over d
  Channel c = bf.eval(pt(0.3));
  Vec probe = max_entangled_unnormalized(2);
  probe /= probe.norm();
  Mat big = apply_channel_bipartite(c, probe, 2);
  REQUIRE(max_abs(big - c.choi / 2.0) <= 1e-13);
}

TEST_CASE("tensor channel") {
  ChannelFamily bf = bitflip_family();
  Channel id = choi_from_kraus({Mat::Identity(2, 2)}, 2, 2);
  Channel id2 = tensor_channel(id, id);
  EigH e = eig_hermitian(id2.choi);
  REQUIRE(e.values[15] == Catch::Approx(4.0).margin(1e-12));
  REQUIRE(e.values[14] == Catch::Approx(0.0).margin(1e-12));

  // normalization survives tensoring
  Rng rng(21);
  for (int k = 0; k < 5; ++k) {
    Channel a = random_full_rank_channel(rng);
    Channel b = random_full_rank_channel(rng);
    Channel ab = tensor_channel(a, b);
    REQUIRE(max_abs(partial_trace(ab.choi, 4, 4, Factor::second) - Mat::Identity(4, 4)) <= 1e-10);
  }

  // spectrum of a product of bit-flip Choi operators is the product spectrum
  double p = 0.3, q = 0.6;
  Channel big = tensor_channel(bf.eval(pt(p)), bf.eval(pt(q)));
  EigH eb = eig_hermitian(big.choi);
  std::vector<double> want = {4 * p * q, 4 * p * (1 - q), 4 * (1 - p) * q,
                              4 * (1 - p) * (1 - q)};
  std::sort(want.begin(), want.end());
  for (int i = 0; i < 4; ++i) {
    REQUIRE(eb.values[15 - i] == Catch::Approx(want[3 - static_cast<std::size_t>(i)]).margin(1e-11));
  }

  // tensoring at the Kraus level gives the same Choi operator
  std::vector<Mat> ka = {std::sqrt(0.7) * pauli_i(), std::sqrt(0.3) * pauli_x()};
  std::vector<Mat> kb = {std::sqrt(0.4) * pauli_i(), std::sqrt(0.6) * pauli_z()};
  std::vector<Mat> kab;
  for (const Mat& x : ka)
    for (const Mat& y : kb) kab.push_back(kron(x, y));
  Channel direct = choi_from_kraus(kab, 4, 4);
  Channel composed = tensor_channel(choi_from_kraus(ka, 2, 2), choi_from_kraus(kb, 2, 2));
  REQUIRE(max_abs(direct.choi - composed.choi) <= 1e-10);
}

TEST_CASE("choi derivatives") {
  ChannelFamily bf = bitflip_family();
  RealVec dir = pt(1.0);
  Mat d_analytic = choi_derivative(bf, pt(0.37), dir);
  Mat want = 2.0 * (bell_proj(1) - bell_proj(0));
  REQUIRE(max_abs(d_analytic - want) <= 1e-9);

  // finite differences on the linear family match at any sane step
  ChannelFamily bare = bf;
  bare.derivative = nullptr;
  for (double h : {1e-2, 1e-4, 1e-5}) {
    Mat d_fd = choi_derivative(bare, pt(0.37), dir, h);
    REQUIRE(max_abs(d_fd - want) <= 1e-9);
  }

  Channel fixed = pauli_channel({0.6, 0.4, 0.0, 0.0});
  ChannelFamily cf = constant_family(fixed);
  REQUIRE(max_abs(choi_derivative(cf, pt(0.5), dir)) == 0.0);

  // analytic vs finite differences across built-in families
  for (const ChannelFamily& fam :
       {bitflip_family(), depolarizing_family(), rotation_family(), constant_pure_family()}) {
    ChannelFamily fd = fam;
    fd.derivative = nullptr;
    RealVec mid = box_midpoint(fam);
    Mat a = choi_derivative(fam, mid, dir);
    Mat b = choi_derivative(fd, mid, dir);
    REQUIRE(max_abs(a - b) <= 1e-5 * std::max(1.0, max_abs(a)));
  }
  ChannelFamily p3 = pauli3_family();
  ChannelFamily p3fd = p3;
  p3fd.derivative = nullptr;
  RealVec mid3 = box_midpoint(p3);
  RealVec dir3 = RealVec::Constant(3, 1.0 / std::sqrt(3.0));
  REQUIRE(max_abs(choi_derivative(p3, mid3, dir3) - choi_derivative(p3fd, mid3, dir3)) <= 1e-5);

  REQUIRE_THROWS_AS(choi_derivative(p3fd, RealVec::Constant(3, 0.1), dir3),
                    std::invalid_argument);  // finite difference would leave the box
}

TEST_CASE("support conditions") {
  ChannelFamily bf = bitflip_family();
  REQUIRE(check_condition_support_constant(bf, box_sample_grid(bf)));

  ChannelFamily cp = constant_pure_family();
  REQUIRE_FALSE(check_condition_support_constant(cp, box_sample_grid(cp)));

  Channel fixed = pauli_channel({0.6, 0.4, 0.0, 0.0});
  ChannelFamily cf = constant_family(fixed);
  REQUIRE(check_condition_support_constant(cf, box_sample_grid(cf)));

  REQUIRE(check_condition_derivative_support(bf, pt(0.5), default_directions(1)));
  REQUIRE_FALSE(check_condition_derivative_support(cp, pt(0.6), default_directions(1)));
  REQUIRE(check_condition_derivative_support(cf, pt(0.5), default_directions(1)));

  // constant support implies contained derivative support on the built-ins
  for (const ChannelFamily& fam : {bitflip_family(), pauli3_family(), depolarizing_family()}) {
    REQUIRE(check_condition_support_constant(fam, box_sample_grid(fam)));
    REQUIRE(check_condition_derivative_support(fam, box_midpoint(fam),
                                               default_directions(fam.v)));
  }
}
