#include <catch2/catch_amalgamated.hpp>

#include "qchan/fisher.hpp"
#include "qchan/sampling.hpp"

using namespace qchan;

namespace {

RealVec pt(double x) {
  RealVec t(1);
  t << x;
  return t;
}

StateFamily bernoulli_family() {
  StateFamily f;
  f.v = 1;
  f.box = {{0.05, 0.95}};
  f.eval = [](const RealVec& t) {
    Mat m = Mat::Zero(2, 2);
    m.diagonal() << t[0], 1.0 - t[0];
    return m;
  };
  f.derivative = [](const RealVec&, int) {
    Mat m = Mat::Zero(2, 2);
    m.diagonal() << 1.0, -1.0;
    return m;
  };
  return f;
}

StateFamily moving_pure_family() {
  StateFamily f;
  f.v = 1;
  f.box = {{0.0, 1.5}};
  f.eval = [](const RealVec& t) {
    Vec psi(2);
    psi << std::cos(t[0]), std::sin(t[0]);
    return Mat(psi * psi.adjoint());
  };
  return f;
}

}  // namespace

TEST_CASE("state Fisher information") {
  StateFamily bern = bernoulli_family();
  REQUIRE(rld_fisher_states(bern, pt(0.5))(0, 0) == Catch::Approx(4.0).margin(1e-9));
  REQUIRE(rld_fisher_states(bern, pt(0.2))(0, 0) == Catch::Approx(1.0 / 0.16).margin(1e-6));

  StateFamily constant;
  constant.v = 1;
  constant.box = {{0.0, 1.0}};
  constant.eval = [](const RealVec&) {
    Mat m = Mat::Zero(2, 2);
    m.diagonal() << 0.3, 0.7;
    return m;
  };
  REQUIRE(rld_fisher_states(constant, pt(0.5)).norm() <= 1e-10);

  REQUIRE_THROWS_AS(rld_fisher_states(moving_pure_family(), pt(0.4)), InfiniteFisher);
}

TEST_CASE("quadratic form tensor") {
  ChannelFamily bf = bitflip_family();
  double p = 0.3;
  QuadraticFormTensor q = quadratic_form_tensor(bf, pt(p));
  Mat want = (1.0 / (p * (1.0 - p))) * Mat::Identity(2, 2);
  REQUIRE(max_abs(q.at(0, 0) - want) <= 1e-7);

  Channel fixed = pauli_channel({0.6, 0.4, 0.0, 0.0});
  QuadraticFormTensor qc = quadratic_form_tensor(constant_family(fixed), pt(0.5));
  REQUIRE(max_abs(qc.at(0, 0)) <= 1e-12);

  REQUIRE_THROWS_AS(quadratic_form_tensor(rotation_family(), pt(0.7)), InfiniteFisher);

  // directional evaluation is the quadratic form of the tensor
  ChannelFamily p3 = pauli3_family();
  RealVec t3 = RealVec::Constant(3, 0.14);
  QuadraticFormTensor q3 = quadratic_form_tensor(p3, t3);
  Rng rng(13);
  for (int k = 0; k < 5; ++k) {
    RealVec s(3);
    for (int i = 0; i < 3; ++i) s[i] = rng.normal();
    s /= s.norm();
    Mat direct = hermitize(
        partial_trace(Mat(choi_derivative(p3, t3, s) * pinv_on_support(p3.eval(t3).choi) *
                          choi_derivative(p3, t3, s)),
                      2, 2, Factor::second));
    REQUIRE(max_abs(q3.directional(s) - direct) <= 1e-10 * std::max(1.0, max_abs(direct)));
  }
}

TEST_CASE("channel RLD norm") {
  ChannelFamily bf = bitflip_family();
  REQUIRE(rld_norm_channel(bf, pt(0.5)).value == Catch::Approx(4.0).margin(1e-9));
  REQUIRE(rld_norm_channel(bf, pt(0.2)).value == Catch::Approx(6.25).margin(1e-7));

  // two decoupled parameters acting on separate qubits: the norm is the
  // larger of the single-parameter values
  ChannelFamily f2;
  f2.v = 2;
  f2.box = {{0.2, 0.8}, {0.2, 0.8}};
  f2.name = "bitflip2";
  f2.eval = [bf](const RealVec& t) {
    return tensor_channel(bf.eval(pt(t[0])), bf.eval(pt(t[1])));
  };
  RealVec t2(2);
  t2 << 0.3, 0.5;
  FisherReport r2 = rld_norm_channel(f2, t2, 4000);
  double want = std::max(1.0 / (0.3 * 0.7), 1.0 / (0.5 * 0.5));
  REQUIRE(r2.value == Catch::Approx(want).margin(1e-6));
  REQUIRE(std::abs(r2.direction[0]) == Catch::Approx(1.0).margin(1e-3));

  Channel fixed = pauli_channel({0.6, 0.4, 0.0, 0.0});
  REQUIRE(rld_norm_channel(constant_family(fixed), pt(0.5)).value <= 1e-12);
}

TEST_CASE("channel RLD norm, variational route") {
  ChannelFamily bf = bitflip_family();
  FisherReport var = rld_norm_channel_variational(bf, pt(0.5), 16, default_seed);
  REQUIRE(var.value == Catch::Approx(4.0).epsilon(1e-3));
  REQUIRE(var.value <= rld_norm_channel(bf, pt(0.5)).value + 1e-6);

  // a product probe reduces to the classical flip-rate family
  Vec product = Vec::Zero(4);
  product(0) = 1.0;  // |0>|0>
  Mat j = qchan::detail::probe_output_fisher(bf, pt(0.3), product);
  REQUIRE(j(0, 0).real() == Catch::Approx(1.0 / 0.21).margin(1e-6));

  // scaling the parameter by c divides the norm by c^2
  ChannelFamily half = pauli_family(
      [](const RealVec& t) { return PauliProbs{1.0 - t[0] / 2.0, t[0] / 2.0, 0.0, 0.0}; },
      {{0.4, 1.6}}, "bitflip-halved");
  REQUIRE(rld_norm_channel(half, pt(1.0)).value == Catch::Approx(1.0).margin(1e-6));
}

TEST_CASE("SLD Fisher information") {
  StateFamily bern = bernoulli_family();
  REQUIRE(sld_fisher_states(bern, pt(0.5))(0, 0) == Catch::Approx(4.0).margin(1e-9));

  // pure phase family: SLD information is finite (= 1), RLD diverges
  StateFamily phase;
  phase.v = 1;
  phase.box = {{0.0, 1.0}};
  phase.eval = [](const RealVec& t) {
    Vec psi(2);
    psi << std::exp(Cplx(0, -t[0] / 2)) / std::sqrt(2.0),
        std::exp(Cplx(0, t[0] / 2)) / std::sqrt(2.0);
    return Mat(psi * psi.adjoint());
  };
  REQUIRE(sld_fisher_states(phase, pt(0.3))(0, 0) == Catch::Approx(1.0).margin(1e-6));
  REQUIRE_THROWS_AS(rld_fisher_states(phase, pt(0.3)), InfiniteFisher);

  StateFamily constant;
  constant.v = 1;
  constant.box = {{0.0, 1.0}};
  constant.eval = [](const RealVec&) {
    Mat m = Mat::Zero(2, 2);
    m.diagonal() << 0.4, 0.6;
    return m;
  };
  REQUIRE(sld_fisher_states(constant, pt(0.5)).norm() <= 1e-10);

  // SLD never exceeds RLD in the matrix order where both are finite
  StateFamily tilted;
  tilted.v = 1;
  tilted.box = {{0.2, 0.8}};
  tilted.eval = [](const RealVec& t) {
    Vec psi(2);
    psi << std::cos(0.6), std::sin(0.6);
    Mat m = Mat::Zero(2, 2);
    m(0, 0) = 1.0;
    return Mat((1.0 - t[0]) * m + t[0] * (psi * psi.adjoint()));
  };
  for (double tv : {0.3, 0.5, 0.7}) {
    double jr = rld_fisher_states(tilted, pt(tv))(0, 0);
    double js = sld_fisher_states(tilted, pt(tv))(0, 0);
    REQUIRE(js <= jr + 1e-8);
  }
}

TEST_CASE("pure phase Fisher information") {
  // GHZ probe under the collective half-Z generator
  for (int n : {1, 3, 10}) {
    Eigen::Index dim = Eigen::Index(1) << n;
    Vec ghz = Vec::Zero(dim);
    ghz(0) = 1.0 / std::sqrt(2.0);
    ghz(dim - 1) = 1.0 / std::sqrt(2.0);
    Mat h = Mat::Zero(dim, dim);
    for (Eigen::Index b = 0; b < dim; ++b) {
      int pop = 0;
      for (int qb = 0; qb < n; ++qb) pop += static_cast<int>((b >> qb) & 1);
      h(b, b) = 0.5 * (n - 2 * pop);
    }
    REQUIRE(qfi_pure_phase(ghz, h) == Catch::Approx(double(n) * n).margin(1e-9));

    // product |+>^n probe only reaches n
    Vec plus = Vec::Constant(dim, 1.0 / std::sqrt(double(dim)));
    REQUIRE(qfi_pure_phase(plus, h) == Catch::Approx(double(n)).margin(1e-9));
  }
  // generator eigenstates carry no phase information
  Vec e0 = Vec::Zero(2);
  e0(0) = 1.0;
  REQUIRE(qfi_pure_phase(e0, pauli_z()) == Catch::Approx(0.0).margin(1e-12));
}

TEST_CASE("divergence Taylor check") {
  ChannelFamily bf = bitflip_family();
  std::vector<double> eps = {1e-3, 1e-2, 1e-1};
  TaylorCheck tc = taylor_check_d2(bf, pt(0.5), pt(1.0), eps);
  REQUIRE(tc.slope >= 1.9);
  REQUIRE(tc.slope <= 2.1);
  // local coefficient approaches J log2(e); here J = 4 at p = 1/2
  double cap = 4.0 * log2_e;
  REQUIRE(tc.coefficient <= cap * 1.05);
  REQUIRE(tc.coefficient >= cap * 0.95);

  Channel fixed = pauli_channel({0.6, 0.4, 0.0, 0.0});
  TaylorCheck flat = taylor_check_d2(constant_family(fixed), pt(0.5), pt(1.0), eps);
  for (auto& [e, d2] : flat.samples) REQUIRE(d2 <= 1e-12);

  ChannelFamily p3 = pauli3_family({{0.05, 0.3}, {0.05, 0.3}, {0.05, 0.3}});
  Rng rng(29);
  for (int k = 0; k < 3; ++k) {
    RealVec dir(3);
    for (int i = 0; i < 3; ++i) dir[i] = rng.normal();
    dir /= dir.norm();
    RealVec t3 = RealVec::Constant(3, 0.175);
    std::vector<double> eps_small = {1e-3, 3e-3, 1e-2, 3e-2};
    TaylorCheck t = taylor_check_d2(p3, t3, dir, eps_small);
    REQUIRE(t.slope >= 1.9);
    REQUIRE(t.slope <= 2.1);
  }

  REQUIRE_THROWS_AS(taylor_check_d2(bf, pt(0.75), pt(1.0), eps), std::invalid_argument);
}

TEST_CASE("supremum of the RLD norm") {
  REQUIRE(jr_max(bitflip_family()) == Catch::Approx(6.25).margin(1e-9));
  REQUIRE_THROWS_AS(jr_max(rotation_family()), InfiniteFisher);
  Channel fixed = pauli_channel({0.6, 0.4, 0.0, 0.0});
  REQUIRE(jr_max(constant_family(fixed)) == 0.0);

  // depolarizing: the supremum sits at the small-noise edge of the box
  double lam = 0.1;
  double want = 9.0 / (16.0 - 12.0 * lam) + 3.0 / (4.0 * lam);
  REQUIRE(jr_max(depolarizing_family()) == Catch::Approx(want).margin(1e-6));
}
