#include <catch2/catch_amalgamated.hpp>

#include "qchan/protocol.hpp"
#include "qchan/sampling.hpp"

using namespace qchan;

namespace {

RealVec pt(double x) {
  RealVec t(1);
  t << x;
  return t;
}

}  // namespace

TEST_CASE("grid construction") {
  ChannelFamily bf = bitflip_family();
  DiscretizationGrid g = build_grid(bf, 100, 0.5, 6.25);
  REQUIRE(g.spacing == Catch::Approx(0.004).margin(1e-15));
  REQUIRE(g.num_points() == 151);
  REQUIRE(g.cost_bits() == 8);

  DiscretizationGrid g4 = build_grid(bf, 10000, 0.5, 6.25);
  REQUIRE(g4.spacing == Catch::Approx(4e-5).margin(1e-18));
  REQUIRE(g4.num_points() == 15001);
  REQUIRE(g4.cost_bits() == 14);

  // enumeration agrees with the counted size; points lie in the closed box
  std::vector<RealVec> pts = g.enumerate_points();
  REQUIRE(pts.size() == 151);
  for (const RealVec& p : pts) {
    REQUIRE(p[0] >= 0.2 - 1e-9);
    REQUIRE(p[0] <= 0.8 + 1e-9);
  }
  for (std::size_t i = 1; i < pts.size(); ++i)
    REQUIRE(pts[i][0] - pts[i - 1][0] == Catch::Approx(g.spacing).margin(1e-12));

  // cost stays within the per-axis budget
  double budget = 0.0;
  for (int i = 0; i < g.v; ++i)
    budget += std::log2((g.box[static_cast<std::size_t>(i)].second -
                         g.box[static_cast<std::size_t>(i)].first) /
                            g.spacing +
                        1.0);
  REQUIRE(g.cost_bits() <= budget + g.v);

  // multi-parameter grid against explicit enumeration
  ChannelFamily p3 = pauli3_family();
  DiscretizationGrid g3 = build_grid(p3, 50, 0.5);
  std::vector<RealVec> pts3 = g3.enumerate_points(1u << 22);
  REQUIRE(pts3.size() == g3.num_points());
  for (const RealVec& p : pts3) REQUIRE(point_in_box(p3, p, 1e-9));

  Channel fixed = pauli_channel({0.6, 0.4, 0.0, 0.0});
  REQUIRE_THROWS_AS(build_grid(constant_family(fixed), 100, 0.5), std::invalid_argument);
  REQUIRE_THROWS_AS(build_grid(rotation_family(), 100, 0.5), std::invalid_argument);
}

TEST_CASE("encoding") {
  ChannelFamily bf = bitflip_family();
  DiscretizationGrid g = build_grid(bf, 100, 0.5, 6.25);

  RealVec on_lattice = pt(0.4);  // 100 * 0.004
  REQUIRE(std::abs(encode(on_lattice, g)[0] - 0.4) <= 1e-12);

  // nearest of {0.412, 0.416} to 0.4142 is 0.416
  RealVec tn = encode(pt(0.4142), g);
  REQUIRE(tn[0] == Catch::Approx(0.416).margin(1e-12));
  REQUIRE(std::abs(tn[0] - 0.4142) == Catch::Approx(0.0018).margin(1e-12));

  // exact midpoint resolves to the smaller coordinate
  DiscretizationGrid tie;
  tie.spacing = 0.25;
  tie.v = 1;
  tie.n = 1;
  tie.alpha = 0.5;
  tie.j_r_max = 16.0;  // distance contract bound = 1/sqrt(16) = 0.25
  tie.z_range = {{0, 4}};
  tie.box = {{0.0, 1.0}};
  REQUIRE(encode(pt(0.375), tie)[0] == Catch::Approx(0.25).margin(0.0));

  REQUIRE_THROWS_AS(encode(pt(0.95), g), std::invalid_argument);

  // distance contract holds everywhere in the box
  Rng rng(16);
  for (int k = 0; k < 200; ++k) {
    double n = std::pow(10.0, 2.0 + 3.0 * rng.uniform());
    double alpha = 0.25 + rng.uniform();
    DiscretizationGrid gg = build_grid(bf, n, alpha, 6.25);
    RealVec t = pt(0.2 + 0.6 * rng.uniform());
    RealVec out = encode(t, gg);
    double bound = std::pow(n, -alpha - 0.5) / std::sqrt(6.25);
    REQUIRE((out - t).norm() < bound);
  }
}

TEST_CASE("decoding applies the indexed channel") {
  ChannelFamily bf = bitflip_family();
  Mat zero_state = Mat::Zero(2, 2);
  zero_state(0, 0) = 1.0;
  std::vector<Mat> outs = decode_apply(pt(0.412), bf, {zero_state});
  REQUIRE(outs.size() == 1);
  REQUIRE(outs[0](0, 0).real() == Catch::Approx(0.588).margin(1e-13));
  REQUIRE(outs[0](1, 1).real() == Catch::Approx(0.412).margin(1e-13));

  REQUIRE(decode_apply(pt(0.4), bf, {}).empty());

  // encoded value equal to the true one reproduces the direct application
  Mat direct = apply_channel(bf.eval(pt(0.4)), zero_state);
  Mat via = decode_apply(pt(0.4), bf, {zero_state})[0];
  REQUIRE(max_abs(direct - via) == 0.0);
}

TEST_CASE("protocol error bound") {
  ChannelFamily bf = bitflip_family();
  REQUIRE(error_upper(bf, pt(0.4), pt(0.4), 100).value == Catch::Approx(0.0).margin(1e-9));

  // frozen spot: t = 0.4142 encodes to 0.416 on the n=100 grid
  DiscretizationGrid g = build_grid(bf, 100, 0.5, 6.25);
  RealVec t = pt(0.4142);
  RealVec tn = encode(t, g);
  double ratio = (1 - tn[0]) * (1 - tn[0]) / (1 - t[0]) + tn[0] * tn[0] / t[0];
  double want = std::sqrt(2.0 * 100.0 * std::log(ratio));
  REQUIRE(error_upper(bf, t, tn, 100).value == Catch::Approx(want).epsilon(1e-9));

  // at fixed t the bound decays inside the lattice envelope
  // sqrt(2 J_max (1 + o(1))) / 2.5 * n^(-1/2) when alpha = 1/2
  for (double n : {100.0, 1000.0, 10000.0}) {
    DiscretizationGrid gg = build_grid(bf, n, 0.5, 6.25);
    RealVec tt = pt(0.7233912339123392);
    double err = error_upper(bf, tt, encode(tt, gg), n).value;
    REQUIRE(err <= 1.5 / std::sqrt(n));
  }
}

TEST_CASE("exact Pauli tensor-power distance") {
  REQUIRE(exact_error_pauli({0.7, 0.3, 0, 0}, {0.7, 0.3, 0, 0}, 5) == 0.0);
  REQUIRE(exact_error_pauli({0.7, 0.3, 0, 0}, {0.5, 0.5, 0, 0}, 1) ==
          Catch::Approx(0.4).margin(1e-14));

  // nondecreasing in the number of uses, approaching 2
  double prev = 0.0;
  for (int n = 1; n <= 40; ++n) {
    double cur = exact_error_pauli({0.51, 0.49, 0, 0}, {0.49, 0.51, 0, 0}, n);
    REQUIRE(cur >= prev - 1e-12);
    prev = cur;
  }
  REQUIRE(prev > exact_error_pauli({0.51, 0.49, 0, 0}, {0.49, 0.51, 0, 0}, 1));
  REQUIRE(prev <= 2.0);

  // likelihood-ratio merge agrees with the full type enumeration
  PauliProbs dep_a{1 - 0.75 * 0.3, 0.075, 0.075, 0.075};
  PauliProbs dep_b{1 - 0.75 * 0.5, 0.125, 0.125, 0.125};
  double merged = exact_error_pauli(dep_a, dep_b, 6);
  double full = qchan::detail::multinomial_l1({dep_a[0], dep_a[1], dep_a[2], dep_a[3]},
                                              {dep_b[0], dep_b[1], dep_b[2], dep_b[3]}, 6);
  REQUIRE(merged == Catch::Approx(full).margin(1e-12));

  // the merge makes large-n depolarizing pairs tractable
  REQUIRE_NOTHROW(exact_error_pauli(dep_a, dep_b, 100000));

  Rng rng(77);
  PauliProbs ra = random_pauli_probs(rng), rb = random_pauli_probs(rng);
  REQUIRE_THROWS_AS(exact_error_pauli(ra, rb, 100000), std::invalid_argument);
}

TEST_CASE("diamond distance lower bound") {
  ChannelFamily bf = bitflip_family();
  Channel a = bf.eval(pt(0.3)), b = bf.eval(pt(0.5));
  REQUIRE(diamond_lower(a, a, 2, 1) == 0.0);
  REQUIRE(diamond_lower(a, b, 4, default_seed) == Catch::Approx(0.4).margin(1e-6));

  Rng rng(19);
  for (int k = 0; k < 20; ++k) {
    Channel x = random_full_rank_channel(rng);
    Channel y = random_full_rank_channel(rng);
    double lower = diamond_lower(x, y, 6, derive_seed(default_seed, k));
    REQUIRE(lower <= pinsker_error_upper_bound(x, y, 1).value + 1e-9);
  }

  // chain holds for tensor powers of Pauli pairs
  Rng rng2(20);
  for (int k = 0; k < 10; ++k) {
    PauliProbs pa = random_pauli_probs(rng2), pb = random_pauli_probs(rng2);
    Channel x = pauli_channel(pa), y = pauli_channel(pb);
    for (int n : {1, 4, 16, 64}) {
      REQUIRE(exact_error_pauli(pa, pb, n) <=
              pinsker_error_upper_bound(x, y, n).value + 1e-9);
    }
  }
}

TEST_CASE("protocol sweep") {
  ChannelFamily bf = bitflip_family();
  RealVec t = pt(0.7233912339123392);
  std::vector<ProtocolRun> runs = protocol_sweep(bf, 0.5, t, {1, 100, 1000}, default_seed);
  REQUIRE(runs.size() == 3);
  REQUIRE(runs[1].cost_bits == 8);
  REQUIRE(runs[2].cost_bits == 11);
  REQUIRE(runs[0].err_lower.has_value());  // variational bound attached at n = 1
  REQUIRE_FALSE(runs[1].err_lower.has_value());
  for (const ProtocolRun& r : runs) {
    REQUIRE(r.thm1_rate == Catch::Approx(0.5).margin(1e-15));
    REQUIRE(r.err_exact.has_value());
    REQUIRE(*r.err_exact <= r.err_upper + 1e-9);
  }
  REQUIRE(*runs[0].err_lower <= *runs[0].err_exact + 1e-7);

  Channel fixed = pauli_channel({0.6, 0.4, 0.0, 0.0});
  REQUIRE_THROWS_AS(protocol_sweep(constant_family(fixed), 0.5, pt(0.5), {100}, 1),
                    std::invalid_argument);
}
