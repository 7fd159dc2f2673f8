#include <catch2/catch_amalgamated.hpp>

#include "qchan/bounds.hpp"
#include "qchan/protocol.hpp"
#include "qchan/rng.hpp"

using namespace qchan;

TEST_CASE("rate statements") {
  REQUIRE(theorem1_rate(3, 1.0, 0.0).rate == Catch::Approx(1.5).margin(0.0));
  REQUIRE(theorem1_rate(1, 2.0, 0.0).rate == Catch::Approx(1.0).margin(0.0));
  REQUIRE(theorem1_rate(2, 1.0, 0.5).rate == Catch::Approx(0.5).margin(0.0));

  REQUIRE(corollary1_rate(1, 1.0, 0.0).rate == Catch::Approx(0.5).margin(0.0));
  REQUIRE(corollary1_rate(2, 1.0, 0.999).rate == Catch::Approx(0.001).margin(1e-12));
  REQUIRE(corollary1_rate(2, 1.0, 0.999).kind == RateStatement::Kind::communication);

  // the communication statement is the same functional
  Rng rng(1);
  for (int k = 0; k < 20; ++k) {
    int v = 1 + static_cast<int>(rng.raw() % 4);
    double beta = 0.5 + rng.uniform() * 2.0;
    double eps = rng.uniform() * 0.9;
    REQUIRE(theorem1_rate(v, beta, eps).rate == corollary1_rate(v, beta, eps).rate);
  }

  REQUIRE_THROWS_AS(theorem1_rate(1, 1.0, 1.0), std::invalid_argument);
  REQUIRE_THROWS_AS(theorem1_rate(1, -1.0, 0.0), std::invalid_argument);
}

TEST_CASE("regularized cost surrogate") {
  std::vector<std::pair<double, double>> line;
  for (double n : {100.0, 500.0, 2000.0, 10000.0, 40000.0, 100000.0})
    line.emplace_back(n, std::log2(n) + 3.0);
  CostFit exact = regularized_cost_estimate(line);
  REQUIRE(exact.rate == Catch::Approx(1.0).margin(1e-12));
  REQUIRE(exact.residual <= 1e-12);

  // protocol sweep, sampled so the top decade brackets a full staircase step
  ChannelFamily bf = bitflip_family();
  RealVec t(1);
  t << 0.7233912339123392;
  std::vector<std::pair<double, double>> samples;
  for (const ProtocolRun& r : protocol_sweep(bf, 0.5, t, {960, 12000, 96000}, 1, 6.25))
    samples.emplace_back(r.n, r.cost_bits);
  CostFit sweep_fit = regularized_cost_estimate(samples);
  REQUIRE(sweep_fit.rate == Catch::Approx(1.0).margin(0.1));

  // bounded alternating perturbations barely move a dense fit
  std::vector<std::pair<double, double>> noisy;
  for (int k = 0; k < 40; ++k) {
    double n = std::pow(10.0, 2.0 + 3.0 * k / 39.0);
    double kick = (k % 2 == 0) ? -1.0 : 1.0;
    noisy.emplace_back(n, std::log2(n) + 3.0 + kick);
  }
  CostFit noisy_fit = regularized_cost_estimate(noisy);
  REQUIRE(std::abs(noisy_fit.rate - 1.0) <= 0.15);

  REQUIRE_THROWS_AS(regularized_cost_estimate({{100, 10}, {200, 11}}), std::invalid_argument);
  REQUIRE_THROWS_AS(regularized_cost_estimate({{100, 10}, {200, 11}, {900, 13}}),
                    std::invalid_argument);
  REQUIRE_THROWS_AS(regularized_cost_estimate({{100, 10}, {90, 11}, {10000, 13}}),
                    std::invalid_argument);
}

TEST_CASE("binary entropy") {
  REQUIRE(binary_entropy(0.5) == 1.0);
  REQUIRE(binary_entropy(0.0) == 0.0);
  REQUIRE(binary_entropy(1.0) == 0.0);
  // exact symmetry: for p >= 1/2 the complement is computed exactly, so both
  // sides canonicalize to the same pair of doubles
  Rng rng(9);
  for (int k = 0; k < 50; ++k) {
    double p = 0.5 + 0.5 * rng.uniform();
    REQUIRE(binary_entropy(p) == binary_entropy(1.0 - p));
  }
  for (int k = 0; k < 50; ++k) {
    double p = rng.uniform();
    REQUIRE(binary_entropy(p) ==
            Catch::Approx(binary_entropy(1.0 - p)).margin(1e-15));
  }
  REQUIRE_THROWS_AS(binary_entropy(1.5), std::invalid_argument);
}

TEST_CASE("beta classification") {
  REQUIRE(classify_beta(bitflip_family()) == BetaClass::sql_one);
  REQUIRE(classify_beta(pauli3_family()) == BetaClass::sql_one);
  REQUIRE(classify_beta(depolarizing_family()) == BetaClass::sql_one);
  REQUIRE(classify_beta(rotation_family()) == BetaClass::heisenberg_two);
  REQUIRE(classify_beta(constant_pure_family()) == BetaClass::unknown);
  REQUIRE(beta_value(BetaClass::sql_one) == 1.0);
  REQUIRE(beta_value(BetaClass::heisenberg_two) == 2.0);
  REQUIRE_THROWS_AS(beta_value(BetaClass::unknown), std::invalid_argument);
}
