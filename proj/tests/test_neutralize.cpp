#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "iln/golden.hpp"
#include "iln/neutralize.hpp"
#include "iln/rates.hpp"
#include "support.hpp"

using namespace iln;

TEST_CASE("minimum antenna count") {
  CHECK(min_antennas(3, 16, {8, 8, 8}) == 2);
  CHECK(min_antennas(3, 16, {16, 16, 16}) == 3);
  CHECK(min_antennas(2, 8, {8, 8}) == 2);
  CHECK(min_antennas(2, 1, {1, 1}) == 2);   // full streams: N >= K
  CHECK(min_antennas(4, 4, {1, 1, 1, 1}) == 2);
}

TEST_CASE("stacked system dimensions on the reference instance") {
  const ChannelSet ch = golden::channels();
  const Precoders p = golden::precoders();
  const NeutralizationSystem sys = build_system(ch, p);
  CHECK(sys.coefficients.rows() == 6);  // S_1 (K-1) M + S_2 (K-1) M = 2 + 4
  CHECK(sys.coefficients.cols() == 16);
  CHECK(sys.consistent());
  CHECK(sys.family_dim() == 16 - sys.svd.rank);
}

TEST_CASE("null-space columns are annihilated by the stacked matrix") {
  const ChannelSet ch = golden::channels();
  const Precoders p = golden::precoders();
  const NeutralizationSystem sys = build_system(ch, p);
  test::Rand rng(41);
  for (int trial = 0; trial < 5; ++trial) {
    const CVector y = rng.matrix(sys.family_dim(), 1);
    CHECK((sys.coefficients * (sys.svd.right_null * y)).norm() <=
          1e-9 * (1.0 + y.norm()));
  }
}

TEST_CASE("min-norm solution reproduces the printed relay") {
  const ChannelSet ch = golden::channels();
  const Precoders p = golden::precoders();
  const NeutralizeOutcome out = solve_min_norm(build_system(ch, p));
  REQUIRE(out.consistent);
  CHECK((out.relay.matrix - golden::relay_min_norm()).cwiseAbs().maxCoeff() <=
        1e-3);
  CHECK(neutralization_residual(ch, out.relay, p) <= 1e-8);
}

TEST_CASE("degenerate all-zero precoders make every relay feasible") {
  const ChannelSet ch = golden::channels();
  const Precoders p = Precoders::from_matrices(
      {CMatrix::Zero(2, 2), CMatrix::Zero(2, 2)});
  const NeutralizationSystem sys = build_system(ch, p);
  CHECK(sys.coefficients.rows() == 0);
  CHECK(sys.consistent());
  CHECK(solve_min_norm(sys).relay.matrix.isZero(0.0));
}

TEST_CASE("zero cross channels give the zero relay") {
  const Scenario sc = Scenario::make(2, 2, 2, 10.0, 100.0);
  ChannelSet ch = generate_channels(sc, 50, ChannelDistribution::Uniform01);
  for (int m = 0; m < 2; ++m) {
    ch.set_direct(0, 1, m, 0.0);
    ch.set_direct(1, 0, m, 0.0);
  }
  test::Rand rng(42);
  const Precoders p = test::random_precoders(rng, sc);
  const NeutralizeOutcome out = solve_min_norm(build_system(ch, p));
  CHECK(out.consistent);
  CHECK(out.relay.matrix.norm() <= 1e-12);
}

TEST_CASE("insufficient antennas are reported, not thrown") {
  // K=2, M=2, N=1 with full streams violates the antenna bound.
  const Scenario sc = Scenario::make(2, 2, 1, 10.0, 100.0);
  test::Rand rng(43);
  int inconsistent = 0;
  for (int trial = 0; trial < 10; ++trial) {
    const ChannelSet ch = generate_channels(sc, 60 + trial,
                                            ChannelDistribution::Uniform01);
    const Precoders p = test::random_precoders(rng, sc);
    const NeutralizationSystem sys = build_system(ch, p);
    if (!sys.consistent() && sys.residual > 1e-2) ++inconsistent;
    CHECK_THROWS_AS(min_neutralization_power(ch, p), std::domain_error);
  }
  CHECK(inconsistent == 10);
}

TEST_CASE("invertible precoders admit a block-diagonal min-norm relay") {
  const Scenario sc = Scenario::make(2, 3, 2, 10.0, 100.0);
  test::Rand rng(44);
  for (int trial = 0; trial < 5; ++trial) {
    const ChannelSet ch = generate_channels(sc, 70 + trial,
                                            ChannelDistribution::Uniform01);
    const Precoders p = test::random_precoders(rng, sc);  // generically invertible
    const NeutralizeOutcome out = solve_min_norm(build_system(ch, p));
    REQUIRE(out.consistent);
    for (int f = 0; f < 3; ++f) {
      for (int m = 0; m < 3; ++m) {
        if (f != m) CHECK(out.relay.block(f, m).norm() <= 1e-9);
      }
    }
  }
}

TEST_CASE("family members keep leakage at zero") {
  const ChannelSet ch = golden::channels();
  const Precoders p = golden::precoders();
  const NeutralizationSystem sys = build_system(ch, p);
  test::Rand rng(45);

  CHECK((neutralized_family(sys, CVector::Zero(sys.family_dim())).matrix -
         solve_min_norm(sys).relay.matrix)
            .norm() <= 1e-12);

  for (int trial = 0; trial < 5; ++trial) {
    const CVector y = rng.matrix(sys.family_dim(), 1);
    const RelayMatrix r = neutralized_family(sys, y);
    for (int i = 0; i < 2; ++i) {
      CHECK(leakage_rate(ch, r, p, i) <= 1e-9);
    }
  }

  CHECK_THROWS_AS(neutralized_family(sys, CVector::Zero(3)),
                  std::invalid_argument);
}

TEST_CASE("the printed null-shifted relay lies in the family") {
  const ChannelSet ch = golden::channels();
  const Precoders p = golden::precoders();
  const NeutralizationSystem sys = build_system(ch, p);
  const CVector target = vec(golden::relay_null_shifted());
  const CVector y = sys.svd.right_null.adjoint() *
                    (target - sys.min_norm_solution);
  const RelayMatrix rebuilt = neutralized_family(sys, y);
  CHECK((rebuilt.matrix - golden::relay_null_shifted()).cwiseAbs().maxCoeff() <=
        1e-3);
}

TEST_CASE("minimum power agrees with the relay power of the min-norm relay") {
  test::Rand rng(46);
  const Scenario sc = Scenario::make(2, 2, 2, 10.0, 100.0);
  for (int trial = 0; trial < 10; ++trial) {
    const ChannelSet ch = generate_channels(sc, 80 + trial,
                                            ChannelDistribution::Uniform01);
    const Precoders p = test::random_precoders(rng, sc);
    const NeutralizeOutcome out = solve_min_norm(build_system(ch, p));
    REQUIRE(out.consistent);
    CHECK(min_neutralization_power(ch, p) ==
          doctest::Approx(relay_tx_power(ch, out.relay, p)).epsilon(1e-9));
  }
}

TEST_CASE("weighted family optimum never exceeds the min-norm power") {
  const ChannelSet ch = golden::channels();
  const Precoders p = golden::precoders();
  const double min_norm_power = min_neutralization_power(ch, p);
  const double family_power = weighted_min_neutralization_power(ch, p);
  CHECK(family_power <= min_norm_power + 1e-9);
  // Cross-check the reference numbers computed at build time.
  CHECK(min_norm_power == doctest::Approx(20.8195).epsilon(1e-3));
}

TEST_CASE("zero cross channels need zero neutralization power") {
  const Scenario sc = Scenario::make(2, 2, 2, 10.0, 100.0);
  ChannelSet ch = generate_channels(sc, 90, ChannelDistribution::Uniform01);
  for (int m = 0; m < 2; ++m) {
    ch.set_direct(0, 1, m, 0.0);
    ch.set_direct(1, 0, m, 0.0);
  }
  test::Rand rng(47);
  const Precoders p = test::random_precoders(rng, sc);
  CHECK(min_neutralization_power(ch, p) <= 1e-18);
}

TEST_CASE("relay reconstruction from a reachable target") {
  const Scenario sc = Scenario::make(2, 2, 2, 10.0, 100.0);
  const ChannelSet ch = generate_channels(sc, 95, ChannelDistribution::Uniform01);
  test::Rand rng(48);
  const Precoders p = test::random_precoders(rng, sc);

  // The target implied by any relay matrix must be reachable and reproduce
  // zero off-diagonal blocks of (H + G^H R F) P.
  const NeutralizeOutcome out = solve_min_norm(build_system(ch, p));
  REQUIRE(out.consistent);
  CMatrix target = CMatrix::Zero(4, 4);
  for (int i = 0; i < 2; ++i) {
    target.block(i * 2, i * 2, 2, 2) =
        equivalent_channel(ch, out.relay, i, i) * p.matrices[i];
  }
  const ProjectionOutcome proj = relay_from_T(ch, p, target);
  CHECK(proj.residual <= 1e-8);
  for (int i = 0; i < 2; ++i) {
    CHECK(leakage_rate(ch, proj.relay, p, i) <= 1e-9);
  }

  // With full-rank precoders and N >= K the relay can steer the equivalent
  // channel anywhere, so even a random block-diagonal target is reachable.
  CMatrix anywhere = CMatrix::Zero(4, 4);
  anywhere.topLeftCorner(2, 2) = rng.matrix(2, 2);
  anywhere.bottomRightCorner(2, 2) = rng.matrix(2, 2);
  CHECK(relay_from_T(ch, p, anywhere).residual <= 1e-8);
}

TEST_CASE("unreachable targets are reported through the residual") {
  // A rank-deficient precoder pins the reachable targets to its row space;
  // a full-rank block for that user cannot be realized by any relay.
  const ChannelSet ch = golden::channels();
  const Precoders p = golden::precoders();  // user 0 sends a single stream
  CMatrix target = CMatrix::Zero(4, 4);
  target.topLeftCorner(2, 2) = CMatrix::Identity(2, 2);
  target.bottomRightCorner(2, 2) = CMatrix::Identity(2, 2);
  const ProjectionOutcome proj = relay_from_T(ch, p, target);
  CHECK(proj.residual > 1e-3);
}

TEST_CASE("zero relay comes back from the direct-channel target") {
  // With no cross channels, T = HP is reachable and needs no relay at all.
  const Scenario sc = Scenario::make(2, 2, 2, 10.0, 100.0);
  ChannelSet ch = generate_channels(sc, 96, ChannelDistribution::Uniform01);
  for (int m = 0; m < 2; ++m) {
    ch.set_direct(0, 1, m, 0.0);
    ch.set_direct(1, 0, m, 0.0);
  }
  test::Rand rng(49);
  const Precoders p = test::random_precoders(rng, sc);
  const CMatrix hp = stacked_direct_matrix(ch) * p.block_diagonal();
  const ProjectionOutcome proj = relay_from_T(ch, p, hp);
  CHECK(proj.residual <= 1e-10);
  CHECK(proj.relay.matrix.norm() <= 1e-10);
}
