#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "iln/numerics.hpp"
#include "support.hpp"

using namespace iln;

TEST_CASE("vec stacks columns") {
  CMatrix m(2, 2);
  m << 1, 3, 2, 4;
  const CVector v = vec(m);
  CHECK(v(0) == Complex(1, 0));
  CHECK(v(1) == Complex(2, 0));
  CHECK(v(2) == Complex(3, 0));
  CHECK(v(3) == Complex(4, 0));

  CHECK(vec(CMatrix::Zero(2, 2)).isZero(0.0));
}

TEST_CASE("unvec reverses vec") {
  CVector v(4);
  v << 1, 2, 3, 4;
  const CMatrix m = unvec(v, 2, 2);
  CHECK(m(0, 0) == Complex(1, 0));
  CHECK(m(1, 0) == Complex(2, 0));
  CHECK(m(0, 1) == Complex(3, 0));
  CHECK(m(1, 1) == Complex(4, 0));

  test::Rand rng(1);
  const CMatrix r = rng.matrix(4, 4);
  CHECK((unvec(vec(r), 4, 4) - r).norm() == 0.0);

  CHECK_THROWS_AS(unvec(CVector::Zero(6), 2, 2), std::invalid_argument);
}

TEST_CASE("kron of identity is block diagonal") {
  test::Rand rng(2);
  const CMatrix m = rng.matrix(2, 2);
  const CMatrix k = kron(CMatrix::Identity(2, 2), m);
  CHECK((k.topLeftCorner(2, 2) - m).norm() == 0.0);
  CHECK((k.bottomRightCorner(2, 2) - m).norm() == 0.0);
  CHECK(k.topRightCorner(2, 2).isZero(0.0));
  CHECK(k.bottomLeftCorner(2, 2).isZero(0.0));
}

TEST_CASE("kron/vec identity on random triples") {
  test::Rand rng(3);
  for (int trial = 0; trial < 20; ++trial) {
    const Index ra = 1 + trial % 8;
    const Index ca = 1 + (trial * 3) % 8;
    const Index cb = 1 + (trial * 5) % 8;
    const CMatrix a = rng.matrix(ra, ca);
    const CMatrix x = rng.matrix(ca, 4);
    const CMatrix b = rng.matrix(4, cb);
    const CVector lhs = vec(CMatrix(a * x * b));
    const CVector rhs = kron(b.transpose(), a) * vec(x);
    CHECK((lhs - rhs).norm() <= 1e-12 * (1.0 + lhs.norm()));
    CHECK(kron(a, b).rows() == a.rows() * b.rows());
    CHECK(kron(a, b).cols() == a.cols() * b.cols());
  }
}

TEST_CASE("svd_full identity and zero") {
  const SvdFactors id = svd_full(CMatrix::Identity(3, 3), 1e-12);
  CHECK(id.rank == 3);
  CHECK(id.right_null.cols() == 0);
  CHECK(id.left_null.cols() == 0);

  const SvdFactors zero = svd_full(CMatrix::Zero(2, 3));
  CHECK(zero.rank == 0);
  CHECK(zero.right_null.cols() == 3);
  CHECK((zero.right_null.adjoint() * zero.right_null -
         CMatrix::Identity(3, 3))
            .norm() < 1e-12);
}

TEST_CASE("svd_full reconstructs and spans the kernel") {
  test::Rand rng(4);
  for (int trial = 0; trial < 10; ++trial) {
    const CMatrix a = rng.matrix(5, 3) * rng.matrix(3, 7);  // rank <= 3
    const SvdFactors f = svd_full(a);
    CHECK(f.rank <= 3);
    const CMatrix rebuilt = f.left_signal *
                            f.singular_values.asDiagonal() *
                            f.right_signal.adjoint();
    CHECK((rebuilt - a).norm() <= 1e-9 * a.norm());
    CHECK((a * f.right_null).norm() <= 1e-9 * (1.0 + a.norm()));
    CHECK((f.right_null.adjoint() * f.right_null -
           CMatrix::Identity(f.right_null.cols(), f.right_null.cols()))
              .norm() < 1e-11);
    for (Index k = 1; k < f.singular_values.size(); ++k) {
      CHECK(f.singular_values(k) <= f.singular_values(k - 1));
    }
  }
}

TEST_CASE("pinv basics") {
  CHECK((pinv(CMatrix::Identity(4, 4)) - CMatrix::Identity(4, 4)).norm() <
        1e-12);

  CMatrix d = CMatrix::Zero(2, 2);
  d(0, 0) = 2.0;
  const CMatrix dp = pinv(d);
  CHECK(std::abs(dp(0, 0) - Complex(0.5, 0)) < 1e-12);
  CHECK(std::abs(dp(1, 1)) == 0.0);
}

TEST_CASE("pinv satisfies the Penrose conditions") {
  test::Rand rng(5);
  for (int trial = 0; trial < 10; ++trial) {
    const bool deficient = trial % 2 == 0;
    const CMatrix a = deficient ? CMatrix(rng.matrix(6, 3) * rng.matrix(3, 5))
                                : rng.matrix(6, 5);
    const CMatrix ap = pinv(a);
    const double scale = 1.0 + a.norm();
    CHECK((a * ap * a - a).norm() <= 1e-9 * scale);
    CHECK((ap * a * ap - ap).norm() <= 1e-9 * scale);
    CHECK(((a * ap).adjoint() - a * ap).norm() <= 1e-9 * scale);
    CHECK(((ap * a).adjoint() - ap * a).norm() <= 1e-9 * scale);
  }
}

TEST_CASE("pinv gives least-squares solutions of consistent systems") {
  test::Rand rng(6);
  for (int trial = 0; trial < 10; ++trial) {
    const CMatrix a = rng.matrix(4, 6);
    const CVector b = a * rng.matrix(6, 1);  // consistent by construction
    CHECK((a * (pinv(a) * b) - b).norm() <= 1e-9 * (1.0 + b.norm()));
  }
}

TEST_CASE("logdet_psd closed forms") {
  CHECK(logdet_psd(CMatrix::Identity(5, 5)) == doctest::Approx(0.0));
  CHECK(logdet_psd(2.0 * CMatrix::Identity(2, 2)) == doctest::Approx(2.0));
  CHECK(logdet_psd(4.0 * CMatrix::Identity(2, 2)) == doctest::Approx(4.0));
}

TEST_CASE("logdet_psd rejects bad input") {
  test::Rand rng(7);
  CHECK_THROWS_AS(logdet_psd(rng.matrix(3, 3) - 10.0 * CMatrix::Identity(3, 3)),
                  std::invalid_argument);  // non-Hermitian
  CMatrix indefinite = rng.hermitian(3);
  indefinite -= (indefinite.norm() + 1.0) * CMatrix::Identity(3, 3);
  CHECK_THROWS_AS(logdet_psd(indefinite), std::domain_error);
}

TEST_CASE("logdet_psd of inverse cancels") {
  test::Rand rng(8);
  for (int trial = 0; trial < 10; ++trial) {
    const CMatrix a =
        rng.psd(4) + 0.1 * CMatrix::Identity(4, 4);  // safely PD
    CHECK(logdet_psd(a) + logdet_psd(a.inverse()) ==
          doctest::Approx(0.0).epsilon(1e-8));
  }
}

TEST_CASE("eigh basics") {
  const auto [vals_i, vecs_i] = eigh(CMatrix::Identity(2, 2));
  CHECK(vals_i(0) == doctest::Approx(1.0));
  CHECK(vals_i(1) == doctest::Approx(1.0));

  CMatrix d = CMatrix::Zero(2, 2);
  d(0, 0) = 3.0;
  d(1, 1) = 1.0;
  const auto [vals, vecs] = eigh(d);
  CHECK(vals(0) == doctest::Approx(3.0));
  CHECK(vals(1) == doctest::Approx(1.0));
  CHECK(std::abs(vecs(0, 0)) == doctest::Approx(1.0));

  CHECK_THROWS_AS(eigh(test::Rand(9).matrix(3, 3) * 100.0),
                  std::invalid_argument);
}

TEST_CASE("eigh reconstructs random Hermitian matrices") {
  test::Rand rng(10);
  for (int trial = 0; trial < 10; ++trial) {
    const CMatrix a = rng.hermitian(8);
    const auto [vals, vecs] = eigh(a);
    const CMatrix rebuilt =
        vecs * vals.asDiagonal() * vecs.adjoint();
    CHECK((rebuilt - a).norm() <= 1e-9 * (1.0 + a.norm()));
    CHECK((vecs.adjoint() * vecs - CMatrix::Identity(8, 8)).norm() < 1e-11);
  }
}

TEST_CASE("block_diag") {
  CMatrix a(1, 1);
  a << 1;
  CMatrix b(1, 1);
  b << 2;
  const CMatrix d = block_diag({a, b});
  CHECK(d(0, 0) == Complex(1, 0));
  CHECK(d(1, 1) == Complex(2, 0));
  CHECK(d(0, 1) == Complex(0, 0));

  test::Rand rng(11);
  const CMatrix x = rng.matrix(2, 2);
  const CMatrix y = rng.matrix(2, 2);
  const CMatrix z = block_diag({x, y});
  CHECK(z.rows() == 4);
  CHECK(z.topRightCorner(2, 2).isZero(0.0));
  CHECK(z.bottomLeftCorner(2, 2).isZero(0.0));
}
