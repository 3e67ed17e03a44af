#include "helpers.hpp"
#include "matfactor/error.hpp"
#include "matfactor/subspace.hpp"

#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <limits>

using namespace matfactor;
using namespace testing_support;

TEST_SUITE("subspace") {
  TEST_CASE("sym_eigen of the identity and a diagonal matrix") {
    const auto id = sym_eigen(Matrix::Identity(3, 3));
    CHECK((id.values - Vector::Ones(3)).cwiseAbs().maxCoeff() < 1e-14);
    CHECK(orthonormality_error(id.vectors) < 1e-12);

    Matrix d = Vector(Eigen::Vector3d(2.0, 5.0, -1.0)).asDiagonal();
    const auto e = sym_eigen(d);
    CHECK(e.values(0) == doctest::Approx(5.0));
    CHECK(e.values(1) == doctest::Approx(2.0));
    CHECK(e.values(2) == doctest::Approx(-1.0));
    // Signed permutation of the identity with the largest entry made non-negative.
    CHECK(e.vectors(1, 0) == doctest::Approx(1.0));
    CHECK(e.vectors(0, 1) == doctest::Approx(1.0));
    CHECK(e.vectors(2, 2) == doctest::Approx(1.0));
  }

  TEST_CASE("sym_eigen reconstructs random symmetric matrices") {
    for (std::uint64_t seed = 1; seed <= 20; ++seed) {
      const Matrix g = normal_matrix(6, 6, seed);
      const Matrix m = g + g.transpose();
      const auto e = sym_eigen(m);
      const Matrix back = e.vectors * e.values.asDiagonal() * e.vectors.transpose();
      CHECK((back - m).norm() / m.norm() < 1e-10);
      CHECK(std::abs(e.values.sum() - m.trace()) <= 1e-8 * m.cwiseAbs().maxCoeff() * 6);
      for (Eigen::Index i = 1; i < 6; ++i) CHECK(e.values(i) <= e.values(i - 1));
      for (Eigen::Index i = 0; i < 6; ++i) {
        Eigen::Index arg = 0;
        e.vectors.col(i).cwiseAbs().maxCoeff(&arg);
        CHECK(e.vectors(arg, i) >= 0.0);
        CHECK((m * e.vectors.col(i) - e.values(i) * e.vectors.col(i)).norm() <=
              1e-8 * m.norm());
      }
    }
  }

  TEST_CASE("sym_eigen of PSD products has no materially negative eigenvalue") {
    const Matrix g = normal_matrix(8, 3, 5);
    const auto e = sym_eigen(g * g.transpose());
    CHECK(e.values.minCoeff() >= -1e-8 * e.values(0));
  }

  TEST_CASE("sym_eigen rejects empty and non-finite input") {
    CHECK_THROWS_AS(sym_eigen(Matrix(0, 0)), Error);
    Matrix bad = Matrix::Identity(2, 2);
    bad(0, 1) = std::numeric_limits<double>::quiet_NaN();
    CHECK_THROWS_AS(sym_eigen(bad), Error);
  }

  TEST_CASE("orthonormal_distance axioms") {
    const Matrix h = orthonormal_columns(8, 3, 11);
    // The square root amplifies rounding in 1 - tr(.)/r to about 1e-8.
    CHECK(orthonormal_distance(h, h) < 1e-7);

    Matrix first = Matrix::Identity(6, 6).leftCols(3);
    Matrix last = Matrix::Identity(6, 6).rightCols(3);
    CHECK(orthonormal_distance(first, last) == doctest::Approx(1.0));

    for (std::uint64_t s = 0; s < 20; ++s) {
      const Matrix q = random_rotation(3, 100 + s);
      CHECK(orthonormal_distance(h, h * q) < 1e-7);
    }
    CHECK_THROWS_AS(orthonormal_distance(h, orthonormal_columns(8, 2, 1)), Error);
  }

  TEST_CASE("orthonormal_distance is symmetric and bounded") {
    for (std::uint64_t s = 0; s < 1000; ++s) {
      const Matrix a = orthonormal_columns(6, 2, 2 * s + 1);
      const Matrix b = orthonormal_columns(6, 2, 2 * s + 2);
      const double ab = orthonormal_distance(a, b);
      const double ba = orthonormal_distance(b, a);
      REQUIRE(std::abs(ab - ba) < 1e-12);
      REQUIRE(ab >= 0.0);
      REQUIRE(ab <= 1.0);
    }
  }

  TEST_CASE("projection_distance examples") {
    const Matrix e = Matrix::Identity(4, 4);
    // Unequal ranks divide by the larger one: a nested line in a plane is 1/sqrt(2) away.
    CHECK(projection_distance(e.col(0), e.leftCols(2)) == doctest::Approx(std::sqrt(0.5)));
    CHECK(projection_distance(e.leftCols(2), e.leftCols(3)) == doctest::Approx(std::sqrt(1.0 / 3.0)));
    CHECK(projection_distance(e.col(0), e.col(1)) == doctest::Approx(1.0));

    for (std::uint64_t s = 0; s < 50; ++s) {
      const Matrix h = normal_matrix(5, 2, 300 + s);
      Matrix g = normal_matrix(2, 2, 400 + s);
      g.diagonal().array() += 3.0;  // keeps G well conditioned
      CHECK(projection_distance(h, h * g) < 1e-7);
    }
    const Matrix h1 = orthonormal_columns(7, 3, 9);
    const Matrix h2 = orthonormal_columns(7, 3, 10);
    CHECK(projection_distance(h1, h2) == doctest::Approx(orthonormal_distance(h1, h2)));

    Matrix deficient(4, 2);
    deficient << 1, 2, 1, 2, 1, 2, 1, 2;
    try {
      projection_distance(deficient, e.col(0));
      FAIL("expected RankDeficient");
    } catch (const Error& err) {
      CHECK(err.kind() == ErrorKind::RankDeficient);
    }
  }

  TEST_CASE("random_orthonormal is deterministic and orthonormal") {
    const auto a = random_orthonormal(3, 3, 42);
    CHECK(orthonormality_error(a.matrix()) < 1e-12);
    const auto b = random_orthonormal(10, 2, 7);
    const auto c = random_orthonormal(10, 2, 7);
    CHECK(b.matrix() == c.matrix());
    int distinct = 0;
    for (std::uint64_t s = 0; s < 100; ++s) {
      const auto x = random_orthonormal(10, 2, 1000 + s);
      const auto y = random_orthonormal(10, 2, 5000 + s);
      if (orthonormal_distance(x, y) > 0.0) ++distinct;
    }
    CHECK(distinct == 100);
    CHECK_THROWS_AS(random_orthonormal(2, 3, 1), Error);
  }

  TEST_CASE("OrthonormalBasis validates its input") {
    CHECK_NOTHROW(OrthonormalBasis::from_matrix(orthonormal_columns(5, 2, 3)));
    CHECK_THROWS_AS(OrthonormalBasis::from_matrix(normal_matrix(5, 2, 3)), Error);
  }
}
