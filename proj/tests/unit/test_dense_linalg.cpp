#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "kquad/dense_linalg.hpp"
#include "kquad/errors.hpp"

using namespace kquad;

namespace {

Matrix random_well_conditioned(std::mt19937_64& gen, std::size_t n) {
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  Matrix a(n, n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) a(i, j) = u(gen) + (i == j ? 4.0 : 0.0);
  return a;
}

// Oracle: exact 1-norm condition from the explicit inverse (column solves).
double true_condition_one(const Matrix& a) {
  const auto lu = lu_factor(a);
  const std::size_t n = a.rows();
  Matrix inv(n, n);
  for (std::size_t j = 0; j < n; ++j) {
    std::vector<double> e(n, 0.0);
    e[j] = 1.0;
    const auto col = lu.solve(e);
    for (std::size_t i = 0; i < n; ++i) inv(i, j) = col[i];
  }
  return a.norm_one() * inv.norm_one();
}

}  // namespace

TEST_CASE("lu_factor on small examples") {
  const auto id = lu_factor(Matrix::identity(3));
  CHECK(id.sign() == 1);
  CHECK(id.determinant() == doctest::Approx(1.0));
  const Matrix l = id.lower(), u = id.upper();
  for (std::size_t i = 0; i < 3; ++i)
    for (std::size_t j = 0; j < 3; ++j) {
      CHECK(l(i, j) == (i == j ? 1.0 : 0.0));
      CHECK(u(i, j) == (i == j ? 1.0 : 0.0));
    }

  const auto swap = lu_factor(Matrix(2, 2, {0, 1, 1, 0}));
  CHECK(swap.perm()[0] == 1);
  CHECK(swap.determinant() == doctest::Approx(-1.0));

  // Oracle: 2*2 - 1*1.
  CHECK(lu_factor(Matrix(2, 2, {2, 1, 1, 2})).determinant() == doctest::Approx(3.0));
}

TEST_CASE("lu_factor rejects singular and malformed input") {
  try {
    lu_factor(Matrix(3, 3, {1, 2, 3, 2, 4, 6, 1, 0, 1}));
    FAIL("expected SingularMatrixError");
  } catch (const SingularMatrixError& e) {
    CHECK(e.pivot() == 2);
  }
  CHECK_THROWS_AS(lu_factor(Matrix(2, 3)), ParameterError);
  CHECK_THROWS_AS(lu_factor(Matrix(1, 1, {NAN})), ParameterError);
  CHECK_THROWS_AS(Matrix(2, 2, std::vector<double>{1, 2, 3}), ParameterError);
  // Below the relative pivot threshold.
  CHECK_THROWS_AS(lu_factor(Matrix(2, 2, {1, 0, 0, 1e-14})), SingularMatrixError);
  CHECK_NOTHROW(lu_factor(Matrix(2, 2, {1, 0, 0, 1e-14}), 0.0));
}

TEST_CASE("lu_solve") {
  const std::vector<double> b{3.0, -1.0, 2.0};
  const auto x = lu_solve(lu_factor(Matrix::identity(3)), b);
  for (int i = 0; i < 3; ++i) CHECK(x[i] == b[i]);

  const auto d = lu_solve(lu_factor(Matrix(2, 2, {2, 0, 0, 4})), std::vector<double>{2, 4});
  CHECK(d[0] == doctest::Approx(1.0));
  CHECK(d[1] == doctest::Approx(1.0));

  const auto h = lu_solve(lu_factor(Matrix(2, 2, {1, 1, 1, 2})), std::vector<double>{3, 5});
  CHECK(h[0] == doctest::Approx(1.0));
  CHECK(h[1] == doctest::Approx(2.0));

  CHECK_THROWS_AS(lu_solve(lu_factor(Matrix::identity(2)), std::vector<double>{1.0}), ParameterError);
}

TEST_CASE("factor and solve on random well-conditioned systems") {
  std::mt19937_64 gen(2024);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  for (int trial = 0; trial < 1000; ++trial) {
    const std::size_t n = 1 + trial % 12;
    const Matrix a = random_well_conditioned(gen, n);
    std::vector<double> x(n);
    for (double& v : x) v = u(gen);
    const auto b = a * x;
    const auto lu = lu_factor(a);
    const auto y = lu.solve(b);
    for (std::size_t i = 0; i < n; ++i) CHECK(std::abs(y[i] - x[i]) <= 1e-9 * (1.0 + max_abs(x)));
    const auto r = a * y;
    for (std::size_t i = 0; i < n; ++i) CHECK(std::abs(r[i] - b[i]) <= 1e-10 * max_abs(b));

    // Transposed solves against A^T.
    const auto yt = lu.solve_transposed(b);
    const auto rt = a.transposed() * yt;
    for (std::size_t i = 0; i < n; ++i) CHECK(std::abs(rt[i] - b[i]) <= 1e-10 * max_abs(b));

    // det sign parity: PA = LU reconstructs.
    if (trial % 50 == 0) {
      const Matrix plu = lu.lower() * lu.upper();
      for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j)
          CHECK(std::abs(plu(i, j) - a(lu.perm()[i], j)) <= 1e-12 * a.norm_inf());
    }
  }
}

TEST_CASE("determinant sign tracks row swaps") {
  std::mt19937_64 gen(5);
  for (int trial = 0; trial < 50; ++trial) {
    const Matrix a = random_well_conditioned(gen, 6);
    Matrix swapped = a;
    for (std::size_t j = 0; j < 6; ++j) std::swap(swapped(0, j), swapped(3, j));
    const auto la = lu_factor(a), ls = lu_factor(swapped);
    CHECK(la.sign() == -ls.sign());
    CHECK(la.log_abs_det() == doctest::Approx(ls.log_abs_det()).epsilon(1e-12));
  }
}

TEST_CASE("condition_estimate") {
  CHECK(condition_estimate(lu_factor(Matrix::identity(4))) == doctest::Approx(1.0));
  CHECK(condition_estimate(lu_factor(Matrix(2, 2, {1, 0, 0, 1e-6}))) == doctest::Approx(1e6));

  Matrix hilbert(4, 4);
  for (std::size_t i = 0; i < 4; ++i)
    for (std::size_t j = 0; j < 4; ++j) hilbert(i, j) = 1.0 / static_cast<double>(i + j + 1);
  const double est = condition_estimate(lu_factor(hilbert));
  CHECK(est >= 1.5e3);
  CHECK(est <= 1.6e5);
  // Exact kappa_1(H_4) = 28375 (rational inverse).
  CHECK(est >= 28375.0 / 10.0);
  CHECK(est <= 28375.0 * (1 + 1e-9));

  CHECK(std::isinf(condition_estimate(Matrix(2, 2, {1, 1, 1, 1}))));

  std::mt19937_64 gen(99);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  for (int trial = 0; trial < 200; ++trial) {
    Matrix a(10, 10);
    for (std::size_t i = 0; i < 10; ++i)
      for (std::size_t j = 0; j < 10; ++j) a(i, j) = u(gen);
    const double truth = true_condition_one(a);
    const double e = condition_estimate(lu_factor(a));
    CHECK(e <= truth * (1 + 1e-9));
    CHECK(e >= truth / 10.0);
  }
}

TEST_CASE("forms and jitter") {
  const Matrix a(2, 2, {2, 1, 1, 3});
  const std::vector<double> v{1.0, -1.0};
  CHECK(quadratic_form(a, v) == doctest::Approx(3.0));
  CHECK(bilinear_form(std::vector<double>{1, 0}, a, std::vector<double>{0, 1}) == doctest::Approx(1.0));
  Matrix b = a;
  add_diagonal(b, 0.5);
  CHECK(b(0, 0) == 2.5);
  CHECK(b(0, 1) == 1.0);
}
