#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <cmath>
#include <random>

#include "doctest.h"
#include "mrac/matrixlab.hpp"

using namespace mrac;

namespace {

Matrix random_matrix(std::mt19937& rng, std::size_t rows, std::size_t cols, double scale = 1.0) {
  std::uniform_real_distribution<double> dist(-scale, scale);
  Matrix m(rows, cols);
  for (double& v : m.data()) v = dist(rng);
  return m;
}

Vector random_vector(std::mt19937& rng, std::size_t len, double scale = 1.0) {
  std::uniform_real_distribution<double> dist(-scale, scale);
  Vector v(len);
  for (double& x : v) x = dist(rng);
  return v;
}

// Hurwitz by construction: the real parts of the eigenvalues are bounded by
// the largest eigenvalue of the symmetric part, which the shift pushes
// strictly negative.
Matrix random_hurwitz(std::mt19937& rng, std::size_t n) {
  Matrix a = random_matrix(rng, n, n);
  const Matrix sym = (a + a.transpose()) * 0.5;
  const double shift = symmetric_eigenvalues(sym).back() + 0.5;
  for (std::size_t i = 0; i < n; ++i) a(i, i) -= shift;
  return a;
}

double lyapunov_residual(const Matrix& a, const Matrix& q, const Matrix& p) {
  return inf_norm(a.transpose() * p + p * a + q);
}

}  // namespace

TEST_CASE("kron basics") {
  CHECK(kron(Matrix{{1.0}}, Matrix{{5.0}})(0, 0) == doctest::Approx(5.0));

  const Matrix diag = kron(Matrix::identity(2), Matrix{{7.0}});
  CHECK(diag.rows() == 2);
  CHECK(diag(0, 0) == doctest::Approx(7.0));
  CHECK(diag(1, 1) == doctest::Approx(7.0));
  CHECK(diag(0, 1) == doctest::Approx(0.0));

  const Matrix row = kron(Matrix{{1.0, 2.0}}, Matrix{{0.0, 1.0}});
  CHECK(row.rows() == 1);
  CHECK(row.cols() == 4);
  CHECK(row(0, 0) == doctest::Approx(0.0));
  CHECK(row(0, 1) == doctest::Approx(1.0));
  CHECK(row(0, 2) == doctest::Approx(0.0));
  CHECK(row(0, 3) == doctest::Approx(2.0));
}

TEST_CASE("kron matches the index formula on random operands") {
  std::mt19937 rng(7);
  for (int round = 0; round < 20; ++round) {
    const Matrix a = random_matrix(rng, 2 + round % 2, 3);
    const Matrix b = random_matrix(rng, 3, 2);
    const Matrix k = kron(a, b);
    REQUIRE(k.rows() == a.rows() * b.rows());
    REQUIRE(k.cols() == a.cols() * b.cols());
    for (std::size_t i = 0; i < k.rows(); ++i)
      for (std::size_t j = 0; j < k.cols(); ++j) {
        const double expect = a(i / b.rows(), j / b.cols()) * b(i % b.rows(), j % b.cols());
        CHECK(k(i, j) == doctest::Approx(expect).epsilon(1e-14));
      }
  }
}

TEST_CASE("lyapunov scalar and diagonal cases") {
  const Matrix p1 = solve_lyapunov(Matrix{{-1.0}}, Matrix{{4.0}});
  CHECK(p1(0, 0) == doctest::Approx(2.0).epsilon(1e-12));

  const Matrix p2 = solve_lyapunov(Matrix::identity(2) * -1.0, Matrix::identity(2) * 2.0);
  CHECK(p2(0, 0) == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(p2(1, 1) == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(p2(0, 1) == doctest::Approx(0.0).epsilon(1e-12));
}

TEST_CASE("lyapunov second-order case solved by hand") {
  const Matrix a_m{{0.0, 1.0}, {-8.0, -10.0}};
  const Matrix q = Matrix::identity(2) * 5.0;
  const Matrix p = solve_lyapunov(a_m, q);
  CHECK(p(0, 0) == doctest::Approx(5.375).epsilon(1e-12));
  CHECK(p(0, 1) == doctest::Approx(0.3125).epsilon(1e-12));
  CHECK(p(1, 0) == doctest::Approx(0.3125).epsilon(1e-12));
  CHECK(p(1, 1) == doctest::Approx(0.28125).epsilon(1e-12));
  CHECK(lyapunov_residual(a_m, q, p) <= 1e-10 * inf_norm(q));
}

TEST_CASE("lyapunov rejects non-Hurwitz inputs") {
  CHECK_THROWS_AS(solve_lyapunov(Matrix{{1.0}}, Matrix{{1.0}}), NotHurwitz);
  // zero eigenvalue makes the vectorized system singular
  CHECK_THROWS_AS(solve_lyapunov(Matrix{{0.0, 1.0}, {0.0, -1.0}}, Matrix::identity(2)), NotHurwitz);
}

TEST_CASE("lyapunov solves 50 random Hurwitz systems to tight residual") {
  std::mt19937 rng(11);
  for (int round = 0; round < 50; ++round) {
    const std::size_t n = 2 + static_cast<std::size_t>(round) % 4;  // up to 5
    const Matrix a = random_hurwitz(rng, n);
    Matrix q = random_matrix(rng, n, n);
    q = q * q.transpose() + Matrix::identity(n) * 0.5;
    const Matrix p = solve_lyapunov(a, q);
    CHECK(is_positive_definite(p));
    CHECK(lyapunov_residual(a, q, p) <= 1e-10 * inf_norm(q));
  }
}

TEST_CASE("min singular value on simple shapes") {
  CHECK(min_singular_value(Matrix::identity(3)) == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(min_singular_value(Matrix{{2.0, 0.0}, {0.0, 3.0}}) == doctest::Approx(2.0).epsilon(1e-12));
  CHECK(min_singular_value(Matrix{{1.0, 1.0}, {1.0, 1.0}}) == doctest::Approx(0.0).epsilon(1e-9));
}

TEST_CASE("min singular value detects constructed rank deficiency") {
  std::mt19937 rng(23);
  for (int round = 0; round < 20; ++round) {
    Matrix m = random_matrix(rng, 5, 3);
    // make column 2 a combination of the others
    for (std::size_t i = 0; i < m.rows(); ++i) m(i, 2) = 2.0 * m(i, 0) - m(i, 1);
    CHECK(min_singular_value(m) <= rank_tolerance(m));
    // restore independence and the value must rise above tolerance
    m(0, 2) += 1.0;
    CHECK(min_singular_value(m) > rank_tolerance(m));
  }
}

TEST_CASE("least squares identity and consistent stacks") {
  const Vector g{1.5, -2.0, 3.0};
  const Vector sol = least_squares_solve(Matrix::identity(3), g);
  for (std::size_t i = 0; i < g.size(); ++i) CHECK(sol[i] == doctest::Approx(g[i]).epsilon(1e-14));

  const Matrix m{{1.0}, {1.0}};
  CHECK(least_squares_solve(m, Vector{2.0, 2.0})[0] == doctest::Approx(2.0).epsilon(1e-14));
  CHECK(least_squares_solve(m, Vector{1.0, 3.0})[0] == doctest::Approx(2.0).epsilon(1e-14));
}

TEST_CASE("least squares recovers theta on 100 random well-conditioned instances") {
  std::mt19937 rng(31);
  int done = 0;
  while (done < 100) {
    const std::size_t cols = 2 + static_cast<std::size_t>(done) % 4;
    const std::size_t rows = cols + 2 + static_cast<std::size_t>(done) % 3;
    const Matrix m = random_matrix(rng, rows, cols);
    if (min_singular_value(m) < 0.1) continue;
    const Vector theta = random_vector(rng, cols, 2.0);
    const Vector sol = least_squares_solve(m, m * theta);
    const double err = norm2(vsub(sol, theta));
    CHECK(err <= 1e-10 * std::max(1.0, norm2(theta)));
    ++done;
  }
}

TEST_CASE("least squares rejects rank-deficient stacks") {
  const Matrix m{{1.0, 2.0}, {2.0, 4.0}, {3.0, 6.0}};
  CHECK_THROWS_AS(least_squares_solve(m, Vector{1.0, 2.0, 3.0}), RankDeficient);
}

TEST_CASE("pseudo inverse application") {
  const Vector v{0.25, -1.0};
  const Vector through_identity = pseudo_inverse_apply(Matrix::identity(2), v);
  CHECK(through_identity[0] == doctest::Approx(0.25));
  CHECK(through_identity[1] == doctest::Approx(-1.0));

  CHECK(pseudo_inverse_apply(Matrix{{0.0}, {2.0}}, Vector{0.0, 1.0})[0] == doctest::Approx(0.5).epsilon(1e-14));
  CHECK(pseudo_inverse_apply(Matrix{{1.0}, {1.0}}, Vector{1.0, 3.0})[0] == doctest::Approx(2.0).epsilon(1e-14));
  CHECK_THROWS_AS(pseudo_inverse_apply(Matrix{{0.0}, {0.0}}, Vector{1.0, 1.0}), RankDeficient);
}

TEST_CASE("positive definiteness") {
  CHECK(is_positive_definite(Matrix::identity(2)));
  CHECK_FALSE(is_positive_definite(Matrix(2, 2, 0.0)));
  CHECK_FALSE(is_positive_definite(Matrix{{1.0, 2.0}, {2.0, 1.0}}));  // eigenvalues 3 and -1
  CHECK_THROWS_AS(is_positive_definite(Matrix{{1.0, 1.0}, {0.0, 1.0}}), NotSymmetric);
}

TEST_CASE("nonzero fraction") {
  CHECK(nonzero_fraction(Matrix::identity(2), 0.0) == doctest::Approx(0.5));
  CHECK(nonzero_fraction(Matrix(3, 3, 0.0), 0.0) == doctest::Approx(0.0));
  CHECK(nonzero_fraction(Matrix{{1e-13, 1.0}}, 1e-12) == doctest::Approx(0.5));
}

TEST_CASE("symmetric eigenvalues on a known matrix") {
  const Vector eig = symmetric_eigenvalues(Matrix{{2.0, 1.0}, {1.0, 2.0}});
  CHECK(eig[0] == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(eig[1] == doctest::Approx(3.0).epsilon(1e-12));
}

TEST_CASE("solve_linear and invert agree with each other") {
  std::mt19937 rng(41);
  for (int round = 0; round < 20; ++round) {
    const std::size_t n = 2 + static_cast<std::size_t>(round) % 5;
    Matrix a = random_matrix(rng, n, n);
    for (std::size_t i = 0; i < n; ++i) a(i, i) += 3.0;  // keep well conditioned
    const Vector b = random_vector(rng, n);
    const Vector x = solve_linear(a, b);
    const Vector residual = vsub(a * x, b);
    CHECK(norm2(residual) <= 1e-11 * std::max(1.0, norm2(b)));
    const Vector x2 = invert(a) * b;
    CHECK(norm2(vsub(x, x2)) <= 1e-10 * std::max(1.0, norm2(x)));
  }
}
