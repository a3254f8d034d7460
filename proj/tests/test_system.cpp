#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <cmath>
#include <random>

#include "doctest.h"
#include "mrac/system.hpp"

using namespace mrac;

namespace {

PlantModel paper_plant() { return PlantModel{Matrix{{0.0, 1.0}, {5.0, 2.0}}, Matrix{{0.0}, {2.0}}}; }

ReferenceModel paper_reference() {
  ReferenceModel ref;
  ref.A_m = Matrix{{0.0, 1.0}, {-8.0, -10.0}};
  ref.B_m = Matrix{{0.0}, {1.0}};
  ref.r.kind = ReferenceSignal::Kind::exp_decay;
  ref.r.value = {20.0};
  ref.r.rate = {0.5};
  return ref;
}

Vector random_vector(std::mt19937& rng, std::size_t len) {
  std::uniform_real_distribution<double> dist(-1.0, 1.0);
  Vector v(len);
  for (double& x : v) x = dist(rng);
  return v;
}

Matrix random_matrix(std::mt19937& rng, std::size_t rows, std::size_t cols) {
  std::uniform_real_distribution<double> dist(-1.0, 1.0);
  Matrix m(rows, cols);
  for (double& v : m.data()) v = dist(rng);
  return m;
}

}  // namespace

TEST_CASE("Y regressor layout for the second-order single-input case") {
  const Matrix Y = build_regressor_Y(Vector{1.0, 2.0}, Vector{3.0});
  REQUIRE(Y.rows() == 2);
  REQUIRE(Y.cols() == 6);
  const Matrix expect{{1.0, 2.0, 0.0, 0.0, 3.0, 0.0}, {0.0, 0.0, 1.0, 2.0, 0.0, 3.0}};
  for (std::size_t i = 0; i < 2; ++i)
    for (std::size_t j = 0; j < 6; ++j) CHECK(Y(i, j) == doctest::Approx(expect(i, j)));

  const Matrix zero = build_regressor_Y(Vector{0.0, 0.0}, Vector{0.0});
  CHECK(inf_norm(zero) == doctest::Approx(0.0));
}

TEST_CASE("z regressor layout") {
  const Matrix z = build_regressor_z(Vector{1.0, 2.0}, Vector{4.0});
  REQUIRE(z.rows() == 1);
  REQUIRE(z.cols() == 3);
  CHECK(z(0, 0) == doctest::Approx(1.0));
  CHECK(z(0, 1) == doctest::Approx(2.0));
  CHECK(z(0, 2) == doctest::Approx(4.0));
}

TEST_CASE("regressor identities hold on random data") {
  std::mt19937 rng(101);
  for (int round = 0; round < 50; ++round) {
    const std::size_t n = 2 + static_cast<std::size_t>(round) % 3;
    const std::size_t d = 1 + static_cast<std::size_t>(round) % 2;
    const Matrix A = random_matrix(rng, n, n);
    const Matrix B = random_matrix(rng, n, d);
    const Vector x = random_vector(rng, n);
    const Vector u = random_vector(rng, d);
    const Vector via_regressor = build_regressor_Y(x, u) * theta_of(A, B);
    const Vector direct = vadd(A * x, B * u);
    CHECK(norm2(vsub(via_regressor, direct)) <= 1e-12);

    const Matrix Kx = random_matrix(rng, n, d);
    const Matrix Kr = random_matrix(rng, d, d);
    const Vector r = random_vector(rng, d);
    const Vector via_z = build_regressor_z(x, r) * phi_of(Kx, Kr);
    const Vector direct_u = vadd(Kx.transpose() * x, Kr.transpose() * r);
    CHECK(norm2(vsub(via_z, direct_u)) <= 1e-12);
  }
}

TEST_CASE("theta and phi reshape round trips") {
  std::mt19937 rng(103);
  const Matrix A = random_matrix(rng, 3, 3);
  const Matrix B = random_matrix(rng, 3, 2);
  const Vector theta = theta_of(A, B);
  CHECK(inf_norm(A_of_theta(theta, 3, 2) - A) == doctest::Approx(0.0));
  CHECK(inf_norm(B_of_theta(theta, 3, 2) - B) == doctest::Approx(0.0));

  const Matrix Kx = random_matrix(rng, 3, 2);
  const Matrix Kr = random_matrix(rng, 2, 2);
  const Vector phi = phi_of(Kx, Kr);
  CHECK(inf_norm(Kx_of_phi(phi, 3, 2) - Kx) == doctest::Approx(0.0));
  CHECK(inf_norm(Kr_of_phi(phi, 3, 2) - Kr) == doctest::Approx(0.0));
}

TEST_CASE("matching gains for the bundled second-order experiment") {
  const MatchedGains gains = solve_matching(paper_plant(), paper_reference());
  CHECK(gains.Kx_star(0, 0) == doctest::Approx(-6.5).epsilon(1e-12));
  CHECK(gains.Kx_star(1, 0) == doctest::Approx(-6.0).epsilon(1e-12));
  CHECK(gains.Kr_star(0, 0) == doctest::Approx(0.5).epsilon(1e-12));
}

TEST_CASE("matching is the identity map when plant equals reference") {
  PlantModel plant{Matrix{{-1.0, 0.0}, {0.0, -2.0}}, Matrix::identity(2)};
  ReferenceModel ref;
  ref.A_m = plant.A;
  ref.B_m = plant.B;
  ref.r.kind = ReferenceSignal::Kind::constant;
  ref.r.value = {0.0, 0.0};
  const MatchedGains gains = solve_matching(plant, ref);
  CHECK(inf_norm(gains.Kx_star) == doctest::Approx(0.0));
  CHECK(inf_norm(gains.Kr_star - Matrix::identity(2)) <= 1e-12);
}

TEST_CASE("matching round trip on random feasible instances") {
  std::mt19937 rng(107);
  for (int round = 0; round < 30; ++round) {
    const std::size_t n = 2 + static_cast<std::size_t>(round) % 3;
    const std::size_t d = 1 + static_cast<std::size_t>(round) % 2;
    Matrix B = random_matrix(rng, n, d);
    while (min_singular_value(B) < 0.3) B = random_matrix(rng, n, d);
    const Matrix A = random_matrix(rng, n, n);
    const Matrix Kx = random_matrix(rng, n, d);
    Matrix Kr = random_matrix(rng, d, d);
    for (std::size_t i = 0; i < d; ++i) Kr(i, i) += 2.0;

    ReferenceModel ref;
    ref.A_m = A + B * Kx.transpose();
    ref.B_m = B * Kr.transpose();
    ref.r.kind = ReferenceSignal::Kind::constant;
    ref.r.value = Vector(d, 0.0);

    const MatchedGains gains = solve_matching(PlantModel{A, B}, ref);
    CHECK(inf_norm(A + B * gains.Kx_star.transpose() - ref.A_m) <= 1e-10);
    CHECK(inf_norm(B * gains.Kr_star.transpose() - ref.B_m) <= 1e-10);
  }
}

TEST_CASE("matching infeasible when the defect leaves the column space of B") {
  PlantModel plant{Matrix(2, 2, 0.0), Matrix{{1.0}, {0.0}}};
  ReferenceModel ref;
  ref.A_m = Matrix{{0.0, 0.0}, {1.0, 0.0}};
  ref.B_m = Matrix{{1.0}, {0.0}};
  ref.r.kind = ReferenceSignal::Kind::constant;
  ref.r.value = {0.0};
  CHECK_THROWS_AS(solve_matching(plant, ref), MatchingInfeasible);
}

TEST_CASE("plant and reference derivatives") {
  const PlantModel plant = paper_plant();
  const Vector dx = plant_derivative(plant, Vector{1.0, 0.0}, Vector{0.0});
  CHECK(dx[0] == doctest::Approx(0.0));
  CHECK(dx[1] == doctest::Approx(5.0));
  CHECK(norm2(plant_derivative(plant, Vector{0.0, 0.0}, Vector{0.0})) == doctest::Approx(0.0));

  const ReferenceModel ref = paper_reference();
  const Vector dm0 = reference_derivative(ref, Vector{0.0, 0.0}, 0.0);
  CHECK(dm0[0] == doctest::Approx(0.0));
  CHECK(dm0[1] == doctest::Approx(20.0));
  ReferenceModel silent = ref;
  silent.r.value = {0.0};
  const Vector dm1 = reference_derivative(silent, Vector{1.0, 0.0}, 0.0);
  CHECK(dm1[0] == doctest::Approx(0.0));
  CHECK(dm1[1] == doctest::Approx(-8.0));
}

TEST_CASE("bundled reference signal values") {
  const ReferenceModel ref = paper_reference();
  CHECK(ref.r.eval(0.0)[0] == doctest::Approx(20.0));
  CHECK(ref.r.eval(2.0)[0] == doctest::Approx(20.0 * std::exp(-1.0)).epsilon(1e-12));
}

TEST_CASE("reference signal catalog") {
  ReferenceSignal step;
  step.kind = ReferenceSignal::Kind::step;
  step.value = {2.0};
  step.step_time = 1.0;
  CHECK(step.eval(0.5)[0] == doctest::Approx(0.0));
  CHECK(step.eval(1.5)[0] == doctest::Approx(2.0));

  ReferenceSignal tones;
  tones.kind = ReferenceSignal::Kind::sinusoids;
  tones.amplitudes = {{1.0, 0.5}};
  tones.frequencies = {{2.0, 5.0}};
  tones.phases = {{0.0, 0.25}};
  const double t = 0.7;
  CHECK(tones.eval(t)[0] ==
        doctest::Approx(std::sin(2.0 * t) + 0.5 * std::sin(5.0 * t + 0.25)).epsilon(1e-14));
}

TEST_CASE("model validation") {
  CHECK_NOTHROW(validate(paper_plant()));
  CHECK_NOTHROW(validate(paper_reference()));

  PlantModel bad = paper_plant();
  bad.B = Matrix{{0.0}, {0.0}};
  CHECK_THROWS_AS(validate(bad), RankDeficient);

  ReferenceModel unstable = paper_reference();
  unstable.A_m = Matrix{{0.0, 1.0}, {8.0, 10.0}};
  CHECK_THROWS_AS(validate(unstable), NotHurwitz);
}
