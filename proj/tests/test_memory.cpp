#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"
#include "mrac/identifier.hpp"
#include "mrac/memory.hpp"

using namespace mrac;

namespace {

struct BlockPayload {
  Matrix block;
};

Matrix extract_block(const BlockPayload& p) { return p.block; }

RecordingPolicy tight_policy() {
  RecordingPolicy p;
  p.eps_store = 0.1;
  p.min_dwell = 0.0;
  p.floor = 1e-6;
  return p;
}

}  // namespace

TEST_CASE("first sample is always stored") {
  DataStack<BlockPayload> stack(4, 2, 2, tight_policy());
  CHECK(stack.maybe_record(0.0, Vector{0.0, 0.0}, BlockPayload{Matrix::identity(2)}));
  CHECK(stack.size() == 1);
}

TEST_CASE("novelty threshold follows the stated formula") {
  DataStack<BlockPayload> stack(8, 2, 2, tight_policy());
  REQUIRE(stack.maybe_record(0.0, Vector{1.0, 0.0}, BlockPayload{Matrix::identity(2)}));

  // ||delta||^2 / ||signal||^2 = 0.04 / 1.44 < 0.1 -> rejected
  CHECK_FALSE(stack.maybe_record(1.0, Vector{1.2, 0.0}, BlockPayload{Matrix::identity(2)}));
  CHECK(stack.size() == 1);

  // 2 / 1 >= 0.1 -> stored
  CHECK(stack.maybe_record(2.0, Vector{0.0, 1.0}, BlockPayload{Matrix::identity(2)}));
  CHECK(stack.size() == 2);
}

TEST_CASE("dwell time and capacity gate recording") {
  RecordingPolicy policy = tight_policy();
  policy.min_dwell = 0.5;
  DataStack<BlockPayload> stack(2, 2, 2, policy);
  REQUIRE(stack.maybe_record(0.0, Vector{1.0, 0.0}, BlockPayload{Matrix::identity(2)}));
  CHECK_FALSE(stack.maybe_record(0.2, Vector{0.0, 1.0}, BlockPayload{Matrix::identity(2)}));
  CHECK(stack.maybe_record(0.6, Vector{0.0, 1.0}, BlockPayload{Matrix::identity(2)}));
  // full
  CHECK_FALSE(stack.maybe_record(1.5, Vector{5.0, 5.0}, BlockPayload{Matrix::identity(2)}));
}

TEST_CASE("record times must increase") {
  DataStack<BlockPayload> stack(4, 1, 1, tight_policy());
  REQUIRE(stack.maybe_record(1.0, Vector{1.0}, BlockPayload{Matrix{{1.0}}}));
  CHECK_THROWS_AS(stack.maybe_record(1.0, Vector{9.0}, BlockPayload{Matrix{{1.0}}}), Error);
}

TEST_CASE("stacked matrix concatenates blocks in time order") {
  DataStack<BlockPayload> stack(4, 2, 2, tight_policy());
  stack.maybe_record(0.0, Vector{1.0, 0.0}, BlockPayload{Matrix{{1.0, 0.0}}});
  stack.maybe_record(1.0, Vector{0.0, 1.0}, BlockPayload{Matrix{{0.0, 1.0}}});
  const Matrix stacked = stack.stacked_matrix(extract_block);
  CHECK(inf_norm(stacked - Matrix::identity(2)) == doctest::Approx(0.0));
}

TEST_CASE("rank condition needs both entry count and full column rank") {
  DataStack<BlockPayload> stack(8, 2, 2, tight_policy());
  CHECK_FALSE(stack.rank_condition_met(0.0, extract_block));

  // duplicate directions only: enough entries, still rank deficient
  stack.maybe_record(0.0, Vector{1.0, 0.0}, BlockPayload{Matrix{{1.0, 0.0}}});
  stack.maybe_record(1.0, Vector{3.0, 0.0}, BlockPayload{Matrix{{3.0, 0.0}}});
  CHECK_FALSE(stack.rank_condition_met(1.0, extract_block));
  CHECK_FALSE(stack.satisfied_at().has_value());

  stack.maybe_record(2.0, Vector{0.0, 1.0}, BlockPayload{Matrix{{0.0, 1.0}}});
  CHECK(stack.rank_condition_met(2.0, extract_block));
  CHECK(stack.satisfied_at() == 2.0);
}

TEST_CASE("identity stack padded with zero blocks satisfies the condition") {
  DataStack<BlockPayload> stack(8, 3, 2, tight_policy());
  stack.maybe_record(0.0, Vector{1.0, 0.0, 0.0}, BlockPayload{Matrix::identity(3)});
  stack.maybe_record(1.0, Vector{0.0, 0.0, 9.0}, BlockPayload{Matrix(3, 3, 0.0)});
  CHECK(stack.rank_condition_met(1.0, extract_block));
}

TEST_CASE("stack freezes once satisfied") {
  DataStack<BlockPayload> stack(8, 2, 2, tight_policy());
  stack.maybe_record(0.0, Vector{1.0, 0.0}, BlockPayload{Matrix{{1.0, 0.0}}});
  stack.maybe_record(1.0, Vector{0.0, 1.0}, BlockPayload{Matrix{{0.0, 1.0}}});
  REQUIRE(stack.rank_condition_met(1.0, extract_block));
  const std::size_t size_at_freeze = stack.size();

  CHECK_FALSE(stack.maybe_record(2.0, Vector{5.0, -5.0}, BlockPayload{Matrix{{5.0, -5.0}}}));
  CHECK(stack.size() == size_at_freeze);
  CHECK(stack.rank_condition_met(3.0, extract_block));  // stays true
  CHECK(stack.satisfied_at() == 1.0);                   // first satisfaction time is kept
}

TEST_CASE("identification stack dimensions match the W layout") {
  // n = 2, d = 1: blocks are 2 x 6, the rank condition needs at least
  // n + d = 3 entries so the stacked matrix is square or taller.
  const std::size_t n = 2, d = 1;
  DataStack<WPayload> stack(12, n * (n + d), n + d, tight_policy());
  Vector theta(n * (n + d), 0.5);

  int stored = 0;
  for (int j = 0; j < 4; ++j) {
    Vector a{1.0 + j, static_cast<double>(j * j)};
    Vector b{std::max(0.25 * j, 0.1) + 0.05 * j * j};
    Matrix m(n, n * (n + d), 0.0);
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t k = 0; k < n; ++k) m(i, i * n + k) = a[k];
      m(i, n * n + i * d) = b[0];
    }
    if (stack.maybe_record(j, m.data(), WPayload{m, m * theta})) ++stored;
  }
  REQUIRE(stored >= 3);
  const Matrix stacked = stack.stacked_matrix(extract_w_block);
  CHECK(stacked.rows() == n * stack.size());
  CHECK(stacked.cols() == n * (n + d));
  CHECK(stack.rank_condition_met(4.0, extract_w_block));
  // after satisfaction the stacked matrix supports least squares
  Vector G;
  for (const auto& entry : stack.entries()) G.insert(G.end(), entry.payload.g.begin(), entry.payload.g.end());
  const Vector recovered = least_squares_solve(stacked, G);
  CHECK(norm2(vsub(recovered, theta)) <= 1e-10);
}
