#include <doctest.h>

#include <random>
#include <set>

#include "oracles.hpp"
#include "starkqfi/basis.hpp"

using namespace starkqfi;

TEST_SUITE("basis") {

TEST_CASE("dimension matches the binomial count") {
  CHECK(dimension(5, 2) == 15);
  CHECK(dimension(11, 2) == 66);
  CHECK(dimension(1, 7) == 1);
  CHECK(dimension(11, 5) == 3003);
  CHECK(dimension(4, 0) == 1);
  CHECK_THROWS_AS(dimension(0, 3), std::domain_error);
  CHECK_THROWS_AS(dimension(3, -1), std::domain_error);
  CHECK_THROWS_AS(dimension(200, 200), std::overflow_error);
}

TEST_CASE("declared lexicographic order") {
  FockBasis two(2, 1);
  CHECK(two.rank(FockState({0, 1})) == 0);
  CHECK(two.rank(FockState({1, 0})) == 1);

  FockBasis b(3, 2);
  const std::vector<std::vector<int>> expected{{0, 0, 2}, {0, 1, 1}, {0, 2, 0}, {1, 0, 1}, {1, 1, 0}, {2, 0, 0}};
  for (std::size_t i = 0; i < expected.size(); ++i) {
    CHECK(b.rank(FockState(expected[i])) == static_cast<Index>(i));
    CHECK(b.unrank(static_cast<Index>(i)) == FockState(expected[i]));
  }
  CHECK(b.unrank(0) == FockState({0, 0, 2}));
  CHECK(b.unrank(b.dimension() - 1) == FockState({2, 0, 0}));
}

TEST_CASE("enumeration agrees with the brute-force oracle") {
  for (int L = 1; L <= 6; ++L) {
    for (int N = 0; N <= 5; ++N) {
      const auto states = oracle::enumerate(L, N);
      FockBasis b(L, N);
      REQUIRE(b.dimension() == static_cast<Index>(states.size()));
      for (Index i = 0; i < b.dimension(); ++i) {
        CHECK(b.state(i).occupations() == states[static_cast<std::size_t>(i)]);
        for (int l = 0; l < L; ++l) CHECK(b.occupation(i, l) == states[static_cast<std::size_t>(i)][static_cast<std::size_t>(l)]);
      }
    }
  }
}

TEST_CASE("rank and unrank are inverse bijections") {
  FockBasis small(4, 3);
  REQUIRE(small.dimension() == 20);
  std::set<FockState> seen;
  for (Index k = 0; k < small.dimension(); ++k) {
    const auto s = small.unrank(k);
    CHECK(s.particles() == 3);
    CHECK(small.rank(s) == k);
    seen.insert(s);
  }
  CHECK(seen.size() == 20);

  FockBasis six(6, 4);
  for (Index k = 0; k < six.dimension(); ++k) CHECK(six.rank(six.unrank(k)) == k);

  // Randomized round trips in a large sector.
  FockBasis large(19, 6);
  std::mt19937_64 rng(7);
  std::uniform_int_distribution<Index> pick(0, large.dimension() - 1);
  for (int trial = 0; trial < 2000; ++trial) {
    const Index k = pick(rng);
    const auto s = large.unrank(k);
    CHECK(s.particles() == 6);
    CHECK(large.rank(s) == k);
  }
  for (Index k = 1; k < 500; ++k) CHECK(large.unrank(k - 1) < large.unrank(k));
}

TEST_CASE("membership and range errors") {
  FockBasis b(3, 2);
  CHECK_THROWS_AS(b.rank(FockState({1, 1, 1})), std::invalid_argument);
  CHECK_THROWS_AS(b.rank(FockState({1, 1})), std::invalid_argument);
  CHECK_FALSE(b.contains(FockState({0, 0, 3})));
  CHECK(b.contains(FockState({0, 1, 1})));
  CHECK_THROWS_AS(b.unrank(6), std::out_of_range);
  CHECK_THROWS_AS(b.unrank(-1), std::out_of_range);
}

TEST_CASE("staggered initial state") {
  CHECK(staggered_initial_state(5, 1) == FockState({0, 0, 1, 0, 0}));
  CHECK(staggered_initial_state(5, 2) == FockState({0, 1, 0, 1, 0}));
  CHECK(staggered_initial_state(11, 4) == FockState({0, 0, 1, 0, 1, 0, 1, 0, 1, 0, 0}));
  // Leftover odd space goes to the upper end.
  CHECK(staggered_initial_state(6, 2) == FockState({0, 1, 0, 1, 0, 0}));
  CHECK(staggered_initial_state(4, 1) == FockState({0, 1, 0, 0}));
  CHECK(staggered_initial_state(3, 0) == FockState({0, 0, 0}));
  CHECK_THROWS_AS(staggered_initial_state(4, 3), std::length_error);
  for (int L = 1; L <= 20; ++L) {
    for (int N = 0; 2 * N - 1 <= L; ++N) {
      const auto s = staggered_initial_state(L, N);
      CHECK(s.particles() == N);
      CHECK(s.max_occupation() <= 1);
      CHECK(s.occupations() == oracle::staggered(L, N));
    }
  }
}

TEST_CASE("text form") {
  CHECK(FockState({0, 1, 0, 1, 0}).to_string() == "01010");
  CHECK(FockState({0, 12, 3}).to_string() == "0,12,3");
  CHECK(FockState::parse("01010") == FockState({0, 1, 0, 1, 0}));
  CHECK(FockState::parse("0,12,3") == FockState({0, 12, 3}));
  CHECK_THROWS(FockState::parse("0a1"));
}

TEST_CASE("basis vector") {
  FockBasis b(5, 2);
  const auto v = b.basis_vector(FockState({0, 1, 0, 1, 0}));
  CHECK(v.norm() == doctest::Approx(1.0));
  CHECK(std::abs(v(b.rank(FockState({0, 1, 0, 1, 0}))) - 1.0) == 0.0);
}

}
