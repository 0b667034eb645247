#include <doctest.h>

#include "regconv/lattice.hpp"

using namespace regconv;

TEST_CASE("corner enumeration in one dimension telescopes") {
  const LatticeBox box(MultiIndex{2}, MultiIndex{5});
  const auto cs = corners(box);
  REQUIRE(cs.size() == 2);
  CHECK(cs[0].sign.sign == +1);
  CHECK(cs[0].index == MultiIndex{5});
  CHECK(cs[1].sign.sign == -1);
  CHECK(cs[1].index == MultiIndex{1});
}

TEST_CASE("corner enumeration carries the below-zero sentinel") {
  const LatticeBox box(MultiIndex{0, 3}, MultiIndex{2, 5});
  const auto cs = corners(box);
  REQUIRE(cs.size() == 4);
  CHECK(cs[0].sign.sign == +1);
  CHECK(cs[0].index == MultiIndex{2, 5});
  CHECK(cs[1].sign.sign == -1);
  CHECK(cs[1].index == MultiIndex{kBelowZero, 5});
  CHECK(cs[2].sign.sign == -1);
  CHECK(cs[2].index == MultiIndex{2, 2});
  CHECK(cs[3].sign.sign == +1);
  CHECK(cs[3].index == MultiIndex{kBelowZero, 2});
}

TEST_CASE("three-dimensional boxes have eight corners split by parity") {
  const LatticeBox box(MultiIndex{1, 2, 3}, MultiIndex{4, 5, 6});
  const auto cs = corners(box);
  REQUIRE(cs.size() == 8);
  int plus = 0, minus = 0;
  for (const auto& c : cs) (c.sign.sign > 0 ? plus : minus)++;
  CHECK(plus == 4);
  CHECK(minus == 4);
}

TEST_CASE("signed corner counts balance for every dimension") {
  for (int m = 1; m <= kMaxDim; ++m) {
    const LatticeBox box(MultiIndex::filled(m, 1), MultiIndex::filled(m, 3));
    int total = 0;
    for (const auto& c : corners(box)) total += c.sign.sign;
    CHECK(total == 0);
  }
}

TEST_CASE("box iteration is row-major with the last axis fastest") {
  const LatticeBox box(MultiIndex{0, 0}, MultiIndex{1, 1});
  std::vector<MultiIndex> seen;
  for_each_index(box, [&](const MultiIndex& j) { seen.push_back(j); });
  REQUIRE(seen.size() == 4);
  CHECK(seen[0] == MultiIndex{0, 0});
  CHECK(seen[1] == MultiIndex{0, 1});
  CHECK(seen[2] == MultiIndex{1, 0});
  CHECK(seen[3] == MultiIndex{1, 1});
}

TEST_CASE("singleton and volume counts") {
  const LatticeBox single(MultiIndex{3}, MultiIndex{3});
  int count = 0;
  for_each_index(single, [&](const MultiIndex&) { ++count; });
  CHECK(count == 1);

  const LatticeBox box(MultiIndex{0, 0, 0}, MultiIndex{1, 2, 0});
  CHECK(box.volume() == 6);
  count = 0;
  for_each_index(box, [&](const MultiIndex&) { ++count; });
  CHECK(count == 6);
}

TEST_CASE("rank and unrank round-trip") {
  const LatticeBox box(MultiIndex{1, 0, 2}, MultiIndex{3, 4, 5});
  std::int64_t expected = 0;
  for_each_index(box, [&](const MultiIndex& j) {
    CHECK(box_rank(box, j) == expected);
    CHECK(box_unrank(box, expected) == j);
    ++expected;
  });
}

TEST_CASE("invalid constructions are rejected") {
  CHECK_THROWS_AS(MultiIndex::filled(0, 1), std::invalid_argument);
  CHECK_THROWS_AS(MultiIndex::filled(kMaxDim + 1, 1), std::invalid_argument);
  CHECK_THROWS_AS(MultiIndex{-2}, std::invalid_argument);
  CHECK_THROWS_AS(LatticeBox(MultiIndex{3}, MultiIndex{2}), std::invalid_argument);
  CHECK_THROWS_AS(LatticeBox(MultiIndex{0, 0}, MultiIndex{1}), std::invalid_argument);
}
