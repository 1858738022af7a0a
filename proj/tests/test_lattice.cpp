#include <doctest.h>

#include <set>
#include <vector>

#include "rxl/lattice.hpp"

using namespace rxl;

TEST_CASE("lattice sizes match the closed form") {
  CHECK(lattice_size(1) == 4);
  CHECK(lattice_size(2) == 10);
  CHECK(lattice_size(3) == 20);
  CHECK(lattice_size(100) == 176851);
}

TEST_CASE("enumeration yields each configuration once, in canonical order") {
  for (int s = 1; s <= 30; ++s) {
    std::set<std::tuple<int, int, int>> seen;
    std::int64_t count = 0;
    std::tuple<int, int, int> prev{-1, -1, -1};
    for (const TypeConfig& t : enumerate_type_configs(s)) {
      REQUIRE(t.never + t.defiers + t.compliers + t.always == s);
      REQUIRE(t.always >= 0);
      std::tuple<int, int, int> cur{t.never, t.defiers, t.compliers};
      REQUIRE(cur > prev);  // strictly ascending lexicographic
      prev = cur;
      seen.insert(cur);
      ++count;
    }
    CHECK(count == lattice_size(s));
    CHECK(static_cast<std::int64_t>(seen.size()) == count);
  }
}

TEST_CASE("data enumeration counts") {
  std::int64_t n = 0;
  for ([[maybe_unused]] const DataConfig& g : enumerate_data_configs(3)) ++n;
  CHECK(n == 20);
  n = 0;
  for ([[maybe_unused]] const DataConfig& g : enumerate_data_configs(1)) ++n;
  CHECK(n == 4);
}

TEST_CASE("rank and unrank are inverse") {
  for (int s : {1, 2, 7, 23}) {
    std::int64_t r = 0;
    for (const TypeConfig& t : enumerate_type_configs(s)) {
      CHECK(rank_of(t) == r);
      CHECK(type_config_at(s, r) == t);
      ++r;
    }
  }
}

TEST_CASE("rank index agrees with composition_rank") {
  const int s = 17;
  const RankIndex ri(s);
  for (const DataConfig& g : enumerate_data_configs(s)) {
    CHECK(ri.rank(g.g1, g.g2, g.g3) == rank_of(g));
  }
}

TEST_CASE("enumeration rejects invalid sample sizes") {
  CHECK_THROWS_AS(enumerate_type_configs(0), input_error);
}
