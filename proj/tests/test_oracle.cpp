#include <doctest.h>

#include "rxl/lattice.hpp"
#include "rxl/log_tables.hpp"
#include "rxl/oracle.hpp"

using namespace rxl;

TEST_CASE("single never-taker under a fair coin") {
  const auto dist =
      oracle::exhaustive_distribution({1, 0, 0, 0}, RandomizationSpec::iid(Rational(1, 2)));
  REQUIRE(dist.size() == 2);
  CHECK(dist.at(DataConfig{0, 1, 0, 0}) == Rational(1, 2));
  CHECK(dist.at(DataConfig{0, 0, 0, 1}) == Rational(1, 2));
}

TEST_CASE("two never-takers, two compliers, urn draw of two") {
  const auto dist =
      oracle::exhaustive_distribution({2, 0, 2, 0}, RandomizationSpec::urn(2, 4));
  REQUIRE(dist.size() == 3);
  CHECK(dist.at(DataConfig{1, 1, 0, 2}) == Rational(2, 3));
  CHECK(dist.at(DataConfig{2, 0, 0, 2}) == Rational(1, 6));
  CHECK(dist.at(DataConfig{0, 2, 0, 2}) == Rational(1, 6));
}

TEST_CASE("all always-takers put every individual in the treated cells") {
  for (int s : {3, 5}) {
    const auto dist = oracle::exhaustive_distribution(
        {0, 0, 0, s}, RandomizationSpec::iid(Rational(1, 3)));
    for (const auto& [g, p] : dist) {
      CHECK(g.g2 == 0);
      CHECK(g.g4 == 0);
      CHECK(g.g1 + g.g3 == s);
    }
  }
}

TEST_CASE("total probability mass is exactly one") {
  for (int s = 1; s <= 6; ++s) {
    for (const TypeConfig& theta : enumerate_type_configs(s)) {
      Rational total(0);
      for (const auto& [g, p] :
           oracle::exhaustive_distribution(theta, RandomizationSpec::iid(Rational(2, 5)))) {
        total += p;
      }
      CHECK(total == 1);
    }
  }
}

TEST_CASE("intervention arm size is exactly binomial under iid") {
  const TypeConfig theta{2, 1, 2, 1};
  const Rational p(1, 3);
  const auto dist = oracle::exhaustive_distribution(theta, RandomizationSpec::iid(p));
  std::vector<Rational> arm_mass(7, Rational(0));
  for (const auto& [g, pr] : dist) arm_mass[g.intervention_arm()] += pr;
  for (int k = 0; k <= 6; ++k) {
    CHECK(arm_mass[k] == exact_binom_pmf(k, 6, p));
  }
}

TEST_CASE("caps reject oversized enumerations") {
  CHECK_THROWS_AS(oracle::exhaustive_distribution({20, 0, 0, 0},
                                                  RandomizationSpec::iid(Rational(1, 2))),
                  resource_error);
}
