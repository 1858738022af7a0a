#include <doctest.h>

#include <set>

#include "rxl/hypothesis.hpp"
#include "rxl/lattice.hpp"

using namespace rxl;

TEST_CASE("membership counts at s=100") {
  CHECK(HypothesisSet("killed == 0", 100).members().size() == 5151);
  CHECK(HypothesisSet("killed == 0 and saved >= 1", 100).members().size() == 5050);
  CHECK(HypothesisSet("fisher_null", 100).members().size() == 101);
}

TEST_CASE("ratio conventions") {
  HypothesisSet h("saved / killed >= 5", 100);
  CHECK(h.contains({0, 0, 100, 0}));        // 100/0 evaluates as +infinity
  CHECK_FALSE(h.contains({100, 0, 0, 0}));  // 0/0 is ill-defined, never a member
  CHECK(h.contains({0, 10, 90, 0}));
  CHECK_FALSE(h.contains({0, 20, 80, 0}));

  // The ill-defined point still belongs to non-ratio hypotheses.
  CHECK(HypothesisSet("killed == 0", 100).contains({100, 0, 0, 0}));
}

TEST_CASE("presets") {
  HypothesisSet fisher("fisher_null", 10);
  for (const TypeConfig& t : fisher.members()) {
    CHECK(t.defiers == 0);
    CHECK(t.compliers == 0);
  }
  HypothesisSet neyman("neyman_null", 10);
  for (const TypeConfig& t : neyman.members()) CHECK(t.defiers == t.compliers);
  CHECK(neyman.contains({2, 3, 3, 2}));
  CHECK_FALSE(neyman.contains({2, 3, 4, 1}));
}

TEST_CASE("operator precedence") {
  HypothesisSet h("killed == 0 or saved == 0 and always >= 9", 10);
  // 'and' binds tighter than 'or'.
  CHECK(h.contains({10, 0, 0, 0}));
  CHECK(h.contains({0, 1, 0, 9}));
  CHECK_FALSE(h.contains({0, 1, 1, 8}));
  HypothesisSet grouped("(killed == 0 or saved == 0) and always >= 9", 10);
  CHECK_FALSE(grouped.contains({10, 0, 0, 0}));
  CHECK(grouped.contains({1, 0, 0, 9}));
}

TEST_CASE("decimal thresholds are exact") {
  HypothesisSet h("avg_effect >= 0.2", 10);
  CHECK(h.contains({0, 0, 2, 8}));
  CHECK_FALSE(h.contains({0, 0, 1, 9}));
  CHECK(h.contains({0, 1, 3, 6}));
}

TEST_CASE("syntax errors carry positions") {
  CHECK_THROWS_AS(parse_hypothesis_expr("killed !! 0"), HypothesisParseError);
  CHECK_THROWS_AS(parse_hypothesis_expr("frobnicate == 0"), HypothesisParseError);
  CHECK_THROWS_AS(parse_hypothesis_expr("killed == "), HypothesisParseError);
  CHECK_THROWS_AS(parse_hypothesis_expr("(killed == 0"), HypothesisParseError);
  CHECK_THROWS_AS(parse_hypothesis_expr("killed == 0 extra"), HypothesisParseError);
  try {
    parse_hypothesis_expr("killed ==");
  } catch (const HypothesisParseError& e) {
    CHECK(e.position() == 9);
  }
}

TEST_CASE("empty hypotheses are rejected at construction") {
  CHECK_THROWS_AS(HypothesisSet("killed >= 11", 10), input_error);
  CHECK_THROWS_AS(HypothesisSet("saved / killed >= 5 and saved == 0", 10), input_error);
}

TEST_CASE("format/parse round trip preserves the member set") {
  const std::vector<std::string> battery{
      "killed == 0",
      "killed == 0 and saved >= 1",
      "saved / killed >= 2.5",
      "fisher_null",
      "neyman_null",
      "killed == 0 or (saved >= 3 and always < 2)",
      "avg_effect <= 0.25",
      "affected / always >= 1 or never > 6",
  };
  const int s = 8;
  for (const std::string& text : battery) {
    const auto expr = parse_hypothesis_expr(text);
    const std::string printed = format_hypothesis(*expr);
    const auto reparsed = parse_hypothesis_expr(printed);
    for (const TypeConfig& theta : enumerate_type_configs(s)) {
      CHECK(hypothesis_contains(*expr, theta) == hypothesis_contains(*reparsed, theta));
    }
  }
}

TEST_CASE("quantity_bound builds the comparison set") {
  const auto h = HypothesisSet::quantity_bound(Quantity::Defiers, CmpOp::Le,
                                               Rational(1), 6);
  for (const TypeConfig& t : h.members()) CHECK(t.defiers <= 1);
  std::int64_t direct = 0;
  for (const TypeConfig& t : enumerate_type_configs(6)) direct += t.defiers <= 1;
  CHECK(static_cast<std::int64_t>(h.members().size()) == direct);
}
