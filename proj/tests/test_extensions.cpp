#include <doctest.h>

#include <cmath>

#include "rxl/extensions.hpp"
#include "rxl/lattice.hpp"
#include "rxl/oracle.hpp"

using namespace rxl;

TEST_CASE("share-based lower bounds") {
  SharePair shares;
  shares.treated_intervention = Rational(7, 10);
  shares.treated_control = Rational(3, 10);
  auto [dlb, clb] = bfh_lower_bounds(shares);
  CHECK(dlb == 0);
  CHECK(clb == Rational(2, 5));

  shares.treated_control = Rational(7, 10);
  std::tie(dlb, clb) = bfh_lower_bounds(shares);
  CHECK(dlb == 0);
  CHECK(clb == 0);

  shares.treated_intervention = Rational(3, 10);
  std::tie(dlb, clb) = bfh_lower_bounds(shares);
  CHECK(dlb == Rational(2, 5));
  CHECK(clb == 0);

  SharePair undefined;
  undefined.treated_control = Rational(1, 2);
  CHECK_THROWS_AS(bfh_lower_bounds(undefined), input_error);
}

TEST_CASE("share preimage enumerates exactly the matching configurations") {
  const int s = 10;
  for (const DataConfig& probe : enumerate_data_configs(s)) {
    const SharePair shares = SharePair::of(probe);
    const auto preimage = share_preimage(shares, s);
    // Direct filter over the full lattice.
    std::vector<DataConfig> direct;
    for (const DataConfig& g : enumerate_data_configs(s)) {
      if (SharePair::of(g).treated_intervention == shares.treated_intervention &&
          SharePair::of(g).treated_control == shares.treated_control) {
        direct.push_back(g);
      }
    }
    CHECK(preimage == direct);
  }
}

TEST_CASE("limited-data likelihood equals the preimage sum") {
  const auto spec = RandomizationSpec::iid(Rational(1, 2));
  SharePair mortem_shares;
  mortem_shares.treated_intervention = Rational(7, 10);
  mortem_shares.treated_control = Rational(3, 10);
  const auto preimage = share_preimage(mortem_shares, 100);
  CHECK(preimage.size() == 9);  // arm sizes 10,20,...,90

  LikelihoodEngine engine(100, spec);
  const TypeConfig theta{30, 0, 40, 30};
  Rational direct(0);
  for (const DataConfig& g : preimage) direct += engine.exact_likelihood(theta, g);
  const auto lv = limited_data_likelihood(theta, mortem_shares, spec, true);
  CHECK(*lv.exact == direct);
  CHECK(lv.log_value == doctest::Approx(log_rational(direct)).epsilon(1e-12));
}

TEST_CASE("limited-data likelihood with no integral preimage is zero") {
  SharePair shares;
  shares.treated_intervention = Rational(1, 3);
  shares.treated_control = Rational(1, 3);
  // s = 4: no arm size k in 1..3 makes both k/3 and (4-k)/3 integers.
  const auto lv =
      limited_data_likelihood({2, 0, 2, 0}, shares, RandomizationSpec::iid(Rational(1, 2)));
  CHECK(lv.is_zero());
}

TEST_CASE("share classes partition the lattice") {
  const int s = 12;
  const ShareClassIndex classes(s);
  std::vector<std::int64_t> per_class(classes.class_count(), 0);
  std::int64_t total = 0;
  for (const DataConfig& g : enumerate_data_configs(s)) {
    const auto cls = classes.class_of_rank(rank_of(g));
    REQUIRE(cls >= 0);
    REQUIRE(cls < classes.class_count());
    ++per_class[cls];
    ++total;
    // The class of g's own shares is the class of g.
    CHECK(classes.class_of(SharePair::of(g)) == cls);
  }
  CHECK(total == lattice_size(s));
  for (std::int64_t c = 0; c < classes.class_count(); ++c) {
    CHECK(per_class[c] > 0);
    const auto members = classes.class_member_ranks(static_cast<std::int32_t>(c));
    CHECK(static_cast<std::int64_t>(members.size()) == per_class[c]);
    // All members share the same share pair.
    const SharePair want = classes.shares_of_class(static_cast<std::int32_t>(c));
    for (const std::int64_t r : members) {
      const SharePair got = SharePair::of(data_config_at(s, r));
      CHECK(got.treated_intervention == want.treated_intervention);
      CHECK(got.treated_control == want.treated_control);
    }
  }
}

TEST_CASE("limited-data p-value matches a brute-force construction") {
  const int s = 6;
  const auto spec = RandomizationSpec::iid(Rational(1, 2));
  LikelihoodEngine engine(s, spec);
  const ShareClassIndex classes(s);
  HypothesisSet h0("killed == 0", s);

  // Brute force: exact class masses for every theta.
  const std::int64_t n_cls = classes.class_count();
  std::vector<std::vector<Rational>> mass(lattice_size(s));
  {
    std::int64_t ti = 0;
    for (const TypeConfig& theta : enumerate_type_configs(s)) {
      mass[ti].assign(n_cls, Rational(0));
      std::int64_t r = 0;
      for (const DataConfig& g : enumerate_data_configs(s)) {
        mass[ti][classes.class_of_rank(r)] += engine.exact_likelihood(theta, g);
        ++r;
      }
      ++ti;
    }
  }
  auto lambda_parts = [&](std::int32_t cls) {
    Rational num(0), den(0);
    std::int64_t ti = 0;
    for (const TypeConfig& theta : enumerate_type_configs(s)) {
      if (mass[ti][cls] > den) den = mass[ti][cls];
      if (h0.contains(theta) && mass[ti][cls] > num) num = mass[ti][cls];
      ++ti;
    }
    return std::make_pair(num, den);
  };

  for (const DataConfig& observed :
       {DataConfig{2, 1, 1, 2}, DataConfig{3, 0, 0, 3}, DataConfig{1, 2, 2, 1}}) {
    const SharePair shares = SharePair::of(observed);
    const std::int32_t obs_cls = classes.class_of(shares);
    const auto [num_obs, den_obs] = lambda_parts(obs_cls);
    Rational best(0);
    std::int64_t ti = 0;
    for (const TypeConfig& theta : enumerate_type_configs(s)) {
      if (h0.contains(theta)) {
        Rational acc(0);
        for (std::int32_t c = 0; c < n_cls; ++c) {
          const auto [num_c, den_c] = lambda_parts(c);
          if (den_c == 0) continue;
          if (num_c * den_obs <= num_obs * den_c) acc += mass[ti][c];
        }
        if (acc > best) best = acc;
      }
      ++ti;
    }
    const TestResult r = limited_data_p_value(shares, h0, spec, 2);
    CHECK(*r.p_value == doctest::Approx(to_double(best)).epsilon(1e-9));
    CHECK(r.lambda ==
          doctest::Approx(to_double(Rational(num_obs) / den_obs)).epsilon(1e-10));
  }
}

TEST_CASE("population likelihood identities") {
  // Weighted-average identity: the closed form equals the lattice average
  // under multinomial sampling weights.
  const std::vector<PopulationConfig> grid{
      {Rational(1, 4), Rational(1, 4), Rational(1, 4)},
      {Rational(1, 2), Rational(0), Rational(1, 3)},
      {Rational(1, 10), Rational(3, 10), Rational(2, 10)},
  };
  const Rational p(1, 2);
  for (int s : {1, 2, 4, 6}) {
    LikelihoodEngine engine(s, RandomizationSpec::iid(p));
    for (const auto& pi : grid) {
      for (const DataConfig& g : enumerate_data_configs(s)) {
        Rational avg(0);
        for (const TypeConfig& th : enumerate_type_configs(s)) {
          // Multinomial weight of drawing this sample from the population.
          Rational h(big_choose(s, th.never) * big_choose(s - th.never, th.defiers) *
                     big_choose(s - th.never - th.defiers, th.compliers));
          for (int i = 0; i < th.never; ++i) h *= pi.pi1;
          for (int i = 0; i < th.defiers; ++i) h *= pi.pi2;
          for (int i = 0; i < th.compliers; ++i) h *= pi.pi3;
          for (int i = 0; i < th.always; ++i) h *= pi.pi4();
          avg += engine.exact_likelihood(th, g) * h;
        }
        const auto closed = asymptotic_likelihood_iid(pi, g, p);
        CHECK(*closed.exact == avg);
      }
    }
  }
}

TEST_CASE("urn form equals the iid form divided by the arm prefactor") {
  const Rational p(2, 5);
  for (int s : {2, 4, 6}) {
    for (int m = 1; m <= s - 1; ++m) {
      for (const DataConfig& g : enumerate_data_configs(s)) {
        if (g.intervention_arm() != m) continue;
        const PopulationConfig pi{Rational(1, 5), Rational(1, 5), Rational(2, 5)};
        const auto iid = asymptotic_likelihood_iid(pi, g, p);
        const auto urn = asymptotic_likelihood_urn(pi, g, m);
        Rational pref(big_choose(s, m));
        for (int i = 0; i < m; ++i) pref *= p;
        for (int i = 0; i < s - m; ++i) pref *= 1 - p;
        CHECK(*urn.exact * pref == *iid.exact);
      }
    }
  }
}

TEST_CASE("asymptotic point examples") {
  const auto l1 = asymptotic_likelihood_iid(
      {Rational(1, 4), Rational(1, 4), Rational(1, 4)}, DataConfig{1, 0, 0, 0},
      Rational(1, 2));
  CHECK(*l1.exact == Rational(1, 4));
  const auto l2 = asymptotic_likelihood_urn({Rational(0), Rational(0), Rational(1)},
                                            DataConfig{1, 0, 0, 1}, 1);
  CHECK(*l2.exact == 1);
  const auto l3 = asymptotic_likelihood_iid(
      {Rational(1, 2), Rational(1, 2), Rational(0)}, DataConfig{1, 0, 0, 0},
      Rational(1, 2));
  CHECK(*l3.exact == 0);  // pi1 + pi2 = 1 makes a treated intervention unit impossible
  CHECK_THROWS_AS(asymptotic_likelihood_urn({Rational(1, 2), Rational(0), Rational(0)},
                                            DataConfig{1, 0, 0, 1}, 2),
                  input_error);
}

TEST_CASE("population MLE family and the zero-defier rewrite") {
  const DataConfig mortem{35, 15, 15, 35};
  const PopulationMle mle = population_mle(mortem);
  CHECK(mle.v_hat == Rational(7, 10));
  CHECK(mle.c_hat == Rational(3, 10));
  CHECK(mle.effect == Rational(2, 5));
  CHECK(mle.zero_defier_exists);
  REQUIRE(mle.zero_defier.has_value());
  CHECK(mle.zero_defier->pi2 == 0);

  const DataConfig vita{25, 25, 5, 45};
  CHECK(population_mle(vita).effect == Rational(2, 5));

  // Every family member attains the same likelihood, equal to the rewrite's.
  const auto check_family = [&](const DataConfig& g) {
    const PopulationMle m = population_mle(g);
    const int arm = g.intervention_arm();
    const auto base = asymptotic_likelihood_urn(m.representative, g, arm);
    const Rational mid = (m.pi1_min + m.pi1_max) / 2;
    const PopulationConfig other{mid, 1 - mid - m.v_hat, 1 - mid - m.c_hat};
    CHECK(*asymptotic_likelihood_urn(other, g, arm).exact == *base.exact);
    if (m.zero_defier_exists) {
      const auto rewritten = zero_defier_transform(m.representative);
      CHECK(*asymptotic_likelihood_urn(rewritten, g, arm).exact == *base.exact);
    }
  };
  check_family(mortem);
  check_family(vita);
  check_family(DataConfig{3, 2, 1, 4});

  // Balanced shares admit both a zero-defier and a zero-complier maximizer.
  const PopulationMle balanced = population_mle(DataConfig{2, 2, 2, 2});
  CHECK(balanced.effect == 0);
  CHECK(balanced.zero_defier_exists);
  CHECK(balanced.zero_complier_exists);

  CHECK_THROWS_AS(population_mle(DataConfig{0, 0, 2, 2}), input_error);
}

TEST_CASE("the family maximum dominates the rest of the simplex") {
  // Spot check: maximizer family value >= likelihood at grid points.
  const DataConfig g{3, 1, 1, 3};
  const PopulationMle mle = population_mle(g);
  const auto best = asymptotic_likelihood_urn(mle.representative, g, 4);
  for (int a = 0; a <= 4; ++a) {
    for (int b = 0; a + b <= 4; ++b) {
      for (int c = 0; a + b + c <= 4; ++c) {
        const PopulationConfig pi{Rational(a, 4), Rational(b, 4), Rational(c, 4)};
        CHECK(*asymptotic_likelihood_urn(pi, g, 4).exact <= *best.exact);
      }
    }
  }
}

TEST_CASE("the share bounds hold at every lattice point") {
  // Evaluate the bounds at each theta's own implied population shares.
  for (int s = 1; s <= 10; ++s) {
    for (const TypeConfig& th : enumerate_type_configs(s)) {
      const Rational v(s - th.never - th.defiers, s);
      const Rational c(s - th.never - th.compliers, s);
      SharePair shares;
      shares.treated_intervention = v;
      shares.treated_control = c;
      const auto [dlb, clb] = bfh_lower_bounds(shares);
      CHECK(dlb <= Rational(th.defiers, s));
      CHECK(clb <= Rational(th.compliers, s));
    }
  }
}

TEST_CASE("two-proportion baseline") {
  const auto mortem = two_proportion_test(DataConfig{35, 15, 15, 35});
  CHECK(mortem.estimate == doctest::Approx(0.4));
  CHECK(mortem.std_error == doctest::Approx(std::sqrt(0.21 / 50 + 0.21 / 50)));
  CHECK(mortem.p_value == doctest::Approx(1.275e-5).epsilon(1e-3));

  const auto vita = two_proportion_test(DataConfig{25, 25, 5, 45});
  CHECK(vita.estimate == doctest::Approx(0.4));
  CHECK(vita.std_error == doctest::Approx(std::sqrt(0.25 / 50 + 0.09 / 50)));
  CHECK(vita.p_value == doctest::Approx(1.2302e-6).epsilon(1e-3));

  const auto null = two_proportion_test(DataConfig{2, 2, 2, 2});
  CHECK(null.estimate == 0.0);
  CHECK(null.p_value == 1.0);

  CHECK_THROWS_AS(two_proportion_test(DataConfig{0, 0, 1, 1}), input_error);
}
