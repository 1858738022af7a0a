#include <doctest.h>

#include <cmath>
#include <vector>

#include "rxl/log_tables.hpp"

using namespace rxl;

TEST_CASE("log_binom_pmf handles the support boundary") {
  const LogFactorialTable lf(64);
  const Rational half(1, 2);
  CHECK(log_binom_pmf(0, 0, half, lf) == doctest::Approx(0.0));
  CHECK(log_binom_pmf(3, 2, half, lf) == kLogZero);
  CHECK(log_binom_pmf(-1, 5, half, lf) == kLogZero);
  // C(30,25)/2^30
  const double want = std::log(142506.0) - 30.0 * std::log(2.0);
  CHECK(log_binom_pmf(25, 30, half, lf) == doctest::Approx(want).epsilon(1e-13));
}

TEST_CASE("binomial pmf sums to one over its support") {
  const LogFactorialTable lf(220);
  for (const Rational& p : {Rational(1, 2), Rational(1, 7), Rational(9, 10)}) {
    const double lp = log_rational(p), lq = log_rational(1 - p);
    for (int b : {0, 1, 17, 200}) {
      std::vector<double> terms;
      for (int a = 0; a <= b; ++a) terms.push_back(log_binom_pmf(a, b, lp, lq, lf));
      CHECK(std::abs(log_sum_exp(terms)) < 1e-12);
    }
  }
}

TEST_CASE("exact and log pmfs agree") {
  const LogFactorialTable lf(40);
  const Rational p(2, 7);
  for (int b : {1, 9, 40}) {
    for (int a = 0; a <= b; ++a) {
      const Rational ex = exact_binom_pmf(a, b, p);
      CHECK(log_binom_pmf(a, b, p, lf) ==
            doctest::Approx(log_rational(ex)).epsilon(1e-12));
    }
  }
}

TEST_CASE("Pascal doubles match the exact coefficients") {
  const PascalTable pascal(120);
  for (int n : {0, 5, 52, 120}) {
    const auto row = big_binomial_row(n);
    for (int k = 0; k <= n; ++k) {
      const double want = row[k].convert_to<double>();
      CHECK(pascal.choose(n, k) == doctest::Approx(want).epsilon(1e-13));
    }
  }
  CHECK(pascal.choose(5, 6) == 0.0);
  CHECK(pascal.choose(5, -1) == 0.0);
}

TEST_CASE("big_choose matches the row construction") {
  CHECK(big_choose(30, 25) == 142506);
  CHECK(big_choose(4, 7) == 0);
  CHECK(big_choose(100, 50) == big_binomial_row(100)[50]);
}

TEST_CASE("log_big survives values beyond double range") {
  BigInt huge = 1;
  for (int i = 0; i < 2000; ++i) huge *= 2;
  CHECK(log_big(huge) == doctest::Approx(2000 * std::log(2.0)).epsilon(1e-14));
  CHECK(log_rational(Rational(1, huge)) ==
        doctest::Approx(-2000 * std::log(2.0)).epsilon(1e-14));
}
