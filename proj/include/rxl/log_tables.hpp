#pragma once

#include <cmath>
#include <cstdint>
#include <span>
#include <vector>

#include "rxl/rational.hpp"
#include "rxl/types.hpp"

namespace rxl {

// ln(n!) for n = 0..max_n, accumulated in long double so that downstream
// pmf identities hold to ~1e-14.
class LogFactorialTable {
 public:
  explicit LogFactorialTable(int max_n);

  double ln_factorial(int n) const { return table_[n]; }
  double ln_choose(int n, int k) const {
    return table_[n] - table_[k] - table_[n - k];
  }
  int max_n() const { return static_cast<int>(table_.size()) - 1; }

 private:
  std::vector<double> table_;
};

// ln binom(a; b, p). Out-of-support arguments (a < 0 or a > b) yield log-zero.
double log_binom_pmf(int a, int b, const Rational& p, const LogFactorialTable& lf);
double log_binom_pmf(int a, int b, double log_p, double log_1mp,
                     const LogFactorialTable& lf);

Rational exact_binom_pmf(int a, int b, const Rational& p);

// Numerically stable ln(sum(exp(x))).
double log_sum_exp(std::span<const double> xs);

// Binomial coefficients as doubles, rows 0..max_n. Exact up to 2^53 and
// within ~1e-14 relative beyond; safe from overflow for max_n <= 1000.
class PascalTable {
 public:
  explicit PascalTable(int max_n);

  const double* row(int n) const { return rows_.data() + offsets_[n]; }
  double choose(int n, int k) const {
    return (k < 0 || k > n) ? 0.0 : row(n)[k];
  }
  int max_n() const { return static_cast<int>(offsets_.size()) - 1; }

 private:
  std::vector<double> rows_;
  std::vector<std::size_t> offsets_;
};

// Row n of Pascal's triangle as exact integers.
std::vector<BigInt> big_binomial_row(int n);

BigInt big_choose(int n, int k);

}  // namespace rxl
