#include "rxl/log_tables.hpp"

#include <algorithm>

#include "rxl/errors.hpp"

namespace rxl {

LogFactorialTable::LogFactorialTable(int max_n) {
  if (max_n < 0 || max_n > kMaxSampleSize * 2) {
    throw input_error("ln-factorial table size out of range");
  }
  table_.resize(max_n + 1);
  long double acc = 0.0L;
  table_[0] = 0.0;
  for (int n = 1; n <= max_n; ++n) {
    acc += std::log(static_cast<long double>(n));
    table_[n] = static_cast<double>(acc);
  }
}

double log_binom_pmf(int a, int b, double log_p, double log_1mp,
                     const LogFactorialTable& lf) {
  if (a < 0 || a > b) return kLogZero;
  return lf.ln_choose(b, a) + a * log_p + (b - a) * log_1mp;
}

double log_binom_pmf(int a, int b, const Rational& p, const LogFactorialTable& lf) {
  return log_binom_pmf(a, b, log_rational(p), log_rational(1 - p), lf);
}

Rational exact_binom_pmf(int a, int b, const Rational& p) {
  if (a < 0 || a > b) return Rational(0);
  Rational r(big_choose(b, a));
  for (int i = 0; i < a; ++i) r *= p;
  const Rational q = 1 - p;
  for (int i = 0; i < b - a; ++i) r *= q;
  return r;
}

double log_sum_exp(std::span<const double> xs) {
  double mx = kLogZero;
  for (double x : xs) mx = std::max(mx, x);
  if (mx == kLogZero) return kLogZero;
  double acc = 0.0;
  for (double x : xs) acc += std::exp(x - mx);
  return mx + std::log(acc);
}

PascalTable::PascalTable(int max_n) {
  if (max_n < 0 || max_n > 1000) {
    throw input_error("double-precision Pascal table limited to n <= 1000");
  }
  offsets_.resize(max_n + 1);
  rows_.resize(static_cast<std::size_t>(max_n + 1) * (max_n + 2) / 2);
  std::size_t off = 0;
  for (int n = 0; n <= max_n; ++n) {
    offsets_[n] = off;
    double* row = rows_.data() + off;
    row[0] = 1.0;
    row[n] = 1.0;
    if (n >= 2) {
      const double* prev = rows_.data() + offsets_[n - 1];
      for (int k = 1; k < n; ++k) row[k] = prev[k - 1] + prev[k];
    }
    off += n + 1;
  }
}

std::vector<BigInt> big_binomial_row(int n) {
  std::vector<BigInt> row(n + 1);
  row[0] = 1;
  for (int k = 1; k <= n; ++k) row[k] = row[k - 1] * (n - k + 1) / k;
  return row;
}

BigInt big_choose(int n, int k) {
  if (k < 0 || k > n) return BigInt(0);
  k = std::min(k, n - k);
  BigInt r = 1;
  for (int i = 1; i <= k; ++i) r = r * (n - k + i) / i;
  return r;
}

}  // namespace rxl
