#include "rxl/likelihood.hpp"

#include <algorithm>
#include <cmath>

namespace rxl {

namespace {

inline double log_choose_safe(int n, int k, const LogFactorialTable& lf) {
  if (k < 0 || k > n) return kLogZero;
  return lf.ln_choose(n, k);
}

void check_same_sample(const TypeConfig& theta, const DataConfig& g) {
  validate_type_config(theta);
  validate_data_config(g);
  if (theta.sample_size() != g.sample_size()) {
    throw input_error("type and data configurations describe different sample sizes");
  }
}

BigInt big_pow(BigInt base, int exp) {
  BigInt r = 1;
  while (exp > 0) {
    if (exp & 1) r *= base;
    base *= base;
    exp >>= 1;
  }
  return r;
}

}  // namespace

std::pair<int, int> ell_range(const TypeConfig& theta, const DataConfig& g) {
  const int s = theta.sample_size();
  const int sum_g = g.g1 + g.g2 + g.g3;
  const int lo = std::max({0, g.g2 - theta.defiers, theta.never + sum_g - s,
                           theta.never + theta.compliers + g.g2 + g.g3 - s});
  const int hi = std::min({theta.never, g.g2,
                           theta.never + theta.compliers + sum_g - s,
                           g.g2 + g.g3 - theta.defiers});
  return {lo, hi};
}

ArmSplit arm_split_at(const TypeConfig& theta, const DataConfig& g, int ell) {
  const int s = theta.sample_size();
  return ArmSplit{
      ell,
      g.g2 - ell,
      theta.never + theta.compliers + g.g1 + g.g2 + g.g3 - s - ell,
      s + ell - theta.never - theta.compliers - g.g2 - g.g3,
  };
}

bool feasible(const TypeConfig& theta, const DataConfig& g,
              const RandomizationSpec& spec) {
  check_same_sample(theta, g);
  spec.validate_for(g.sample_size());
  if (spec.is_urn() && g.intervention_arm() != spec.m()) return false;
  const auto [lo, hi] = ell_range(theta, g);
  return lo <= hi;
}

AssignmentPmf iid_assignment_pmf(const Rational& p,
                                 std::shared_ptr<const LogFactorialTable> lf) {
  const double log_p = log_rational(p);
  const double log_1mp = log_rational(1 - p);
  return [log_p, log_1mp, lf](const ArmSplit& n, const TypeConfig& theta) {
    return log_binom_pmf(n.n12, theta.never, log_p, log_1mp, *lf) +
           log_binom_pmf(n.n22, theta.defiers, log_p, log_1mp, *lf) +
           log_binom_pmf(n.n31, theta.compliers, log_p, log_1mp, *lf) +
           log_binom_pmf(n.n41, theta.always, log_p, log_1mp, *lf);
  };
}

AssignmentPmf urn_assignment_pmf(int m,
                                 std::shared_ptr<const LogFactorialTable> lf) {
  return [m, lf](const ArmSplit& n, const TypeConfig& theta) {
    if (n.intervention_total() != m) return kLogZero;
    const double num = log_choose_safe(theta.never, n.n12, *lf) +
                       log_choose_safe(theta.defiers, n.n22, *lf) +
                       log_choose_safe(theta.compliers, n.n31, *lf) +
                       log_choose_safe(theta.always, n.n41, *lf);
    return num - lf->ln_choose(theta.sample_size(), m);
  };
}

LikelihoodValue general_likelihood(const TypeConfig& theta, const DataConfig& g,
                                   const RandomizationSpec& spec,
                                   const AssignmentPmf& f) {
  check_same_sample(theta, g);
  spec.validate_for(g.sample_size());
  const auto [lo, hi] = ell_range(theta, g);
  if (lo > hi) return LikelihoodValue::zero();

  // Ascending ell with a running max-shifted accumulator keeps the result
  // independent of how callers parallelize around this function.
  std::vector<double> terms;
  terms.reserve(hi - lo + 1);
  for (int ell = lo; ell <= hi; ++ell) {
    terms.push_back(f(arm_split_at(theta, g, ell), theta));
  }
  return LikelihoodValue::from_log(log_sum_exp(terms));
}

LikelihoodEngine::LikelihoodEngine(int s, RandomizationSpec spec)
    : s_(s), spec_(std::move(spec)) {
  if (s < 1 || s > kMaxSampleSize) {
    throw input_error("sample size out of supported range");
  }
  spec_.validate_for(s);
  lf_ = std::make_shared<LogFactorialTable>(s);
  if (s <= 1000) pascal_ = std::make_shared<PascalTable>(s);

  log_arm_prefactor_.resize(s + 1);
  if (spec_.is_iid()) {
    const double log_p = log_rational(spec_.p());
    const double log_1mp = log_rational(1 - spec_.p());
    for (int arm = 0; arm <= s; ++arm) {
      log_arm_prefactor_[arm] = arm * log_p + (s - arm) * log_1mp;
    }
  } else {
    const double log_csm = lf_->ln_choose(s, spec_.m());
    for (int arm = 0; arm <= s; ++arm) {
      log_arm_prefactor_[arm] = arm == spec_.m() ? -log_csm : kLogZero;
    }
  }
}

double LikelihoodEngine::log_prefactor(const DataConfig& g) const {
  return log_arm_prefactor_[g.intervention_arm()];
}

Rational LikelihoodEngine::exact_prefactor(const DataConfig& g) const {
  const int arm = g.intervention_arm();
  if (spec_.is_urn()) {
    if (arm != spec_.m()) return Rational(0);
    return Rational(1) / Rational(big_choose(s_, spec_.m()));
  }
  const BigInt a = numerator(spec_.p());
  const BigInt b = denominator(spec_.p());
  return Rational(big_pow(a, arm) * big_pow(b - a, s_ - arm), big_pow(b, s_));
}

double LikelihoodEngine::sum_t(const TypeConfig& theta, const DataConfig& g) const {
  if (!pascal_) {
    throw resource_error("coefficient sums need the Pascal table (s <= 1000)");
  }
  const auto [lo, hi] = ell_range(theta, g);
  if (lo > hi) return 0.0;
  const double* r1 = pascal_->row(theta.never);
  const double* r2 = pascal_->row(theta.defiers);
  const double* r3 = pascal_->row(theta.compliers);
  const double* r4 = pascal_->row(theta.always);
  const int a = theta.never + theta.compliers + g.g1 + g.g2 + g.g3 - s_;
  const int b = s_ - theta.never - theta.compliers - g.g2 - g.g3;
  double acc = 0.0;
  for (int ell = lo; ell <= hi; ++ell) {
    acc += r1[ell] * r2[g.g2 - ell] * r3[a - ell] * r4[b + ell];
  }
  return acc;
}

BigInt LikelihoodEngine::sum_t_exact(const TypeConfig& theta,
                                     const DataConfig& g) const {
  const auto [lo, hi] = ell_range(theta, g);
  if (lo > hi) return BigInt(0);
  const auto r1 = big_binomial_row(theta.never);
  const auto r2 = big_binomial_row(theta.defiers);
  const auto r3 = big_binomial_row(theta.compliers);
  const auto r4 = big_binomial_row(theta.always);
  const int a = theta.never + theta.compliers + g.g1 + g.g2 + g.g3 - s_;
  const int b = s_ - theta.never - theta.compliers - g.g2 - g.g3;
  BigInt acc = 0;
  for (int ell = lo; ell <= hi; ++ell) {
    acc += r1[ell] * r2[g.g2 - ell] * r3[a - ell] * r4[b + ell];
  }
  return acc;
}

double LikelihoodEngine::log_likelihood(const TypeConfig& theta,
                                        const DataConfig& g) const {
  check_same_sample(theta, g);
  if (theta.sample_size() != s_) {
    throw input_error("configuration does not match engine sample size");
  }
  if (spec_.is_urn() && g.intervention_arm() != spec_.m()) return kLogZero;
  if (pascal_) {
    const double t = sum_t(theta, g);
    if (t == 0.0) return kLogZero;
    return std::log(t) + log_prefactor(g);
  }
  // Large-s fallback: log-space summation, immune to coefficient overflow.
  const auto [lo, hi] = ell_range(theta, g);
  if (lo > hi) return kLogZero;
  std::vector<double> terms;
  terms.reserve(hi - lo + 1);
  for (int ell = lo; ell <= hi; ++ell) {
    const ArmSplit n = arm_split_at(theta, g, ell);
    terms.push_back(lf_->ln_choose(theta.never, n.n12) +
                    lf_->ln_choose(theta.defiers, n.n22) +
                    lf_->ln_choose(theta.compliers, n.n31) +
                    lf_->ln_choose(theta.always, n.n41));
  }
  return log_sum_exp(terms) + log_prefactor(g);
}

Rational LikelihoodEngine::exact_likelihood(const TypeConfig& theta,
                                            const DataConfig& g) const {
  check_same_sample(theta, g);
  if (spec_.is_urn() && g.intervention_arm() != spec_.m()) return Rational(0);
  const BigInt t = sum_t_exact(theta, g);
  if (t == 0) return Rational(0);
  return Rational(t) * exact_prefactor(g);
}

LikelihoodValue LikelihoodEngine::likelihood(const TypeConfig& theta,
                                             const DataConfig& g,
                                             bool exact) const {
  if (exact) return LikelihoodValue::from_exact(exact_likelihood(theta, g));
  return LikelihoodValue::from_log(log_likelihood(theta, g));
}

bool LikelihoodEngine::feasible(const TypeConfig& theta, const DataConfig& g) const {
  return rxl::feasible(theta, g, spec_);
}

std::pair<int, int> LikelihoodEngine::theta3_interval(const DataConfig& g, int t1,
                                                      int t2) const {
  // Projection of the ell polytope onto theta3 for fixed (g, theta1, theta2).
  if (t2 > g.g2 + g.g3 || g.g2 > t1 + t2 || t1 + g.g1 + g.g3 > s_ ||
      t1 + t2 + g.g1 > s_) {
    return {1, 0};
  }
  const int sum_g = g.g1 + g.g2 + g.g3;
  const int lo = std::max({0, s_ - sum_g - t1, s_ - t1 - t2 - g.g1 - g.g3});
  const int hi = std::min({s_ - t1 - t2, s_ - g.g2 - g.g3, s_ - t1 - g.g3});
  return {lo, hi};
}

std::int64_t LikelihoodEngine::compatible_count(const DataConfig& g) const {
  validate_data_config(g);
  if (g.sample_size() != s_) {
    throw input_error("data configuration does not match engine sample size");
  }
  if (spec_.is_urn() && g.intervention_arm() != spec_.m()) return 0;
  std::int64_t count = 0;
  for (int t1 = 0; t1 <= s_; ++t1) {
    for (int t2 = 0; t2 <= s_ - t1; ++t2) {
      const auto [lo, hi] = theta3_interval(g, t1, t2);
      if (hi >= lo) count += hi - lo + 1;
    }
  }
  return count;
}

LikelihoodValue iid_likelihood(const TypeConfig& theta, const DataConfig& g,
                               const Rational& p, bool exact) {
  check_same_sample(theta, g);
  LikelihoodEngine engine(theta.sample_size(), RandomizationSpec::iid(p));
  return engine.likelihood(theta, g, exact);
}

LikelihoodValue urn_likelihood(const TypeConfig& theta, const DataConfig& g,
                               int m, bool exact) {
  check_same_sample(theta, g);
  LikelihoodEngine engine(theta.sample_size(),
                          RandomizationSpec::urn(m, theta.sample_size()));
  return engine.likelihood(theta, g, exact);
}

std::int64_t compatible_count(const DataConfig& g, const RandomizationSpec& spec) {
  LikelihoodEngine engine(g.sample_size(), spec);
  return engine.compatible_count(g);
}

}  // namespace rxl
