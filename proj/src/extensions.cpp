#include "rxl/extensions.hpp"

#include <omp.h>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <unordered_map>

#include "rxl/lattice.hpp"

namespace rxl {

namespace {

constexpr double kLambdaTieTol = 1e-9;

Rational integer_or_fail(const Rational& r, bool* ok) {
  if (denominator(r) != 1) {
    *ok = false;
    return Rational(0);
  }
  *ok = true;
  return r;
}

double normal_sf(double z) { return 0.5 * std::erfc(z / std::sqrt(2.0)); }

}  // namespace

SharePair SharePair::of(const DataConfig& g) {
  validate_data_config(g);
  SharePair s;
  if (g.g1 + g.g2 > 0) s.treated_intervention = Rational(g.g1, g.g1 + g.g2);
  if (g.g3 + g.g4 > 0) s.treated_control = Rational(g.g3, g.g3 + g.g4);
  return s;
}

std::pair<Rational, Rational> bfh_lower_bounds(const SharePair& shares) {
  if (!shares.both_defined()) {
    throw input_error("share-based bounds require both arms nonempty");
  }
  const Rational effect = *shares.treated_intervention - *shares.treated_control;
  return {std::max(Rational(-effect), Rational(0)),
          std::max(effect, Rational(0))};
}

std::vector<DataConfig> share_preimage(const SharePair& shares, int s) {
  const auto& v = shares.treated_intervention;
  const auto& c = shares.treated_control;
  if (!v && !c) throw input_error("share pair has no defined arm");
  if ((v && (*v < 0 || *v > 1)) || (c && (*c < 0 || *c > 1))) {
    throw input_error("shares must lie in [0, 1]");
  }

  // An undefined share pins its arm empty: only k = s (control empty) can
  // produce (v, undefined) and only k = 0 can produce (undefined, c).
  const int k_lo = v ? (c ? 1 : s) : 0;
  const int k_hi = c ? (v ? s - 1 : 0) : s;

  std::vector<DataConfig> out;
  for (int k = k_lo; k <= k_hi; ++k) {
    bool ok = true;
    int g1 = 0, g3 = 0;
    if (v) {
      const Rational r1 = integer_or_fail(*v * k, &ok);
      if (!ok) continue;
      g1 = static_cast<int>(r1.convert_to<long>());
      if (g1 > k) continue;
    }
    if (c) {
      const Rational r3 = integer_or_fail(*c * (s - k), &ok);
      if (!ok) continue;
      g3 = static_cast<int>(r3.convert_to<long>());
      if (g3 > s - k) continue;
    }
    out.push_back(DataConfig{g1, k - g1, g3, s - k - g3});
  }
  return out;
}

LikelihoodValue limited_data_likelihood(const TypeConfig& theta,
                                        const SharePair& shares,
                                        const RandomizationSpec& spec, bool exact) {
  validate_type_config(theta);
  const int s = theta.sample_size();
  spec.validate_for(s);
  LikelihoodEngine engine(s, spec);
  const std::vector<DataConfig> preimage = share_preimage(shares, s);
  if (exact) {
    Rational acc(0);
    for (const DataConfig& g : preimage) acc += engine.exact_likelihood(theta, g);
    return LikelihoodValue::from_exact(std::move(acc));
  }
  std::vector<double> terms;
  terms.reserve(preimage.size());
  for (const DataConfig& g : preimage) terms.push_back(engine.log_likelihood(theta, g));
  return LikelihoodValue::from_log(log_sum_exp(terms));
}

ShareClassIndex::ShareClassIndex(int s) : s_(s) {
  const std::int64_t n = lattice_size(s);
  class_of_.resize(n);
  std::unordered_map<std::uint64_t, std::int32_t> ids;
  std::int64_t r = 0;
  for (const DataConfig& g : enumerate_data_configs(s)) {
    Meta m{-1, 0, -1, 0};
    if (g.g1 + g.g2 > 0) {
      const int d = std::gcd(g.g1, g.g1 + g.g2);
      m.vn = g.g1 / d;
      m.vd = (g.g1 + g.g2) / d;
    }
    if (g.g3 + g.g4 > 0) {
      const int d = std::gcd(g.g3, g.g3 + g.g4);
      m.cn = g.g3 / d;
      m.cd = (g.g3 + g.g4) / d;
    }
    const std::uint64_t key = ((static_cast<std::uint64_t>(m.vn + 1) * 2101 +
                                static_cast<std::uint64_t>(m.vd)) *
                                   2101 +
                               static_cast<std::uint64_t>(m.cn + 1)) *
                                  2101 +
                              static_cast<std::uint64_t>(m.cd);
    auto [it, inserted] = ids.try_emplace(key, static_cast<std::int32_t>(class_meta_.size()));
    if (inserted) {
      class_meta_.push_back(m);
      if (m.vd != 0 && m.cd != 0) ++defined_classes_;
    }
    class_of_[r++] = it->second;
  }
}

std::int32_t ShareClassIndex::class_of(const SharePair& shares) const {
  const auto preimage = share_preimage(shares, s_);
  if (preimage.empty()) return -1;
  return class_of_[rank_of(preimage.front())];
}

SharePair ShareClassIndex::shares_of_class(std::int32_t cls) const {
  const Meta& m = class_meta_[cls];
  SharePair out;
  if (m.vd != 0) out.treated_intervention = Rational(m.vn, m.vd);
  if (m.cd != 0) out.treated_control = Rational(m.cn, m.cd);
  return out;
}

std::vector<std::int64_t> ShareClassIndex::class_member_ranks(std::int32_t cls) const {
  std::vector<std::int64_t> out;
  for (std::int64_t r = 0; r < static_cast<std::int64_t>(class_of_.size()); ++r) {
    if (class_of_[r] == cls) out.push_back(r);
  }
  return out;
}

namespace {

// Likelihood of theta summed within every share class: a dense per-class
// accumulation of the probability scattered over the lattice.
class ClassMassAccumulator {
 public:
  ClassMassAccumulator(const LikelihoodEngine& eng, const RankIndex& ri,
                       const ShareClassIndex& classes)
      : eng_(eng),
        ri_(ri),
        classes_(classes),
        scratch_(classes.class_count(), 0.0) {
    const int s = eng.sample_size();
    pow_p_.assign(s + 1, 1.0);
    pow_q_.assign(s + 1, 1.0);
    if (eng.spec().is_iid()) {
      const double p = to_double(eng.spec().p());
      for (int i = 1; i <= s; ++i) {
        pow_p_[i] = pow_p_[i - 1] * p;
        pow_q_[i] = pow_q_[i - 1] * (1.0 - p);
      }
      inv_csm_ = 1.0;
    } else {
      inv_csm_ = std::exp(
          -eng.log_factorials().ln_choose(s, eng.spec().m()));
    }
  }

  // Calls sink(class_id, probability mass) for every class theta can reach,
  // then resets the scratch.
  template <class Sink>
  void accumulate(const TypeConfig& th, Sink&& sink) {
    touched_.clear();
    const auto scatter = [&](std::int64_t r, double w) {
      const std::int32_t cls = classes_.class_of_rank(r);
      if (scratch_[cls] == 0.0) touched_.push_back(cls);
      scratch_[cls] += w;
    };
    if (eng_.spec().is_iid()) {
      buffers_.b1 = make_pmf(th.never);
      buffers_.b2 = make_pmf(th.defiers);
      buffers_.b3 = make_pmf(th.compliers);
      buffers_.b4 = make_pmf(th.always);
      detail_iterate_iid(th, scatter);
    } else {
      detail_iterate_urn(th, scatter);
    }
    for (std::int32_t cls : touched_) {
      sink(cls, scratch_[cls] * (eng_.spec().is_iid() ? 1.0 : inv_csm_));
      scratch_[cls] = 0.0;
    }
  }

 private:
  std::vector<double> make_pmf(int count) {
    const double* row = eng_.pascal().row(count);
    std::vector<double> b(count + 1);
    for (int n = 0; n <= count; ++n) b[n] = row[n] * pow_p_[n] * pow_q_[count - n];
    return b;
  }

  template <class F>
  void detail_iterate_iid(const TypeConfig& th, F&& f) {
    const double* b1 = buffers_.b1.data();
    const double* b2 = buffers_.b2.data();
    const double* b3 = buffers_.b3.data();
    const double* b4 = buffers_.b4.data();
    for (int n22 = 0; n22 <= th.defiers; ++n22) {
      for (int n41 = 0; n41 <= th.always; ++n41) {
        const double w24 = b2[n22] * b4[n41];
        const int g3 = (th.defiers - n22) + (th.always - n41);
        for (int n31 = 0; n31 <= th.compliers; ++n31) {
          const int g1 = n31 + n41;
          const double w243 = w24 * b3[n31];
          const std::int64_t base = ri_.base(g1) + g3;
          const std::int32_t* rest = ri_.rest_row(g1) + n22;
          for (int n12 = 0; n12 <= th.never; ++n12) {
            f(base + rest[n12], w243 * b1[n12]);
          }
        }
      }
    }
  }

  template <class F>
  void detail_iterate_urn(const TypeConfig& th, F&& f) {
    const int m = eng_.spec().m();
    const PascalTable& pascal = eng_.pascal();
    const double* c1 = pascal.row(th.never);
    const double* c2 = pascal.row(th.defiers);
    const double* c3 = pascal.row(th.compliers);
    const double* c4 = pascal.row(th.always);
    for (int n22 = 0; n22 <= std::min(th.defiers, m); ++n22) {
      for (int n41 = 0; n41 <= std::min(th.always, m - n22); ++n41) {
        const double w24 = c2[n22] * c4[n41];
        const int g3 = (th.defiers - n22) + (th.always - n41);
        const int rem = m - n22 - n41;
        const int lo = std::max(0, rem - th.compliers);
        const int hi = std::min(th.never, rem);
        for (int n12 = lo; n12 <= hi; ++n12) {
          const int n31 = rem - n12;
          const int g1 = n31 + n41;
          f(ri_.base(g1) + ri_.rest_row(g1)[n12 + n22] + g3,
            w24 * c1[n12] * c3[n31]);
        }
      }
    }
  }

  struct Buffers {
    std::vector<double> b1, b2, b3, b4;
  };

  const LikelihoodEngine& eng_;
  const RankIndex& ri_;
  const ShareClassIndex& classes_;
  std::vector<double> scratch_;
  std::vector<std::int32_t> touched_;
  std::vector<double> pow_p_, pow_q_;
  double inv_csm_ = 1.0;
  Buffers buffers_;
};

// Max over a theta range of the limited-data likelihood at one share pair,
// with exact certification of near ties.
struct ClassMaxScan {
  double best = 0.0;
  Rational exact;
  std::vector<TypeConfig> argmax;
};

template <class Range>
ClassMaxScan scan_class_max(const LikelihoodEngine& eng,
                            const std::vector<DataConfig>& preimage,
                            const Range& thetas) {
  struct Cand {
    TypeConfig th;
    double mass;
  };
  ClassMaxScan out;
  std::vector<Cand> candidates;
  for (const TypeConfig& th : thetas) {
    double mass = 0.0;
    for (const DataConfig& g : preimage) {
      const double ll = eng.log_likelihood(th, g);
      if (ll != kLogZero) mass += std::exp(ll);
    }
    if (mass <= 0.0) continue;
    if (mass >= out.best * (1.0 - kLambdaTieTol)) {
      if (mass > out.best) {
        out.best = mass;
        std::erase_if(candidates, [&](const Cand& c) {
          return c.mass < out.best * (1.0 - kLambdaTieTol);
        });
      }
      candidates.push_back({th, mass});
    }
  }
  if (out.best == 0.0) return out;
  std::vector<Rational> exact;
  std::vector<TypeConfig> kept;
  for (const Cand& cand : candidates) {
    if (cand.mass < out.best * (1.0 - kLambdaTieTol)) continue;
    Rational mass(0);
    for (const DataConfig& g : preimage) {
      mass += eng.exact_likelihood(cand.th, g);
    }
    if (mass > out.exact) out.exact = mass;
    exact.push_back(std::move(mass));
    kept.push_back(cand.th);
  }
  for (std::size_t i = 0; i < kept.size(); ++i) {
    if (exact[i] == out.exact) out.argmax.push_back(kept[i]);
  }
  return out;
}

}  // namespace

TestResult limited_data_p_value(const SharePair& observed, const HypothesisSet& h0,
                                const RandomizationSpec& spec, int threads) {
  const int s = h0.sample_size();
  spec.validate_for(s);
  LikelihoodEngine eng(s, spec);
  const RankIndex ri(s);
  const std::vector<DataConfig> preimage = share_preimage(observed, s);
  if (preimage.empty()) {
    throw input_error("observed share pair is not realizable at this sample size");
  }

  TestResult result;

  // Numerator and denominator at the observed share pair, exact.
  const ClassMaxScan num =
      scan_class_max(eng, preimage, h0.members());
  const ClassMaxScan den =
      scan_class_max(eng, preimage, enumerate_type_configs(s));
  result.argmax_null = num.argmax;
  result.argmax_global = den.argmax;
  result.log_denominator = den.best > 0 ? std::log(den.best) : kLogZero;
  if (num.best == 0.0) {
    result.lambda = 0.0;
    result.log_numerator = kLogZero;
  } else {
    result.log_numerator = std::log(num.best);
    result.lambda = num.exact == den.exact
                        ? 1.0
                        : std::min(1.0, to_double(num.exact / den.exact));
  }
  if (result.lambda >= 1.0) {
    result.p_value = 1.0;
    return result;
  }

  // Statistic-space pass: per-class global max, null max, then the region.
  const ShareClassIndex classes(s);
  const std::int64_t n_cls = classes.class_count();
  const std::int32_t obs_cls = classes.class_of(observed);

  std::vector<double> global_max(n_cls, 0.0), null_max(n_cls, 0.0);
  const int nt = threads > 0 ? threads : omp_get_max_threads();

  const std::int64_t lattice_n = lattice_size(s);
#pragma omp parallel num_threads(nt)
  {
    ClassMassAccumulator acc(eng, ri, classes);
    std::vector<double> local(n_cls, 0.0);
#pragma omp for schedule(dynamic, 64) nowait
    for (std::int64_t tr = 0; tr < lattice_n; ++tr) {
      const TypeConfig th = type_config_at(s, tr);
      acc.accumulate(th, [&](std::int32_t cls, double mass) {
        local[cls] = std::max(local[cls], mass);
      });
    }
#pragma omp critical
    for (std::int64_t c = 0; c < n_cls; ++c) {
      global_max[c] = std::max(global_max[c], local[c]);
    }
  }
#pragma omp parallel num_threads(nt)
  {
    ClassMassAccumulator acc(eng, ri, classes);
    std::vector<double> local(n_cls, 0.0);
#pragma omp for schedule(dynamic, 16) nowait
    for (std::size_t i = 0; i < h0.members().size(); ++i) {
      acc.accumulate(h0.members()[i], [&](std::int32_t cls, double mass) {
        local[cls] = std::max(local[cls], mass);
      });
    }
#pragma omp critical
    for (std::int64_t c = 0; c < n_cls; ++c) {
      null_max[c] = std::max(null_max[c], local[c]);
    }
  }

  const double lambda_obs = result.lambda;
  std::vector<double> cls_mask(n_cls, 0.0);
  for (std::int64_t c = 0; c < n_cls; ++c) {
    if (global_max[c] <= 0.0) continue;
    const double lam = null_max[c] / global_max[c];
    if (lam <= lambda_obs * (1.0 + kLambdaTieTol)) cls_mask[c] = 1.0;
  }
  cls_mask[obs_cls] = 1.0;  // the observed statistic is always in its region

  std::vector<double> mass(h0.members().size(), 0.0);
#pragma omp parallel num_threads(nt)
  {
    ClassMassAccumulator acc(eng, ri, classes);
#pragma omp for schedule(dynamic, 16)
    for (std::size_t i = 0; i < h0.members().size(); ++i) {
      double total = 0.0;
      acc.accumulate(h0.members()[i], [&](std::int32_t cls, double m) {
        total += m * cls_mask[cls];
      });
      mass[i] = total;
    }
  }
  double p = 0.0;
  for (double m : mass) p = std::max(p, m);
  result.p_value = std::min(1.0, p);
  return result;
}

void validate_population_config(const PopulationConfig& pi) {
  if (pi.pi1 < 0 || pi.pi2 < 0 || pi.pi3 < 0 || pi.pi4() < 0) {
    throw input_error("population shares must be nonnegative and sum to one");
  }
}

namespace {

Rational rational_pow(const Rational& base, int exp) {
  Rational r(1);
  for (int i = 0; i < exp; ++i) r *= base;
  return r;
}

}  // namespace

LikelihoodValue asymptotic_likelihood_iid(const PopulationConfig& pi,
                                          const DataConfig& g, const Rational& p) {
  validate_population_config(pi);
  validate_data_config(g);
  if (p <= 0 || p >= 1) throw input_error("iid randomization requires 0 < p < 1");
  const int s = g.sample_size();
  const Rational coeff(big_choose(s, g.g1) * big_choose(s - g.g1, g.g2) *
                       big_choose(s - g.g1 - g.g2, g.g3));
  Rational value = coeff;
  value *= rational_pow(p, g.g1 + g.g2) * rational_pow(1 - p, g.g3 + g.g4);
  value *= rational_pow(1 - pi.pi1 - pi.pi2, g.g1) * rational_pow(pi.pi1 + pi.pi2, g.g2);
  value *= rational_pow(1 - pi.pi1 - pi.pi3, g.g3) * rational_pow(pi.pi1 + pi.pi3, g.g4);
  return LikelihoodValue::from_exact(std::move(value));
}

LikelihoodValue asymptotic_likelihood_urn(const PopulationConfig& pi,
                                          const DataConfig& g, int m) {
  validate_population_config(pi);
  validate_data_config(g);
  if (g.intervention_arm() != m) {
    throw input_error("urn likelihood requires g1+g2 = m");
  }
  const int s = g.sample_size();
  Rational value(big_choose(m, g.g1) * big_choose(s - m, g.g3));
  value *= rational_pow(1 - pi.pi1 - pi.pi2, g.g1) * rational_pow(pi.pi1 + pi.pi2, m - g.g1);
  value *= rational_pow(1 - pi.pi1 - pi.pi3, g.g3) *
           rational_pow(pi.pi1 + pi.pi3, s - m - g.g3);
  return LikelihoodValue::from_exact(std::move(value));
}

PopulationMle population_mle(const DataConfig& g) {
  validate_data_config(g);
  if (g.g1 + g.g2 == 0 || g.g3 + g.g4 == 0) {
    throw input_error("population MLE requires both arms nonempty");
  }
  PopulationMle out;
  out.v_hat = Rational(g.g1, g.g1 + g.g2);
  out.c_hat = Rational(g.g3, g.g3 + g.g4);
  out.effect = out.v_hat - out.c_hat;
  out.pi1_min = std::max(Rational(0), Rational(1 - out.v_hat - out.c_hat));
  out.pi1_max = std::min(Rational(1 - out.v_hat), Rational(1 - out.c_hat));

  auto member_at = [&](const Rational& pi1) {
    return PopulationConfig{pi1, 1 - pi1 - out.v_hat, 1 - pi1 - out.c_hat};
  };
  out.representative = member_at(out.pi1_max);
  if (out.effect >= 0) {
    out.zero_defier_exists = true;
    out.zero_defier = member_at(1 - out.v_hat);
  }
  if (out.effect <= 0) {
    out.zero_complier_exists = true;
    out.zero_complier = member_at(1 - out.c_hat);
  }
  return out;
}

PopulationConfig zero_defier_transform(const PopulationConfig& pi) {
  return PopulationConfig{pi.pi1 + pi.pi2, Rational(0), pi.pi3 - pi.pi2};
}

TwoProportionResult two_proportion_test(const DataConfig& g) {
  validate_data_config(g);
  const int n1 = g.g1 + g.g2;
  const int n0 = g.g3 + g.g4;
  if (n1 == 0 || n0 == 0) {
    throw input_error("two-proportion test requires both arms nonempty");
  }
  const double v = static_cast<double>(g.g1) / n1;
  const double c = static_cast<double>(g.g3) / n0;
  TwoProportionResult out;
  out.estimate = v - c;
  out.std_error = std::sqrt(v * (1 - v) / n1 + c * (1 - c) / n0);
  if (out.estimate == 0.0) {
    out.z = 0.0;
    out.p_value = 1.0;
    return out;
  }
  if (out.std_error == 0.0) {
    out.z = out.estimate > 0 ? std::numeric_limits<double>::infinity()
                             : -std::numeric_limits<double>::infinity();
    out.p_value = 0.0;
    return out;
  }
  out.z = out.estimate / out.std_error;
  out.p_value = 2.0 * normal_sf(std::abs(out.z));
  return out;
}

}  // namespace rxl
