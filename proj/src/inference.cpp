#include "rxl/inference.hpp"

#include <omp.h>

#include <algorithm>
#include <cmath>
#include <span>

#include "rxl/lattice.hpp"

namespace rxl {

namespace {

constexpr double kLambdaTieTol = 1e-9;   // relative, ties included
constexpr double kPolishWindow = 3e-9;   // exact-resolution band around the cut

// Iterates every assignment tuple of theta under iid randomization, calling
// f(g_rank, w1234). The per-type weight arrays decide what is accumulated:
// Pascal rows give coefficient sums, pmf arrays give probabilities.
template <class F>
void for_each_tuple_iid(const RankIndex& ri, const TypeConfig& th, const double* b1,
                        const double* b2, const double* b3, const double* b4, F&& f) {
  for (int n22 = 0; n22 <= th.defiers; ++n22) {
    for (int n41 = 0; n41 <= th.always; ++n41) {
      const double w24 = b2[n22] * b4[n41];
      const int g3 = (th.defiers - n22) + (th.always - n41);
      for (int n31 = 0; n31 <= th.compliers; ++n31) {
        const int g1 = n31 + n41;
        const double w243 = w24 * b3[n31];
        const std::int64_t base = ri.base(g1) + g3;
        const std::int32_t* rest = ri.rest_row(g1);
        const std::int32_t* rest2 = rest + n22;
        for (int n12 = 0; n12 <= th.never; ++n12) {
          f(base + rest2[n12], w243 * b1[n12]);
        }
      }
    }
  }
}

// Urn counterpart: the intervention arm has exactly m members, which pins
// n31 once the other three counts are chosen.
template <class F>
void for_each_tuple_urn(const RankIndex& ri, const TypeConfig& th, int m,
                        const double* b1, const double* b2, const double* b3,
                        const double* b4, F&& f) {
  for (int n22 = 0; n22 <= std::min(th.defiers, m); ++n22) {
    for (int n41 = 0; n41 <= std::min(th.always, m - n22); ++n41) {
      const double w24 = b2[n22] * b4[n41];
      const int g3 = (th.defiers - n22) + (th.always - n41);
      const int rem = m - n22 - n41;  // n12 + n31
      const int lo = std::max(0, rem - th.compliers);
      const int hi = std::min(th.never, rem);
      for (int n12 = lo; n12 <= hi; ++n12) {
        const int n31 = rem - n12;
        const int g1 = n31 + n41;
        const std::int64_t rank = ri.base(g1) + ri.rest_row(g1)[n12 + n22] + g3;
        f(rank, w24 * b1[n12] * b3[n31]);
      }
    }
  }
}

struct TypeRows {
  const double* b1;
  const double* b2;
  const double* b3;
  const double* b4;
};

TypeRows coefficient_rows(const PascalTable& pascal, const TypeConfig& th) {
  return {pascal.row(th.never), pascal.row(th.defiers), pascal.row(th.compliers),
          pascal.row(th.always)};
}

// Scratch for per-type pmf arrays, reused across members within a thread.
struct PmfBuffers {
  std::vector<double> b1, b2, b3, b4;

  TypeRows fill_iid(const PascalTable& pascal, const TypeConfig& th,
                    std::span<const double> pow_p, std::span<const double> pow_q) {
    auto fill = [&](std::vector<double>& b, int count) {
      const double* row = pascal.row(count);
      b.resize(count + 1);
      for (int n = 0; n <= count; ++n) b[n] = row[n] * pow_p[n] * pow_q[count - n];
    };
    fill(b1, th.never);
    fill(b2, th.defiers);
    fill(b3, th.compliers);
    fill(b4, th.always);
    return {b1.data(), b2.data(), b3.data(), b4.data()};
  }
};

template <class F>
void for_each_tuple(const LikelihoodEngine& eng, const RankIndex& ri,
                    const TypeConfig& th, const TypeRows& rows, F&& f) {
  if (eng.spec().is_iid()) {
    for_each_tuple_iid(ri, th, rows.b1, rows.b2, rows.b3, rows.b4,
                       std::forward<F>(f));
  } else {
    for_each_tuple_urn(ri, th, eng.spec().m(), rows.b1, rows.b2, rows.b3, rows.b4,
                       std::forward<F>(f));
  }
}

// Per-g maximum of the coefficient sum T(theta, g) over the null members.
std::vector<double> null_overlay(const LikelihoodEngine& eng, const RankIndex& ri,
                                 std::span<const TypeConfig> members, int threads) {
  const std::int64_t n = lattice_size(eng.sample_size());
  std::vector<double> overlay(n, 0.0);
  const int nt = threads > 0 ? threads : omp_get_max_threads();
#pragma omp parallel num_threads(nt)
  {
    std::vector<double> local(n, 0.0), scratch(n, 0.0);
    std::vector<std::int64_t> touched;
#pragma omp for schedule(dynamic, 16) nowait
    for (std::size_t i = 0; i < members.size(); ++i) {
      const TypeConfig& th = members[i];
      for_each_tuple(eng, ri, th, coefficient_rows(eng.pascal(), th),
                     [&](std::int64_t r, double w) {
                       if (scratch[r] == 0.0) touched.push_back(r);
                       scratch[r] += w;
                     });
      for (std::int64_t r : touched) {
        local[r] = std::max(local[r], scratch[r]);
        scratch[r] = 0.0;
      }
      touched.clear();
    }
#pragma omp critical
    for (std::int64_t r = 0; r < n; ++r) {
      overlay[r] = std::max(overlay[r], local[r]);
    }
  }
  return overlay;
}

// P(G in region | theta) for every null member; region is a 0/1 mask.
std::vector<double> region_mass(const LikelihoodEngine& eng, const RankIndex& ri,
                                std::span<const TypeConfig> members,
                                std::span<const double> mask, int threads) {
  const int s = eng.sample_size();
  std::vector<double> pow_p(s + 1, 1.0), pow_q(s + 1, 1.0);
  double inv_csm = 0.0;
  if (eng.spec().is_iid()) {
    const double p = to_double(eng.spec().p());
    for (int i = 1; i <= s; ++i) {
      pow_p[i] = pow_p[i - 1] * p;
      pow_q[i] = pow_q[i - 1] * (1.0 - p);
    }
  } else {
    inv_csm = std::exp(-eng.log_factorials().ln_choose(s, eng.spec().m()));
  }

  std::vector<double> mass(members.size(), 0.0);
  const int nt = threads > 0 ? threads : omp_get_max_threads();
#pragma omp parallel num_threads(nt)
  {
    PmfBuffers buffers;
#pragma omp for schedule(dynamic, 16)
    for (std::size_t i = 0; i < members.size(); ++i) {
      const TypeConfig& th = members[i];
      double acc = 0.0;
      if (eng.spec().is_iid()) {
        const TypeRows rows = buffers.fill_iid(eng.pascal(), th, pow_p, pow_q);
        for_each_tuple_iid(ri, th, rows.b1, rows.b2, rows.b3, rows.b4,
                           [&](std::int64_t r, double w) { acc += w * mask[r]; });
      } else {
        const TypeRows rows = coefficient_rows(eng.pascal(), th);
        for_each_tuple_urn(ri, th, eng.spec().m(), rows.b1, rows.b2, rows.b3,
                           rows.b4,
                           [&](std::int64_t r, double w) { acc += w * mask[r]; });
        acc *= inv_csm;
      }
      mass[i] = acc;
    }
  }
  return mass;
}

// Windowed max scan of T(theta, g) over a theta set, optionally certifying
// the argmax set and max value by exact big-integer comparison.
struct MaxScan {
  double best_t = 0.0;
  BigInt exact_t;
  bool certified = false;
  std::vector<TypeConfig> argmax;
};

template <class Range>
MaxScan scan_max(const LikelihoodEngine& eng, const DataConfig& g,
                 const Range& thetas, bool certify) {
  MaxScan out;
  std::vector<TypeConfig> candidates;
  for (const TypeConfig& th : thetas) {
    const double t = eng.sum_t(th, g);
    if (t <= 0.0) continue;
    if (t >= out.best_t * (1.0 - kLambdaTieTol)) {
      if (t > out.best_t) {
        out.best_t = t;
        std::erase_if(candidates, [&](const TypeConfig& c) {
          return eng.sum_t(c, g) < out.best_t * (1.0 - kLambdaTieTol);
        });
      }
      candidates.push_back(th);
    }
  }
  if (out.best_t == 0.0) return out;
  if (!certify) {
    out.argmax = std::move(candidates);
    return out;
  }
  std::vector<BigInt> exact(candidates.size());
  for (std::size_t i = 0; i < candidates.size(); ++i) {
    exact[i] = eng.sum_t_exact(candidates[i], g);
    if (exact[i] > out.exact_t) out.exact_t = exact[i];
  }
  for (std::size_t i = 0; i < candidates.size(); ++i) {
    if (exact[i] == out.exact_t) out.argmax.push_back(candidates[i]);
  }
  out.certified = true;
  return out;
}

// Every feasible theta for g, in canonical order.
std::vector<TypeConfig> feasible_thetas(const LikelihoodEngine& eng,
                                        const DataConfig& g) {
  const int s = eng.sample_size();
  std::vector<TypeConfig> out;
  for (int t1 = 0; t1 <= s; ++t1) {
    for (int t2 = 0; t2 <= s - t1; ++t2) {
      const auto [lo, hi] = eng.theta3_interval(g, t1, t2);
      for (int t3 = lo; t3 <= hi; ++t3) {
        out.push_back(TypeConfig{t1, t2, t3, s - t1 - t2 - t3});
      }
    }
  }
  return out;
}

void validate_inputs(const DataConfig& g, const HypothesisSet& h0,
                     const RandomizationSpec& spec, const LambdaTable* table) {
  validate_data_config(g);
  spec.validate_for(g.sample_size());
  if (h0.sample_size() != g.sample_size()) {
    throw input_error("hypothesis and data configuration sample sizes differ");
  }
  if (table) {
    if (table->s != g.sample_size()) {
      throw input_error("lambda table was built for a different sample size");
    }
    if (!(table->spec == spec)) {
      throw input_error("lambda table was built for a different randomization spec");
    }
  }
  if (spec.is_urn() && g.intervention_arm() != spec.m()) {
    throw input_error(
        "observed data configuration is impossible under the declared urn draw");
  }
}

}  // namespace

TestResult lambda_statistic(const DataConfig& g, const HypothesisSet& h0,
                            const RandomizationSpec& spec,
                            const LambdaTable* table) {
  validate_inputs(g, h0, spec, table);
  const int s = g.sample_size();
  LikelihoodEngine eng(s, spec);
  const bool certify = table ? table->exact_ties : true;

  TestResult result;
  const MaxScan num = scan_max(eng, g, h0.members(), certify);

  MaxScan den;
  if (table) {
    const std::int64_t r = rank_of(g);
    den.best_t = std::exp(table->log_max[r] - eng.log_prefactor(g));
    den.argmax = table->argmax_configs(r);
    if (table->exact_ties && !den.argmax.empty()) {
      den.exact_t = eng.sum_t_exact(den.argmax.front(), g);
      den.certified = true;
    }
  } else {
    den = scan_max(eng, g, feasible_thetas(eng, g), certify);
  }

  result.argmax_null = num.argmax;
  result.argmax_global = den.argmax;
  result.log_denominator =
      den.best_t > 0.0 ? (den.certified ? log_big(den.exact_t) : std::log(den.best_t)) +
                             eng.log_prefactor(g)
                       : kLogZero;
  if (num.best_t == 0.0) {
    result.lambda = 0.0;
    result.log_numerator = kLogZero;
    return result;
  }
  result.log_numerator =
      (num.certified ? log_big(num.exact_t) : std::log(num.best_t)) +
      eng.log_prefactor(g);
  if (num.certified && den.certified) {
    result.lambda = num.exact_t == den.exact_t
                        ? 1.0
                        : std::exp(log_big(num.exact_t) - log_big(den.exact_t));
  } else {
    result.lambda = std::min(1.0, num.best_t / den.best_t);
  }
  return result;
}

void attach_null_overlay(LambdaTable& table, const HypothesisSet& h0, int threads) {
  if (h0.sample_size() != table.s) {
    throw input_error("hypothesis and table sample sizes differ");
  }
  LikelihoodEngine eng(table.s, table.spec);
  const RankIndex ri(table.s);
  const std::vector<double> overlay =
      null_overlay(eng, ri, h0.members(), threads);
  table.overlay_h0 = h0.text();
  table.log_max_null.assign(table.size(), kLogZero);
  std::int64_t r = 0;
  for (const DataConfig& gr : enumerate_data_configs(table.s)) {
    if (overlay[r] > 0.0) {
      table.log_max_null[r] = std::log(overlay[r]) + eng.log_prefactor(gr);
    }
    ++r;
  }
}

LambdaTable build_lambda_table(int s, const RandomizationSpec& spec,
                               const HypothesisSet& h0, int threads,
                               int exact_ties) {
  LambdaTable table = build_lambda_table(s, spec, threads, exact_ties);
  attach_null_overlay(table, h0, threads);
  return table;
}

TestResult p_value(const DataConfig& g, const HypothesisSet& h0,
                   const RandomizationSpec& spec, const LambdaTable& table,
                   int threads) {
  validate_inputs(g, h0, spec, &table);
  const int s = g.sample_size();
  LikelihoodEngine eng(s, spec);
  const RankIndex ri(s);
  const std::int64_t n = table.size();
  const std::int64_t r_obs = rank_of(g);
  if (table.log_max[r_obs] == kLogZero) {
    throw input_error("observed data configuration is impossible under the spec");
  }
  const bool certify = table.exact_ties;
  const std::span<const TypeConfig> members(h0.members());

  TestResult result = lambda_statistic(g, h0, spec, &table);

  // A null member attains the global max: the region is everything, so the
  // rejection probability is one for every theta.
  if (result.lambda >= 1.0) {
    result.lambda = 1.0;
    result.p_value = 1.0;
    return result;
  }

  std::vector<double> overlay;
  if (table.overlay_h0 == h0.text() && !table.log_max_null.empty()) {
    overlay.assign(n, 0.0);
    std::int64_t r = 0;
    for (const DataConfig& gr : enumerate_data_configs(s)) {
      if (table.log_max_null[r] != kLogZero) {
        overlay[r] = std::exp(table.log_max_null[r] - eng.log_prefactor(gr));
      }
      ++r;
    }
  } else {
    overlay = null_overlay(eng, ri, members, threads);
  }

  // lambda per data configuration, as a ratio of coefficient sums; the
  // per-g prefactor cancels between numerator and denominator.
  std::vector<double> lambda_lin(n, 0.0);
  std::vector<double> den_t(n, 0.0);
  {
    std::int64_t r = 0;
    for (const DataConfig& gr : enumerate_data_configs(s)) {
      if (table.log_max[r] != kLogZero) {
        den_t[r] = std::exp(table.log_max[r] - eng.log_prefactor(gr));
        lambda_lin[r] = overlay[r] / den_t[r];
      }
      ++r;
    }
  }

  const double lambda_obs = result.lambda;

  std::vector<double> mask(n, 0.0);
  std::vector<std::int64_t> borderline;
  for (std::int64_t r = 0; r < n; ++r) {
    if (den_t[r] == 0.0) continue;  // unreachable under the spec: zero mass
    if (certify && lambda_obs > 0.0 &&
        std::abs(lambda_lin[r] - lambda_obs) <= kPolishWindow * lambda_obs) {
      borderline.push_back(r);
    } else if (lambda_lin[r] <= lambda_obs * (1.0 + kLambdaTieTol)) {
      mask[r] = 1.0;
    }
  }

  // Borderline comparisons decided by exact rational arithmetic: the
  // prefactor cancels within each g, so lambda(g') <= lambda(g) reduces to a
  // big-integer cross product.
  if (!borderline.empty()) {
    const MaxScan num_obs = scan_max(eng, g, members, true);
    const BigInt den_obs = eng.sum_t_exact(table.argmax_configs(r_obs).front(), g);
    for (std::int64_t r : borderline) {
      const DataConfig gr = data_config_at(s, r);
      const MaxScan num_r = scan_max(eng, gr, members, true);
      const BigInt den_r = eng.sum_t_exact(table.argmax_configs(r).front(), gr);
      if (num_r.exact_t * den_obs <= num_obs.exact_t * den_r) mask[r] = 1.0;
    }
  }

  const std::vector<double> mass = region_mass(eng, ri, members, mask, threads);
  double p = 0.0;
  for (double m : mass) p = std::max(p, m);
  result.p_value = std::min(1.0, p);
  return result;
}

ConfidenceInterval confidence_interval(const DataConfig& g, Quantity q,
                                       IntervalSide side, double alpha,
                                       const RandomizationSpec& spec,
                                       const LambdaTable& table, int threads) {
  if (!(alpha > 0.0) || alpha > 1.0) {
    throw input_error("alpha must lie in (0, 1]");
  }
  const int s = g.sample_size();
  const double level = side == IntervalSide::TwoSided ? alpha / 2.0 : alpha;
  ConfidenceInterval ci;

  const std::vector<Rational> range = quantity_range(q, s);

  auto scan = [&](bool lower_side) -> std::optional<Rational> {
    for (std::size_t i = 0; i < range.size(); ++i) {
      const Rational& v = lower_side ? range[i] : range[range.size() - 1 - i];
      HypothesisSet h0 = HypothesisSet::quantity_bound(
          q, lower_side ? CmpOp::Le : CmpOp::Ge, v, s);
      const TestResult r = p_value(g, h0, spec, table, threads);
      ci.scanned.emplace_back(v, *r.p_value);
      if (*r.p_value > level) return v;
    }
    return std::nullopt;  // every candidate rejected
  };

  if (side == IntervalSide::Lower || side == IntervalSide::TwoSided) {
    ci.lower = scan(true);
  }
  if (side == IntervalSide::Upper || side == IntervalSide::TwoSided) {
    ci.upper = scan(false);
  }
  return ci;
}

}  // namespace rxl
