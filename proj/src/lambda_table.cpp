#include "rxl/lambda_table.hpp"

#include <omp.h>

#include <algorithm>
#include <cmath>

#include "rxl/lattice.hpp"

namespace rxl {

namespace {

// Candidate theta for the per-g maximum, kept while its double-precision
// coefficient sum is within the tie window of the running best.
struct Candidate {
  std::int64_t theta_rank;
  double t;
};

constexpr double kTieWindow = 1e-9;  // relative

// Scans every feasible theta for one g. Returns the double-precision max of
// the coefficient sum T(theta, g) and the candidates within the tie window,
// in canonical theta order. The likelihood is T times a per-g prefactor, so
// maximizing T maximizes the likelihood.
double scan_entry(const LikelihoodEngine& engine, const DataConfig& g,
                  std::vector<Candidate>& candidates) {
  const int s = engine.sample_size();
  const PascalTable& pascal = engine.pascal();
  const int g2 = g.g2, g3 = g.g3;
  const int sum_g = g.g1 + g.g2 + g.g3;
  candidates.clear();
  double best = 0.0;
  for (int t1 = 0; t1 <= s; ++t1) {
    const double* r1 = pascal.row(t1);
    for (int t2 = 0; t2 <= s - t1; ++t2) {
      const auto [lo3, hi3] = engine.theta3_interval(g, t1, t2);
      if (lo3 > hi3) continue;
      const double* r2 = pascal.row(t2);
      std::int64_t rank = composition_rank(s, t1, t2, lo3);
      for (int t3 = lo3; t3 <= hi3; ++t3, ++rank) {
        const double* r3 = pascal.row(t3);
        const double* r4 = pascal.row(s - t1 - t2 - t3);
        const int a = t1 + t3 + sum_g - s;  // n31 = a - ell
        const int b = s - t1 - t3 - g2 - g3;  // n41 = b + ell
        const int lo = std::max({0, g2 - t2, t1 + sum_g - s, t1 + t3 + g2 + g3 - s});
        const int hi = std::min({t1, g2, a, g2 + g3 - t2});
        double t = 0.0;
        for (int ell = lo; ell <= hi; ++ell) {
          t += r1[ell] * r2[g2 - ell] * r3[a - ell] * r4[b + ell];
        }
        if (t >= best * (1.0 - kTieWindow)) {
          if (t > best) {
            best = t;
            std::erase_if(candidates, [&](const Candidate& c) {
              return c.t < best * (1.0 - kTieWindow);
            });
          }
          candidates.push_back({rank, t});
        }
      }
    }
  }
  std::erase_if(candidates,
                [&](const Candidate& c) { return c.t < best * (1.0 - kTieWindow); });
  return best;
}

// Resolves the candidate set to the exact argmax set via big-integer sums.
void certify_ties(const LikelihoodEngine& engine, const DataConfig& g,
                  const std::vector<Candidate>& candidates,
                  std::vector<std::uint32_t>& out_ranks) {
  out_ranks.clear();
  if (candidates.size() == 1) {
    out_ranks.push_back(static_cast<std::uint32_t>(candidates[0].theta_rank));
    return;
  }
  std::vector<BigInt> exact(candidates.size());
  const BigInt* best = nullptr;
  for (std::size_t i = 0; i < candidates.size(); ++i) {
    exact[i] = engine.sum_t_exact(
        type_config_at(engine.sample_size(), candidates[i].theta_rank), g);
    if (!best || exact[i] > *best) best = &exact[i];
  }
  for (std::size_t i = 0; i < candidates.size(); ++i) {
    if (exact[i] == *best) {
      out_ranks.push_back(static_cast<std::uint32_t>(candidates[i].theta_rank));
    }
  }
}

}  // namespace

std::int64_t LambdaTable::multi_valued_count() const {
  std::int64_t n = 0;
  for (std::uint32_t c : argmax_count) n += c > 1;
  return n;
}

std::vector<TypeConfig> LambdaTable::argmax_configs(std::int64_t g_rank) const {
  std::vector<TypeConfig> out;
  const std::uint64_t off = argmax_offset[g_rank];
  for (std::uint32_t i = 0; i < argmax_count[g_rank]; ++i) {
    out.push_back(type_config_at(s, argmax_ranks[off + i]));
  }
  return out;
}

LambdaTable build_lambda_table(int s, const RandomizationSpec& spec, int threads,
                               int exact_ties) {
  if (s > 1000) {
    throw resource_error("lambda tables are limited to s <= 1000");
  }
  LikelihoodEngine engine(s, spec);
  const std::int64_t n = lattice_size(s);
  const bool certify = exact_ties < 0 ? s <= 512 : exact_ties != 0;

  LambdaTable table;
  table.s = s;
  table.spec = spec;
  table.exact_ties = certify;
  table.log_max.assign(n, kLogZero);
  table.argmax_count.assign(n, 0);
  table.argmax_offset.assign(n, 0);

  std::vector<std::vector<std::uint32_t>> entry_ranks(n);

  const int nt = threads > 0 ? threads : omp_get_max_threads();
#pragma omp parallel num_threads(nt)
  {
    std::vector<Candidate> candidates;
    std::vector<std::uint32_t> ranks;
#pragma omp for schedule(dynamic, 64)
    for (std::int64_t r = 0; r < n; ++r) {
      const DataConfig g = data_config_at(s, r);
      if (spec.is_urn() && g.intervention_arm() != spec.m()) continue;
      const double best = scan_entry(engine, g, candidates);
      if (best <= 0.0) continue;
      if (certify) {
        certify_ties(engine, g, candidates, ranks);
      } else {
        ranks.clear();
        for (const Candidate& c : candidates) {
          ranks.push_back(static_cast<std::uint32_t>(c.theta_rank));
        }
      }
      table.log_max[r] = std::log(best) + engine.log_prefactor(g);
      table.argmax_count[r] = static_cast<std::uint32_t>(ranks.size());
      entry_ranks[r] = ranks;
    }
  }

  // Concatenating in rank order makes offsets independent of scheduling.
  std::uint64_t off = 0;
  for (std::int64_t r = 0; r < n; ++r) {
    table.argmax_offset[r] = off;
    off += entry_ranks[r].size();
  }
  table.argmax_ranks.reserve(off);
  for (std::int64_t r = 0; r < n; ++r) {
    table.argmax_ranks.insert(table.argmax_ranks.end(), entry_ranks[r].begin(),
                              entry_ranks[r].end());
  }
  return table;
}

LambdaTable build_lambda_table_serial(int s, const RandomizationSpec& spec) {
  LikelihoodEngine engine(s, spec);
  const std::int64_t n = lattice_size(s);

  LambdaTable table;
  table.s = s;
  table.spec = spec;
  table.exact_ties = true;
  table.log_max.assign(n, kLogZero);
  table.argmax_count.assign(n, 0);
  table.argmax_offset.assign(n, 0);

  // Exact binomial coefficient rows for every possible type count.
  std::vector<std::vector<BigInt>> rows(s + 1);
  for (int k = 0; k <= s; ++k) rows[k] = big_binomial_row(k);
  auto choose = [&](int nn, int kk) -> BigInt {
    if (kk < 0 || kk > nn) return BigInt(0);
    return rows[nn][kk];
  };

  std::int64_t g_rank = 0;
  for (const DataConfig& g : enumerate_data_configs(s)) {
    table.argmax_offset[g_rank] = table.argmax_ranks.size();
    if (spec.is_urn() && g.intervention_arm() != spec.m()) {
      ++g_rank;
      continue;
    }
    BigInt best = 0;
    std::vector<std::uint32_t> arg;
    std::int64_t theta_rank = 0;
    for (const TypeConfig& theta : enumerate_type_configs(s)) {
      // Naive summation over the full 0..theta1 index range; out-of-support
      // splits contribute zero coefficients.
      BigInt t = 0;
      for (int ell = 0; ell <= theta.never; ++ell) {
        const ArmSplit split = arm_split_at(theta, g, ell);
        t += choose(theta.never, split.n12) * choose(theta.defiers, split.n22) *
             choose(theta.compliers, split.n31) * choose(theta.always, split.n41);
      }
      if (t > best) {
        best = t;
        arg.clear();
      }
      if (t == best && best > 0) {
        arg.push_back(static_cast<std::uint32_t>(theta_rank));
      }
      ++theta_rank;
    }
    if (best > 0) {
      table.log_max[g_rank] =
          log_big(best) + log_rational(engine.exact_prefactor(g));
      table.argmax_count[g_rank] = static_cast<std::uint32_t>(arg.size());
      table.argmax_ranks.insert(table.argmax_ranks.end(), arg.begin(), arg.end());
    }
    ++g_rank;
  }
  return table;
}

bool tables_equal(const LambdaTable& a, const LambdaTable& b, double log_tol) {
  if (a.s != b.s || a.size() != b.size()) return false;
  for (std::int64_t r = 0; r < a.size(); ++r) {
    const double la = a.log_max[r], lb = b.log_max[r];
    if (la == kLogZero || lb == kLogZero) {
      if (la != lb) return false;
    } else if (std::abs(la - lb) > log_tol) {
      return false;
    }
    if (a.argmax_count[r] != b.argmax_count[r]) return false;
    for (std::uint32_t i = 0; i < a.argmax_count[r]; ++i) {
      if (a.argmax_ranks[a.argmax_offset[r] + i] !=
          b.argmax_ranks[b.argmax_offset[r] + i]) {
        return false;
      }
    }
  }
  return true;
}

}  // namespace rxl
