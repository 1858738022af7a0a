#pragma once

#include <functional>
#include <memory>
#include <optional>
#include <utility>

#include "rxl/lattice.hpp"
#include "rxl/log_tables.hpp"
#include "rxl/types.hpp"

namespace rxl {

// Range of the never-takers-in-intervention index ell for which all four
// implied per-type intervention counts are within [0, type count]. Empty
// (first > second) when theta cannot produce g.
std::pair<int, int> ell_range(const TypeConfig& theta, const DataConfig& g);

// The arm split implied by theta, g and a choice of ell.
ArmSplit arm_split_at(const TypeConfig& theta, const DataConfig& g, int ell);

bool feasible(const TypeConfig& theta, const DataConfig& g,
              const RandomizationSpec& spec);

// Joint log-pmf of the per-type intervention counts given theta. Callers may
// plug in their own assignment process; the two built-ins cover the engine.
using AssignmentPmf =
    std::function<double(const ArmSplit&, const TypeConfig&)>;

AssignmentPmf iid_assignment_pmf(const Rational& p,
                                 std::shared_ptr<const LogFactorialTable> lf);
AssignmentPmf urn_assignment_pmf(int m,
                                 std::shared_ptr<const LogFactorialTable> lf);

// Sums f over the tightened ell range in ascending order via log-sum-exp.
LikelihoodValue general_likelihood(const TypeConfig& theta, const DataConfig& g,
                                   const RandomizationSpec& spec,
                                   const AssignmentPmf& f);

// Precomputed state for one (s, spec): factorial/choose tables plus the
// per-arm-size log prefactor. All methods are const and thread-safe.
class LikelihoodEngine {
 public:
  LikelihoodEngine(int s, RandomizationSpec spec);

  int sample_size() const { return s_; }
  const RandomizationSpec& spec() const { return spec_; }
  const LogFactorialTable& log_factorials() const { return *lf_; }
  const PascalTable& pascal() const { return *pascal_; }
  std::shared_ptr<const LogFactorialTable> log_factorials_ptr() const { return lf_; }

  // Sum over ell of the four binomial coefficients; the likelihood equals
  // this times the arm-size prefactor. Fits a double for s <= 1000.
  double sum_t(const TypeConfig& theta, const DataConfig& g) const;
  BigInt sum_t_exact(const TypeConfig& theta, const DataConfig& g) const;

  // log L(theta | g). Urn specs return log-zero off the m-sized arm.
  double log_likelihood(const TypeConfig& theta, const DataConfig& g) const;
  Rational exact_likelihood(const TypeConfig& theta, const DataConfig& g) const;
  LikelihoodValue likelihood(const TypeConfig& theta, const DataConfig& g,
                             bool exact = false) const;

  // ln of p^(arm)*(1-p)^(s-arm) for iid, -ln C(s,m) for urn (log-zero off-arm).
  double log_prefactor(const DataConfig& g) const;
  Rational exact_prefactor(const DataConfig& g) const;

  bool feasible(const TypeConfig& theta, const DataConfig& g) const;

  // Number of type configurations with positive likelihood given g.
  std::int64_t compatible_count(const DataConfig& g) const;

  // Feasible theta3 interval for fixed (g, theta1, theta2); empty when
  // first > second. Used by the table builder to skip infeasible thetas.
  std::pair<int, int> theta3_interval(const DataConfig& g, int t1, int t2) const;

 private:
  int s_;
  RandomizationSpec spec_;
  std::shared_ptr<const LogFactorialTable> lf_;
  std::shared_ptr<const PascalTable> pascal_;
  std::vector<double> log_arm_prefactor_;  // indexed by intervention arm size
};

// One-shot conveniences mirroring the engine methods.
LikelihoodValue iid_likelihood(const TypeConfig& theta, const DataConfig& g,
                               const Rational& p, bool exact = false);
LikelihoodValue urn_likelihood(const TypeConfig& theta, const DataConfig& g,
                               int m, bool exact = false);
std::int64_t compatible_count(const DataConfig& g, const RandomizationSpec& spec);

}  // namespace rxl
