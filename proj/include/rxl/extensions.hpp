#pragma once

#include <cstdint>
#include <optional>
#include <utility>
#include <vector>

#include "rxl/hypothesis.hpp"
#include "rxl/inference.hpp"
#include "rxl/likelihood.hpp"

namespace rxl {

// Arm-wise treated shares; an empty arm leaves its share undefined.
struct SharePair {
  std::optional<Rational> treated_intervention;  // G(1)/(G(1)+G(2))
  std::optional<Rational> treated_control;       // G(3)/(s-G(1)-G(2))

  static SharePair of(const DataConfig& g);
  bool both_defined() const {
    return treated_intervention.has_value() && treated_control.has_value();
  }
};

// Estimated lower bounds on the defier and complier shares from the two arm
// shares alone: max{-(v-c), 0} and max{(v-c), 0}.
std::pair<Rational, Rational> bfh_lower_bounds(const SharePair& shares);

// Data configurations whose arm shares equal the given pair exactly.
std::vector<DataConfig> share_preimage(const SharePair& shares, int s);

// Likelihood of theta when only the two arm shares were observed: the sum of
// the full likelihood over the preimage of the share pair.
LikelihoodValue limited_data_likelihood(const TypeConfig& theta,
                                        const SharePair& shares,
                                        const RandomizationSpec& spec,
                                        bool exact = false);

// Partition of the data-configuration lattice by observed share pair.
// Empty-arm realizations form their own classes, keyed by the share that
// remains defined.
class ShareClassIndex {
 public:
  explicit ShareClassIndex(int s);

  std::int64_t class_count() const { return class_meta_.size(); }
  std::int64_t defined_class_count() const { return defined_classes_; }
  std::int32_t class_of_rank(std::int64_t g_rank) const { return class_of_[g_rank]; }
  // -1 when the pair is not realizable at this sample size.
  std::int32_t class_of(const SharePair& shares) const;
  SharePair shares_of_class(std::int32_t cls) const;
  std::vector<std::int64_t> class_member_ranks(std::int32_t cls) const;

 private:
  int s_;
  std::vector<std::int32_t> class_of_;
  struct Meta {
    // Reduced fractions; {-1, 0} encodes an undefined share.
    int vn, vd, cn, cd;
  };
  std::vector<Meta> class_meta_;
  std::int64_t defined_classes_ = 0;
};

// Worst-case p-value with the share pair as the observable statistic and the
// limited-data likelihood as the model.
TestResult limited_data_p_value(const SharePair& observed, const HypothesisSet& h0,
                                const RandomizationSpec& spec, int threads = 0);

// Population shares under the sampling assumption; pi4 is implied.
struct PopulationConfig {
  Rational pi1, pi2, pi3;
  Rational pi4() const { return 1 - pi1 - pi2 - pi3; }
};

void validate_population_config(const PopulationConfig& pi);

// Closed-form population likelihoods (Barnard/Kline forms). The iid variant
// is a multinomial over the data cells; the urn variant factors into two
// binomials and requires g1+g2 = m.
LikelihoodValue asymptotic_likelihood_iid(const PopulationConfig& pi,
                                          const DataConfig& g, const Rational& p);
LikelihoodValue asymptotic_likelihood_urn(const PopulationConfig& pi,
                                          const DataConfig& g, int m);

// Analytic maximizer family of the population likelihood. The family is the
// segment of pi1 values with both arm shares matched; the implied average
// effect is constant across it.
struct PopulationMle {
  Rational v_hat, c_hat;
  Rational effect;  // v_hat - c_hat
  Rational pi1_min, pi1_max;
  PopulationConfig representative;  // at pi1_max
  bool zero_defier_exists = false;
  std::optional<PopulationConfig> zero_defier;
  bool zero_complier_exists = false;
  std::optional<PopulationConfig> zero_complier;
};

PopulationMle population_mle(const DataConfig& g);

// The zero-defier rewrite of eq-style maximizers: (pi1+pi2, 0, pi3-pi2, ...).
PopulationConfig zero_defier_transform(const PopulationConfig& pi);

// Unpooled two-proportion z-test of the arm shares; asymptotic baseline.
struct TwoProportionResult {
  double estimate = 0.0;
  double std_error = 0.0;
  double z = 0.0;
  double p_value = 1.0;
};

TwoProportionResult two_proportion_test(const DataConfig& g);

}  // namespace rxl
