#pragma once

#include <optional>
#include <utility>
#include <vector>

#include "rxl/hypothesis.hpp"
#include "rxl/lambda_table.hpp"
#include "rxl/quantity.hpp"

namespace rxl {

struct TestResult {
  double lambda = 0.0;
  std::optional<double> p_value;
  double log_numerator = kLogZero;
  double log_denominator = kLogZero;
  std::vector<TypeConfig> argmax_null;
  std::vector<TypeConfig> argmax_global;
};

// Likelihood ratio of the observed g: max likelihood over H0 divided by the
// max over the whole lattice. Uses the table's denominator when supplied.
TestResult lambda_statistic(const DataConfig& g, const HypothesisSet& h0,
                            const RandomizationSpec& spec,
                            const LambdaTable* table = nullptr);

// Computes and stores the per-g numerator overlay for h0 on the table, so
// repeated queries against the same hypothesis skip the null scan.
void attach_null_overlay(LambdaTable& table, const HypothesisSet& h0,
                         int threads = 0);

// Build with the overlay populated in one go.
LambdaTable build_lambda_table(int s, const RandomizationSpec& spec,
                               const HypothesisSet& h0, int threads = 0,
                               int exact_ties = -1);

// Worst-case p-value: max over theta in H0 of P(lambda(G) <= lambda(g)).
// The comparison uses a relative 1e-9 window with ties included; tables with
// certified argmax data resolve borderline comparisons by exact rational
// arithmetic.
TestResult p_value(const DataConfig& g, const HypothesisSet& h0,
                   const RandomizationSpec& spec, const LambdaTable& table,
                   int threads = 0);

enum class IntervalSide { Lower, Upper, TwoSided };

struct ConfidenceInterval {
  std::optional<Rational> lower;  // absent: every candidate rejected
  std::optional<Rational> upper;
  // Candidate values scanned, with the p-value of the corresponding bound test.
  std::vector<std::pair<Rational, double>> scanned;
};

// Inverts the test over the finite range of q. The lower endpoint is the
// smallest candidate v whose H0: q <= v is not rejected at level alpha;
// two-sided runs both directions at alpha/2.
ConfidenceInterval confidence_interval(const DataConfig& g, Quantity q,
                                       IntervalSide side, double alpha,
                                       const RandomizationSpec& spec,
                                       const LambdaTable& table, int threads = 0);

}  // namespace rxl
