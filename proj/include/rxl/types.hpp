#pragma once

#include <cmath>
#include <compare>
#include <cstdint>
#include <limits>
#include <optional>
#include <string>

#include "rxl/errors.hpp"
#include "rxl/rational.hpp"

namespace rxl {

constexpr double kLogZero = -std::numeric_limits<double>::infinity();

// Default ceiling for the ln-factorial table and hence for any engine instance.
constexpr int kMaxSampleSize = 2000;

// Latent counts of the four potential outcome types. All four are stored;
// the sample size is their sum.
struct TypeConfig {
  int never = 0;      // untreated under both arms
  int defiers = 0;    // treated only under control
  int compliers = 0;  // treated only under intervention
  int always = 0;     // treated under both arms

  int sample_size() const { return never + defiers + compliers + always; }
  int operator[](int j) const {
    return j == 0 ? never : j == 1 ? defiers : j == 2 ? compliers : always;
  }
  friend auto operator<=>(const TypeConfig&, const TypeConfig&) = default;
};

// Observed 2x2 cross-tabulation of arm x treatment.
struct DataConfig {
  int g1 = 0;  // treated in intervention arm
  int g2 = 0;  // untreated in intervention arm
  int g3 = 0;  // treated in control arm
  int g4 = 0;  // untreated in control arm

  int sample_size() const { return g1 + g2 + g3 + g4; }
  int intervention_arm() const { return g1 + g2; }
  friend auto operator<=>(const DataConfig&, const DataConfig&) = default;
};

// Per-type counts assigned to the intervention arm.
struct ArmSplit {
  int n12 = 0;  // never takers in intervention
  int n22 = 0;  // defiers in intervention
  int n31 = 0;  // compliers in intervention
  int n41 = 0;  // always takers in intervention

  int intervention_total() const { return n12 + n22 + n31 + n41; }
};

void validate_type_config(const TypeConfig& theta);
void validate_data_config(const DataConfig& g);

// Declared assignment mechanism. Iid draws each individual into the
// intervention arm with exact rational probability p; Urn draws exactly m.
class RandomizationSpec {
 public:
  enum class Kind { Iid, Urn };

  static RandomizationSpec iid(Rational p);
  // m must satisfy 1 <= m <= s-1.
  static RandomizationSpec urn(int m, int sample_size);

  Kind kind() const { return kind_; }
  bool is_iid() const { return kind_ == Kind::Iid; }
  bool is_urn() const { return kind_ == Kind::Urn; }
  const Rational& p() const { return p_; }
  int m() const { return m_; }

  // Re-checks the urn constraint against a concrete sample size.
  void validate_for(int sample_size) const;

  std::string describe() const;

  friend bool operator==(const RandomizationSpec& a, const RandomizationSpec& b) {
    return a.kind_ == b.kind_ && a.p_ == b.p_ && a.m_ == b.m_;
  }

 private:
  RandomizationSpec(Kind kind, Rational p, int m)
      : kind_(kind), p_(std::move(p)), m_(m) {}

  Kind kind_;
  Rational p_;  // Iid only
  int m_ = 0;   // Urn only
};

// A probability in log space; negative infinity encodes zero. The exact
// rational is populated only when a caller asks for exact mode.
struct LikelihoodValue {
  double log_value = kLogZero;
  std::optional<Rational> exact;

  bool is_zero() const { return log_value == kLogZero; }
  double value() const { return std::exp(log_value); }

  static LikelihoodValue zero() { return {}; }
  static LikelihoodValue from_log(double lv) { return {lv, std::nullopt}; }
  static LikelihoodValue from_exact(Rational r);
};

std::string describe(const TypeConfig& theta);
std::string describe(const DataConfig& g);

}  // namespace rxl
