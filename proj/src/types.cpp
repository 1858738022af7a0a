#include "rxl/types.hpp"

#include <sstream>

namespace rxl {

void validate_type_config(const TypeConfig& theta) {
  if (theta.never < 0 || theta.defiers < 0 || theta.compliers < 0 ||
      theta.always < 0) {
    throw input_error("type configuration counts must be nonnegative");
  }
  if (theta.sample_size() < 1) {
    throw input_error("type configuration must describe at least one individual");
  }
}

void validate_data_config(const DataConfig& g) {
  if (g.g1 < 0 || g.g2 < 0 || g.g3 < 0 || g.g4 < 0) {
    throw input_error("data configuration counts must be nonnegative");
  }
  if (g.sample_size() < 1) {
    throw input_error("data configuration must describe at least one individual");
  }
}

RandomizationSpec RandomizationSpec::iid(Rational p) {
  if (p <= 0 || p >= 1) {
    throw input_error("iid randomization requires 0 < p < 1");
  }
  return RandomizationSpec(Kind::Iid, std::move(p), 0);
}

RandomizationSpec RandomizationSpec::urn(int m, int sample_size) {
  if (sample_size < 2) {
    throw input_error("urn randomization requires sample size >= 2");
  }
  if (m < 1 || m > sample_size - 1) {
    throw input_error("urn randomization requires 1 <= m <= s-1");
  }
  return RandomizationSpec(Kind::Urn, Rational(0), m);
}

void RandomizationSpec::validate_for(int sample_size) const {
  if (kind_ == Kind::Urn && (m_ < 1 || m_ > sample_size - 1)) {
    throw input_error("urn draw count m is out of range for this sample size");
  }
}

std::string RandomizationSpec::describe() const {
  std::ostringstream out;
  if (is_iid()) {
    out << "iid:p=" << rational_to_string(p_);
  } else {
    out << "urn:m=" << m_;
  }
  return out.str();
}

LikelihoodValue LikelihoodValue::from_exact(Rational r) {
  LikelihoodValue v;
  v.log_value = log_rational(r);
  v.exact = std::move(r);
  return v;
}

std::string describe(const TypeConfig& theta) {
  std::ostringstream out;
  out << "(" << theta.never << "," << theta.defiers << "," << theta.compliers
      << "," << theta.always << ")";
  return out.str();
}

std::string describe(const DataConfig& g) {
  std::ostringstream out;
  out << "(" << g.g1 << "," << g.g2 << "," << g.g3 << "," << g.g4 << ")";
  return out.str();
}

}  // namespace rxl
