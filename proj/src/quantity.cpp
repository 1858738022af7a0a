#include "rxl/quantity.hpp"

#include <algorithm>

#include "rxl/errors.hpp"

namespace rxl {

Rational eval_quantity(Quantity q, const TypeConfig& theta) {
  switch (q) {
    case Quantity::Never:
      return Rational(theta.never);
    case Quantity::Defiers:
      return Rational(theta.defiers);
    case Quantity::Compliers:
      return Rational(theta.compliers);
    case Quantity::Always:
      return Rational(theta.always);
    case Quantity::Affected:
      return Rational(theta.defiers + theta.compliers);
    case Quantity::AvgEffect:
      return Rational(theta.compliers - theta.defiers, theta.sample_size());
  }
  throw input_error("unknown quantity");
}

QuantityValue eval_ratio(Quantity numerator, Quantity denominator,
                         const TypeConfig& theta) {
  const Rational num = eval_quantity(numerator, theta);
  const Rational den = eval_quantity(denominator, theta);
  if (den != 0) return QuantityValue::finite(num / den);
  if (num > 0) return QuantityValue::plus_inf();
  if (num < 0) return QuantityValue::minus_inf();
  return QuantityValue::undefined();
}

std::optional<Quantity> quantity_from_name(std::string_view name) {
  if (name == "never") return Quantity::Never;
  if (name == "killed" || name == "defiers") return Quantity::Defiers;
  if (name == "saved" || name == "compliers") return Quantity::Compliers;
  if (name == "always") return Quantity::Always;
  if (name == "affected") return Quantity::Affected;
  if (name == "avg_effect") return Quantity::AvgEffect;
  return std::nullopt;
}

std::string_view quantity_name(Quantity q) {
  switch (q) {
    case Quantity::Never: return "never";
    case Quantity::Defiers: return "killed";
    case Quantity::Compliers: return "saved";
    case Quantity::Always: return "always";
    case Quantity::Affected: return "affected";
    case Quantity::AvgEffect: return "avg_effect";
  }
  return "?";
}

std::vector<Rational> quantity_range(Quantity q, int s) {
  std::vector<Rational> out;
  if (q == Quantity::AvgEffect) {
    out.reserve(2 * s + 1);
    for (int k = -s; k <= s; ++k) out.emplace_back(k, s);
  } else {
    out.reserve(s + 1);
    for (int k = 0; k <= s; ++k) out.emplace_back(k);
  }
  return out;
}

}  // namespace rxl
