#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "rxl/types.hpp"

namespace rxl {

// Built-in functions of the type configuration. "killed" and "saved" are the
// survival-outcome aliases of defiers and compliers.
enum class Quantity {
  Never,
  Defiers,
  Compliers,
  Always,
  Affected,   // defiers + compliers
  AvgEffect,  // (compliers - defiers) / s
};

// Extended-real value of a quantity or a quantity ratio at a lattice point.
struct QuantityValue {
  enum class Kind { Finite, PlusInf, MinusInf, Undefined };
  Kind kind = Kind::Finite;
  Rational value;  // meaningful only when Finite

  static QuantityValue finite(Rational r) { return {Kind::Finite, std::move(r)}; }
  static QuantityValue plus_inf() { return {Kind::PlusInf, {}}; }
  static QuantityValue minus_inf() { return {Kind::MinusInf, {}}; }
  static QuantityValue undefined() { return {Kind::Undefined, {}}; }

  bool is_finite() const { return kind == Kind::Finite; }
  bool is_undefined() const { return kind == Kind::Undefined; }
};

Rational eval_quantity(Quantity q, const TypeConfig& theta);

// theta3/theta2 with the usual conventions: positive/zero -> +inf,
// zero/zero -> undefined (such points never enter a ratio hypothesis).
QuantityValue eval_ratio(Quantity numerator, Quantity denominator,
                         const TypeConfig& theta);

std::optional<Quantity> quantity_from_name(std::string_view name);
std::string_view quantity_name(Quantity q);

// All values the quantity attains on the lattice of size s, ascending.
std::vector<Rational> quantity_range(Quantity q, int s);

}  // namespace rxl
