#pragma once

#include <memory>
#include <string>
#include <vector>

#include "rxl/quantity.hpp"
#include "rxl/types.hpp"

namespace rxl {

// Hypothesis expressions follow a small grammar:
//
//   expr    := or_term
//   or_term := and_term { "or" and_term }
//   and_term:= atom { "and" atom }
//   atom    := comparison | "(" expr ")" | preset
//   comparison := operand cmp number
//   operand := quantity | quantity "/" quantity
//   quantity:= never | killed | defiers | saved | compliers | always
//              | affected | avg_effect
//   cmp     := "==" | "<=" | ">=" | "<" | ">"
//   preset  := fisher_null | neyman_null
//
// A comparison whose ratio operand is ill-defined at a lattice point (0/0)
// evaluates false there, so such points never satisfy a ratio hypothesis.

enum class CmpOp { Eq, Le, Ge, Lt, Gt };

struct HypoExpr;
using HypoExprPtr = std::shared_ptr<const HypoExpr>;

struct HypoExpr {
  enum class Node { Or, And, Cmp, Preset };
  Node node = Node::Cmp;

  // Or / And
  std::vector<HypoExprPtr> children;

  // Cmp
  Quantity lhs = Quantity::Defiers;
  bool is_ratio = false;
  Quantity rhs_quantity = Quantity::Defiers;  // ratio denominator
  CmpOp op = CmpOp::Eq;
  Rational threshold;

  // Preset
  std::string preset_name;
};

class HypothesisParseError : public input_error {
 public:
  HypothesisParseError(const std::string& message, std::size_t position)
      : input_error(message + " (at position " + std::to_string(position) + ")"),
        position_(position) {}
  std::size_t position() const { return position_; }

 private:
  std::size_t position_;
};

HypoExprPtr parse_hypothesis_expr(const std::string& text);
std::string format_hypothesis(const HypoExpr& expr);
bool hypothesis_contains(const HypoExpr& expr, const TypeConfig& theta);

// An expression bound to a sample size, with its member set enumerated.
// Construction rejects hypotheses that are empty on the lattice.
class HypothesisSet {
 public:
  HypothesisSet(HypoExprPtr expr, int s);
  HypothesisSet(const std::string& text, int s)
      : HypothesisSet(parse_hypothesis_expr(text), s) {}

  int sample_size() const { return s_; }
  const HypoExpr& expr() const { return *expr_; }
  std::string text() const { return format_hypothesis(*expr_); }
  bool contains(const TypeConfig& theta) const {
    return hypothesis_contains(*expr_, theta);
  }
  const std::vector<TypeConfig>& members() const { return members_; }

  // H0: q <= bound or q >= bound, as used by confidence interval inversion.
  static HypothesisSet quantity_bound(Quantity q, CmpOp op, const Rational& bound,
                                      int s);

 private:
  HypoExprPtr expr_;
  int s_;
  std::vector<TypeConfig> members_;
};

}  // namespace rxl
