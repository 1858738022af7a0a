#include "rxl/hypothesis.hpp"

#include <algorithm>
#include <cctype>
#include <sstream>

#include "rxl/lattice.hpp"

namespace rxl {

namespace {

struct Token {
  enum class Kind { Ident, Number, Op, LParen, RParen, Slash, End };
  Kind kind;
  std::string text;
  std::size_t pos;
};

class Lexer {
 public:
  explicit Lexer(const std::string& text) : text_(text) { advance(); }

  const Token& peek() const { return current_; }
  Token take() {
    Token t = current_;
    advance();
    return t;
  }

 private:
  void advance() {
    while (i_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[i_]))) ++i_;
    const std::size_t start = i_;
    if (i_ >= text_.size()) {
      current_ = {Token::Kind::End, "", start};
      return;
    }
    const char c = text_[i_];
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
      while (i_ < text_.size() &&
             (std::isalnum(static_cast<unsigned char>(text_[i_])) || text_[i_] == '_')) {
        ++i_;
      }
      current_ = {Token::Kind::Ident, text_.substr(start, i_ - start), start};
    } else if (std::isdigit(static_cast<unsigned char>(c))) {
      while (i_ < text_.size() &&
             (std::isdigit(static_cast<unsigned char>(text_[i_])) || text_[i_] == '.')) {
        ++i_;
      }
      current_ = {Token::Kind::Number, text_.substr(start, i_ - start), start};
    } else if (c == '(') {
      ++i_;
      current_ = {Token::Kind::LParen, "(", start};
    } else if (c == ')') {
      ++i_;
      current_ = {Token::Kind::RParen, ")", start};
    } else if (c == '/') {
      ++i_;
      current_ = {Token::Kind::Slash, "/", start};
    } else if (c == '=' || c == '<' || c == '>') {
      ++i_;
      std::string op(1, c);
      if (i_ < text_.size() && text_[i_] == '=') {
        op += '=';
        ++i_;
      }
      current_ = {Token::Kind::Op, op, start};
    } else {
      throw HypothesisParseError(std::string("unexpected character '") + c + "'", start);
    }
  }

  const std::string& text_;
  std::size_t i_ = 0;
  Token current_{Token::Kind::End, "", 0};
};

class Parser {
 public:
  explicit Parser(const std::string& text) : lex_(text) {}

  HypoExprPtr parse() {
    HypoExprPtr e = or_term();
    if (lex_.peek().kind != Token::Kind::End) {
      throw HypothesisParseError("trailing input after expression", lex_.peek().pos);
    }
    return e;
  }

 private:
  HypoExprPtr or_term() {
    std::vector<HypoExprPtr> terms{and_term()};
    while (lex_.peek().kind == Token::Kind::Ident && lex_.peek().text == "or") {
      lex_.take();
      terms.push_back(and_term());
    }
    if (terms.size() == 1) return terms[0];
    auto node = std::make_shared<HypoExpr>();
    node->node = HypoExpr::Node::Or;
    node->children = std::move(terms);
    return node;
  }

  HypoExprPtr and_term() {
    std::vector<HypoExprPtr> terms{atom()};
    while (lex_.peek().kind == Token::Kind::Ident && lex_.peek().text == "and") {
      lex_.take();
      terms.push_back(atom());
    }
    if (terms.size() == 1) return terms[0];
    auto node = std::make_shared<HypoExpr>();
    node->node = HypoExpr::Node::And;
    node->children = std::move(terms);
    return node;
  }

  HypoExprPtr atom() {
    const Token t = lex_.peek();
    if (t.kind == Token::Kind::LParen) {
      lex_.take();
      HypoExprPtr inner = or_term();
      if (lex_.peek().kind != Token::Kind::RParen) {
        throw HypothesisParseError("expected ')'", lex_.peek().pos);
      }
      lex_.take();
      return inner;
    }
    if (t.kind != Token::Kind::Ident) {
      throw HypothesisParseError("expected a quantity, preset or '('", t.pos);
    }
    if (t.text == "fisher_null" || t.text == "neyman_null") {
      lex_.take();
      auto node = std::make_shared<HypoExpr>();
      node->node = HypoExpr::Node::Preset;
      node->preset_name = t.text;
      return node;
    }
    return comparison();
  }

  HypoExprPtr comparison() {
    auto node = std::make_shared<HypoExpr>();
    node->node = HypoExpr::Node::Cmp;
    node->lhs = quantity();
    if (lex_.peek().kind == Token::Kind::Slash) {
      lex_.take();
      node->is_ratio = true;
      node->rhs_quantity = quantity();
    }
    const Token op = lex_.take();
    if (op.kind != Token::Kind::Op) {
      throw HypothesisParseError("expected a comparison operator", op.pos);
    }
    if (op.text == "==") node->op = CmpOp::Eq;
    else if (op.text == "<=") node->op = CmpOp::Le;
    else if (op.text == ">=") node->op = CmpOp::Ge;
    else if (op.text == "<") node->op = CmpOp::Lt;
    else if (op.text == ">") node->op = CmpOp::Gt;
    else throw HypothesisParseError("unknown operator '" + op.text + "'", op.pos);

    const Token num = lex_.take();
    if (num.kind != Token::Kind::Number) {
      throw HypothesisParseError("expected a number", num.pos);
    }
    node->threshold = rational_from_string(num.text);
    return node;
  }

  Quantity quantity() {
    const Token t = lex_.take();
    if (t.kind != Token::Kind::Ident) {
      throw HypothesisParseError("expected a quantity name", t.pos);
    }
    const auto q = quantity_from_name(t.text);
    if (!q) throw HypothesisParseError("unknown quantity '" + t.text + "'", t.pos);
    return *q;
  }

  Lexer lex_;
};

bool compare(const Rational& lhs, CmpOp op, const Rational& rhs) {
  switch (op) {
    case CmpOp::Eq: return lhs == rhs;
    case CmpOp::Le: return lhs <= rhs;
    case CmpOp::Ge: return lhs >= rhs;
    case CmpOp::Lt: return lhs < rhs;
    case CmpOp::Gt: return lhs > rhs;
  }
  return false;
}

bool compare_extended(const QuantityValue& lhs, CmpOp op, const Rational& rhs) {
  switch (lhs.kind) {
    case QuantityValue::Kind::Undefined:
      return false;
    case QuantityValue::Kind::PlusInf:
      return op == CmpOp::Ge || op == CmpOp::Gt;
    case QuantityValue::Kind::MinusInf:
      return op == CmpOp::Le || op == CmpOp::Lt;
    case QuantityValue::Kind::Finite:
      return compare(lhs.value, op, rhs);
  }
  return false;
}

const char* cmp_text(CmpOp op) {
  switch (op) {
    case CmpOp::Eq: return "==";
    case CmpOp::Le: return "<=";
    case CmpOp::Ge: return ">=";
    case CmpOp::Lt: return "<";
    case CmpOp::Gt: return ">";
  }
  return "?";
}

// Thresholds parsed from the grammar are integers or decimals, so they can
// always be printed back as decimals. Anything else falls back to num/den.
std::string format_number(const Rational& r) {
  BigInt den = denominator(r);
  int twos = 0, fives = 0;
  while (den % 2 == 0) den /= 2, ++twos;
  while (den % 5 == 0) den /= 5, ++fives;
  if (den != 1 || r < 0) return rational_to_string(r);
  const int k = std::max(twos, fives);
  BigInt scaled = numerator(r);
  for (int i = twos; i < k; ++i) scaled *= 2;
  for (int i = fives; i < k; ++i) scaled *= 5;
  std::string digits = scaled.str();
  if (k == 0) return digits;
  while (static_cast<int>(digits.size()) <= k) digits.insert(digits.begin(), '0');
  digits.insert(digits.size() - k, ".");
  return digits;
}

void format_expr(const HypoExpr& e, std::ostream& out, bool parenthesize) {
  switch (e.node) {
    case HypoExpr::Node::Preset:
      out << e.preset_name;
      return;
    case HypoExpr::Node::Cmp:
      out << quantity_name(e.lhs);
      if (e.is_ratio) out << " / " << quantity_name(e.rhs_quantity);
      out << " " << cmp_text(e.op) << " " << format_number(e.threshold);
      return;
    case HypoExpr::Node::And: {
      if (parenthesize) out << "(";
      bool first = true;
      for (const auto& c : e.children) {
        if (!first) out << " and ";
        first = false;
        format_expr(*c, out, true);
      }
      if (parenthesize) out << ")";
      return;
    }
    case HypoExpr::Node::Or: {
      if (parenthesize) out << "(";
      bool first = true;
      for (const auto& c : e.children) {
        if (!first) out << " or ";
        first = false;
        format_expr(*c, out, c->node == HypoExpr::Node::Or);
      }
      if (parenthesize) out << ")";
      return;
    }
  }
}

}  // namespace

HypoExprPtr parse_hypothesis_expr(const std::string& text) {
  return Parser(text).parse();
}

std::string format_hypothesis(const HypoExpr& expr) {
  std::ostringstream out;
  format_expr(expr, out, false);
  return out.str();
}

bool hypothesis_contains(const HypoExpr& expr, const TypeConfig& theta) {
  switch (expr.node) {
    case HypoExpr::Node::Preset:
      if (expr.preset_name == "fisher_null") {
        return theta.defiers == 0 && theta.compliers == 0;
      }
      return theta.defiers == theta.compliers;  // neyman_null
    case HypoExpr::Node::Cmp: {
      if (!expr.is_ratio) {
        return compare(eval_quantity(expr.lhs, theta), expr.op, expr.threshold);
      }
      return compare_extended(eval_ratio(expr.lhs, expr.rhs_quantity, theta),
                              expr.op, expr.threshold);
    }
    case HypoExpr::Node::And:
      for (const auto& c : expr.children) {
        if (!hypothesis_contains(*c, theta)) return false;
      }
      return true;
    case HypoExpr::Node::Or:
      for (const auto& c : expr.children) {
        if (hypothesis_contains(*c, theta)) return true;
      }
      return false;
  }
  return false;
}

HypothesisSet::HypothesisSet(HypoExprPtr expr, int s) : expr_(std::move(expr)), s_(s) {
  if (s < 1) throw input_error("sample size must be >= 1");
  for (const TypeConfig& theta : enumerate_type_configs(s)) {
    if (hypothesis_contains(*expr_, theta)) members_.push_back(theta);
  }
  if (members_.empty()) {
    throw input_error("hypothesis '" + text() + "' is empty on the lattice (s=" +
                      std::to_string(s) + ")");
  }
}

HypothesisSet HypothesisSet::quantity_bound(Quantity q, CmpOp op,
                                            const Rational& bound, int s) {
  auto node = std::make_shared<HypoExpr>();
  node->node = HypoExpr::Node::Cmp;
  node->lhs = q;
  node->op = op;
  node->threshold = bound;
  return HypothesisSet(node, s);
}

}  // namespace rxl
