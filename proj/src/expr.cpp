#include "semilin/expr.hpp"

#include <algorithm>
#include <bit>
#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <cstdio>

namespace semilin {

namespace {

struct BuiltinInfo {
  std::string_view name;
  Builtin fn;
  int arity;
};

constexpr BuiltinInfo kBuiltins[] = {
    {"abs", Builtin::Abs, 1},   {"sign", Builtin::Sign, 1},
    {"min", Builtin::Min, 2},   {"max", Builtin::Max, 2},
    {"exp", Builtin::Exp, 1},   {"sin", Builtin::Sin, 1},
    {"cos", Builtin::Cos, 1},   {"sqrt", Builtin::Sqrt, 1},
    {"pospart", Builtin::PosPart, 1},
};

const BuiltinInfo* find_builtin(std::string_view name) {
  for (const auto& b : kBuiltins) {
    if (b.name == name) return &b;
  }
  return nullptr;
}

std::string_view builtin_name(Builtin fn) {
  for (const auto& b : kBuiltins) {
    if (b.fn == fn) return b.name;
  }
  return "?";
}

[[noreturn]] void domain_error(const std::string& what) {
  throw ExprError(ExprError::Kind::Domain, "domain error: " + what);
}

double checked(double v, const char* what) {
  if (!std::isfinite(v)) domain_error(std::string("non-finite result of ") + what);
  return v;
}

}  // namespace

double apply_builtin(Builtin fn, double a, double b) {
  switch (fn) {
    case Builtin::Abs: return std::fabs(a);
    case Builtin::Sign: return a > 0.0 ? 1.0 : (a < 0.0 ? -1.0 : 0.0);
    case Builtin::Min: return std::min(a, b);
    case Builtin::Max: return std::max(a, b);
    case Builtin::Exp: return checked(std::exp(a), "exp");
    case Builtin::Sin: return std::sin(a);
    case Builtin::Cos: return std::cos(a);
    case Builtin::Sqrt:
      if (a < 0.0) domain_error("sqrt of negative argument");
      return std::sqrt(a);
    case Builtin::PosPart: return a > 0.0 ? a : 0.0;
  }
  return 0.0;
}

// ---------------------------------------------------------------------------
// VarLayout

VarLayout::VarLayout(int dim, std::vector<std::string> extra) : dim_(dim) {
  if (dim < 1) throw ExprError(ExprError::Kind::Syntax, "dimension must be >= 1");
  for (int i = 1; i <= dim; ++i) names_.push_back("x" + std::to_string(i));
  names_.emplace_back("s");
  for (int i = 1; i <= dim; ++i) names_.push_back("xi" + std::to_string(i));
  names_.emplace_back("gnorm");
  for (auto& e : extra) {
    if (slot(e) >= 0 || find_builtin(e) != nullptr) {
      throw ExprError(ExprError::Kind::Syntax, "reserved name redeclared: " + e);
    }
    names_.push_back(std::move(e));
  }
}

int VarLayout::slot(std::string_view name) const {
  for (std::size_t i = 0; i < names_.size(); ++i) {
    if (names_[i] == name) return static_cast<int>(i);
  }
  return -1;
}

// ---------------------------------------------------------------------------
// Parser

class ExprParser {
 public:
  ExprParser(std::string_view text, std::shared_ptr<const VarLayout> layout)
      : text_(text), layout_(std::move(layout)) {}

  Expr parse() {
    skip_ws();
    const int root = parse_expr();
    skip_ws();
    if (pos_ != text_.size()) fail("unexpected character '" + std::string(1, text_[pos_]) + "'");
    Expr e;
    e.nodes_ = std::make_shared<const std::vector<Expr::Node>>(std::move(nodes_));
    e.layout_ = layout_;
    e.root_ = root;
    e.source_ = std::string(text_);
    return e;
  }

 private:
  [[noreturn]] void fail(const std::string& what) const {
    throw ExprError(ExprError::Kind::Syntax,
                    "syntax error at position " + std::to_string(pos_) + ": " + what, pos_);
  }

  void skip_ws() {
    while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
  }

  bool accept(char c) {
    skip_ws();
    if (pos_ < text_.size() && text_[pos_] == c) {
      ++pos_;
      return true;
    }
    return false;
  }

  int push(Expr::Node n) {
    nodes_.push_back(n);
    return static_cast<int>(nodes_.size()) - 1;
  }

  int binary(Expr::Op op, int lhs, int rhs) {
    Expr::Node n{op};
    n.lhs = lhs;
    n.rhs = rhs;
    return push(n);
  }

  int parse_expr() {
    int lhs = parse_term();
    for (;;) {
      if (accept('+')) {
        lhs = binary(Expr::Op::Add, lhs, parse_term());
      } else if (accept('-')) {
        lhs = binary(Expr::Op::Sub, lhs, parse_term());
      } else {
        return lhs;
      }
    }
  }

  int parse_term() {
    int lhs = parse_unary();
    for (;;) {
      if (accept('*')) {
        lhs = binary(Expr::Op::Mul, lhs, parse_unary());
      } else if (accept('/')) {
        lhs = binary(Expr::Op::Div, lhs, parse_unary());
      } else {
        return lhs;
      }
    }
  }

  int parse_unary() {
    if (accept('-')) {
      Expr::Node n{Expr::Op::Neg};
      n.lhs = parse_unary();
      return push(n);
    }
    if (accept('+')) return parse_unary();
    return parse_power();
  }

  int parse_power() {
    const int base = parse_primary();
    if (accept('^')) return binary(Expr::Op::Pow, base, parse_unary());
    return base;
  }

  int parse_number() {
    const std::size_t start = pos_;
    auto digits = [&] {
      while (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) ++pos_;
    };
    digits();
    if (pos_ < text_.size() && text_[pos_] == '.') {
      ++pos_;
      digits();
    }
    if (pos_ < text_.size() && (text_[pos_] == 'e' || text_[pos_] == 'E')) {
      std::size_t save = pos_++;
      if (pos_ < text_.size() && (text_[pos_] == '+' || text_[pos_] == '-')) ++pos_;
      if (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) {
        digits();
      } else {
        pos_ = save;
      }
    }
    double value = 0.0;
    const auto res = std::from_chars(text_.data() + start, text_.data() + pos_, value);
    if (res.ec != std::errc() || res.ptr != text_.data() + pos_ || !std::isfinite(value)) {
      pos_ = start;
      fail("malformed number");
    }
    Expr::Node n{Expr::Op::Const};
    n.value = value;
    return push(n);
  }

  int parse_primary() {
    skip_ws();
    if (pos_ >= text_.size()) fail("unexpected end of input");
    const char c = text_[pos_];
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') return parse_number();
    if (c == '(') {
      ++pos_;
      const int inner = parse_expr();
      if (!accept(')')) fail("expected ')'");
      return inner;
    }
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
      const std::size_t start = pos_;
      while (pos_ < text_.size() &&
             (std::isalnum(static_cast<unsigned char>(text_[pos_])) || text_[pos_] == '_')) {
        ++pos_;
      }
      const std::string_view name = text_.substr(start, pos_ - start);
      skip_ws();
      if (pos_ < text_.size() && text_[pos_] == '(') {
        const BuiltinInfo* info = find_builtin(name);
        if (info == nullptr) {
          throw ExprError(ExprError::Kind::UnknownIdentifier,
                          "unknown function '" + std::string(name) + "'", start,
                          std::string(name));
        }
        ++pos_;
        Expr::Node n{Expr::Op::Call};
        n.fn = info->fn;
        n.lhs = parse_expr();
        if (info->arity == 2) {
          if (!accept(',')) fail("expected ',' in call to " + std::string(name));
          n.rhs = parse_expr();
        }
        if (!accept(')')) fail("expected ')' closing call to " + std::string(name));
        return push(n);
      }
      const int slot = layout_->slot(name);
      if (slot < 0) {
        throw ExprError(ExprError::Kind::UnknownIdentifier,
                        "unknown identifier '" + std::string(name) + "'", start,
                        std::string(name));
      }
      Expr::Node n{Expr::Op::Var};
      n.slot = slot;
      return push(n);
    }
    fail("unexpected character '" + std::string(1, c) + "'");
  }

  std::string_view text_;
  std::shared_ptr<const VarLayout> layout_;
  std::vector<Expr::Node> nodes_;
  std::size_t pos_ = 0;
};

Expr parse_expr(std::string_view text, std::shared_ptr<const VarLayout> layout) {
  return ExprParser(text, std::move(layout)).parse();
}

Expr parse_expr(std::string_view text, int dim, const std::vector<std::string>& extra_names) {
  return parse_expr(text, std::make_shared<const VarLayout>(dim, extra_names));
}

// ---------------------------------------------------------------------------
// Evaluation

double Expr::eval_node(int index, std::span<const double> slots) const {
  const Node& n = (*nodes_)[static_cast<std::size_t>(index)];
  switch (n.op) {
    case Op::Const: return n.value;
    case Op::Var: return slots[static_cast<std::size_t>(n.slot)];
    case Op::Neg: return -eval_node(n.lhs, slots);
    case Op::Add: return checked(eval_node(n.lhs, slots) + eval_node(n.rhs, slots), "+");
    case Op::Sub: return checked(eval_node(n.lhs, slots) - eval_node(n.rhs, slots), "-");
    case Op::Mul: return checked(eval_node(n.lhs, slots) * eval_node(n.rhs, slots), "*");
    case Op::Div: {
      const double num = eval_node(n.lhs, slots);
      const double den = eval_node(n.rhs, slots);
      if (den == 0.0) domain_error("division by zero");
      return checked(num / den, "/");
    }
    case Op::Pow: {
      const double base = eval_node(n.lhs, slots);
      const double exponent = eval_node(n.rhs, slots);
      const bool integral = std::nearbyint(exponent) == exponent;
      if (!integral && base < 0.0) domain_error("negative base with non-integer exponent");
      if (base == 0.0 && exponent < 0.0) domain_error("zero to a negative power");
      return checked(std::pow(base, exponent), "^");
    }
    case Op::Call: {
      const double a = eval_node(n.lhs, slots);
      const double b = n.rhs >= 0 ? eval_node(n.rhs, slots) : 0.0;
      return apply_builtin(n.fn, a, b);
    }
  }
  return 0.0;
}

double Expr::eval(std::span<const double> slots) const {
  if (empty()) throw ExprError(ExprError::Kind::Unbound, "evaluating an empty expression");
  if (slots.size() < layout_->size()) {
    throw ExprError(ExprError::Kind::Unbound, "slot vector shorter than the variable layout");
  }
  return eval_node(root_, slots);
}

double Expr::eval(const std::map<std::string, double>& env) const {
  if (empty()) throw ExprError(ExprError::Kind::Unbound, "evaluating an empty expression");
  std::vector<double> slots(layout_->size(), 0.0);
  for (const auto& name : free_variables()) {
    const auto it = env.find(name);
    if (it == env.end()) {
      throw ExprError(ExprError::Kind::Unbound, "unbound variable '" + name + "'", 0, name);
    }
    slots[static_cast<std::size_t>(layout_->slot(name))] = it->second;
  }
  return eval_node(root_, slots);
}

Expr Expr::bind(std::string_view name, double value) const {
  const int slot = layout_->slot(name);
  if (slot < 0 || !uses(name)) return *this;
  auto nodes = *nodes_;
  for (auto& n : nodes) {
    if (n.op == Op::Var && n.slot == slot) {
      n = Node{Op::Const};
      n.value = value;
    }
  }
  Expr out = *this;
  out.nodes_ = std::make_shared<const std::vector<Node>>(std::move(nodes));
  return out;
}

std::vector<std::string> Expr::free_variables() const {
  std::vector<bool> used(layout_ ? layout_->size() : 0, false);
  if (nodes_) {
    // Nodes orphaned by bind() keep their slot only if they are still Var.
    std::vector<int> stack{root_};
    while (!stack.empty()) {
      const Node& n = (*nodes_)[static_cast<std::size_t>(stack.back())];
      stack.pop_back();
      if (n.op == Op::Var) used[static_cast<std::size_t>(n.slot)] = true;
      if (n.lhs >= 0) stack.push_back(n.lhs);
      if (n.rhs >= 0) stack.push_back(n.rhs);
    }
  }
  std::vector<std::string> names;
  for (std::size_t i = 0; i < used.size(); ++i) {
    if (used[i]) names.push_back(layout_->name(i));
  }
  return names;
}

bool Expr::uses(std::string_view name) const {
  const auto vars = free_variables();
  return std::find(vars.begin(), vars.end(), name) != vars.end();
}

void Expr::print_node(int index, std::string& out) const {
  const Node& n = (*nodes_)[static_cast<std::size_t>(index)];
  auto bin = [&](const char* op) {
    out += '(';
    print_node(n.lhs, out);
    out += ' ';
    out += op;
    out += ' ';
    print_node(n.rhs, out);
    out += ')';
  };
  switch (n.op) {
    case Op::Const: {
      char buf[40];
      std::snprintf(buf, sizeof buf, "%.17g", std::fabs(n.value));
      if (std::signbit(n.value)) {
        out += "(-";
        out += buf;
        out += ')';
      } else {
        out += buf;
      }
      break;
    }
    case Op::Var: out += layout_->name(static_cast<std::size_t>(n.slot)); break;
    case Op::Neg:
      out += "(-";
      print_node(n.lhs, out);
      out += ')';
      break;
    case Op::Add: bin("+"); break;
    case Op::Sub: bin("-"); break;
    case Op::Mul: bin("*"); break;
    case Op::Div: bin("/"); break;
    case Op::Pow: bin("^"); break;
    case Op::Call:
      out += builtin_name(n.fn);
      out += '(';
      print_node(n.lhs, out);
      if (n.rhs >= 0) {
        out += ", ";
        print_node(n.rhs, out);
      }
      out += ')';
      break;
  }
}

std::string Expr::to_string() const {
  if (empty()) return {};
  std::string out;
  print_node(root_, out);
  return out;
}

namespace {

bool same_tree(const Expr& a, const std::vector<Expr::Node>& an, int ai, const Expr& b,
               const std::vector<Expr::Node>& bn, int bi) {
  const auto& x = an[static_cast<std::size_t>(ai)];
  const auto& y = bn[static_cast<std::size_t>(bi)];
  if (x.op != y.op) return false;
  switch (x.op) {
    case Expr::Op::Const:
      return std::bit_cast<std::uint64_t>(x.value) == std::bit_cast<std::uint64_t>(y.value);
    case Expr::Op::Var:
      return a.layout().name(static_cast<std::size_t>(x.slot)) ==
             b.layout().name(static_cast<std::size_t>(y.slot));
    case Expr::Op::Call:
      if (x.fn != y.fn) return false;
      break;
    default: break;
  }
  if ((x.lhs >= 0) != (y.lhs >= 0) || (x.rhs >= 0) != (y.rhs >= 0)) return false;
  if (x.lhs >= 0 && !same_tree(a, an, x.lhs, b, bn, y.lhs)) return false;
  if (x.rhs >= 0 && !same_tree(a, an, x.rhs, b, bn, y.rhs)) return false;
  return true;
}

}  // namespace

bool operator==(const Expr& a, const Expr& b) {
  if (a.empty() || b.empty()) return a.empty() == b.empty();
  return same_tree(a, *a.nodes_, a.root_, b, *b.nodes_, b.root_);
}

}  // namespace semilin
