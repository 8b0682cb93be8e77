#pragma once

// Small arithmetic expression language for problem data.
//
//   expr    := term { ('+' | '-') term }
//   term    := unary { ('*' | '/') unary }
//   unary   := ('-' | '+') unary | power
//   power   := primary [ '^' unary ]          (right associative)
//   primary := number | name | name '(' expr { ',' expr } ')' | '(' expr ')'
//
// Variables for dimension d: x1..xd, s, xi1..xid, gnorm (= |xi|), plus any
// extra names the caller declares (e.g. lambda1, eps, Lmax).

#include <map>
#include <memory>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "semilin/error.hpp"

namespace semilin {

enum class Builtin { Abs, Sign, Min, Max, Exp, Sin, Cos, Sqrt, PosPart };

/// Fixed mapping of variable names onto evaluation slots.
///
/// Slots 0..d-1 hold x1..xd, slot d holds s, slots d+1..2d hold xi1..xid,
/// slot 2d+1 holds gnorm and the extra names follow in declaration order.
class VarLayout {
 public:
  explicit VarLayout(int dim, std::vector<std::string> extra = {});

  int dim() const noexcept { return dim_; }
  std::size_t size() const noexcept { return names_.size(); }
  const std::string& name(std::size_t slot) const { return names_.at(slot); }
  /// Returns -1 when the name is not declared.
  int slot(std::string_view name) const;

  std::size_t x(int i) const { return static_cast<std::size_t>(i); }
  std::size_t s() const { return static_cast<std::size_t>(dim_); }
  std::size_t xi(int i) const { return static_cast<std::size_t>(dim_ + 1 + i); }
  std::size_t gnorm() const { return static_cast<std::size_t>(2 * dim_ + 1); }

 private:
  int dim_;
  std::vector<std::string> names_;
};

/// Immutable parsed expression. Copies share the node storage.
class Expr {
 public:
  enum class Op { Const, Var, Neg, Add, Sub, Mul, Div, Pow, Call };

  struct Node {
    Op op;
    double value = 0.0;   // Const
    int slot = -1;        // Var
    Builtin fn{};         // Call
    int lhs = -1;
    int rhs = -1;
  };

  Expr() = default;

  /// Evaluates with every slot of the layout bound (fast path).
  double eval(std::span<const double> slots) const;
  /// Evaluates with a name -> value environment.
  double eval(const std::map<std::string, double>& env) const;

  /// Replaces every occurrence of a variable by a constant.
  Expr bind(std::string_view name, double value) const;

  /// Names of the variables referenced by the tree, in slot order.
  std::vector<std::string> free_variables() const;
  bool uses(std::string_view name) const;

  /// Fully parenthesised form that re-parses to an identical tree.
  std::string to_string() const;

  const VarLayout& layout() const { return *layout_; }
  std::shared_ptr<const VarLayout> layout_ptr() const { return layout_; }
  bool empty() const noexcept { return nodes_ == nullptr; }

  friend bool operator==(const Expr& a, const Expr& b);

 private:
  friend class ExprParser;
  double eval_node(int index, std::span<const double> slots) const;
  void print_node(int index, std::string& out) const;

  std::shared_ptr<const std::vector<Node>> nodes_;
  std::shared_ptr<const VarLayout> layout_;
  int root_ = -1;
  std::string source_;
};

Expr parse_expr(std::string_view text, int dim,
                const std::vector<std::string>& extra_names = {});

Expr parse_expr(std::string_view text, std::shared_ptr<const VarLayout> layout);

/// Pointwise values of the builtins; exposed for tests.
double apply_builtin(Builtin fn, double a, double b = 0.0);

}  // namespace semilin
