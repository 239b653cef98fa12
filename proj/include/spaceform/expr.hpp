#pragma once

#include <memory>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "spaceform/jet.hpp"
#include "spaceform/linalg.hpp"

namespace spaceform {

enum class ValueType { real, complex };

enum class Func { log, exp, abs2, re, im, conj };

struct Node;
using NodePtr = std::shared_ptr<const Node>;

/// Expression tree node. Trees are immutable once built by the parser.
struct Node {
  enum class Kind { number, imag_unit, variable, neg, add, sub, mul, div, pow, call };
  Kind kind = Kind::number;
  double number = 0.0;  // Kind::number
  int var = 0;          // Kind::variable, 0-based
  Func func = Func::log;
  NodePtr lhs, rhs;  // operands; call/neg use lhs only
  int line = 1;
  int column = 1;
  ValueType type = ValueType::complex;
  bool constant = false;  // no variables below this node
};

/// Parsed expression over complex variables z1..zn.
///
/// Grammar (precedence high to low): ^ (right assoc), unary -, * /, + -.
/// Functions: log exp abs2 re im conj. Non-integer exponents need a real base.
class Expr {
 public:
  static Expr parse(std::string_view text);

  std::string print() const;
  ValueType type() const { return root_->type; }
  /// Highest variable index used, 1-based; 0 for constant expressions.
  int max_variable() const;
  const Node& root() const { return *root_; }

  /// Throws TypeError unless the expression is real-valued.
  void require_real() const;

  cplx eval(std::span<const cplx> z) const;
  /// Taylor-mode evaluation; `z` are jets for z1..zn in a common JetSpace.
  Jet eval(std::span<const Jet> z) const;

  struct Dual {
    cplx value;
    /// d/dx_k and d/dy_k for z_k = x_k + i y_k, interleaved (x1, y1, x2, y2, ...).
    std::vector<cplx> gradient;
  };
  Dual eval_dual(std::span<const cplx> z) const;

  friend bool same_tree(const Expr& a, const Expr& b);

 private:
  explicit Expr(NodePtr root) : root_(std::move(root)) {}
  NodePtr root_;
};

bool same_tree(const Expr& a, const Expr& b);

/// A holomorphic test map z -> (F_1(z), ..., F_n(z)) built from expressions.
class ExprMap {
 public:
  explicit ExprMap(std::vector<Expr> components) : comps_(std::move(components)) {}
  static ExprMap parse(const std::vector<std::string>& texts);

  std::size_t size() const { return comps_.size(); }
  const Expr& component(std::size_t i) const { return comps_[i]; }
  CVec eval(const CVec& z) const;
  /// Complex Jacobian d F_i / d z_j.
  CMat jacobian(const CVec& z) const;
  /// Largest |d F_i / d zbar_j|; zero for holomorphic maps.
  double antiholomorphic_part(const CVec& z) const;

 private:
  std::vector<Expr> comps_;
};

}  // namespace spaceform
