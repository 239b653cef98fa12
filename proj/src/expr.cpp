#include "spaceform/expr.hpp"

#include <charconv>
#include <cmath>
#include <sstream>

#include "spaceform/errors.hpp"

namespace spaceform {

namespace {

// ---------------------------------------------------------------- tokens

enum class Tok { number, ident, plus, minus, star, slash, caret, lparen, rparen, end };

struct Token {
  Tok kind = Tok::end;
  std::string text;
  double number = 0.0;
  int line = 1;
  int column = 1;
};

std::string describe(Tok t) {
  switch (t) {
    case Tok::number: return "number";
    case Tok::ident: return "identifier";
    case Tok::plus: return "'+'";
    case Tok::minus: return "'-'";
    case Tok::star: return "'*'";
    case Tok::slash: return "'/'";
    case Tok::caret: return "'^'";
    case Tok::lparen: return "'('";
    case Tok::rparen: return "')'";
    case Tok::end: return "end of input";
  }
  return "?";
}

class Lexer {
 public:
  explicit Lexer(std::string_view text) : text_(text) {}

  Token next() {
    skip_space();
    Token t;
    t.line = line_;
    t.column = column_;
    if (pos_ >= text_.size()) {
      t.kind = Tok::end;
      return t;
    }
    const char ch = text_[pos_];
    if (std::isdigit(static_cast<unsigned char>(ch)) || ch == '.') return lex_number(t);
    if (std::isalpha(static_cast<unsigned char>(ch)) || ch == '_') {
      std::size_t start = pos_;
      while (pos_ < text_.size() &&
             (std::isalnum(static_cast<unsigned char>(text_[pos_])) || text_[pos_] == '_'))
        advance();
      t.kind = Tok::ident;
      t.text = std::string(text_.substr(start, pos_ - start));
      return t;
    }
    advance();
    t.text = std::string(1, ch);
    switch (ch) {
      case '+': t.kind = Tok::plus; break;
      case '-': t.kind = Tok::minus; break;
      case '*': t.kind = Tok::star; break;
      case '/': t.kind = Tok::slash; break;
      case '^': t.kind = Tok::caret; break;
      case '(': t.kind = Tok::lparen; break;
      case ')': t.kind = Tok::rparen; break;
      default:
        throw ParseError("unexpected character '" + t.text + "' at line " +
                             std::to_string(t.line) + ", column " + std::to_string(t.column),
                         t.line, t.column, {"number", "identifier", "'('", "'-'"});
    }
    return t;
  }

 private:
  void advance() {
    if (text_[pos_] == '\n') {
      ++line_;
      column_ = 1;
    } else {
      ++column_;
    }
    ++pos_;
  }

  void skip_space() {
    while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) advance();
  }

  Token lex_number(Token t) {
    std::size_t start = pos_;
    auto digits = [&] {
      while (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) advance();
    };
    digits();
    if (pos_ < text_.size() && text_[pos_] == '.') {
      advance();
      digits();
    }
    if (pos_ < text_.size() && (text_[pos_] == 'e' || text_[pos_] == 'E')) {
      std::size_t save = pos_;
      int save_col = column_;
      advance();
      if (pos_ < text_.size() && (text_[pos_] == '+' || text_[pos_] == '-')) advance();
      if (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) {
        digits();
      } else {
        pos_ = save;
        column_ = save_col;
      }
    }
    t.kind = Tok::number;
    t.text = std::string(text_.substr(start, pos_ - start));
    auto [ptr, ec] = std::from_chars(t.text.data(), t.text.data() + t.text.size(), t.number);
    if (ec != std::errc() || ptr != t.text.data() + t.text.size())
      throw ParseError("malformed number '" + t.text + "' at column " + std::to_string(t.column),
                       t.line, t.column, {"number"});
    return t;
  }

  std::string_view text_;
  std::size_t pos_ = 0;
  int line_ = 1;
  int column_ = 1;
};

// ---------------------------------------------------------------- parser

NodePtr make(Node n) { return std::make_shared<const Node>(std::move(n)); }

bool is_integer(double x) { return std::isfinite(x) && x == std::round(x); }

double constant_value(const Node& n);

class Parser {
 public:
  explicit Parser(std::string_view text) : lex_(text) { cur_ = lex_.next(); }

  NodePtr parse_all() {
    NodePtr e = expr();
    if (cur_.kind != Tok::end) fail({"operator", "end of input"});
    return e;
  }

 private:
  [[noreturn]] void fail(std::vector<std::string> expected) {
    std::ostringstream os;
    os << "syntax error at line " << cur_.line << ", column " << cur_.column << ": found "
       << (cur_.kind == Tok::end ? describe(Tok::end) : "'" + cur_.text + "'") << ", expected ";
    for (std::size_t i = 0; i < expected.size(); ++i) os << (i ? " or " : "") << expected[i];
    throw ParseError(os.str(), cur_.line, cur_.column, std::move(expected));
  }

  Token take() {
    Token t = cur_;
    cur_ = lex_.next();
    return t;
  }

  NodePtr expr() {
    NodePtr lhs = term();
    while (cur_.kind == Tok::plus || cur_.kind == Tok::minus) {
      Token op = take();
      NodePtr rhs = term();
      lhs = binary(op.kind == Tok::plus ? Node::Kind::add : Node::Kind::sub, lhs, rhs, op);
    }
    return lhs;
  }

  NodePtr term() {
    NodePtr lhs = unary();
    while (cur_.kind == Tok::star || cur_.kind == Tok::slash) {
      Token op = take();
      NodePtr rhs = unary();
      lhs = binary(op.kind == Tok::star ? Node::Kind::mul : Node::Kind::div, lhs, rhs, op);
    }
    return lhs;
  }

  NodePtr unary() {
    if (cur_.kind == Tok::minus) {
      Token op = take();
      NodePtr arg = unary();
      Node n;
      n.kind = Node::Kind::neg;
      n.lhs = arg;
      n.line = op.line;
      n.column = op.column;
      n.type = arg->type;
      n.constant = arg->constant;
      return make(std::move(n));
    }
    return power();
  }

  NodePtr power() {
    NodePtr base = primary();
    if (cur_.kind != Tok::caret) return base;
    Token op = take();
    NodePtr exponent = unary();
    if (!exponent->constant || exponent->type != ValueType::real)
      throw TypeError("exponent at column " + std::to_string(exponent->column) +
                          " must be a real constant",
                      exponent->column);
    const double p = constant_value(*exponent);
    if (!is_integer(p) && base->type != ValueType::real)
      throw TypeError("non-integer power at column " + std::to_string(op.column) +
                          " requires a real base",
                      op.column);
    Node n;
    n.kind = Node::Kind::pow;
    n.lhs = base;
    n.rhs = exponent;
    n.line = op.line;
    n.column = op.column;
    n.type = base->type;
    n.constant = base->constant;
    return make(std::move(n));
  }

  NodePtr primary() {
    if (cur_.kind == Tok::number) {
      Token t = take();
      Node n;
      n.kind = Node::Kind::number;
      n.number = t.number;
      n.line = t.line;
      n.column = t.column;
      n.type = ValueType::real;
      n.constant = true;
      return make(std::move(n));
    }
    if (cur_.kind == Tok::lparen) {
      take();
      NodePtr e = expr();
      if (cur_.kind != Tok::rparen) fail({"')'"});
      take();
      return e;
    }
    if (cur_.kind == Tok::ident) {
      Token t = take();
      if (t.text == "i") {
        Node n;
        n.kind = Node::Kind::imag_unit;
        n.line = t.line;
        n.column = t.column;
        n.type = ValueType::complex;
        n.constant = true;
        return make(std::move(n));
      }
      if (t.text.size() > 1 && t.text[0] == 'z') {
        int idx = 0;
        auto [ptr, ec] = std::from_chars(t.text.data() + 1, t.text.data() + t.text.size(), idx);
        if (ec == std::errc() && ptr == t.text.data() + t.text.size() && idx >= 1) {
          Node n;
          n.kind = Node::Kind::variable;
          n.var = idx - 1;
          n.line = t.line;
          n.column = t.column;
          n.type = ValueType::complex;
          return make(std::move(n));
        }
      }
      static const std::pair<const char*, Func> funcs[] = {
          {"log", Func::log}, {"exp", Func::exp}, {"abs2", Func::abs2},
          {"re", Func::re},   {"im", Func::im},   {"conj", Func::conj}};
      for (const auto& [name, f] : funcs) {
        if (t.text != name) continue;
        if (cur_.kind != Tok::lparen) fail({"'('"});
        take();
        NodePtr arg = expr();
        if (cur_.kind != Tok::rparen) fail({"')'"});
        take();
        Node n;
        n.kind = Node::Kind::call;
        n.func = f;
        n.lhs = arg;
        n.line = t.line;
        n.column = t.column;
        n.constant = arg->constant;
        switch (f) {
          case Func::log:
            if (arg->type != ValueType::real)
              throw TypeError("log at column " + std::to_string(t.column) +
                                  " requires a real argument",
                              t.column);
            n.type = ValueType::real;
            break;
          case Func::exp:
          case Func::conj: n.type = arg->type; break;
          case Func::abs2:
          case Func::re:
          case Func::im: n.type = ValueType::real; break;
        }
        return make(std::move(n));
      }
      throw ParseError("unknown identifier '" + t.text + "' at line " + std::to_string(t.line) +
                           ", column " + std::to_string(t.column),
                       t.line, t.column,
                       {"z<k>", "i", "log", "exp", "abs2", "re", "im", "conj"});
    }
    fail({"number", "identifier", "'('", "'-'"});
  }

  NodePtr binary(Node::Kind kind, NodePtr lhs, NodePtr rhs, const Token& op) {
    Node n;
    n.kind = kind;
    n.type = (lhs->type == ValueType::real && rhs->type == ValueType::real) ? ValueType::real
                                                                          : ValueType::complex;
    n.constant = lhs->constant && rhs->constant;
    n.lhs = std::move(lhs);
    n.rhs = std::move(rhs);
    n.line = op.line;
    n.column = op.column;
    return make(std::move(n));
  }

  Lexer lex_;
  Token cur_;
};

// ---------------------------------------------------------------- evaluation

// Scalar operations for the two evaluation modes.
struct ComplexOps {
  using T = cplx;
  std::span<const cplx> z;
  T constant(cplx c) const { return c; }
  T var(int k) const { return z[static_cast<std::size_t>(k)]; }
  static cplx value(const T& t) { return t; }
  static T mul(const T& a, const T& b) { return a * b; }
  static T div(const T& a, const T& b) { return a / b; }
  static T log(const T& a) { return std::log(a.real()); }
  static T exp(const T& a) { return std::exp(a); }
  static T conj(const T& a) { return std::conj(a); }
  static T re(const T& a) { return a.real(); }
  static T im(const T& a) { return a.imag(); }
  static T pow(const T& a, double p) {
    if (is_integer(p)) {
      int k = static_cast<int>(p);
      T r = 1.0, b = a;
      for (int e = std::abs(k); e > 0; e >>= 1) {
        if (e & 1) r *= b;
        b *= b;
      }
      return k < 0 ? 1.0 / r : r;
    }
    return std::pow(a.real(), p);
  }
  CVec point() const { return from_list({z.begin(), z.end()}); }
};

struct JetOps {
  using T = Jet;
  std::span<const Jet> z;
  T constant(cplx c) const { return Jet(z[0].space(), c); }
  T var(int k) const { return z[static_cast<std::size_t>(k)]; }
  static cplx value(const T& t) { return t.value(); }
  static T mul(const T& a, const T& b) { return a * b; }
  static T div(const T& a, const T& b) { return a * reciprocal(b); }
  static T log(const T& a) { return jet_log(a); }
  static T exp(const T& a) { return jet_exp(a); }
  static T conj(const T& a) { return a.conj(); }
  static T re(const T& a) { return (a + a.conj()) * 0.5; }
  static T im(const T& a) { return (a - a.conj()) * cplx(0.0, -0.5); }
  static T pow(const T& a, double p) { return jet_pow(a, p); }
  CVec point() const {
    CVec p(static_cast<Eigen::Index>(z.size()));
    for (std::size_t i = 0; i < z.size(); ++i) p[static_cast<Eigen::Index>(i)] = z[i].value();
    return p;
  }
};

template <class Ops>
typename Ops::T evaluate(const Node& n, const Ops& ops) {
  using T = typename Ops::T;
  switch (n.kind) {
    case Node::Kind::number: return ops.constant(n.number);
    case Node::Kind::imag_unit: return ops.constant(I_unit);
    case Node::Kind::variable:
      if (static_cast<std::size_t>(n.var) >= ops.z.size())
        throw EvalError("variable z" + std::to_string(n.var + 1) + " out of range", ops.point());
      return ops.var(n.var);
    case Node::Kind::neg: return -evaluate(*n.lhs, ops);
    case Node::Kind::add: return evaluate(*n.lhs, ops) + evaluate(*n.rhs, ops);
    case Node::Kind::sub: return evaluate(*n.lhs, ops) - evaluate(*n.rhs, ops);
    case Node::Kind::mul: return Ops::mul(evaluate(*n.lhs, ops), evaluate(*n.rhs, ops));
    case Node::Kind::div: {
      T den = evaluate(*n.rhs, ops);
      if (Ops::value(den) == cplx(0.0)) throw EvalError("division by zero", ops.point());
      return Ops::div(evaluate(*n.lhs, ops), den);
    }
    case Node::Kind::pow: {
      const double p = constant_value(*n.rhs);
      T base = evaluate(*n.lhs, ops);
      const cplx b = Ops::value(base);
      if (!is_integer(p) && !(b.real() > 0.0))
        throw EvalError("non-integer power of a non-positive value", ops.point());
      if (p < 0 && b == cplx(0.0)) throw EvalError("negative power of zero", ops.point());
      return Ops::pow(base, p);
    }
    case Node::Kind::call: {
      T a = evaluate(*n.lhs, ops);
      switch (n.func) {
        case Func::log:
          if (!(Ops::value(a).real() > 0.0))
            throw EvalError("log of a non-positive value", ops.point());
          return Ops::log(a);
        case Func::exp: return Ops::exp(a);
        case Func::abs2: return Ops::mul(a, Ops::conj(a));
        case Func::re: return Ops::re(a);
        case Func::im: return Ops::im(a);
        case Func::conj: return Ops::conj(a);
      }
    }
  }
  throw EvalError("corrupt expression node", ops.point());
}

double constant_value(const Node& n) {
  ComplexOps ops;
  return evaluate(n, ops).real();
}

// ---------------------------------------------------------------- printing

int precedence(const Node& n) {
  switch (n.kind) {
    case Node::Kind::add:
    case Node::Kind::sub: return 1;
    case Node::Kind::mul:
    case Node::Kind::div: return 2;
    case Node::Kind::neg: return 3;
    case Node::Kind::pow: return 4;
    default: return 5;
  }
}

std::string format_number(double x) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, x);
  return std::string(buf, ptr);
}

const char* func_name(Func f) {
  switch (f) {
    case Func::log: return "log";
    case Func::exp: return "exp";
    case Func::abs2: return "abs2";
    case Func::re: return "re";
    case Func::im: return "im";
    case Func::conj: return "conj";
  }
  return "?";
}

void print_node(const Node& n, std::string& out);

void print_wrapped(const Node& n, bool parens, std::string& out) {
  if (parens) out += '(';
  print_node(n, out);
  if (parens) out += ')';
}

void print_node(const Node& n, std::string& out) {
  switch (n.kind) {
    case Node::Kind::number: out += format_number(n.number); return;
    case Node::Kind::imag_unit: out += 'i'; return;
    case Node::Kind::variable: out += "z" + std::to_string(n.var + 1); return;
    case Node::Kind::neg:
      out += '-';
      print_wrapped(*n.lhs, precedence(*n.lhs) < 3, out);
      return;
    case Node::Kind::pow:
      print_wrapped(*n.lhs, precedence(*n.lhs) < 5, out);
      out += '^';
      print_wrapped(*n.rhs, precedence(*n.rhs) < 3, out);
      return;
    case Node::Kind::call:
      out += func_name(n.func);
      out += '(';
      print_node(*n.lhs, out);
      out += ')';
      return;
    default: {
      const int p = precedence(n);
      const char* op = n.kind == Node::Kind::add   ? " + "
                       : n.kind == Node::Kind::sub ? " - "
                       : n.kind == Node::Kind::mul ? "*"
                                                   : "/";
      print_wrapped(*n.lhs, precedence(*n.lhs) < p, out);
      out += op;
      print_wrapped(*n.rhs, precedence(*n.rhs) <= p, out);
    }
  }
}

bool same_node(const Node& a, const Node& b) {
  if (a.kind != b.kind) return false;
  switch (a.kind) {
    case Node::Kind::number: return a.number == b.number;
    case Node::Kind::imag_unit: return true;
    case Node::Kind::variable: return a.var == b.var;
    case Node::Kind::neg: return same_node(*a.lhs, *b.lhs);
    case Node::Kind::call: return a.func == b.func && same_node(*a.lhs, *b.lhs);
    default: return same_node(*a.lhs, *b.lhs) && same_node(*a.rhs, *b.rhs);
  }
}

int max_var(const Node& n) {
  int m = n.kind == Node::Kind::variable ? n.var + 1 : 0;
  if (n.lhs) m = std::max(m, max_var(*n.lhs));
  if (n.rhs) m = std::max(m, max_var(*n.rhs));
  return m;
}

}  // namespace

Expr Expr::parse(std::string_view text) {
  if (text.find_first_not_of(" \t\r\n") == std::string_view::npos)
    throw ParseError("empty expression", 1, 1, {"expression"});
  Parser p(text);
  return Expr(p.parse_all());
}

std::string Expr::print() const {
  std::string out;
  print_node(*root_, out);
  return out;
}

int Expr::max_variable() const { return max_var(*root_); }

void Expr::require_real() const {
  if (root_->type != ValueType::real)
    throw TypeError("expression is complex-valued where a real value is required (node at column " +
                        std::to_string(root_->column) + ")",
                    root_->column);
}

cplx Expr::eval(std::span<const cplx> z) const {
  ComplexOps ops{z};
  return evaluate(*root_, ops);
}

Jet Expr::eval(std::span<const Jet> z) const {
  if (z.empty()) throw InvalidInput("jet evaluation needs at least one variable");
  JetOps ops{z};
  return evaluate(*root_, ops);
}

Expr::Dual Expr::eval_dual(std::span<const cplx> z) const {
  const int n = static_cast<int>(z.size());
  const JetSpace& space = JetSpace::get(2 * n, 1);
  std::vector<Jet> vars;
  vars.reserve(z.size());
  for (int k = 0; k < n; ++k) {
    Jet zk = Jet::variable(space, 2 * k, z[static_cast<std::size_t>(k)]);
    vars.push_back(zk);
  }
  Jet f = eval(std::span<const Jet>(vars));
  Dual out{f.value(), std::vector<cplx>(static_cast<std::size_t>(2 * n))};
  for (int k = 0; k < n; ++k) {
    const cplx dz = f.derivative(static_cast<std::size_t>(space.index_of_vars({2 * k})));
    const cplx dzb = f.derivative(static_cast<std::size_t>(space.index_of_vars({2 * k + 1})));
    out.gradient[static_cast<std::size_t>(2 * k)] = dz + dzb;
    out.gradient[static_cast<std::size_t>(2 * k + 1)] = I_unit * (dz - dzb);
  }
  return out;
}

bool same_tree(const Expr& a, const Expr& b) { return same_node(*a.root_, *b.root_); }

ExprMap ExprMap::parse(const std::vector<std::string>& texts) {
  std::vector<Expr> comps;
  for (const auto& t : texts) comps.push_back(Expr::parse(t));
  return ExprMap(std::move(comps));
}

CVec ExprMap::eval(const CVec& z) const {
  std::vector<cplx> zz(z.data(), z.data() + z.size());
  CVec out(static_cast<Eigen::Index>(comps_.size()));
  for (std::size_t i = 0; i < comps_.size(); ++i)
    out[static_cast<Eigen::Index>(i)] = comps_[i].eval(std::span<const cplx>(zz));
  return out;
}

namespace {

std::vector<Jet> first_order_vars(const CVec& z) {
  const int n = static_cast<int>(z.size());
  const JetSpace& space = JetSpace::get(2 * n, 1);
  std::vector<Jet> vars;
  for (int k = 0; k < n; ++k) vars.push_back(Jet::variable(space, 2 * k, z[k]));
  return vars;
}

}  // namespace

CMat ExprMap::jacobian(const CVec& z) const {
  auto vars = first_order_vars(z);
  const JetSpace& space = vars[0].space();
  CMat J(static_cast<Eigen::Index>(comps_.size()), z.size());
  for (std::size_t i = 0; i < comps_.size(); ++i) {
    Jet f = comps_[i].eval(std::span<const Jet>(vars));
    for (int k = 0; k < z.size(); ++k)
      J(static_cast<Eigen::Index>(i), k) =
          f.derivative(static_cast<std::size_t>(space.index_of_vars({2 * k})));
  }
  return J;
}

double ExprMap::antiholomorphic_part(const CVec& z) const {
  auto vars = first_order_vars(z);
  const JetSpace& space = vars[0].space();
  double worst = 0.0;
  for (const auto& c : comps_) {
    Jet f = c.eval(std::span<const Jet>(vars));
    for (int k = 0; k < z.size(); ++k)
      worst = std::max(worst, std::abs(f.derivative(
                                  static_cast<std::size_t>(space.index_of_vars({2 * k + 1})))));
  }
  return worst;
}

}  // namespace spaceform
