#include "nullgeo/expr.hpp"

#include <cctype>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <numeric>

#include "nullgeo/errors.hpp"

namespace nullgeo {

Jet2 Jet2::constant(double v, Eigen::Index n, int order) {
  Jet2 j;
  j.value = v;
  j.grad = Vec::Zero(n);
  if (order >= 2) j.hess = Mat::Zero(n, n);
  return j;
}

Jet2 Jet2::variable(double v, Eigen::Index index, Eigen::Index n, int order) {
  Jet2 j = constant(v, n, order);
  j.grad(index) = 1.0;
  return j;
}

namespace {

using NodePtr = std::shared_ptr<const Node>;

bool is_function_name(std::string_view s) {
  return s == "sin" || s == "cos" || s == "sqrt" || s == "exp";
}

NodeKind function_kind(std::string_view s) {
  if (s == "sin") return NodeKind::Sin;
  if (s == "cos") return NodeKind::Cos;
  if (s == "sqrt") return NodeKind::Sqrt;
  return NodeKind::Exp;
}

NodePtr make_node(NodeKind kind, std::vector<NodePtr> children = {}) {
  auto n = std::make_shared<Node>();
  n->kind = kind;
  n->children = std::move(children);
  return n;
}

class Parser {
 public:
  Parser(std::string_view text, std::span<const std::string> coords,
         std::span<const std::string> params)
      : text_(text), coords_(coords), params_(params) {}

  NodePtr parse_all() {
    skip_ws();
    if (at_end()) throw ParseError("empty expression", column());
    NodePtr n = parse_sum();
    skip_ws();
    if (!at_end()) throw ParseError(std::string("unexpected '") + text_[pos_] + "'", column());
    return n;
  }

  std::set<std::string> used_params;

 private:
  bool at_end() const { return pos_ >= text_.size(); }
  std::size_t column() const { return pos_ + 1; }
  void skip_ws() {
    while (!at_end() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
  }
  bool accept(char c) {
    skip_ws();
    if (!at_end() && text_[pos_] == c) {
      ++pos_;
      return true;
    }
    return false;
  }
  void expect(char c) {
    if (!accept(c)) {
      if (at_end()) throw ParseError(std::string("expected '") + c + "' before end of input", column());
      throw ParseError(std::string("expected '") + c + "'", column());
    }
  }

  NodePtr parse_sum() {
    NodePtr lhs = parse_product();
    for (;;) {
      if (accept('+')) {
        lhs = make_node(NodeKind::Add, {lhs, parse_product()});
      } else if (accept('-')) {
        lhs = make_node(NodeKind::Sub, {lhs, parse_product()});
      } else {
        return lhs;
      }
    }
  }

  NodePtr parse_product() {
    NodePtr lhs = parse_unary();
    for (;;) {
      if (accept('*')) {
        lhs = make_node(NodeKind::Mul, {lhs, parse_unary()});
      } else if (accept('/')) {
        lhs = make_node(NodeKind::Div, {lhs, parse_unary()});
      } else {
        return lhs;
      }
    }
  }

  NodePtr parse_unary() {
    if (accept('-')) return make_node(NodeKind::Neg, {parse_unary()});
    return parse_power();
  }

  NodePtr parse_power() {
    NodePtr base = parse_primary();
    if (!accept('^')) return base;
    auto n = std::make_shared<Node>();
    n->kind = NodeKind::Pow;
    n->exponent = parse_exponent();
    n->children = {base};
    return n;
  }

  long parse_integer() {
    skip_ws();
    bool negative = false;
    if (!at_end() && text_[pos_] == '-') {
      negative = true;
      ++pos_;
      skip_ws();
    }
    if (at_end() || !std::isdigit(static_cast<unsigned char>(text_[pos_]))) {
      if (at_end()) throw ParseError("expected integer exponent before end of input", column());
      throw ParseError("expected integer exponent", column());
    }
    long v = 0;
    while (!at_end() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) {
      v = v * 10 + (text_[pos_] - '0');
      if (v > 1'000'000) throw ParseError("exponent too large", column());
      ++pos_;
    }
    if (!at_end() && (text_[pos_] == '.' || text_[pos_] == 'e' || text_[pos_] == 'E'))
      throw ParseError("exponent must be an integer or rational literal", column());
    return negative ? -v : v;
  }

  Rational parse_exponent() {
    Rational r;
    if (accept('(')) {
      r.num = parse_integer();
      if (accept('/')) {
        std::size_t at = column();
        r.den = parse_integer();
        if (r.den == 0) throw ParseError("zero denominator in exponent", at);
      }
      expect(')');
    } else {
      r.num = parse_integer();
    }
    if (r.den < 0) {
      r.den = -r.den;
      r.num = -r.num;
    }
    long g = std::gcd(r.num, r.den);
    if (g > 1) {
      r.num /= g;
      r.den /= g;
    }
    return r;
  }

  NodePtr parse_number() {
    const char* begin = text_.data() + pos_;
    std::size_t len = 0;
    while (pos_ + len < text_.size() &&
           (std::isdigit(static_cast<unsigned char>(text_[pos_ + len])) || text_[pos_ + len] == '.'))
      ++len;
    if (pos_ + len < text_.size() && (text_[pos_ + len] == 'e' || text_[pos_ + len] == 'E')) {
      std::size_t k = len + 1;
      if (pos_ + k < text_.size() && (text_[pos_ + k] == '+' || text_[pos_ + k] == '-')) ++k;
      if (pos_ + k < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_ + k]))) {
        while (pos_ + k < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_ + k]))) ++k;
        len = k;
      }
    }
    std::string literal(begin, len);
    char* end = nullptr;
    double v = std::strtod(literal.c_str(), &end);
    if (end != literal.c_str() + literal.size() || literal == ".")
      throw ParseError("malformed number '" + literal + "'", column());
    pos_ += len;
    auto n = std::make_shared<Node>();
    n->kind = NodeKind::Number;
    n->number = v;
    return n;
  }

  NodePtr parse_primary() {
    skip_ws();
    if (at_end()) throw ParseError("expected operand", column());
    char c = text_[pos_];
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') return parse_number();
    if (c == '(') {
      ++pos_;
      NodePtr inner = parse_sum();
      expect(')');
      return inner;
    }
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
      std::size_t start = pos_;
      while (!at_end() && (std::isalnum(static_cast<unsigned char>(text_[pos_])) || text_[pos_] == '_')) ++pos_;
      std::string name(text_.substr(start, pos_ - start));
      for (std::size_t i = 0; i < coords_.size(); ++i) {
        if (coords_[i] == name) {
          auto n = std::make_shared<Node>();
          n->kind = NodeKind::Coord;
          n->index = i;
          n->name = name;
          return n;
        }
      }
      for (const auto& p : params_) {
        if (p == name) {
          auto n = std::make_shared<Node>();
          n->kind = NodeKind::Param;
          n->name = name;
          used_params.insert(name);
          return n;
        }
      }
      if (is_function_name(name)) {
        skip_ws();
        if (at_end() || text_[pos_] != '(') throw ParseError("expected '(' after " + name, column());
        ++pos_;
        NodePtr arg = parse_sum();
        expect(')');
        return make_node(function_kind(name), {arg});
      }
      throw UnknownSymbolError(name, start + 1);
    }
    throw ParseError(std::string("unexpected '") + c + "'", column());
  }

  std::string_view text_;
  std::span<const std::string> coords_;
  std::span<const std::string> params_;
  std::size_t pos_ = 0;
};

// Chain rule for a scalar function f applied to a jet: f(a), f'(a), f''(a).
Jet2 chain(Jet2 a, double f0, double f1, double f2) {
  if (a.order() >= 2) {
    a.hess *= f1;
    a.hess.noalias() += f2 * a.grad * a.grad.transpose();
  }
  a.grad *= f1;
  a.value = f0;
  return a;
}

Jet2 add(Jet2 a, const Jet2& b, double sign) {
  a.value += sign * b.value;
  a.grad += sign * b.grad;
  if (a.order() >= 2) a.hess += sign * b.hess;
  return a;
}

Jet2 mul(const Jet2& a, const Jet2& b) {
  Jet2 r;
  r.value = a.value * b.value;
  r.grad = a.value * b.grad + b.value * a.grad;
  if (a.order() >= 2) {
    r.hess = a.value * b.hess + b.value * a.hess;
    r.hess.noalias() += a.grad * b.grad.transpose();
    r.hess.noalias() += b.grad * a.grad.transpose();
  }
  return r;
}

double int_pow(double x, long n) {
  double r = 1.0;
  double b = x;
  unsigned long e = static_cast<unsigned long>(n < 0 ? -n : n);
  while (e) {
    if (e & 1UL) r *= b;
    b *= b;
    e >>= 1;
  }
  return n < 0 ? 1.0 / r : r;
}

struct Evaluator {
  std::span<const double> point;
  const Bindings& bindings;
  int order;
  Eigen::Index n;

  Jet2 eval(const Node& node) const {
    switch (node.kind) {
      case NodeKind::Number:
        return Jet2::constant(node.number, n, order);
      case NodeKind::Coord:
        return Jet2::variable(point[node.index], static_cast<Eigen::Index>(node.index), n, order);
      case NodeKind::Param: {
        auto it = bindings.find(node.name);
        if (it == bindings.end()) throw Error("parameter '" + node.name + "' is not bound");
        return Jet2::constant(it->second, n, order);
      }
      case NodeKind::Neg: {
        Jet2 a = eval(*node.children[0]);
        a.value = -a.value;
        a.grad = -a.grad;
        if (order >= 2) a.hess = -a.hess;
        return a;
      }
      case NodeKind::Add:
        return add(eval(*node.children[0]), eval(*node.children[1]), 1.0);
      case NodeKind::Sub:
        return add(eval(*node.children[0]), eval(*node.children[1]), -1.0);
      case NodeKind::Mul:
        return mul(eval(*node.children[0]), eval(*node.children[1]));
      case NodeKind::Div: {
        Jet2 den = eval(*node.children[1]);
        if (den.value == 0.0) throw DomainError("division by zero", render_node(*node.children[1]));
        double inv = 1.0 / den.value;
        Jet2 recip = chain(std::move(den), inv, -inv * inv, 2.0 * inv * inv * inv);
        return mul(eval(*node.children[0]), recip);
      }
      case NodeKind::Pow: {
        Jet2 base = eval(*node.children[0]);
        const Rational& e = node.exponent;
        double x = base.value;
        if (e.is_integer()) {
          long k = e.num;
          if (k == 0) return Jet2::constant(1.0, n, order);
          if (k < 0 && x == 0.0) throw DomainError("negative power of zero", render_node(node));
          double f0 = int_pow(x, k);
          double f1 = static_cast<double>(k) * int_pow(x, k - 1);
          double f2 = (k == 1) ? 0.0 : static_cast<double>(k) * static_cast<double>(k - 1) * int_pow(x, k - 2);
          return chain(std::move(base), f0, f1, f2);
        }
        if (!(x > 0.0)) throw DomainError("fractional power of non-positive value", render_node(node));
        double p = e.to_double();
        double f0 = std::pow(x, p);
        return chain(std::move(base), f0, p * f0 / x, p * (p - 1.0) * f0 / (x * x));
      }
      case NodeKind::Sin: {
        Jet2 a = eval(*node.children[0]);
        double s = std::sin(a.value), c = std::cos(a.value);
        return chain(std::move(a), s, c, -s);
      }
      case NodeKind::Cos: {
        Jet2 a = eval(*node.children[0]);
        double s = std::sin(a.value), c = std::cos(a.value);
        return chain(std::move(a), c, -s, -c);
      }
      case NodeKind::Sqrt: {
        Jet2 a = eval(*node.children[0]);
        if (!(a.value > 0.0)) throw DomainError("sqrt of non-positive value", render_node(node));
        double r = std::sqrt(a.value);
        return chain(std::move(a), r, 0.5 / r, -0.25 / (r * a.value));
      }
      case NodeKind::Exp: {
        Jet2 a = eval(*node.children[0]);
        double v = std::exp(a.value);
        return chain(std::move(a), v, v, v);
      }
    }
    throw Error("corrupt expression node");
  }
};

int precedence(const Node& n) {
  switch (n.kind) {
    case NodeKind::Add:
    case NodeKind::Sub:
      return 1;
    case NodeKind::Mul:
    case NodeKind::Div:
      return 2;
    case NodeKind::Neg:
      return 3;
    case NodeKind::Pow:
      return 4;
    case NodeKind::Number:
      return n.number < 0.0 ? 3 : 5;
    default:
      return 5;
  }
}

std::string render_number(double v) {
  char buf[64];
  for (int prec = 1; prec <= 17; ++prec) {
    std::snprintf(buf, sizeof buf, "%.*g", prec, v);
    if (std::strtod(buf, nullptr) == v) break;
  }
  std::string s(buf);
  if (v < 0.0) return "(" + s + ")";
  return s;
}

std::string wrap(const Node& n, bool parens) {
  std::string s = render_node(n);
  return parens ? "(" + s + ")" : s;
}

}  // namespace

std::string render_node(const Node& node) {
  switch (node.kind) {
    case NodeKind::Number:
      return render_number(node.number);
    case NodeKind::Coord:
    case NodeKind::Param:
      return node.name;
    case NodeKind::Neg:
      return "-" + wrap(*node.children[0], precedence(*node.children[0]) < 3);
    case NodeKind::Add:
    case NodeKind::Sub: {
      const char* op = node.kind == NodeKind::Add ? " + " : " - ";
      return wrap(*node.children[0], false) + op + wrap(*node.children[1], precedence(*node.children[1]) <= 1);
    }
    case NodeKind::Mul:
    case NodeKind::Div: {
      const char* op = node.kind == NodeKind::Mul ? "*" : "/";
      return wrap(*node.children[0], precedence(*node.children[0]) < 2) + op +
             wrap(*node.children[1], precedence(*node.children[1]) <= 2);
    }
    case NodeKind::Pow: {
      std::string base = wrap(*node.children[0], precedence(*node.children[0]) < 5);
      const Rational& e = node.exponent;
      if (e.is_integer() && e.num >= 0) return base + "^" + std::to_string(e.num);
      if (e.is_integer()) return base + "^(" + std::to_string(e.num) + ")";
      return base + "^(" + std::to_string(e.num) + "/" + std::to_string(e.den) + ")";
    }
    case NodeKind::Sin:
      return "sin(" + render_node(*node.children[0]) + ")";
    case NodeKind::Cos:
      return "cos(" + render_node(*node.children[0]) + ")";
    case NodeKind::Sqrt:
      return "sqrt(" + render_node(*node.children[0]) + ")";
    case NodeKind::Exp:
      return "exp(" + render_node(*node.children[0]) + ")";
  }
  return "?";
}

bool nodes_equal(const Node& a, const Node& b) {
  if (a.kind != b.kind || a.children.size() != b.children.size()) return false;
  switch (a.kind) {
    case NodeKind::Number:
      if (a.number != b.number) return false;
      break;
    case NodeKind::Coord:
      if (a.index != b.index || a.name != b.name) return false;
      break;
    case NodeKind::Param:
      if (a.name != b.name) return false;
      break;
    case NodeKind::Pow:
      if (!(a.exponent == b.exponent)) return false;
      break;
    default:
      break;
  }
  for (std::size_t i = 0; i < a.children.size(); ++i)
    if (!nodes_equal(*a.children[i], *b.children[i])) return false;
  return true;
}

Expression::Expression() : root_(make_node(NodeKind::Number)) {}

Expression::Expression(std::shared_ptr<const Node> root, std::vector<std::string> coords,
                       std::set<std::string> params)
    : root_(std::move(root)), coords_(std::move(coords)), free_params_(std::move(params)) {}

Expression Expression::parse(std::string_view text, std::span<const std::string> coords,
                             std::span<const std::string> params) {
  Parser parser(text, coords, params);
  NodePtr root = parser.parse_all();
  return Expression(std::move(root), std::vector<std::string>(coords.begin(), coords.end()),
                    std::move(parser.used_params));
}

Expression Expression::constant(double value, std::span<const std::string> coords) {
  auto n = std::make_shared<Node>();
  n->kind = NodeKind::Number;
  n->number = value;
  return Expression(std::move(n), std::vector<std::string>(coords.begin(), coords.end()), {});
}

Jet2 Expression::eval_order(std::span<const double> point, const Bindings& bindings, int order) const {
  if (point.size() != coords_.size())
    throw DimensionError("point has " + std::to_string(point.size()) + " coordinates, expression expects " +
                         std::to_string(coords_.size()));
  Evaluator ev{point, bindings, order, static_cast<Eigen::Index>(coords_.size())};
  return ev.eval(*root_);
}

Jet2 Expression::eval_jet2(std::span<const double> point, const Bindings& bindings) const {
  return eval_order(point, bindings, 2);
}

Jet2 Expression::eval_jet1(std::span<const double> point, const Bindings& bindings) const {
  return eval_order(point, bindings, 1);
}

double Expression::eval(std::span<const double> point, const Bindings& bindings) const {
  return eval_order(point, bindings, 1).value;
}

std::string Expression::render() const { return render_node(*root_); }

bool Expression::structurally_equal(const Expression& other) const {
  return coords_ == other.coords_ && nodes_equal(*root_, *other.root_);
}

bool Expression::is_constant_zero() const {
  return root_->kind == NodeKind::Number && root_->number == 0.0;
}

}  // namespace nullgeo
