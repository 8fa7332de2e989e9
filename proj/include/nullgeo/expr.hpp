#pragma once

#include <map>
#include <memory>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

namespace nullgeo {

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;

// Runtime values for named constants such as `theta`.
using Bindings = std::map<std::string, double>;

// Value, gradient and Hessian of a scalar field at a point. When a jet is
// evaluated to order 1 the Hessian is left empty (0x0).
struct Jet2 {
  double value = 0.0;
  Vec grad;
  Mat hess;

  static Jet2 constant(double v, Eigen::Index n, int order);
  static Jet2 variable(double v, Eigen::Index index, Eigen::Index n, int order);
  int order() const noexcept { return hess.size() == 0 ? 1 : 2; }
};

struct Rational {
  long num = 1;
  long den = 1;
  bool is_integer() const noexcept { return den == 1; }
  double to_double() const noexcept { return static_cast<double>(num) / static_cast<double>(den); }
  bool operator==(const Rational&) const = default;
};

enum class NodeKind { Number, Coord, Param, Neg, Add, Sub, Mul, Div, Pow, Sin, Cos, Sqrt, Exp };

struct Node {
  NodeKind kind = NodeKind::Number;
  double number = 0.0;         // Number
  std::size_t index = 0;       // Coord
  std::string name;            // Coord / Param
  Rational exponent;           // Pow
  std::vector<std::shared_ptr<const Node>> children;
};

// An immutable parsed scalar field over an ordered list of chart coordinates
// and a set of named constants. Copies share the tree.
class Expression {
 public:
  Expression();  // the constant 0 over no coordinates

  static Expression parse(std::string_view text, std::span<const std::string> coords,
                          std::span<const std::string> params = {});
  static Expression constant(double value, std::span<const std::string> coords);

  // Throws DomainError, or Error when a parameter is unbound or the point has
  // the wrong length.
  Jet2 eval_jet2(std::span<const double> point, const Bindings& bindings) const;
  Jet2 eval_jet1(std::span<const double> point, const Bindings& bindings) const;
  double eval(std::span<const double> point, const Bindings& bindings) const;

  std::string render() const;
  bool structurally_equal(const Expression& other) const;
  bool is_constant_zero() const;

  const std::vector<std::string>& coords() const noexcept { return coords_; }
  const std::set<std::string>& free_params() const noexcept { return free_params_; }
  const Node& root() const noexcept { return *root_; }

 private:
  Expression(std::shared_ptr<const Node> root, std::vector<std::string> coords,
             std::set<std::string> params);
  Jet2 eval_order(std::span<const double> point, const Bindings& bindings, int order) const;

  std::shared_ptr<const Node> root_;
  std::vector<std::string> coords_;
  std::set<std::string> free_params_;
};

std::string render_node(const Node& node);
bool nodes_equal(const Node& a, const Node& b);

}  // namespace nullgeo
