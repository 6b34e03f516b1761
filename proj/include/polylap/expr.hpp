#pragma once

#include <array>
#include <optional>
#include <string>
#include <vector>

#include "polylap/common.hpp"

namespace polylap::expr {

enum class Fn { Sin, Cos, Exp, Abs };

struct Node {
  enum class Kind { Number, Var, Add, Sub, Mul, Neg, Pow, Call };
  Kind kind;
  double value = 0.0;  // Number
  int var = 0;         // Var: 1-based variable index
  int a = -1, b = -1;  // children
  int exponent = 0;    // Pow: natural exponent
  Fn fn = Fn::Sin;     // Call
};

/// Immutable scalar-valued function of 1..3 variables, stored as a flat AST.
/// growth_order is declared metadata: the smallest natural g the author
/// asserts satisfies |u(y)| <= C(1+|y|^g). It gates tail integrals downstream
/// and is never verified here.
class ScalarField {
 public:
  ScalarField() = default;
  ScalarField(std::vector<Node> nodes, int root, int dim, int growth)
      : nodes_(std::move(nodes)), root_(root), dim_(dim), growth_(growth) {}

  int dimension() const { return dim_; }
  int growth_order() const { return growth_; }
  void set_growth_order(int g) { growth_ = g; }

  double operator()(const double* x) const { return eval_node(root_, x); }
  double eval(const Point& x) const { return eval_node(root_, x.data()); }

  /// Total degree when the AST is a pure polynomial, otherwise nullopt.
  std::optional<int> polynomial_degree() const;

  std::string to_string() const;

  const std::vector<Node>& nodes() const { return nodes_; }
  int root() const { return root_; }

 private:
  double eval_node(int i, const double* x) const;

  std::vector<Node> nodes_;
  int root_ = -1;
  int dim_ = 0;
  int growth_ = 0;
};

/// Parses the closed grammar
///   expr   := term (('+'|'-') term)*
///   term   := factor ('*' factor)*
///   factor := atom ('^' nat)?
///   atom   := number | 'x'nat | fn '(' expr ')' | '(' expr ')' | '-' atom
///   fn     := sin | cos | exp | abs
/// over variables x1..x<dimension>, dimension in {1,2,3}. Throws ParseError
/// with a 0-based offset on syntax errors, unknown identifiers, and variable
/// indices exceeding the dimension. growth_order: explicit annotation if
/// given, else total degree for pure polynomials, else 0.
ScalarField parse_expression(const std::string& text, int dimension,
                             std::optional<int> growth_annotation = std::nullopt);

/// Exact symbolic partial derivative along `axis` (1-based). Even powers of
/// abs are rewritten to plain powers first; any abs node surviving the
/// rewrite is rejected with PreconditionError.
ScalarField differentiate(const ScalarField& f, int axis);

/// Mixed partial D^alpha, alpha given per axis.
ScalarField differentiate(const ScalarField& f, const std::array<int, 3>& alpha);

/// u(lambda * x) as a new field; growth_order carries over.
ScalarField dilate(const ScalarField& f, double lambda);

}  // namespace polylap::expr
