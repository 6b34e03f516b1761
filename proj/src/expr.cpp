#include "polylap/expr.hpp"

#include <cctype>
#include <cmath>
#include <cstdio>

namespace polylap::expr {

namespace {

using Kind = Node::Kind;

struct Parser {
  const std::string& s;
  int dim;
  std::size_t pos = 0;
  std::vector<Node>& nodes;

  void skip_ws() {
    while (pos < s.size() && std::isspace(static_cast<unsigned char>(s[pos]))) ++pos;
  }

  [[noreturn]] void fail(std::size_t at, const std::string& detail) {
    throw ParseError("syntax error at offset " + std::to_string(at) +
                         (detail.empty() ? "" : ": " + detail),
                     at);
  }

  bool peek(char c) {
    skip_ws();
    return pos < s.size() && s[pos] == c;
  }

  bool accept(char c) {
    if (peek(c)) {
      ++pos;
      return true;
    }
    return false;
  }

  int push(Node n) {
    nodes.push_back(n);
    return static_cast<int>(nodes.size()) - 1;
  }

  int mk_bin(Kind k, int a, int b) {
    Node n;
    n.kind = k;
    n.a = a;
    n.b = b;
    return push(n);
  }

  // nat := [0-9]+
  int parse_nat() {
    skip_ws();
    std::size_t start = pos;
    if (pos >= s.size() || !std::isdigit(static_cast<unsigned char>(s[pos])))
      fail(pos, "expected a natural number");
    long v = 0;
    while (pos < s.size() && std::isdigit(static_cast<unsigned char>(s[pos]))) {
      v = v * 10 + (s[pos] - '0');
      if (v > 1000000) fail(start, "number too large");
      ++pos;
    }
    return static_cast<int>(v);
  }

  int parse_number() {
    skip_ws();
    std::size_t start = pos;
    while (pos < s.size() && std::isdigit(static_cast<unsigned char>(s[pos]))) ++pos;
    if (pos < s.size() && s[pos] == '.') {
      ++pos;
      if (pos >= s.size() || !std::isdigit(static_cast<unsigned char>(s[pos])))
        fail(pos, "expected digits after decimal point");
      while (pos < s.size() && std::isdigit(static_cast<unsigned char>(s[pos]))) ++pos;
    }
    if (pos < s.size() && (s[pos] == 'e' || s[pos] == 'E')) {
      std::size_t mark = pos;
      ++pos;
      if (pos < s.size() && (s[pos] == '+' || s[pos] == '-')) ++pos;
      if (pos < s.size() && std::isdigit(static_cast<unsigned char>(s[pos]))) {
        while (pos < s.size() && std::isdigit(static_cast<unsigned char>(s[pos]))) ++pos;
      } else {
        pos = mark;  // 'e' starts an identifier, not an exponent
      }
    }
    Node n;
    n.kind = Kind::Number;
    n.value = std::stod(s.substr(start, pos - start));
    return push(n);
  }

  int parse_atom() {
    skip_ws();
    if (pos >= s.size()) fail(pos, "unexpected end of input");
    char c = s[pos];
    if (c == '-') {
      ++pos;
      int a = parse_atom();
      Node n;
      n.kind = Kind::Neg;
      n.a = a;
      return push(n);
    }
    if (c == '(') {
      ++pos;
      int e = parse_expr();
      if (!accept(')')) fail(pos, "expected ')'");
      return e;
    }
    if (std::isdigit(static_cast<unsigned char>(c))) return parse_number();
    if (c == '.') fail(pos, "numbers must start with a digit");
    if (std::isalpha(static_cast<unsigned char>(c))) {
      std::size_t start = pos;
      while (pos < s.size() && std::isalnum(static_cast<unsigned char>(s[pos]))) ++pos;
      std::string word = s.substr(start, pos - start);
      if (word.size() >= 2 && word[0] == 'x' &&
          std::isdigit(static_cast<unsigned char>(word[1]))) {
        // variable token x<nat>
        for (std::size_t i = 1; i < word.size(); ++i)
          if (!std::isdigit(static_cast<unsigned char>(word[i])))
            throw ParseError("unknown identifier '" + word + "' at offset " +
                                 std::to_string(start),
                             start);
        long idx = std::stol(word.substr(1));
        if (idx < 1 || idx > dim)
          throw ParseError("variable " + word + " exceeds dimension " +
                               std::to_string(dim) + " at offset " +
                               std::to_string(start),
                           start);
        Node n;
        n.kind = Kind::Var;
        n.var = static_cast<int>(idx);
        return push(n);
      }
      Fn fn;
      if (word == "sin")
        fn = Fn::Sin;
      else if (word == "cos")
        fn = Fn::Cos;
      else if (word == "exp")
        fn = Fn::Exp;
      else if (word == "abs")
        fn = Fn::Abs;
      else
        throw ParseError("unknown identifier '" + word + "' at offset " +
                             std::to_string(start),
                         start);
      if (!accept('(')) fail(pos, "expected '(' after function name");
      int arg = parse_expr();
      if (!accept(')')) fail(pos, "expected ')'");
      Node n;
      n.kind = Kind::Call;
      n.fn = fn;
      n.a = arg;
      return push(n);
    }
    fail(pos, "");
  }

  int parse_factor() {
    int a = parse_atom();
    skip_ws();
    if (accept('^')) {
      int e = parse_nat();
      Node n;
      n.kind = Kind::Pow;
      n.a = a;
      n.exponent = e;
      return push(n);
    }
    return a;
  }

  int parse_term() {
    int a = parse_factor();
    while (accept('*')) a = mk_bin(Kind::Mul, a, parse_factor());
    return a;
  }

  int parse_expr() {
    int a = parse_term();
    for (;;) {
      skip_ws();
      if (accept('+'))
        a = mk_bin(Kind::Add, a, parse_term());
      else if (accept('-'))
        a = mk_bin(Kind::Sub, a, parse_term());
      else
        return a;
    }
  }
};

std::optional<int> poly_degree_node(const std::vector<Node>& nodes, int i) {
  const Node& n = nodes[i];
  switch (n.kind) {
    case Kind::Number:
      return 0;
    case Kind::Var:
      return 1;
    case Kind::Neg:
      return poly_degree_node(nodes, n.a);
    case Kind::Add:
    case Kind::Sub: {
      auto da = poly_degree_node(nodes, n.a);
      auto db = poly_degree_node(nodes, n.b);
      if (!da || !db) return std::nullopt;
      return std::max(*da, *db);
    }
    case Kind::Mul: {
      auto da = poly_degree_node(nodes, n.a);
      auto db = poly_degree_node(nodes, n.b);
      if (!da || !db) return std::nullopt;
      return *da + *db;
    }
    case Kind::Pow: {
      auto da = poly_degree_node(nodes, n.a);
      if (!da) return std::nullopt;
      return *da * n.exponent;
    }
    case Kind::Call:
      return std::nullopt;
  }
  return std::nullopt;
}

/// Builds simplified derivative trees. Smart constructors fold constants so
/// repeated differentiation does not balloon the node count.
struct DerivBuilder {
  const std::vector<Node>& src;
  std::vector<Node>& out;
  int axis;  // 1-based

  int push(Node n) {
    out.push_back(n);
    return static_cast<int>(out.size()) - 1;
  }

  bool is_const(int i, double v) const {
    return out[i].kind == Kind::Number && out[i].value == v;
  }

  int num(double v) {
    Node n;
    n.kind = Kind::Number;
    n.value = v;
    return push(n);
  }

  int add(int a, int b) {
    if (is_const(a, 0)) return b;
    if (is_const(b, 0)) return a;
    if (out[a].kind == Kind::Number && out[b].kind == Kind::Number)
      return num(out[a].value + out[b].value);
    Node n;
    n.kind = Kind::Add;
    n.a = a;
    n.b = b;
    return push(n);
  }

  int sub(int a, int b) {
    if (is_const(b, 0)) return a;
    if (out[a].kind == Kind::Number && out[b].kind == Kind::Number)
      return num(out[a].value - out[b].value);
    Node n;
    n.kind = Kind::Sub;
    n.a = a;
    n.b = b;
    return push(n);
  }

  int mul(int a, int b) {
    if (is_const(a, 0) || is_const(b, 0)) return num(0);
    if (is_const(a, 1)) return b;
    if (is_const(b, 1)) return a;
    if (out[a].kind == Kind::Number && out[b].kind == Kind::Number)
      return num(out[a].value * out[b].value);
    Node n;
    n.kind = Kind::Mul;
    n.a = a;
    n.b = b;
    return push(n);
  }

  int neg(int a) {
    if (out[a].kind == Kind::Number) return num(-out[a].value);
    Node n;
    n.kind = Kind::Neg;
    n.a = a;
    return push(n);
  }

  int pow(int a, int e) {
    if (e == 0) return num(1);
    if (e == 1) return a;
    if (out[a].kind == Kind::Number) return num(ipow(out[a].value, e));
    Node n;
    n.kind = Kind::Pow;
    n.a = a;
    n.exponent = e;
    return push(n);
  }

  int call(Fn f, int a) {
    Node n;
    n.kind = Kind::Call;
    n.fn = f;
    n.a = a;
    return push(n);
  }

  // Copies src[i] into `out`, rewriting abs nodes that sit under an even
  // power (|u|^{2m} == u^{2m}); abs of an even power drops the abs likewise.
  int copy(int i) {
    const Node& n = src[i];
    switch (n.kind) {
      case Kind::Number:
        return num(n.value);
      case Kind::Var: {
        Node m = n;
        return push(m);
      }
      case Kind::Add:
        return add(copy(n.a), copy(n.b));
      case Kind::Sub:
        return sub(copy(n.a), copy(n.b));
      case Kind::Mul:
        return mul(copy(n.a), copy(n.b));
      case Kind::Neg:
        return neg(copy(n.a));
      case Kind::Pow:
        if (src[n.a].kind == Kind::Call && src[n.a].fn == Fn::Abs &&
            n.exponent % 2 == 0)
          return pow(copy(src[n.a].a), n.exponent);
        return pow(copy(n.a), n.exponent);
      case Kind::Call:
        if (n.fn == Fn::Abs && src[n.a].kind == Kind::Pow &&
            src[n.a].exponent % 2 == 0)
          return copy(n.a);
        return call(n.fn, copy(n.a));
    }
    throw Error("corrupt expression tree");
  }

  // Derivative of the already-copied subtree rooted at out[i].
  int deriv(int i) {
    Node n = out[i];
    switch (n.kind) {
      case Kind::Number:
        return num(0);
      case Kind::Var:
        return num(n.var == axis ? 1 : 0);
      case Kind::Add:
        return add(deriv(n.a), deriv(n.b));
      case Kind::Sub:
        return sub(deriv(n.a), deriv(n.b));
      case Kind::Neg:
        return neg(deriv(n.a));
      case Kind::Mul:
        return add(mul(deriv(n.a), n.b), mul(n.a, deriv(n.b)));
      case Kind::Pow:
        return mul(mul(num(n.exponent), pow(n.a, n.exponent - 1)), deriv(n.a));
      case Kind::Call:
        switch (n.fn) {
          case Fn::Sin:
            return mul(call(Fn::Cos, n.a), deriv(n.a));
          case Fn::Cos:
            return neg(mul(call(Fn::Sin, n.a), deriv(n.a)));
          case Fn::Exp:
            return mul(i, deriv(n.a));  // exp reproduces itself
          case Fn::Abs:
            throw PreconditionError(
                "abs is not differentiable; only even powers of abs can be "
                "differentiated");
        }
    }
    throw Error("corrupt expression tree");
  }
};

}  // namespace

double ScalarField::eval_node(int i, const double* x) const {
  const Node& n = nodes_[i];
  switch (n.kind) {
    case Kind::Number:
      return n.value;
    case Kind::Var:
      return x[n.var - 1];
    case Kind::Add:
      return eval_node(n.a, x) + eval_node(n.b, x);
    case Kind::Sub:
      return eval_node(n.a, x) - eval_node(n.b, x);
    case Kind::Mul:
      return eval_node(n.a, x) * eval_node(n.b, x);
    case Kind::Neg:
      return -eval_node(n.a, x);
    case Kind::Pow:
      return ipow(eval_node(n.a, x), n.exponent);
    case Kind::Call: {
      double v = eval_node(n.a, x);
      switch (n.fn) {
        case Fn::Sin:
          return std::sin(v);
        case Fn::Cos:
          return std::cos(v);
        case Fn::Exp:
          return std::exp(v);
        case Fn::Abs:
          return std::fabs(v);
      }
    }
  }
  return 0;  // unreachable
}

std::optional<int> ScalarField::polynomial_degree() const {
  if (root_ < 0) return std::nullopt;
  return poly_degree_node(nodes_, root_);
}

namespace {

void print_node(const std::vector<Node>& nodes, int i, std::string& s) {
  const Node& n = nodes[i];
  char buf[40];
  switch (n.kind) {
    case Kind::Number:
      std::snprintf(buf, sizeof buf, "%.17g", n.value);
      s += buf;
      return;
    case Kind::Var:
      s += 'x';
      s += std::to_string(n.var);
      return;
    case Kind::Add:
      s += '(';
      print_node(nodes, n.a, s);
      s += " + ";
      print_node(nodes, n.b, s);
      s += ')';
      return;
    case Kind::Sub:
      s += '(';
      print_node(nodes, n.a, s);
      s += " - ";
      print_node(nodes, n.b, s);
      s += ')';
      return;
    case Kind::Mul:
      s += '(';
      print_node(nodes, n.a, s);
      s += " * ";
      print_node(nodes, n.b, s);
      s += ')';
      return;
    case Kind::Neg:
      s += "(-";
      print_node(nodes, n.a, s);
      s += ')';
      return;
    case Kind::Pow:
      s += '(';
      print_node(nodes, n.a, s);
      s += ')';
      s += '^';
      s += std::to_string(n.exponent);
      return;
    case Kind::Call:
      switch (n.fn) {
        case Fn::Sin:
          s += "sin";
          break;
        case Fn::Cos:
          s += "cos";
          break;
        case Fn::Exp:
          s += "exp";
          break;
        case Fn::Abs:
          s += "abs";
          break;
      }
      s += '(';
      print_node(nodes, n.a, s);
      s += ')';
      return;
  }
}

}  // namespace

std::string ScalarField::to_string() const {
  std::string s;
  if (root_ >= 0) print_node(nodes_, root_, s);
  return s;
}

ScalarField parse_expression(const std::string& text, int dimension,
                             std::optional<int> growth_annotation) {
  if (dimension < 1 || dimension > 3)
    throw PreconditionError("dimension must be 1, 2 or 3");
  std::vector<Node> nodes;
  Parser p{text, dimension, 0, nodes};
  int root = p.parse_expr();
  p.skip_ws();
  if (p.pos != text.size()) p.fail(p.pos, "trailing input");
  ScalarField f(std::move(nodes), root, dimension, 0);
  int growth = 0;
  if (growth_annotation) {
    if (*growth_annotation < 0)
      throw PreconditionError("growth_order must be a natural number");
    growth = *growth_annotation;
  } else if (auto d = f.polynomial_degree()) {
    growth = *d;
  }
  f.set_growth_order(growth);
  return f;
}

ScalarField differentiate(const ScalarField& f, int axis) {
  if (axis < 1 || axis > f.dimension())
    throw PreconditionError("derivative axis out of range");
  std::vector<Node> out;
  out.reserve(f.nodes().size() * 3);
  DerivBuilder b{f.nodes(), out, axis};
  int copied = b.copy(f.root());
  int root = b.deriv(copied);
  int g = f.growth_order();
  ScalarField d(std::move(out), root, f.dimension(), g > 0 ? g - 1 : 0);
  if (auto dd = d.polynomial_degree()) d.set_growth_order(*dd);
  return d;
}

ScalarField differentiate(const ScalarField& f, const std::array<int, 3>& alpha) {
  ScalarField g = f;
  for (int axis = 1; axis <= f.dimension(); ++axis)
    for (int j = 0; j < alpha[axis - 1]; ++j) g = differentiate(g, axis);
  return g;
}

ScalarField dilate(const ScalarField& f, double lambda) {
  std::vector<Node> nodes = f.nodes();
  int root = f.root();
  // rewrite every Var leaf v into (lambda * v)
  int n0 = static_cast<int>(nodes.size());
  for (int i = 0; i < n0; ++i) {
    if (nodes[i].kind != Node::Kind::Var) continue;
    Node var = nodes[i];
    Node num;
    num.kind = Node::Kind::Number;
    num.value = lambda;
    nodes.push_back(num);
    int ni = static_cast<int>(nodes.size()) - 1;
    nodes.push_back(var);
    int vi = static_cast<int>(nodes.size()) - 1;
    nodes[i].kind = Node::Kind::Mul;
    nodes[i].a = ni;
    nodes[i].b = vi;
  }
  return ScalarField(std::move(nodes), root, f.dimension(), f.growth_order());
}

}  // namespace polylap::expr
