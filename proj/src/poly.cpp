#include "polylap/poly.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace polylap::poly {

std::vector<MultiIndex> multi_indices(int dim, int max_order) {
  std::vector<MultiIndex> out;
  if (max_order < 0) return out;
  int m1 = dim >= 2 ? max_order : 0;
  int m2 = dim >= 3 ? max_order : 0;
  for (int a = 0; a <= max_order; ++a)
    for (int b = 0; b <= m1; ++b)
      for (int c = 0; c <= m2; ++c)
        if (a + b + c <= max_order) out.push_back(MultiIndex{{a, b, c}});
  std::sort(out.begin(), out.end());
  return out;
}

int MultivariatePolynomial::degree() const {
  int d = -1;
  for (const auto& [a, c] : coeffs_)
    if (c != 0.0) d = std::max(d, a.order());
  return d;
}

double MultivariatePolynomial::coeff(const MultiIndex& a) const {
  auto it = coeffs_.find(a);
  return it == coeffs_.end() ? 0.0 : it->second;
}

void MultivariatePolynomial::set_coeff(const MultiIndex& a, double c) {
  if (a.order() > degree_bound_)
    throw PreconditionError("coefficient order exceeds the declared degree bound");
  if (c == 0.0)
    coeffs_.erase(a);
  else
    coeffs_[a] = c;
}

double MultivariatePolynomial::eval(const double* x) const {
  double s = 0;
  for (const auto& [a, c] : coeffs_) {
    double t = c;
    for (int i = 0; i < dim_; ++i) t *= ipow(x[i], a.e[i]);
    s += t;
  }
  return s;
}

MultivariatePolynomial MultivariatePolynomial::derivative(int axis) const {
  if (axis < 1 || axis > dim_) throw PreconditionError("derivative axis out of range");
  MultivariatePolynomial d(dim_, std::max(-1, degree_bound_ - 1));
  for (const auto& [a, c] : coeffs_) {
    int m = a.e[axis - 1];
    if (m == 0) continue;
    MultiIndex b = a;
    b.e[axis - 1] = m - 1;
    d.coeffs_[b] += c * m;
  }
  return d;
}

MultivariatePolynomial& MultivariatePolynomial::operator+=(
    const MultivariatePolynomial& o) {
  if (o.dim_ != dim_) throw PreconditionError("polynomial dimension mismatch");
  degree_bound_ = std::max(degree_bound_, o.degree_bound_);
  for (const auto& [a, c] : o.coeffs_) {
    double v = (coeffs_[a] += c);
    if (v == 0.0) coeffs_.erase(a);
  }
  return *this;
}

MultivariatePolynomial& MultivariatePolynomial::operator-=(
    const MultivariatePolynomial& o) {
  if (o.dim_ != dim_) throw PreconditionError("polynomial dimension mismatch");
  degree_bound_ = std::max(degree_bound_, o.degree_bound_);
  for (const auto& [a, c] : o.coeffs_) {
    double v = (coeffs_[a] -= c);
    if (v == 0.0) coeffs_.erase(a);
  }
  return *this;
}

MultivariatePolynomial& MultivariatePolynomial::operator*=(double c) {
  if (c == 0.0) {
    coeffs_.clear();
    return *this;
  }
  for (auto& [a, v] : coeffs_) v *= c;
  return *this;
}

std::string MultivariatePolynomial::to_string() const {
  if (coeffs_.empty()) return "0";
  std::string s;
  char buf[48];
  for (const auto& [a, c] : coeffs_) {
    if (!s.empty()) s += " + ";
    std::snprintf(buf, sizeof buf, "%.17g", c);
    s += buf;
    for (int i = 0; i < dim_; ++i)
      if (a.e[i] > 0) {
        s += "*x" + std::to_string(i + 1);
        if (a.e[i] > 1) s += "^" + std::to_string(a.e[i]);
      }
  }
  return s;
}

MultivariatePolynomial multiply_truncated(const MultivariatePolynomial& a,
                                          const MultivariatePolynomial& b,
                                          int degree_cap) {
  if (a.dimension() != b.dimension())
    throw PreconditionError("polynomial dimension mismatch");
  MultivariatePolynomial r(a.dimension(), degree_cap);
  std::map<MultiIndex, double> acc;
  for (const auto& [ai, ac] : a.coeffs())
    for (const auto& [bi, bc] : b.coeffs()) {
      if (ai.order() + bi.order() > degree_cap) continue;
      MultiIndex s;
      for (int d = 0; d < 3; ++d) s.e[d] = ai.e[d] + bi.e[d];
      acc[s] += ac * bc;
    }
  for (const auto& [i, c] : acc)
    if (c != 0.0) r.set_coeff(i, c);
  return r;
}

std::shared_ptr<const Grid> Grid::ball(int dim, int per_axis, double radius) {
  if (dim < 1 || dim > 3) throw PreconditionError("grid dimension must be 1, 2 or 3");
  if (per_axis < 2) throw PreconditionError("grid needs at least 2 points per axis");
  if (radius <= 0) throw PreconditionError("grid radius must be positive");
  auto g = std::make_shared<Grid>();
  g->dim = dim;
  g->per_axis = per_axis;
  g->radius = radius;
  g->axis.resize(per_axis);
  for (int i = 0; i < per_axis; ++i)
    g->axis[i] = -radius + 2.0 * radius * i / (per_axis - 1);
  double h = g->axis[1] - g->axis[0];
  auto axis_w = [&](int i) { return (i == 0 || i == per_axis - 1) ? h / 2 : h; };

  int n1 = dim >= 2 ? per_axis : 1;
  int n2 = dim >= 3 ? per_axis : 1;
  g->flat.assign(static_cast<std::size_t>(per_axis) * n1 * n2, -1);
  double r2 = radius * radius * (1 + 1e-12);
  for (int i = 0; i < per_axis; ++i)
    for (int j = 0; j < n1; ++j)
      for (int k = 0; k < n2; ++k) {
        Point p{g->axis[i], dim >= 2 ? g->axis[j] : 0.0, dim >= 3 ? g->axis[k] : 0.0};
        double n2sq = p[0] * p[0] + p[1] * p[1] + p[2] * p[2];
        if (n2sq > r2) continue;
        double wt = axis_w(i);
        if (dim >= 2) wt *= axis_w(j);
        if (dim >= 3) wt *= axis_w(k);
        g->flat[(static_cast<std::size_t>(i) * n1 + j) * n2 + k] =
            static_cast<int>(g->pts.size());
        g->pts.push_back(p);
        g->w.push_back(wt);
        g->idx.push_back({i, j, k});
      }
  return g;
}

int Grid::lookup(const std::array<int, 3>& t) const {
  int n1 = dim >= 2 ? per_axis : 1;
  int n2 = dim >= 3 ? per_axis : 1;
  for (int d = 0; d < 3; ++d) {
    int lim = d == 0 ? per_axis : (d == 1 ? n1 : n2);
    if (t[d] < 0 || t[d] >= lim) return -1;
  }
  return flat[(static_cast<std::size_t>(t[0]) * n1 + t[1]) * n2 + t[2]];
}

std::shared_ptr<const Grid> default_eval_grid(int dim) {
  switch (dim) {
    case 1:
      return Grid::ball(1, 41, 0.9);
    case 2:
      return Grid::ball(2, 21, 0.9);
    case 3:
      return Grid::ball(3, 11, 0.9);
  }
  throw PreconditionError("dimension must be 1, 2 or 3");
}

std::shared_ptr<const Grid> default_unit_grid(int dim) {
  switch (dim) {
    case 1:
      return Grid::ball(1, 41, 1.0);
    case 2:
      return Grid::ball(2, 41, 1.0);
    case 3:
      return Grid::ball(3, 21, 1.0);
  }
  throw PreconditionError("dimension must be 1, 2 or 3");
}

SampledFunction SampledFunction::sample(
    std::shared_ptr<const Grid> g, const std::function<double(const double*)>& f) {
  SampledFunction s;
  s.grid = std::move(g);
  s.values.resize(s.grid->pts.size());
  for (std::size_t i = 0; i < s.values.size(); ++i)
    s.values[i] = f(s.grid->pts[i].data());
  return s;
}

SampledFunction SampledFunction::zeros(std::shared_ptr<const Grid> g) {
  SampledFunction s;
  s.grid = std::move(g);
  s.values.assign(s.grid->pts.size(), 0.0);
  return s;
}

double SampledFunction::sup_norm() const {
  double m = 0;
  for (double v : values) m = std::max(m, std::fabs(v));
  return m;
}

double SampledFunction::weighted_l2_norm() const {
  double s = 0;
  for (std::size_t i = 0; i < values.size(); ++i) s += grid->w[i] * values[i] * values[i];
  return std::sqrt(s);
}

namespace {
void require_same_grid(const SampledFunction& a, const SampledFunction& b) {
  if (a.grid == b.grid) return;
  if (a.grid && b.grid && a.grid->same_layout(*b.grid)) return;
  throw PreconditionError("sampled functions live on different grids");
}
}  // namespace

SampledFunction& SampledFunction::operator+=(const SampledFunction& o) {
  require_same_grid(*this, o);
  for (std::size_t i = 0; i < values.size(); ++i) values[i] += o.values[i];
  return *this;
}

SampledFunction& SampledFunction::operator-=(const SampledFunction& o) {
  require_same_grid(*this, o);
  for (std::size_t i = 0; i < values.size(); ++i) values[i] -= o.values[i];
  return *this;
}

SampledFunction& SampledFunction::operator*=(double c) {
  for (double& v : values) v *= c;
  return *this;
}

double ball_monomial_integral(int dim, const MultiIndex& beta) {
  int total = 0;
  for (int i = 0; i < dim; ++i) {
    if (beta.e[i] % 2 != 0) return 0.0;
    total += beta.e[i];
  }
  // int_{B1} x^beta dx = 2 * prod Gamma((beta_i+1)/2) / Gamma((|beta|+n)/2) / (|beta|+n)
  double num = 2.0;
  for (int i = 0; i < dim; ++i) num *= std::tgamma((beta.e[i] + 1) / 2.0);
  return num / std::tgamma((total + dim) / 2.0) / (total + dim);
}

Eigen::MatrixXd gram_matrix(int dim, int degree) {
  auto basis = multi_indices(dim, degree);
  Eigen::MatrixXd G(basis.size(), basis.size());
  for (std::size_t i = 0; i < basis.size(); ++i)
    for (std::size_t j = 0; j < basis.size(); ++j) {
      MultiIndex sum;
      for (int d = 0; d < 3; ++d) sum.e[d] = basis[i].e[d] + basis[j].e[d];
      G(i, j) = ball_monomial_integral(dim, sum);
    }
  return G;
}

namespace {

double monomial_eval(const Point& p, const MultiIndex& a, int dim) {
  double v = 1;
  for (int i = 0; i < dim; ++i) v *= ipow(p[i], a.e[i]);
  return v;
}

}  // namespace

SharpResult sharp_representative(const SampledFunction& g, int k) {
  if (!g.grid) throw PreconditionError("sharp_representative: empty sample");
  if (k < 0) throw PreconditionError("modulus order k must be >= 0");
  SharpResult r{g, MultivariatePolynomial(g.grid->dim, k - 1)};
  if (k == 0) return r;

  auto basis = multi_indices(g.grid->dim, k - 1);
  const auto& pts = g.grid->pts;
  const auto& w = g.grid->w;
  const std::size_t nb = basis.size(), np = pts.size();

  Eigen::MatrixXd G = Eigen::MatrixXd::Zero(nb, nb);
  Eigen::VectorXd rhs = Eigen::VectorXd::Zero(nb);
  std::vector<double> phi(nb);
  for (std::size_t p = 0; p < np; ++p) {
    for (std::size_t i = 0; i < nb; ++i) phi[i] = monomial_eval(pts[p], basis[i], g.grid->dim);
    for (std::size_t i = 0; i < nb; ++i) {
      for (std::size_t j = i; j < nb; ++j) G(i, j) += w[p] * phi[i] * phi[j];
      rhs(i) -= w[p] * phi[i] * g.values[p];
    }
  }
  for (std::size_t i = 0; i < nb; ++i)
    for (std::size_t j = 0; j < i; ++j) G(i, j) = G(j, i);

  // per-monomial scaling keeps the SPD solve well conditioned up to degree 6
  Eigen::VectorXd scale(nb);
  for (std::size_t i = 0; i < nb; ++i) {
    double d = G(i, i);
    if (!(d > 0)) throw NumericError("sharp_representative: degenerate Gram matrix");
    scale(i) = 1.0 / std::sqrt(d);
  }
  Eigen::MatrixXd Gs = scale.asDiagonal() * G * scale.asDiagonal();
  Eigen::VectorXd bs = scale.asDiagonal() * rhs;
  Eigen::LDLT<Eigen::MatrixXd> ldlt(Gs);
  if (ldlt.info() != Eigen::Success)
    throw NumericError("sharp_representative: Gram factorization failed");
  Eigen::VectorXd c = scale.asDiagonal() * ldlt.solve(bs).eval();

  for (std::size_t i = 0; i < nb; ++i) r.shift.set_coeff(basis[i], c(i));
  for (std::size_t p = 0; p < np; ++p) r.sharp.values[p] += r.shift.eval(pts[p]);
  return r;
}

namespace {

struct LsqFit {
  Eigen::VectorXd coeffs;
  double sup_residual;
};

LsqFit lsq_fit(const SampledFunction& f, const std::vector<MultiIndex>& basis) {
  const auto& pts = f.grid->pts;
  const auto& w = f.grid->w;
  const std::size_t nb = basis.size(), np = pts.size();
  if (nb == 0) {
    double sup = f.sup_norm();
    return {Eigen::VectorXd(0), sup};
  }
  Eigen::MatrixXd A(np, nb);
  Eigen::VectorXd b(np);
  for (std::size_t p = 0; p < np; ++p) {
    double sw = std::sqrt(w[p]);
    for (std::size_t i = 0; i < nb; ++i)
      A(p, i) = sw * monomial_eval(pts[p], basis[i], f.grid->dim);
    b(p) = sw * f.values[p];
  }
  Eigen::VectorXd colscale(nb);
  for (std::size_t i = 0; i < nb; ++i) {
    double n = A.col(i).norm();
    colscale(i) = n > 0 ? 1.0 / n : 1.0;
    A.col(i) *= colscale(i);
  }
  Eigen::VectorXd y = A.colPivHouseholderQr().solve(b);
  Eigen::VectorXd c = colscale.asDiagonal() * y;

  double sup = 0;
  for (std::size_t p = 0; p < np; ++p) {
    double pv = 0;
    for (std::size_t i = 0; i < nb; ++i)
      pv += c(i) * monomial_eval(pts[p], basis[i], f.grid->dim);
    sup = std::max(sup, std::fabs(f.values[p] - pv));
  }
  return {c, sup};
}

}  // namespace

std::optional<MultivariatePolynomial> fit_polynomial_limit(
    const std::vector<SampledFunction>& seq, int degree, double tol) {
  if (seq.empty()) throw PreconditionError("fit_polynomial_limit: empty sequence");
  for (std::size_t i = 1; i < seq.size(); ++i) require_same_grid(seq[0], seq[i]);
  auto basis = multi_indices(seq[0].grid->dim, degree);

  auto last = lsq_fit(seq.back(), basis);
  if (!(last.sup_residual <= tol)) return std::nullopt;

  std::size_t nfit = std::min<std::size_t>(3, seq.size());
  if (nfit >= 2 && !basis.empty()) {
    std::vector<Eigen::VectorXd> cs;
    for (std::size_t i = seq.size() - nfit; i < seq.size(); ++i)
      cs.push_back(lsq_fit(seq[i], basis).coeffs);
    for (std::size_t i = 1; i < cs.size(); ++i)
      if (!((cs[i] - cs[i - 1]).lpNorm<Eigen::Infinity>() <= tol)) return std::nullopt;
  }

  MultivariatePolynomial p(seq[0].grid->dim, degree);
  for (std::size_t i = 0; i < basis.size(); ++i) p.set_coeff(basis[i], last.coeffs(i));
  return p;
}

bool class_equal(const SampledFunction& a, const SampledFunction& b, int k,
                 double tol) {
  require_same_grid(a, b);
  SampledFunction d = a;
  d -= b;
  return fit_polynomial_limit({d}, k - 1, tol).has_value();
}

void write_csv(const SampledFunction& f, std::ostream& os) {
  for (int i = 1; i <= f.grid->dim; ++i) os << 'x' << i << ',';
  os << "value\n";
  char buf[32];
  for (std::size_t p = 0; p < f.values.size(); ++p) {
    for (int i = 0; i < f.grid->dim; ++i) {
      std::snprintf(buf, sizeof buf, "%.17g", f.grid->pts[p][i]);
      os << buf << ',';
    }
    std::snprintf(buf, sizeof buf, "%.17g", f.values[p]);
    os << buf << '\n';
  }
}

void write_csv(const SampledFunction& f, const std::string& path) {
  std::ofstream os(path);
  if (!os) throw Error("cannot open " + path + " for writing");
  write_csv(f, os);
}

SampledFunction read_csv(const std::string& path, std::shared_ptr<const Grid> grid) {
  std::ifstream is(path);
  if (!is) throw Error("cannot open " + path);
  std::string line;
  if (!std::getline(is, line)) throw Error("empty CSV " + path);
  SampledFunction f;
  f.grid = std::move(grid);
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    auto pos = line.find_last_of(',');
    if (pos == std::string::npos) throw Error("malformed CSV row in " + path);
    f.values.push_back(std::stod(line.substr(pos + 1)));
  }
  if (f.values.size() != f.grid->pts.size())
    throw Error("CSV row count does not match the grid");
  return f;
}

}  // namespace polylap::poly
