#include "polylap/fd.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <limits>

#include "parallel.hpp"

namespace polylap::fd {

namespace {

constexpr std::size_t kResidualBudget = 10000;

int snap_index(double coord, const poly::Grid& g) {
  double h = g.spacing();
  if (h <= 0) throw PreconditionError("difference: grid has no spacing");
  double u = (coord - g.axis[0]) / h;
  long iu = std::lround(u);
  if (std::fabs(u - iu) > 1e-6)
    throw PreconditionError("difference: shifted point off the sampling grid");
  return static_cast<int>(iu);
}

int snap_point(const Point& x, const poly::Grid& g) {
  std::array<int, 3> t{0, 0, 0};
  for (int a = 0; a < g.dim; ++a) t[a] = snap_index(x[a], g);
  int id = g.lookup(t);
  if (id < 0)
    throw PreconditionError("difference: shifted point off the sampling grid");
  return id;
}

/// Forward beta-difference of grid values divided by spacing^|beta|;
/// valid[] marks points whose full stencil stayed on the grid.
void grid_partial(const poly::Grid& g, const std::vector<double>& f,
                  const std::array<int, 3>& beta, std::vector<double>& out,
                  std::vector<char>& valid) {
  out = f;
  valid.assign(f.size(), 1);
  std::vector<double> next(f.size());
  std::vector<char> nvalid(f.size());
  for (int a = 0; a < g.dim; ++a)
    for (int rep = 0; rep < beta[a]; ++rep) {
      for (std::size_t i = 0; i < out.size(); ++i) {
        std::array<int, 3> t = g.idx[i];
        t[a] += 1;
        int nb = g.lookup(t);
        if (nb < 0 || !valid[i] || !valid[nb]) {
          nvalid[i] = 0;
          next[i] = 0;
        } else {
          nvalid[i] = 1;
          next[i] = out[nb] - out[i];
        }
      }
      out.swap(next);
      valid.swap(nvalid);
    }
  int m = beta[0] + beta[1] + beta[2];
  double scale = std::pow(g.spacing(), -m);
  for (double& v : out) v *= scale;
}

std::vector<poly::MultiIndex> partials_of_order(int dim, int m) {
  std::vector<poly::MultiIndex> out;
  for (const auto& b : poly::multi_indices(dim, m))
    if (b.order() == m) out.push_back(b);
  return out;
}

/// d^beta x^alpha evaluated at x (zero unless alpha >= beta componentwise).
double monomial_partial(const poly::MultiIndex& alpha, const poly::MultiIndex& beta,
                        const Point& x) {
  double c = 1;
  for (int a = 0; a < 3; ++a) {
    if (alpha.e[a] < beta.e[a]) return 0.0;
    for (int j = alpha.e[a]; j > alpha.e[a] - beta.e[a]; --j) c *= j;
  }
  double v = c;
  for (int a = 0; a < 3; ++a) v *= ipow(x[a], alpha.e[a] - beta.e[a]);
  return v;
}

/// Order-m partial values of the input, one row per usable grid point.
/// The same construction is applied to the minimax basis monomials, so the
/// mod-poly program sees f and its competitors through the same operator.
struct PartialTable {
  std::vector<Point> pos;
  std::vector<int> ids;                    // row -> grid point id
  std::vector<std::vector<double>> vals;   // [beta][row]
  std::vector<poly::MultiIndex> betas;
};

PartialTable partial_table(const expr::ScalarField& f, int m,
                           const poly::Grid& grid) {
  PartialTable t;
  t.pos = grid.pts;
  t.ids.resize(grid.pts.size());
  for (std::size_t i = 0; i < t.ids.size(); ++i) t.ids[i] = static_cast<int>(i);
  t.betas = partials_of_order(f.dimension(), m);
  for (const auto& b : t.betas) {
    expr::ScalarField df = expr::differentiate(f, b.e);
    std::vector<double> v(t.pos.size());
    for (std::size_t i = 0; i < t.pos.size(); ++i) v[i] = df.eval(t.pos[i]);
    t.vals.push_back(std::move(v));
  }
  return t;
}

PartialTable partial_table(const poly::SampledFunction& f, int m) {
  const poly::Grid& g = *f.grid;
  auto betas = partials_of_order(g.dim, m);
  // forward stencils trim different boundary layers per axis: intersect the
  // masks so all partials share one point list
  std::vector<std::vector<double>> raw(betas.size());
  std::vector<char> keep;
  for (std::size_t b = 0; b < betas.size(); ++b) {
    std::vector<char> valid;
    grid_partial(g, f.values, betas[b].e, raw[b], valid);
    if (b == 0)
      keep = valid;
    else
      for (std::size_t i = 0; i < keep.size(); ++i) keep[i] &= valid[i];
  }
  PartialTable t;
  t.betas = betas;
  t.vals.resize(betas.size());
  for (std::size_t i = 0; i < keep.size(); ++i) {
    if (!keep[i]) continue;
    t.pos.push_back(g.pts[i]);
    t.ids.push_back(static_cast<int>(i));
    for (std::size_t b = 0; b < betas.size(); ++b) t.vals[b].push_back(raw[b][i]);
  }
  return t;
}

// basis value tables, laid out [alpha][beta][row] to match PartialTable rows

std::vector<std::vector<std::vector<double>>> basis_partials(
    const std::vector<poly::MultiIndex>& basis, const PartialTable& t) {
  std::vector<std::vector<std::vector<double>>> out(basis.size());
  for (std::size_t v = 0; v < basis.size(); ++v) {
    out[v].resize(t.betas.size());
    for (std::size_t b = 0; b < t.betas.size(); ++b) {
      out[v][b].resize(t.pos.size());
      for (std::size_t i = 0; i < t.pos.size(); ++i)
        out[v][b][i] = monomial_partial(basis[v], t.betas[b], t.pos[i]);
    }
  }
  return out;
}

std::vector<std::vector<std::vector<double>>> basis_partials(
    const std::vector<poly::MultiIndex>& basis, const PartialTable& t,
    const poly::Grid& g) {
  std::vector<std::vector<std::vector<double>>> out(basis.size());
  for (std::size_t v = 0; v < basis.size(); ++v) {
    const auto& al = basis[v];
    std::vector<double> mono(g.pts.size());
    for (std::size_t i = 0; i < g.pts.size(); ++i) {
      double p = 1;
      for (int a = 0; a < g.dim; ++a) p *= ipow(g.pts[i][a], al.e[a]);
      mono[i] = p;
    }
    out[v].resize(t.betas.size());
    for (std::size_t b = 0; b < t.betas.size(); ++b) {
      std::vector<double> raw;
      std::vector<char> valid;
      grid_partial(g, mono, t.betas[b].e, raw, valid);
      out[v][b].resize(t.ids.size());
      for (std::size_t i = 0; i < t.ids.size(); ++i) out[v][b][i] = raw[t.ids[i]];
    }
  }
  return out;
}

/// max over distinct pairs and partials of |v_b(i)-v_b(j)| / |x_i-x_j|^theta,
/// over all pairs (deterministic parallel reduction).
double pair_max(const PartialTable& t, int dim, double theta) {
  const std::size_t n = t.pos.size();
  if (n < 2) throw PreconditionError("seminorm: grid needs at least 2 points");
  std::vector<double> row_max(n, 0.0);
  detail::parallel_for(n, [&](std::size_t i) {
    double best = 0;
    for (std::size_t j = i + 1; j < n; ++j) {
      double d2 = 0;
      for (int a = 0; a < dim; ++a) {
        double d = t.pos[i][a] - t.pos[j][a];
        d2 += d * d;
      }
      double invd = std::pow(d2, -0.5 * theta);
      for (const auto& v : t.vals) {
        double r = std::fabs(v[i] - v[j]) * invd;
        if (r > best) best = r;
      }
    }
    row_max[i] = best;
  });
  double best = 0;
  for (double v : row_max) best = std::max(best, v);
  return best;
}

/// min over c of max_j |a_j - (A c)_j| by Lawson's iteratively reweighted
/// least squares; the weight iteration is not monotone step to step, so the
/// best value seen is what is reported.
double lawson_minimax(const Eigen::MatrixXd& A, const Eigen::VectorXd& a) {
  const Eigen::Index J = A.rows(), V = A.cols();
  if (J == 0) return 0.0;
  if (V == 0) return a.cwiseAbs().maxCoeff();
  Eigen::VectorXd w = Eigen::VectorXd::Constant(J, 1.0 / J);
  double incumbent = std::numeric_limits<double>::infinity();
  int since_improved = 0;
  for (int iter = 0; iter < 400; ++iter) {
    Eigen::VectorXd sw = w.cwiseSqrt();
    Eigen::MatrixXd Aw = sw.asDiagonal() * A;
    Eigen::VectorXd bw = sw.asDiagonal() * a;
    Eigen::VectorXd c = Aw.colPivHouseholderQr().solve(bw);
    double val = (a - A * c).cwiseAbs().maxCoeff();
    if (val < incumbent - 1e-10 * (1.0 + val)) {
      incumbent = std::min(incumbent, val);
      since_improved = 0;
    } else {
      incumbent = std::min(incumbent, val);
      if (++since_improved > 40) break;
    }
    Eigen::VectorXd r = a - A * c;
    double total = 0;
    for (Eigen::Index j = 0; j < J; ++j) {
      w(j) = std::max(w(j) * std::fabs(r(j)), 1e-300);
      total += w(j);
    }
    w /= total;
  }
  return incumbent;
}

/// Assemble the thinned minimax system over the basis monomials with
/// m+1 <= |alpha| <= k-1 (lower orders cannot change order-m differences)
/// and return its optimum.
double minimax_mod_poly(const PartialTable& t,
                        const std::vector<poly::MultiIndex>& basis,
                        const std::vector<std::vector<std::vector<double>>>& bvals,
                        int dim, double theta) {
  const std::size_t n = t.pos.size();
  if (n < 2) throw PreconditionError("seminorm: grid needs at least 2 points");
  const std::size_t nbeta = t.betas.size();
  const std::size_t total_pairs = n * (n - 1) / 2;
  const std::size_t budget = std::max<std::size_t>(1, kResidualBudget / nbeta);
  const std::size_t stride = (total_pairs + budget - 1) / budget;

  std::vector<std::pair<std::size_t, std::size_t>> pairs;
  pairs.reserve(budget + 1);
  std::size_t counter = 0;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j, ++counter)
      if (counter % stride == 0) pairs.emplace_back(i, j);

  const Eigen::Index J = static_cast<Eigen::Index>(pairs.size() * nbeta);
  Eigen::MatrixXd A(J, static_cast<Eigen::Index>(basis.size()));
  Eigen::VectorXd rhs(J);
  Eigen::Index row = 0;
  for (const auto& [i, j] : pairs) {
    double d2 = 0;
    for (int a = 0; a < dim; ++a) {
      double d = t.pos[i][a] - t.pos[j][a];
      d2 += d * d;
    }
    double invd = std::pow(d2, -0.5 * theta);
    for (std::size_t b = 0; b < nbeta; ++b, ++row) {
      rhs(row) = (t.vals[b][i] - t.vals[b][j]) * invd;
      for (std::size_t v = 0; v < basis.size(); ++v)
        A(row, static_cast<Eigen::Index>(v)) =
            (bvals[v][b][i] - bvals[v][b][j]) * invd;
    }
  }
  return lawson_minimax(A, rhs);
}

std::vector<poly::MultiIndex> mod_basis(int dim, int k, int m) {
  std::vector<poly::MultiIndex> basis;
  for (const auto& al : poly::multi_indices(dim, k - 1))
    if (al.order() >= m + 1) basis.push_back(al);
  return basis;
}

}  // namespace

void FiniteDifferenceStencil::validate(int dim) const {
  if (!(h > 0.0 && h < 1.0))
    throw PreconditionError("stencil: step must lie in (0,1)");
  if (directions.size() > 16)
    throw PreconditionError("stencil: order is limited to 16");
  for (const auto& d : directions) {
    double nn = vec_norm(d.data(), dim);
    if (std::fabs(nn - 1.0) > 1e-9)
      throw PreconditionError("stencil: directions must be unit vectors");
  }
}

int HolderOrder::m() const { return static_cast<int>(std::floor(gamma)); }
double HolderOrder::theta() const { return gamma - m(); }

void HolderOrder::validate() const {
  if (!(gamma > 0))
    throw PreconditionError("holder order: gamma must be positive");
  if (std::fabs(gamma - std::round(gamma)) < 1e-12)
    throw PreconditionError("holder order: gamma must not be an integer");
}

double finite_difference(const expr::ScalarField& f,
                         const FiniteDifferenceStencil& st, const Point& x) {
  st.validate(f.dimension());
  const int d = static_cast<int>(st.directions.size());
  double acc = 0;
  for (unsigned mask = 0; mask < (1u << d); ++mask) {
    Point y = x;
    int bits = 0;
    for (int i = 0; i < d; ++i)
      if (mask & (1u << i)) {
        ++bits;
        for (int a = 0; a < f.dimension(); ++a) y[a] += st.h * st.directions[i][a];
      }
    double sign = ((d - bits) % 2 == 0) ? 1.0 : -1.0;
    acc += sign * f.eval(y);
  }
  return acc;
}

double finite_difference(const poly::SampledFunction& f,
                         const FiniteDifferenceStencil& st, const Point& x) {
  const poly::Grid& g = *f.grid;
  st.validate(g.dim);
  const int d = static_cast<int>(st.directions.size());
  double acc = 0;
  for (unsigned mask = 0; mask < (1u << d); ++mask) {
    Point y = x;
    int bits = 0;
    for (int i = 0; i < d; ++i)
      if (mask & (1u << i)) {
        ++bits;
        for (int a = 0; a < g.dim; ++a) y[a] += st.h * st.directions[i][a];
      }
    double sign = ((d - bits) % 2 == 0) ? 1.0 : -1.0;
    acc += sign * f.values[snap_point(y, g)];
  }
  return acc;
}

double directional_derivative(const expr::ScalarField& f,
                              const std::vector<Point>& directions, const Point& x) {
  const int d = static_cast<int>(directions.size());
  const int n = f.dimension();
  if (d == 0) return f.eval(x);
  // expand the product of directional sums over all axis tuples
  double acc = 0;
  std::vector<int> axes(d, 0);
  while (true) {
    double coeff = 1;
    std::array<int, 3> alpha{0, 0, 0};
    for (int i = 0; i < d; ++i) {
      coeff *= directions[i][axes[i]];
      alpha[axes[i]] += 1;
    }
    if (coeff != 0.0) acc += coeff * expr::differentiate(f, alpha).eval(x);
    int pos = d - 1;
    while (pos >= 0 && axes[pos] == n - 1) axes[pos--] = 0;
    if (pos < 0) break;
    ++axes[pos];
  }
  return acc;
}

poly::SampledFunction axis_difference(const poly::SampledFunction& f, int axis,
                                      int sign) {
  const poly::Grid& g = *f.grid;
  if (axis < 1 || axis > g.dim)
    throw PreconditionError("difference: axis out of range");
  if (sign != 1 && sign != -1)
    throw PreconditionError("difference: sign must be +1 or -1");
  poly::SampledFunction out = poly::SampledFunction::zeros(f.grid);
  for (std::size_t i = 0; i < f.values.size(); ++i) {
    std::array<int, 3> t = g.idx[i];
    t[axis - 1] += sign;
    int nb = g.lookup(t);
    double shifted = nb >= 0 ? f.values[nb] : 0.0;
    out.values[i] = shifted - f.values[i];
  }
  return out;
}

double holder_seminorm(const expr::ScalarField& f, const HolderOrder& order,
                       std::shared_ptr<const poly::Grid> grid) {
  order.validate();
  if (!grid || grid->dim != f.dimension())
    throw PreconditionError("seminorm: grid dimension must match the field");
  return pair_max(partial_table(f, order.m(), *grid), f.dimension(), order.theta());
}

double holder_seminorm(const poly::SampledFunction& f, const HolderOrder& order) {
  order.validate();
  return pair_max(partial_table(f, order.m()), f.grid->dim, order.theta());
}

double holder_seminorm_mod_poly(const expr::ScalarField& f, const HolderOrder& order,
                                int k, std::shared_ptr<const poly::Grid> grid) {
  order.validate();
  if (k < 0) throw PreconditionError("seminorm: order k must be a natural number");
  if (order.gamma > k - 1) return holder_seminorm(f, order, grid);
  auto t = partial_table(f, order.m(), *grid);
  auto basis = mod_basis(f.dimension(), k, order.m());
  auto bvals = basis_partials(basis, t);
  return minimax_mod_poly(t, basis, bvals, f.dimension(), order.theta());
}

double holder_seminorm_mod_poly(const poly::SampledFunction& f,
                                const HolderOrder& order, int k) {
  order.validate();
  if (k < 0) throw PreconditionError("seminorm: order k must be a natural number");
  if (order.gamma > k - 1) return holder_seminorm(f, order);
  auto t = partial_table(f, order.m());
  auto basis = mod_basis(f.grid->dim, k, order.m());
  auto bvals = basis_partials(basis, t, *f.grid);
  return minimax_mod_poly(t, basis, bvals, f.grid->dim, order.theta());
}

}  // namespace polylap::fd
