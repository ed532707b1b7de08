#pragma once

// Finite-difference assembly of the magnetic operators of a weight φ on a
// Dirichlet grid: covariant derivatives, Pauli operators P± = −Δ_A ± V, the
// Dirac operator (n = 1), the weighted complex Laplacians □^{(0,0)} and
// □^{(0,n)}, and the diagonal conjugation e^{sφ}.

#include <cmath>
#include <complex>
#include <cstddef>
#include <limits>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/Sparse>

#include "pauli/error.hpp"
#include "pauli/grid.hpp"
#include "pauli/quadrature.hpp"
#include "pauli/sparse.hpp"
#include "pauli/weight.hpp"

namespace pauli {

enum class Sign { minus = -1, plus = 1 };

inline double to_double(Sign s) { return s == Sign::plus ? 1.0 : -1.0; }

/// How −Δ_A is discretized.
///
/// `peierls`: gauge-covariant hopping −exp(−i∫A·dl)/h² along each link, with
/// the line integral of the polynomial A taken exactly.
///
/// `finite_difference`: the first-order expansion of the same hopping,
/// −Δ_h + i(D_c A + A D_c) + |A|², with centered D_c.
enum class Scheme { peierls, finite_difference };

inline std::string to_string(Scheme s) { return s == Scheme::peierls ? "peierls" : "finite_difference"; }

inline Scheme parse_scheme(const std::string& s) {
  if (s == "peierls") return Scheme::peierls;
  if (s == "finite_difference" || s == "fd") return Scheme::finite_difference;
  throw ConfigError("unknown discretization scheme '" + s + "'");
}

/// Diagonal operator stored as its entries.
struct DiagonalOperator {
  Eigen::VectorXd entries;

  Eigen::VectorXcd apply(const Eigen::VectorXcd& v) const { return entries.cwiseProduct(v); }
};

namespace detail {

inline void check_weight_grid(const WeightSpec& w, const Grid& g) {
  if (w.dimension() != g.n) {
    throw DimensionError("weight has n = " + std::to_string(w.dimension()) + " but grid has n = " +
                         std::to_string(g.n));
  }
}

/// Polynomials A_a = ½(−φ_{y_j}) for a = 2j, ½φ_{x_j} for a = 2j+1.
inline std::vector<Polynomial> potential_polynomials(const WeightSpec& w) {
  std::vector<Polynomial> a;
  for (std::size_t j = 0; j < w.dimension(); ++j) {
    a.push_back(w.gradient(2 * j + 1) * -0.5);
    a.push_back(w.gradient(2 * j) * 0.5);
  }
  return a;
}

/// ∫₀ʰ A_axis(p + t e_axis) dt by Gauss–Legendre, exact for the polynomial.
class LinkIntegrator {
 public:
  LinkIntegrator(const std::vector<Polynomial>& potentials, double h) : potentials_(potentials) {
    int degree = 0;
    for (const auto& p : potentials) degree = std::max(degree, p.degree());
    rule_ = gauss_legendre(degree / 2 + 1, 0.0, h);
  }

  double operator()(std::size_t axis, std::span<const double> p, std::vector<double>& scratch) const {
    scratch.assign(p.begin(), p.end());
    const double base = p[axis];
    double sum = 0.0;
    for (std::size_t k = 0; k < rule_.size(); ++k) {
      scratch[axis] = base + rule_.nodes[k];
      sum += rule_.weights[k] * potentials_[axis](scratch);
    }
    return sum;
  }

 private:
  const std::vector<Polynomial>& potentials_;
  QuadratureRule rule_;
};

/// Visits the interior neighbours of `node`: f(axis, neighbour, +1/−1).
template <class F>
void for_each_neighbour(const Grid& g, std::size_t node, std::span<const std::size_t> idx, F&& f) {
  const std::size_t m = g.interior_per_axis();
  for (std::size_t a = 0; a < g.axes(); ++a) {
    const std::size_t s = g.stride(a);
    if (idx[a] > 0) f(a, node - s, -1);
    if (idx[a] + 1 < m) f(a, node + s, +1);
  }
}

enum class DiagonalTerm { none, electric, field };

/// −Δ_A plus sign·(V or B) on the diagonal.
inline SparseMatrix magnetic_operator(const WeightSpec& w, const Grid& g, Scheme scheme, double sign,
                                      DiagonalTerm term) {
  check_weight_grid(w, g);
  const std::vector<Polynomial> pot = potential_polynomials(w);
  const LinkIntegrator link(pot, g.h);
  const double h = g.h, inv_h2 = 1.0 / (h * h);
  Polynomial field(2);
  if (term == DiagonalTerm::field) {
    if (w.dimension() != 1) throw DimensionError("the scalar field B is defined for n = 1 only");
    field = pot[1].derivative(0) - pot[0].derivative(1);
  }
  return assemble_rows(static_cast<int>(g.unknowns()), [&](int row, std::vector<Triplet>& out) {
    const auto node = static_cast<std::size_t>(row);
    std::vector<std::size_t> idx(g.axes());
    std::vector<double> p(g.axes()), q(g.axes()), scratch;
    g.indices(node, idx);
    g.point(node, p);
    double diag = 2.0 * static_cast<double>(g.axes()) * inv_h2;
    if (term == DiagonalTerm::electric) diag += sign * 0.5 * w.laplacian()(p);
    if (term == DiagonalTerm::field) diag += sign * field(p);
    if (scheme == Scheme::finite_difference)
      for (std::size_t a = 0; a < g.axes(); ++a) diag += pot[a](p) * pot[a](p);
    out.emplace_back(row, row, Complex(diag, 0.0));
    for_each_neighbour(g, node, idx, [&](std::size_t a, std::size_t nb, int dir) {
      // Every link is evaluated from its lower endpoint so both rows see
      // bitwise identical numbers; the upper row takes the conjugate.
      if (dir > 0) {
        q = p;
      } else {
        g.point(nb, q);
      }
      Complex lower_to_upper;
      if (scheme == Scheme::peierls) {
        const double theta = link(a, q, scratch);
        lower_to_upper = -std::conj(std::polar(1.0, theta)) * inv_h2;
      } else {
        std::vector<double> upper = q;
        upper[a] += h;
        const double s = pot[a](q) + pot[a](upper);
        lower_to_upper = Complex(-inv_h2, s / (2.0 * h));
      }
      out.emplace_back(row, static_cast<int>(nb), dir > 0 ? lower_to_upper : std::conj(lower_to_upper));
    });
  });
}

/// Centered first difference D_c along `axis` (antisymmetric, real).
inline SparseMatrix centered_difference(const Grid& g, std::size_t axis) {
  const double c = 1.0 / (2.0 * g.h);
  return assemble_rows(static_cast<int>(g.unknowns()), [&](int row, std::vector<Triplet>& out) {
    const auto node = static_cast<std::size_t>(row);
    std::vector<std::size_t> idx(g.axes());
    g.indices(node, idx);
    const std::size_t s = g.stride(axis);
    if (idx[axis] > 0) out.emplace_back(row, static_cast<int>(node - s), Complex(-c, 0.0));
    if (idx[axis] + 1 < g.interior_per_axis()) out.emplace_back(row, static_cast<int>(node + s), Complex(c, 0.0));
  });
}

/// Wirtinger-stencil assembly of −Σ ∂²/∂z_j∂z̄_j + Σ φ_{z_j} ∂/∂z̄_j
/// (+ Σ φ_{z_j z̄_j} when `trace_term`), in the weighted space.
inline SparseMatrix wirtinger_operator(const WeightSpec& w, const Grid& g, bool trace_term) {
  check_weight_grid(w, g);
  const double h = g.h, inv_h2 = 1.0 / (h * h);
  const double half_step = 1.0 / (2.0 * h);
  return assemble_rows(static_cast<int>(g.unknowns()), [&](int row, std::vector<Triplet>& out) {
    const auto node = static_cast<std::size_t>(row);
    std::vector<std::size_t> idx(g.axes());
    std::vector<double> p(g.axes());
    g.indices(node, idx);
    g.point(node, p);
    // −∂_z∂_z̄ = −¼Δ, discretized as ¼(−Δ_h).
    double diag = 0.25 * (2.0 * static_cast<double>(g.axes()) * inv_h2);
    if (trace_term) diag += levi_matrix(w, p).trace();
    out.emplace_back(row, row, Complex(diag, 0.0));
    std::vector<Complex> phi_z(g.n);
    for (std::size_t j = 0; j < g.n; ++j)
      phi_z[j] = 0.5 * Complex(w.gradient(2 * j)(p), -w.gradient(2 * j + 1)(p));
    for_each_neighbour(g, node, idx, [&](std::size_t a, std::size_t nb, int dir) {
      const std::size_t j = a / 2;
      // ∂_z̄ = ½(∂_x + i∂_y).
      const Complex direction = (a % 2 == 0) ? Complex(0.5, 0.0) : Complex(0.0, 0.5);
      const Complex first_order = phi_z[j] * direction * (dir * half_step);
      out.emplace_back(row, static_cast<int>(nb), Complex(-0.25 * inv_h2, 0.0) + first_order);
    });
  });
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Operators
// ---------------------------------------------------------------------------

/// (𝒜_{x_j}, 𝒜_{y_j}) = (−iD_c^{x_j} − diag A_{2j}, −iD_c^{y_j} − diag A_{2j+1}),
/// j counted from 0.
inline std::pair<SparseHermitianOperator, SparseHermitianOperator> covariant_pair(const WeightSpec& w,
                                                                                  const Grid& g,
                                                                                  std::size_t j) {
  detail::check_weight_grid(w, g);
  if (j >= g.n) throw DimensionError("covariant_pair: coordinate index out of range");
  const int dim = static_cast<int>(g.unknowns());
  auto build = [&](std::size_t axis) {
    SparseMatrix d = detail::centered_difference(g, axis) * Complex(0.0, -1.0);
    std::vector<Triplet> diag;
    std::vector<double> p(g.axes());
    for (int r = 0; r < dim; ++r) {
      g.point(static_cast<std::size_t>(r), p);
      diag.emplace_back(r, r, Complex(-magnetic_potential(w, p)[axis], 0.0));
    }
    SparseMatrix a = d + from_triplets(dim, diag);
    a.prune([](int, int, const Complex& v) { return v != Complex(0.0, 0.0); });
    return SparseHermitianOperator(std::move(a));
  };
  return {build(2 * j), build(2 * j + 1)};
}

/// P± = −Δ_A ± V on the interior nodes of `g`.
inline SparseHermitianOperator pauli_operator(const WeightSpec& w, const Grid& g, Sign sign,
                                     Scheme scheme = Scheme::peierls) {
  return SparseHermitianOperator(
      detail::magnetic_operator(w, g, scheme, to_double(sign), detail::DiagonalTerm::electric));
}

/// −Δ_A alone.
inline SparseHermitianOperator magnetic_laplacian(const WeightSpec& w, const Grid& g,
                                                  Scheme scheme = Scheme::peierls) {
  return SparseHermitianOperator(detail::magnetic_operator(w, g, scheme, 0.0, detail::DiagonalTerm::none));
}

/// −Δ_A ± B with B = ∂_x A_y − ∂_y A_x taken from the potential (n = 1).
inline SparseHermitianOperator pauli_with_field(const WeightSpec& w, const Grid& g, Sign sign,
                                                Scheme scheme = Scheme::peierls) {
  return SparseHermitianOperator(
      detail::magnetic_operator(w, g, scheme, to_double(sign), detail::DiagonalTerm::field));
}

/// Off-diagonal block 𝒜₁ − i𝒜₂ of the Dirac operator (n = 1).
inline SparseMatrix dirac_block(const WeightSpec& w, const Grid& g) {
  if (g.n != 1 || w.dimension() != 1) throw DimensionError("the Dirac operator is defined for n = 1");
  const auto [a1, a2] = covariant_pair(w, g, 0);
  SparseMatrix x = a1.matrix() - Complex(0.0, 1.0) * a2.matrix();
  x.prune([](int, int, const Complex& v) { return v != Complex(0.0, 0.0); });
  return x;
}

/// 𝒟 = [[0, 𝒜₁ − i𝒜₂], [𝒜₁ + i𝒜₂, 0]] (dimension 2·unknowns).
inline SparseHermitianOperator dirac(const WeightSpec& w, const Grid& g) {
  const SparseMatrix x = dirac_block(w, g);
  const SparseMatrix y = SparseMatrix(x.adjoint());
  const int dim = static_cast<int>(x.rows());
  std::vector<Triplet> t;
  t.reserve(static_cast<std::size_t>(2 * x.nonZeros()));
  for (int r = 0; r < dim; ++r) {
    for (SparseMatrix::InnerIterator it(x, r); it; ++it) t.emplace_back(r, dim + it.col(), it.value());
    for (SparseMatrix::InnerIterator it(y, r); it; ++it) t.emplace_back(dim + r, it.col(), it.value());
  }
  return SparseHermitianOperator(from_triplets(2 * dim, t));
}

/// 𝒟² from the sparse product, symmetrized to be exactly Hermitian.
inline SparseHermitianOperator dirac_squared(const WeightSpec& w, const Grid& g) {
  const SparseHermitianOperator d = dirac(w, g);
  const SparseMatrix sq = d.matrix() * d.matrix();
  return SparseHermitianOperator::symmetrized(sq);
}

/// Unweighted representative of □^{(0,0)}: e^{−φ/2} □^{(0,0)} e^{φ/2} = ¼P−.
inline SparseHermitianOperator box00(const WeightSpec& w, const Grid& g, Scheme scheme = Scheme::peierls) {
  SparseMatrix m = pauli_operator(w, g, Sign::minus, scheme).matrix() * Complex(0.25, 0.0);
  return SparseHermitianOperator(std::move(m));
}

/// Unweighted representative of □^{(0,n)}: e^{−φ/2} □^{(0,n)} e^{φ/2} = ¼P+.
inline SparseHermitianOperator box0n(const WeightSpec& w, const Grid& g, Scheme scheme = Scheme::peierls) {
  SparseMatrix m = pauli_operator(w, g, Sign::plus, scheme).matrix() * Complex(0.25, 0.0);
  return SparseHermitianOperator(std::move(m));
}

/// □^{(0,0)} f = −Σ(∂_{z_j} − φ_{z_j}) ∂f/∂z̄_j assembled directly with
/// Wirtinger stencils. Self-adjoint in L²(e^{−φ}), not in plain ℓ².
inline SparseMatrix box00_wirtinger(const WeightSpec& w, const Grid& g) {
  return detail::wirtinger_operator(w, g, false);
}

/// Coefficient of ∂̄∂̄*_φ on (0,n)-forms:
/// Σ(φ_{z_j z̄_j} u + φ_{z_j} ∂u/∂z̄_j − ∂²u/∂z_j∂z̄_j), Wirtinger stencils.
inline SparseMatrix box0n_wirtinger(const WeightSpec& w, const Grid& g) {
  return detail::wirtinger_operator(w, g, true);
}

/// diag(e^{s·φ(node)}). Refuses grids where |s·φ| exceeds 700.
inline DiagonalOperator conjugation_scaling(const WeightSpec& w, const Grid& g, double s) {
  detail::check_weight_grid(w, g);
  if (!std::isfinite(s)) throw ConfigError("scaling exponent must be finite");
  DiagonalOperator d{Eigen::VectorXd(static_cast<Eigen::Index>(g.unknowns()))};
  std::vector<double> p(g.axes());
  for (std::size_t r = 0; r < g.unknowns(); ++r) {
    g.point(r, p);
    const double e = s * w.polynomial()(p);
    if (std::abs(e) > 700.0) throw NumericalError("scaling overflow; reduce L or rescale φ");
    d.entries[static_cast<Eigen::Index>(r)] = std::exp(e);
  }
  return d;
}

/// □^{(0,0)} in the weighted space from its unweighted representative:
/// E (¼P−) E⁻¹ with E = diag(e^{φ/2}).
inline SparseMatrix box00_weighted(const WeightSpec& w, const Grid& g, Scheme scheme = Scheme::peierls) {
  const DiagonalOperator e = conjugation_scaling(w, g, 0.5);
  SparseMatrix m = box00(w, g, scheme).matrix();
  for (int r = 0; r < m.outerSize(); ++r)
    for (SparseMatrix::InnerIterator it(m, r); it; ++it)
      it.valueRef() *= e.entries[r] / e.entries[it.col()];
  return m;
}

// ---------------------------------------------------------------------------
// Identity residuals
// ---------------------------------------------------------------------------

enum class IdentityKind { conjugation_00, conjugation_0n, dirac_square };

inline std::string to_string(IdentityKind k) {
  switch (k) {
    case IdentityKind::conjugation_00: return "2.2";
    case IdentityKind::conjugation_0n: return "2.3";
    case IdentityKind::dirac_square: return "dirac-square";
  }
  return "?";
}

inline IdentityKind parse_identity(const std::string& s) {
  if (s == "2.2") return IdentityKind::conjugation_00;
  if (s == "2.3") return IdentityKind::conjugation_0n;
  if (s == "dirac-square") return IdentityKind::dirac_square;
  throw ConfigError("unknown identity '" + s + "' (expected 2.2, 2.3 or dirac-square)");
}

struct IdentityResidualReport {
  std::string which;
  std::size_t test_functions = 0;
  std::vector<double> h_values;
  std::vector<double> max_interior_error;  // one per refinement level
  std::vector<double> orders;              // log₂(e_k / e_{k+1})
  double observed_order = std::numeric_limits<double>::quiet_NaN();  // finest pair
  bool exact = false;                      // every error ≤ 1e-12
  double offdiagonal_max = 0.0;            // dirac-square only
};

/// Smooth test functions p_t(x)·exp(−|x − c_t|²/(2σ²)) with σ = L/4 and
/// centres within L/8 of the origin.
inline std::vector<Eigen::VectorXcd> identity_test_functions(const Grid& g) {
  const double L = g.L, sigma = 0.25 * L, off = L / 8.0;
  struct Shape {
    double cx, cy;
    int poly;
  };
  const Shape shapes[] = {{0.0, 0.0, 0}, {off, 0.0, 1}, {0.0, -off, 2}, {-off, off, 3}, {0.5 * off, 0.5 * off, 4}};
  std::vector<Eigen::VectorXcd> out;
  std::vector<double> p(g.axes());
  for (const Shape& s : shapes) {
    Eigen::VectorXcd v(static_cast<Eigen::Index>(g.unknowns()));
    for (std::size_t r = 0; r < g.unknowns(); ++r) {
      g.point(r, p);
      double r2 = 0.0;
      for (std::size_t a = 0; a < g.axes(); ++a) {
        const double c = (a % 2 == 0 ? s.cx : s.cy) * (a / 2 == 0 ? 1.0 : -1.0);
        r2 += (p[a] - c) * (p[a] - c);
      }
      const double x = p[0], y = p[1];
      Complex poly;
      switch (s.poly) {
        case 0: poly = 1.0; break;
        case 1: poly = x; break;
        case 2: poly = Complex(x, y); break;
        case 3: poly = 1.0 + x * y; break;
        default: poly = x * x - y + 0.5; break;
      }
      v[static_cast<Eigen::Index>(r)] = poly * std::exp(-r2 / (2.0 * sigma * sigma));
    }
    out.push_back(std::move(v));
  }
  return out;
}

namespace detail {

inline double interior_max(const Grid& g, const Eigen::VectorXcd& diff, Eigen::Index offset = 0) {
  double worst = 0.0;
  std::vector<double> p(g.axes());
  const double limit = 0.5 * g.L + 1e-12;
  for (std::size_t r = 0; r < g.unknowns(); ++r) {
    g.point(r, p);
    bool inside = true;
    for (double c : p) inside = inside && std::abs(c) <= limit;
    if (inside) worst = std::max(worst, std::abs(diff[offset + static_cast<Eigen::Index>(r)]));
  }
  return worst;
}

}  // namespace detail

/// Applies both sides of an identity to the test functions on grids with
/// spacing h, h/2, h/4, … and reports the largest error on nodes of
/// [−L/2, L/2]^{2n}.
///
/// "2.2": e^{−φ/2} □^{(0,0)}(e^{φ/2} g) vs ¼P− g.
/// "2.3": e^{−φ/2} □^{(0,n)}(e^{φ/2} g) vs ¼P+ g.
/// "dirac-square": diagonal blocks of 𝒟² vs −Δ_A ∓ diag(B); the off-diagonal
/// blocks are compared with zero entrywise.
inline IdentityResidualReport identity_residual(const WeightSpec& w, double L, double h, IdentityKind which,
                                                int refinement_levels, Scheme scheme = Scheme::peierls,
                                                std::size_t cap = kDefaultGridCap) {
  if (refinement_levels < 1) throw ConfigError("identity_residual needs at least one refinement level");
  if (which == IdentityKind::dirac_square && w.dimension() != 1) {
    throw DimensionError("dirac-square needs n = 1");
  }
  IdentityResidualReport rep;
  rep.which = to_string(which);
  double step = h;
  for (int level = 0; level < refinement_levels; ++level, step *= 0.5) {
    const Grid g = build_grid(w.dimension(), L, step, cap);
    const auto tests = identity_test_functions(g);
    rep.test_functions = tests.size();
    rep.h_values.push_back(g.h);
    double worst = 0.0;
    if (which == IdentityKind::dirac_square) {
      const SparseHermitianOperator d = dirac(w, g);
      const SparseMatrix sq = d.matrix() * d.matrix();
      const int dim = static_cast<int>(g.unknowns());
      for (int r = 0; r < sq.outerSize(); ++r)
        for (SparseMatrix::InnerIterator it(sq, r); it; ++it)
          if ((r < dim) != (it.col() < dim)) rep.offdiagonal_max = std::max(rep.offdiagonal_max, std::abs(it.value()));
      const SparseHermitianOperator minus = pauli_with_field(w, g, Sign::minus, scheme);
      const SparseHermitianOperator plus = pauli_with_field(w, g, Sign::plus, scheme);
      for (const auto& t : tests) {
        Eigen::VectorXcd upper = Eigen::VectorXcd::Zero(2 * dim), lower = Eigen::VectorXcd::Zero(2 * dim);
        upper.head(dim) = t;
        lower.tail(dim) = t;
        const Eigen::VectorXcd su = multiply(sq, upper), sl = multiply(sq, lower);
        worst = std::max(worst, detail::interior_max(g, su.head(dim) - minus.apply(t)));
        worst = std::max(worst, detail::interior_max(g, sl.tail(dim) - plus.apply(t)));
      }
    } else {
      const bool top = which == IdentityKind::conjugation_0n;
      const SparseMatrix weighted = top ? box0n_wirtinger(w, g) : box00_wirtinger(w, g);
      const SparseHermitianOperator rhs = top ? box0n(w, g, scheme) : box00(w, g, scheme);
      const DiagonalOperator up = conjugation_scaling(w, g, 0.5);
      const DiagonalOperator down = conjugation_scaling(w, g, -0.5);
      for (const auto& t : tests) {
        const Eigen::VectorXcd lhs = down.apply(multiply(weighted, up.apply(t)));
        worst = std::max(worst, detail::interior_max(g, lhs - rhs.apply(t)));
      }
    }
    rep.max_interior_error.push_back(worst);
  }
  rep.exact = true;
  for (double e : rep.max_interior_error) rep.exact = rep.exact && e <= 1e-12;
  for (std::size_t k = 0; k + 1 < rep.max_interior_error.size(); ++k) {
    const double a = rep.max_interior_error[k], b = rep.max_interior_error[k + 1];
    rep.orders.push_back((a > 0.0 && b > 0.0) ? std::log2(a / b) : std::numeric_limits<double>::quiet_NaN());
  }
  if (!rep.orders.empty() && !rep.exact) rep.observed_order = rep.orders.back();
  return rep;
}

}  // namespace pauli
