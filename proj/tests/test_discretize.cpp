#include <catch_amalgamated.hpp>

#include <cmath>
#include <sstream>

#include "pauli/discretize.hpp"
#include "pauli/eigensolve.hpp"

using namespace pauli;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;

namespace {

/// −Δ_h with the 3-point stencil per axis and zero Dirichlet layer.
SparseMatrix dirichlet_laplacian(const Grid& g) {
  std::vector<Triplet> t;
  const double inv_h2 = 1.0 / (g.h * g.h);
  std::vector<std::size_t> idx(g.axes());
  for (std::size_t r = 0; r < g.unknowns(); ++r) {
    g.indices(r, idx);
    const int row = static_cast<int>(r);
    t.emplace_back(row, row, 2.0 * static_cast<double>(g.axes()) * inv_h2);
    for (std::size_t a = 0; a < g.axes(); ++a) {
      const auto s = static_cast<int>(g.stride(a));
      if (idx[a] > 0) t.emplace_back(row, row - s, -inv_h2);
      if (idx[a] + 1 < g.interior_per_axis()) t.emplace_back(row, row + s, -inv_h2);
    }
  }
  return from_triplets(static_cast<int>(g.unknowns()), t);
}

double max_abs_difference(const SparseMatrix& a, const SparseMatrix& b) {
  const SparseMatrix d = a - b;
  double m = 0.0;
  for (int r = 0; r < d.outerSize(); ++r)
    for (SparseMatrix::InnerIterator it(d, r); it; ++it) m = std::max(m, std::abs(it.value()));
  return m;
}

Eigen::VectorXcd gaussian(const Grid& g, double sigma) {
  Eigen::VectorXcd v(static_cast<Eigen::Index>(g.unknowns()));
  for (std::size_t r = 0; r < g.unknowns(); ++r) {
    const auto p = g.point(r);
    double s = 0.0;
    for (double x : p) s += x * x;
    v[static_cast<Eigen::Index>(r)] = std::exp(-s / (2.0 * sigma * sigma));
  }
  return v;
}

double interior_error(const Grid& g, const Eigen::VectorXcd& d) {
  double m = 0.0;
  for (std::size_t r = 0; r < g.unknowns(); ++r)
    if (g.layer(r) >= 2) m = std::max(m, std::abs(d[static_cast<Eigen::Index>(r)]));
  return m;
}

}  // namespace

TEST_CASE("build_grid examples", "[discretize]") {
  const Grid a = build_grid(1, 1.0, 1.0);
  CHECK(a.N == 3);
  CHECK(a.total_nodes() == 9);
  CHECK(a.unknowns() == 1);
  const Grid b = build_grid(1, 8.0, 0.1);
  CHECK(b.N == 161);
  CHECK(b.total_nodes() == 25921);
  const Grid c = build_grid(2, 3.0, 0.5);
  CHECK(c.N == 13);
  CHECK(c.total_nodes() == 28561);
}

TEST_CASE("build_grid errors", "[discretize]") {
  CHECK_THROWS_AS(build_grid(3, 1.0, 0.5), ConfigError);
  CHECK_THROWS_AS(build_grid(0, 1.0, 0.5), ConfigError);
  CHECK_THROWS_AS(build_grid(1, 8.0, 0.1, 1000), ConfigError);
  CHECK_THROWS_AS(build_grid(1, -1.0, 0.1), ConfigError);
  CHECK_THROWS_AS(build_grid(1, 1.0, 0.0), ConfigError);
}

TEST_CASE("grid index map is lexicographic with x1 slowest", "[discretize]") {
  const Grid g = build_grid(2, 1.0, 0.5);
  CHECK(g.interior_per_axis() == 3);
  CHECK(g.stride(0) == 27);
  CHECK(g.stride(3) == 1);
  const auto p = g.point(1);
  CHECK(p == std::vector<double>{-0.5, -0.5, -0.5, 0.0});
}

TEST_CASE("covariant pair examples", "[discretize]") {
  const Grid g = build_grid(1, 2.0, 0.25);
  const auto [ax0, ay0] = covariant_pair(parse_weight("0", 1), g, 0);
  for (int r = 0; r < ax0.matrix().outerSize(); ++r)
    for (SparseMatrix::InnerIterator it(ax0.matrix(), r); it; ++it) CHECK(it.col() != r);
  const Eigen::VectorXcd one = Eigen::VectorXcd::Ones(ax0.dim());
  CHECK(interior_error(g, ax0.apply(one)) == 0.0);
  CHECK(interior_error(g, ay0.apply(one)) == 0.0);

  const auto [ax, ay] = covariant_pair(parse_weight("|z1|^2"), g, 0);
  for (std::size_t r = 0; r < g.unknowns(); ++r) {
    const auto p = g.point(r);
    const auto i = static_cast<int>(r);
    CHECK_THAT(ax.matrix().coeff(i, i).real(), WithinAbs(p[1], 1e-14));
    CHECK_THAT(ay.matrix().coeff(i, i).real(), WithinAbs(-p[0], 1e-14));
  }
  CHECK_THROWS_AS(covariant_pair(parse_weight("|z1|^2"), g, 1), DimensionError);
  CHECK_THROWS_AS(covariant_pair(parse_weight("|z1|^2+|z2|^2"), g, 0), DimensionError);
}

TEST_CASE("zero weight gives the Dirichlet Laplacian", "[discretize]") {
  for (std::size_t n : {1u, 2u}) {
    const Grid g = build_grid(n, 1.0, 0.25);
    const WeightSpec zero = parse_weight("0", n);
    const SparseMatrix lap = dirichlet_laplacian(g);
    for (Scheme s : {Scheme::peierls, Scheme::finite_difference}) {
      CHECK(max_abs_difference(pauli_operator(zero, g, Sign::plus, s).matrix(), lap) == 0.0);
      CHECK(max_abs_difference(pauli_operator(zero, g, Sign::minus, s).matrix(), lap) == 0.0);
      CHECK(max_abs_difference(box00(zero, g, s).matrix(), 0.25 * lap) == 0.0);
      CHECK(max_abs_difference(box0n(zero, g, s).matrix(), 0.25 * lap) == 0.0);
    }
  }
}

TEST_CASE("zero weight Dirichlet box eigenvalue", "[discretize]") {
  // Lowest eigenvalue on [−π/2, π/2]² is 2 in the continuum.
  const double L = std::numbers::pi / 2.0;
  const Grid g = build_grid(1, L, L / 40.0);
  const SpectrumResult r = smallest_eigs(pauli_operator(parse_weight("0", 1), g, Sign::plus), 1, 1e-10);
  CHECK_THAT(r.eigenvalues[0], WithinRel(2.0, 2e-3));
}

TEST_CASE("zero weight Dirac square is block diagonal Laplacian", "[discretize]") {
  const Grid g = build_grid(1, 1.0, 0.2);
  const SparseHermitianOperator sq = dirac_squared(parse_weight("0", 1), g);
  const auto m = static_cast<int>(g.unknowns());
  const Eigen::MatrixXcd d = sq.dense();
  // Centered differences squared: a 5-point stencil of width 2h per axis.
  const Eigen::MatrixXcd top = d.topLeftCorner(m, m);
  const Eigen::MatrixXcd bottom = d.bottomRightCorner(m, m);
  CHECK((top - bottom).cwiseAbs().maxCoeff() == 0.0);
  CHECK(d.topRightCorner(m, m).cwiseAbs().maxCoeff() == 0.0);
  CHECK(d.bottomLeftCorner(m, m).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("Dirac square off-diagonal blocks vanish for every shipped n=1 weight", "[discretize][property]") {
  const Grid g = build_grid(1, 2.0, 0.25);
  for (const char* text : {"|z1|^2", "|z1|^4", "x1^2"}) {
    const SparseHermitianOperator sq = dirac_squared(parse_weight(text), g);
    const auto m = static_cast<int>(g.unknowns());
    const Eigen::MatrixXcd d = sq.dense();
    CHECK(d.topRightCorner(m, m).cwiseAbs().maxCoeff() == 0.0);
    CHECK(d.bottomLeftCorner(m, m).cwiseAbs().maxCoeff() == 0.0);
  }
}

TEST_CASE("commutator of the covariant pair approximates the field", "[discretize]") {
  // i[𝒜_y, 𝒜_x] v ≈ B v with B = 2 for |z|^2, second order in h.
  std::vector<double> errors;
  for (double h : {0.2, 0.1}) {
    const Grid g = build_grid(1, 4.0, h);
    const auto [ax, ay] = covariant_pair(parse_weight("|z1|^2"), g, 0);
    const Eigen::VectorXcd v = gaussian(g, 1.0);
    const Eigen::VectorXcd lhs = Complex(0.0, 1.0) * (ay.apply(ax.apply(v)) - ax.apply(ay.apply(v)));
    errors.push_back(interior_error(g, lhs - 2.0 * v));
  }
  CHECK(errors[1] < 0.01);
  CHECK(std::log2(errors[0] / errors[1]) > 1.5);
}

TEST_CASE("conjugation scaling examples", "[discretize]") {
  const Grid g = build_grid(1, 2.0, 0.5);
  const WeightSpec w = parse_weight("|z1|^2");
  CHECK((conjugation_scaling(w, g, 0.0).entries.array() == 1.0).all());
  const DiagonalOperator e = conjugation_scaling(w, g, 0.5);
  for (std::size_t r = 0; r < g.unknowns(); ++r) {
    const auto p = g.point(r);
    if (p[0] == 0.0 && p[1] == 0.0) CHECK(e.entries[static_cast<Eigen::Index>(r)] == 1.0);
    if (p[0] == 1.5 && p[1] == 0.0) CHECK_THAT(e.entries[static_cast<Eigen::Index>(r)], WithinRel(std::exp(1.125), 1e-15));
  }
  const Eigen::VectorXd product = e.entries.cwiseProduct(conjugation_scaling(w, g, -0.5).entries);
  CHECK_THAT((product.array() - 1.0).abs().maxCoeff(), WithinAbs(0.0, 1e-15));
  CHECK_THROWS_AS(conjugation_scaling(parse_weight("|z1|^2"), build_grid(1, 40.0, 1.0), 1.0), NumericalError);
}

TEST_CASE("scaling at a node (2,0) is e^2", "[discretize]") {
  const Grid g = build_grid(1, 3.0, 1.0);
  const DiagonalOperator e = conjugation_scaling(parse_weight("|z1|^2"), g, 0.5);
  for (std::size_t r = 0; r < g.unknowns(); ++r) {
    const auto p = g.point(r);
    if (p[0] == 2.0 && p[1] == 0.0) CHECK_THAT(e.entries[static_cast<Eigen::Index>(r)], WithinRel(std::exp(2.0), 1e-15));
  }
}

TEST_CASE("identity residual examples", "[discretize]") {
  const IdentityResidualReport flat = identity_residual(parse_weight("0", 1), 4.0, 0.2, IdentityKind::conjugation_00, 2);
  CHECK(flat.exact);
  for (double e : flat.max_interior_error) CHECK(e <= 1e-12);

  const IdentityResidualReport r = identity_residual(parse_weight("|z1|^2"), 6.0, 0.2, IdentityKind::conjugation_00, 3);
  CHECK(r.h_values.size() == 3);
  CHECK(r.observed_order >= 1.5);
  CHECK(r.observed_order <= 2.5);
  CHECK(r.test_functions >= 5);

  const IdentityResidualReport d = identity_residual(parse_weight("|z1|^2"), 6.0, 0.2, IdentityKind::dirac_square, 2);
  CHECK(d.offdiagonal_max == 0.0);
  CHECK_THROWS_AS(identity_residual(parse_weight("|z1|^2+|z2|^2"), 2.0, 0.5, IdentityKind::dirac_square, 1),
                  DimensionError);
}

TEST_CASE("box0n minus box00 is the Levi trace on smooth vectors", "[discretize]") {
  const Grid g = build_grid(1, 4.0, 0.2);
  const WeightSpec w = parse_weight("|z1|^2");
  const Eigen::VectorXcd v = gaussian(g, 1.0);
  const Eigen::VectorXcd direct = multiply(box0n_wirtinger(w, g), v) - multiply(box00_wirtinger(w, g), v);
  const Eigen::VectorXcd conjugated = box0n(w, g).apply(v) - box00(w, g).apply(v);
  CHECK_THAT((direct - v).cwiseAbs().maxCoeff(), WithinAbs(0.0, 1e-12));
  CHECK_THAT((conjugated - v).cwiseAbs().maxCoeff(), WithinAbs(0.0, 1e-12));
}

TEST_CASE("box0n zeroth-order coefficient is the Levi trace", "[discretize]") {
  const Grid g = build_grid(2, 1.0, 0.5);
  const SparseMatrix m = box0n_wirtinger(parse_weight("|z1|^2+|z2|^2"), g);
  const SparseMatrix flat = box0n_wirtinger(parse_weight("0", 2), g);
  Eigen::VectorXcd one = Eigen::VectorXcd::Ones(static_cast<Eigen::Index>(g.unknowns()));
  // On the constant vector only the zeroth-order term and the boundary rows survive.
  const Eigen::VectorXcd diff = multiply(m, one) - multiply(flat, one);
  for (std::size_t r = 0; r < g.unknowns(); ++r) {
    const auto p = g.point(r);
    if (p[0] == 0.0 && p[1] == 0.0 && p[2] == 0.0 && p[3] == 0.0)
      CHECK_THAT(diff[static_cast<Eigen::Index>(r)].real(), WithinAbs(2.0, 1e-14));
  }
  for (int r = 0; r < m.outerSize(); ++r) CHECK_THAT((m.coeff(r, r) - flat.coeff(r, r)).real(), WithinAbs(2.0, 1e-13));
}

TEST_CASE("gauge shift leaves every operator unchanged", "[discretize][property]") {
  const Grid g = build_grid(1, 2.0, 0.25);
  const WeightSpec w = parse_weight("|z1|^4 + x1^2");
  const WeightSpec shifted = parse_weight("|z1|^4 + x1^2 + 7");
  for (Scheme s : {Scheme::peierls, Scheme::finite_difference})
    for (Sign sign : {Sign::plus, Sign::minus})
      CHECK(max_abs_difference(pauli_operator(w, g, sign, s).matrix(), pauli_operator(shifted, g, sign, s).matrix()) == 0.0);
  CHECK(max_abs_difference(dirac(w, g).matrix(), dirac(shifted, g).matrix()) == 0.0);
}

TEST_CASE("finite-difference entries are affine in the weight scale", "[discretize][property]") {
  // Diagonal: |A|² is quadratic in t, so P(2)+P(0)−2P(1) isolates 2|A|².
  const Grid g = build_grid(1, 2.0, 0.25);
  const auto op = [&](const char* text) {
    return pauli_operator(parse_weight(text), g, Sign::plus, Scheme::finite_difference).matrix();
  };
  const SparseMatrix p0 = op("0*|z1|^2"), p1 = op("|z1|^2"), p2 = op("2*|z1|^2");
  const SparseMatrix second = p2 + p0 - 2.0 * p1;
  for (int r = 0; r < second.outerSize(); ++r)
    for (SparseMatrix::InnerIterator it(second, r); it; ++it) {
      if (it.col() != r) {
        CHECK_THAT(std::abs(it.value()), WithinAbs(0.0, 1e-12));
      } else {
        const auto p = g.point(static_cast<std::size_t>(r));
        CHECK_THAT(it.value().real(), WithinAbs(2.0 * (p[0] * p[0] + p[1] * p[1]), 1e-11));
      }
    }
}

TEST_CASE("every assembled operator is exactly Hermitian", "[discretize][property]") {
  const Grid g1 = build_grid(1, 2.0, 0.25);
  const Grid g2 = build_grid(2, 1.0, 0.25);
  for (const char* text : {"|z1|^2", "|z1|^4", "x1^2"}) {
    const WeightSpec w = parse_weight(text);
    for (Scheme s : {Scheme::peierls, Scheme::finite_difference}) {
      CHECK(hermitian_defect(pauli_operator(w, g1, Sign::plus, s).matrix()) == 0.0);
      CHECK(hermitian_defect(pauli_operator(w, g1, Sign::minus, s).matrix()) == 0.0);
    }
    CHECK(hermitian_defect(dirac(w, g1).matrix()) == 0.0);
    CHECK(hermitian_defect(dirac_squared(w, g1).matrix()) == 0.0);
  }
  for (const char* text : {"|z1|^2+|z2|^2", "|z1|^4+|z2|^2"}) {
    const WeightSpec w = parse_weight(text);
    CHECK(pauli_operator(w, g2, Sign::plus).hermitian_certified());
    CHECK(box00(w, g2).hermitian_certified());
  }
}

TEST_CASE("Peierls and finite-difference schemes agree to second order", "[discretize]") {
  std::vector<double> errors;
  for (double h : {0.2, 0.1}) {
    const Grid g = build_grid(1, 4.0, h);
    const WeightSpec w = parse_weight("|z1|^2");
    const Eigen::VectorXcd v = gaussian(g, 1.0);
    const Eigen::VectorXcd d = pauli_operator(w, g, Sign::plus).apply(v) -
                               pauli_operator(w, g, Sign::plus, Scheme::finite_difference).apply(v);
    errors.push_back(interior_error(g, d));
  }
  CHECK(std::log2(errors[0] / errors[1]) > 1.5);
}

TEST_CASE("Matrix Market round trip", "[discretize]") {
  const Grid g = build_grid(1, 1.0, 0.25);
  const SparseHermitianOperator op = pauli_operator(parse_weight("|z1|^2"), g, Sign::plus);
  std::stringstream buf;
  write_matrix_market(buf, op.matrix(), true);
  const SparseMatrix back = read_matrix_market(buf);
  CHECK(max_abs_difference(back, op.matrix()) == 0.0);
  CHECK(buf.str().rfind("%%MatrixMarket matrix coordinate complex hermitian", 0) == 0);
}
