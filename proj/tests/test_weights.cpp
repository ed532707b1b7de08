#include <catch_amalgamated.hpp>

#include <cmath>
#include <random>

#include "pauli/sparse.hpp"
#include "pauli/weight.hpp"

using namespace pauli;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;

namespace {

Exponents ex(std::initializer_list<int> e) { return Exponents(e); }

}  // namespace

TEST_CASE("parse_weight expands the modulus shorthand", "[weights]") {
  const WeightSpec w = parse_weight("|z1|^2");
  CHECK(w.dimension() == 1);
  CHECK(w.terms().size() == 2);
  CHECK(w.terms().at(ex({2, 0})) == 1.0);
  CHECK(w.terms().at(ex({0, 2})) == 1.0);
  REQUIRE(w.is_decoupled());
  CHECK(w.decoupled_parts().size() == 1);
}

TEST_CASE("parse_weight detects decoupled sums", "[weights]") {
  const WeightSpec w = parse_weight("|z1|^2 + |z2|^4");
  CHECK(w.dimension() == 2);
  REQUIRE(w.is_decoupled());
  REQUIRE(w.decoupled_parts().size() == 2);
  const auto& second = w.decoupled_parts()[1].terms();
  CHECK(second.size() == 3);
  CHECK(second.at(ex({4, 0})) == 1.0);
  CHECK(second.at(ex({2, 2})) == 2.0);
  CHECK(second.at(ex({0, 4})) == 1.0);

  // The parts reproduce φ coefficient-wise.
  std::map<Exponents, double> sum;
  for (std::size_t j = 0; j < 2; ++j)
    for (const auto& [e, c] : w.decoupled_parts()[j].terms()) {
      Exponents full(4, 0);
      full[2 * j] = e[0];
      full[2 * j + 1] = e[1];
      sum[full] += c;
    }
  CHECK(sum == w.terms());
}

TEST_CASE("cross terms block decoupling", "[weights]") {
  const WeightSpec w = parse_weight("x1^2*y2^2");
  CHECK(w.dimension() == 2);
  CHECK_FALSE(w.is_decoupled());
}

TEST_CASE("parse errors carry positions", "[weights]") {
  try {
    parse_weight("x1 + $");
    FAIL("expected a parse error");
  } catch (const ParseError& e) {
    CHECK(e.position() == 5);
  }
  CHECK_THROWS_AS(parse_weight("2i*x1"), ParseError);
  CHECK_THROWS_AS(parse_weight("|z1|^3"), ParseError);
  CHECK_THROWS_AS(parse_weight("x1^"), ParseError);
  CHECK_THROWS_AS(parse_weight("x0"), ParseError);
}

TEST_CASE("eval examples", "[weights]") {
  const double p11[] = {1.0, 1.0};
  CHECK(eval(parse_weight("|z1|^2"), p11) == 2.0);
  CHECK(eval(parse_weight("|z1|^4"), p11) == 4.0);
  const double q[] = {0.0, 0.0, 2.0, 0.0};
  CHECK(eval(parse_weight("|z1|^2+|z2|^4"), q) == 16.0);
  const double bad[] = {1.0, 1.0, 1.0};
  CHECK_THROWS_AS(eval(parse_weight("|z1|^2"), bad), DimensionError);
}

TEST_CASE("magnetic potential examples", "[weights]") {
  const double p11[] = {1.0, 1.0};
  const auto a = magnetic_potential(parse_weight("|z1|^2"), p11);
  CHECK(a == std::vector<double>{-1.0, 1.0});
  const double p10[] = {1.0, 0.0};
  const auto b = magnetic_potential(parse_weight("|z1|^4"), p10);
  CHECK(b[0] == 0.0);
  CHECK(b[1] == 2.0);
  const double origin[] = {0.0, 0.0, 0.0, 0.0};
  for (double v : magnetic_potential(parse_weight("x1^2*y2^2 + 3*|z1|^2 + x2*y2"), origin)) CHECK(v == 0.0);
}

TEST_CASE("electric potential examples", "[weights]") {
  const double p[] = {0.3, -1.7};
  CHECK(electric_potential(parse_weight("|z1|^2"), p) == 2.0);
  const double one[] = {1.0, 0.0};
  CHECK(electric_potential(parse_weight("|z1|^4"), one) == 8.0);
  const double q[] = {0.5, 2.0, -1.0, 3.0};
  CHECK(electric_potential(parse_weight("|z1|^2+|z2|^2"), q) == 4.0);
}

TEST_CASE("Levi matrix examples", "[weights]") {
  const double p[] = {0.7, 0.2};
  const LeviMatrix m = levi_matrix(parse_weight("|z1|^2"), p);
  CHECK(m.entries(0, 0) == Complex(1.0, 0.0));

  const WeightSpec w = parse_weight("|z1|^2+|z2|^4");
  const double z2_one[] = {0.4, -0.3, 1.0, 0.0};
  const LeviMatrix a = levi_matrix(w, z2_one);
  CHECK_THAT(a.entries(0, 0).real(), WithinAbs(1.0, 1e-15));
  CHECK_THAT(a.entries(1, 1).real(), WithinAbs(4.0, 1e-15));
  CHECK(a.entries(0, 1) == Complex(0.0, 0.0));
  const double z2_zero[] = {0.4, -0.3, 0.0, 0.0};
  const LeviMatrix b = levi_matrix(w, z2_zero);
  CHECK(b.entries(1, 1) == Complex(0.0, 0.0));
}

TEST_CASE("Levi spectrum examples", "[weights]") {
  const double q[] = {1.0, 2.0, 3.0, 4.0};
  const auto ones = levi_spectrum(parse_weight("|z1|^2+|z2|^2"), q);
  CHECK_THAT(ones[0], WithinAbs(1.0, 1e-14));
  CHECK_THAT(ones[1], WithinAbs(1.0, 1e-14));
  CHECK_THAT(levi_partial_sum(parse_weight("|z1|^2+|z2|^2"), q, 2), WithinAbs(2.0, 1e-14));

  const double z2_zero[] = {1.5, 0.0, 0.0, 0.0};
  const auto s = levi_spectrum(parse_weight("|z1|^2+|z2|^4"), z2_zero);
  CHECK_THAT(s[0], WithinAbs(0.0, 1e-14));
  CHECK_THAT(s[1], WithinAbs(1.0, 1e-14));
  CHECK_THAT(lowest_levi_eigenvalue(parse_weight("|z1|^2+|z2|^4"), z2_zero), WithinAbs(0.0, 1e-14));

  const double two[] = {2.0, 0.0};
  CHECK_THAT(levi_spectrum(parse_weight("|z1|^4"), two)[0], WithinRel(16.0, 1e-14));
}

TEST_CASE("trace, Laplacian and electric potential agree", "[weights][property]") {
  const char* weights[] = {"|z1|^2", "|z1|^4 + x1^2", "x1^2*y1^2 + |z1|^6", "|z1|^2+|z2|^4",
                           "x1^2*y2^2 + |z1|^2*|z2|^2", "3*x1*y1*x2 + y2^4 - x1^2"};
  std::mt19937_64 gen(7);
  std::uniform_real_distribution<double> u(-2.0, 2.0);
  for (const char* text : weights) {
    const WeightSpec w = parse_weight(text);
    for (int s = 0; s < 20; ++s) {
      Point p(w.real_dimension());
      for (double& x : p) x = u(gen);
      const LeviMatrix m = levi_matrix(w, p);
      CHECK(m.entries == m.entries.adjoint());
      const double lap = w.laplacian()(p);
      const double scale = std::max(1.0, std::abs(lap));
      CHECK(std::abs(m.trace() - lap / 4.0) <= 1e-12 * scale);
      CHECK(std::abs(electric_potential(w, p) - 2.0 * m.trace()) <= 1e-12 * scale);
      if (w.is_decoupled()) {
        for (Eigen::Index j = 0; j < m.entries.rows(); ++j)
          for (Eigen::Index k = 0; k < m.entries.cols(); ++k)
            if (j != k) CHECK(m.entries(j, k) == Complex(0.0, 0.0));
      }
    }
  }
}

TEST_CASE("sums of |z_j|^2 have unit Levi spectrum everywhere", "[weights][property]") {
  const WeightSpec w = parse_weight("|z1|^2+|z2|^2");
  std::mt19937_64 gen(11);
  std::normal_distribution<double> g(0.0, 5.0);
  for (int s = 0; s < 50; ++s) {
    Point p(4);
    for (double& x : p) x = g(gen);
    for (double v : levi_spectrum(w, p)) CHECK_THAT(v, WithinAbs(1.0, 1e-13));
  }
}

TEST_CASE("magnetic potential matches central differences at second order", "[weights][property]") {
  std::mt19937_64 gen(3);
  std::uniform_int_distribution<int> coeff(-3, 3);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  for (int trial = 0; trial < 10; ++trial) {
    Polynomial phi(4);
    for (int t = 0; t < 6; ++t) {
      Exponents e(4);
      for (int& k : e) k = std::uniform_int_distribution<int>(0, 2)(gen);
      phi.add_term(e, coeff(gen) == 0 ? 1.0 : coeff(gen));
    }
    phi.add_term({3, 0, 0, 0}, 1.0);  // keep third derivatives non-zero
    const WeightSpec w = WeightSpec::from_polynomial(phi);
    Point p(4);
    for (double& x : p) x = u(gen);
    const auto a = magnetic_potential(w, p);
    const auto fd_error = [&](double h) {
      double worst = 0.0;
      for (std::size_t j = 0; j < 2; ++j) {
        for (int c = 0; c < 2; ++c) {
          Point plus = p, minus = p;
          plus[2 * j + c] += h;
          minus[2 * j + c] -= h;
          const double d = (eval(w, plus) - eval(w, minus)) / (2.0 * h);
          // A_{x_j} = −½φ_{y_j}, A_{y_j} = ½φ_{x_j}
          const double exact = c == 1 ? -2.0 * a[2 * j] : 2.0 * a[2 * j + 1];
          worst = std::max(worst, std::abs(d - exact));
        }
      }
      return worst;
    };
    const double e1 = fd_error(1e-2), e2 = fd_error(5e-3);
    const double ratio = e1 / e2;
    CHECK(ratio > 3.0);
    CHECK(ratio < 5.0);
  }
}

TEST_CASE("plurisubharmonicity certification", "[weights]") {
  std::vector<Point> samples = {{0.0, 0.0}, {1.0, 2.0}, {-3.0, 0.5}};
  const PshCertificate c = certify_plurisubharmonic(parse_weight("|z1|^4"), samples);
  CHECK(c.points_checked == 3);
  CHECK(c.min_eigenvalue >= 0.0);
  CHECK(c.scope == "certified on sample set only");
  CHECK_THROWS_AS(certify_plurisubharmonic(parse_weight("-|z1|^2"), samples), NumericalError);
}
