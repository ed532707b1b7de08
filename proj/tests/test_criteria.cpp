#include <catch_amalgamated.hpp>

#include <cmath>
#include <numbers>

#include "pauli/criteria.hpp"

using namespace pauli;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;

namespace {

constexpr double pi = std::numbers::pi;
const std::vector<double> kRadii{1, 2, 4, 8, 16, 32};

CriteriaOptions small_options() {
  CriteriaOptions o;
  o.doubling_centers = default_doubling_centers(3, 4.0);
  o.doubling_radii = {0.5, 1.0, 2.0};
  return o;
}

}  // namespace

TEST_CASE("quantity names", "[criteria]") {
  CHECK(parse_quantity("mu").kind == Quantity::mu);
  CHECK(parse_quantity("sq(2)").q == 2);
  CHECK(parse_quantity("ball_integral").name() == "ball_integral");
  CHECK_THROWS_AS(parse_quantity("sq()"), ConfigError);
  CHECK_THROWS_AS(parse_quantity("nu"), ConfigError);
}

TEST_CASE("radial series examples", "[criteria]") {
  const RadialSeries flat = radial_series(parse_weight("|z1|^2+|z2|^2"), {Quantity::mu, 1}, kRadii, 64);
  for (double v : flat.values) CHECK_THAT(v, WithinAbs(1.0, 1e-12));

  const RadialSeries mixed = radial_series(parse_weight("|z1|^2+|z2|^4"), {Quantity::mu, 1}, kRadii, 64);
  for (std::size_t i = 0; i < kRadii.size(); ++i) {
    CHECK_THAT(mixed.values[i], WithinAbs(0.0, 1e-12));
    const Point& p = mixed.witnesses[i];
    CHECK_THAT(p[2] * p[2] + p[3] * p[3], WithinAbs(0.0, 1e-20));
  }

  const RadialSeries quartic = radial_series(parse_weight("|z1|^4"), {Quantity::mu, 1}, kRadii, 16);
  for (std::size_t i = 0; i < kRadii.size(); ++i) CHECK_THAT(quartic.values[i], WithinRel(4.0 * kRadii[i] * kRadii[i], 1e-12));

  const RadialSeries ball = radial_series(parse_weight("|z1|^2"), {Quantity::ball_integral, 1}, kRadii, 16);
  for (double v : ball.values) CHECK_THAT(v, WithinRel(pi, 1e-12));
}

TEST_CASE("radial series errors", "[criteria]") {
  const WeightSpec w = parse_weight("|z1|^2");
  CHECK_THROWS_AS(radial_series(w, {Quantity::mu, 1}, {}, 16), ConfigError);
  CHECK_THROWS_AS(radial_series(w, {Quantity::mu, 1}, {2.0, 1.0}, 16), ConfigError);
  CHECK_THROWS_AS(radial_series(w, {Quantity::mu, 1}, {0.0, 1.0}, 16), ConfigError);
  CHECK_THROWS_AS(radial_series(w, {Quantity::sq, 2}, {1.0}, 16), ConfigError);
  CHECK_THROWS_AS(radial_series(w, {Quantity::mu, 1}, {1.0}, 4), ConfigError);
}

TEST_CASE("ball integral of the four-dimensional identity trace", "[criteria]") {
  // tr M = 2 over the unit ball in ℝ⁴ of volume π²/2.
  const double c[4] = {3.0, -1.0, 0.5, 2.0};
  CHECK_THAT(ball_integral(parse_weight("|z1|^2+|z2|^2"), c, 16), WithinRel(pi * pi, 1e-12));
}

TEST_CASE("ball integral is additive over decoupled parts", "[criteria][property]") {
  // ∫_{B₁} tr M for |z1|^4+|z2|^2: the quartic part contributes 4|w1|² over the ball.
  const double c[4] = {1.0, 2.0, -0.5, 0.25};
  const double sum = ball_integral(parse_weight("|z1|^4+|z2|^2"), c, 16);
  const double quartic = ball_integral(parse_weight("|z1|^4", 2), c, 16);
  const double quadratic = ball_integral(parse_weight("|z2|^2"), c, 16);
  CHECK_THAT(sum, WithinRel(quartic + quadratic, 1e-12));
  // Over the unit ball in ℝ⁴: ∫ (x₁² + x₂²) = π²/6.
  CHECK_THAT(quartic, WithinRel(4.0 * 5.0 * pi * pi / 2.0 + 4.0 * pi * pi / 6.0, 1e-10));
}

TEST_CASE("divergence and positivity verdicts", "[criteria]") {
  RadialSeries s;
  s.quantity = "mu";
  s.radii = {1, 2, 4};
  s.witnesses = {{1, 0}, {2, 0}, {4, 0}};
  s.values = {1, 4, 16};
  CHECK(divergence_verdict("c", s).verdict == Verdict::holds);
  s.values = {1, 4, 9};
  CHECK(divergence_verdict("c", s).verdict == Verdict::inconclusive);
  s.values = {1, 1, 1};
  const ConditionVerdict bounded = divergence_verdict("c", s);
  CHECK(bounded.verdict == Verdict::fails);
  REQUIRE(bounded.witness);
  CHECK(*bounded.witness == Point{4, 0});
  CHECK(positivity_verdict("p", s).verdict == Verdict::holds);
  s.values = {1, 1, 0};
  CHECK(positivity_verdict("p", s).verdict == Verdict::fails);
}

TEST_CASE("classification examples", "[criteria]") {
  const CriteriaOptions o = small_options();
  const CriteriaReport sum = criteria_report(parse_weight("|z1|^2+|z2|^2"), o);
  CHECK(sum.classification.theorem == "Theorem 2.2");
  CHECK(sum.classification.pminus == kNoCompactResolvent);
  CHECK(sum.classification.pplus == kNoCompactResolvent);
  CHECK(sum.verdict(kLiminfMuPositive).verdict == Verdict::holds);
  CHECK(sum.verdict(kMuDiverges).verdict == Verdict::fails);
  CHECK_FALSE(sum.dirac);

  const CriteriaReport quartic = criteria_report(parse_weight("|z1|^4"), o);
  CHECK(quartic.classification.theorem == "Theorem 2.1");
  CHECK(quartic.classification.pminus == kNoCompactResolvent);
  CHECK(quartic.classification.pplus == kCompactInverse);
  CHECK(quartic.dirac == std::optional<std::string>("𝒟 has no compact resolvent"));

  const CriteriaReport both = criteria_report(parse_weight("|z1|^4+|z2|^4"), o);
  CHECK(both.classification.theorem == "Theorem 2.2");
  CHECK(both.classification.pplus == kCompactInverse);
  CHECK(both.verdict(kBallIntegralDiverges).verdict == Verdict::holds);
}

TEST_CASE("Dirac verdicts", "[criteria]") {
  const CriteriaOptions o = small_options();
  CHECK(criteria_report(parse_weight("|z1|^2"), o).dirac == std::optional<std::string>("𝒟 has no compact resolvent"));
  CHECK(criteria_report(parse_weight("0", 1), o).dirac == std::optional<std::string>("inconclusive"));
  const CriteriaReport r = criteria_report(parse_weight("|z1|^2+|z2|^2"), o);
  CHECK_THROWS_AS(dirac_verdict(parse_weight("|z1|^2+|z2|^2"), r, o), DimensionError);
}

TEST_CASE("scaling the weight scales mu and keeps verdicts", "[criteria][property]") {
  const CriteriaOptions o = small_options();
  for (const char* text : {"|z1|^4", "|z1|^2+|z2|^4", "|z1|^4+|z2|^2"}) {
    const WeightSpec w = parse_weight(text);
    const WeightSpec w3 = parse_weight(std::string("3*(") + text + ")");
    const std::size_t dirs = w.dimension() == 1 ? 16 : 64;
    const RadialSeries a = radial_series(w, {Quantity::mu, 1}, kRadii, dirs);
    const RadialSeries b = radial_series(w3, {Quantity::mu, 1}, kRadii, dirs);
    for (std::size_t i = 0; i < kRadii.size(); ++i) CHECK_THAT(b.values[i], WithinAbs(3.0 * a.values[i], 1e-9 * (1.0 + a.values[i])));
    const CriteriaReport ra = criteria_report(w, o), rb = criteria_report(w3, o);
    for (const std::string& c : {kMuDiverges, kZ2MuDiverges}) CHECK(ra.verdict(c).verdict == rb.verdict(c).verdict);
  }
}

TEST_CASE("decoupled mu is the minimum over parts", "[criteria][property]") {
  const WeightSpec w = parse_weight("|z1|^4+|z2|^2");
  const RadialSeries s = radial_series(w, {Quantity::mu, 1}, kRadii, 64);
  for (std::size_t i = 0; i < kRadii.size(); ++i) {
    const Point& p = s.witnesses[i];
    const double r1 = p[0] * p[0] + p[1] * p[1];
    CHECK_THAT(s.values[i], WithinAbs(std::min(4.0 * r1, 1.0), 1e-12));
    CHECK_THAT(s.values[i], WithinAbs(levi_spectrum(w, p).front(), 1e-12));
  }
}

TEST_CASE("every fails verdict carries a witness", "[criteria][property]") {
  const CriteriaOptions o = small_options();
  for (const char* text : {"|z1|^2", "|z1|^4", "x1^2", "|z1|^2+|z2|^2", "|z1|^4+|z2|^2"}) {
    const CriteriaReport r = criteria_report(parse_weight(text), o);
    for (const ConditionVerdict& v : r.verdicts)
      if (v.verdict == Verdict::fails) CHECK(v.witness.has_value());
    if (r.classification.theorem == "Theorem 2.1") CHECK(r.verdict(kMuDiverges).verdict == Verdict::holds);
  }
}
