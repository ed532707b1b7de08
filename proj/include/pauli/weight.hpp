#pragma once

// Plurisubharmonic polynomial weights φ on ℂⁿ = ℝ²ⁿ and their exact
// calculus: magnetic potential, electric potential, Levi matrix.
//
// Coordinates are ordered (x₁, y₁, …, xₙ, yₙ); coordinate 2j is x_{j+1}
// and 2j+1 is y_{j+1}.

#include <algorithm>
#include <cctype>
#include <limits>
#include <map>
#include <string_view>
#include <cmath>
#include <complex>
#include <cstddef>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "pauli/error.hpp"
#include "pauli/polynomial.hpp"

namespace pauli {

using Point = std::vector<double>;

class WeightSpec {
 public:
  WeightSpec() = default;

  /// Builds the weight and caches all first and second partial derivatives.
  static WeightSpec from_polynomial(Polynomial phi, std::string label = {}) {
    return build(std::move(phi), std::move(label), true);
  }

  std::size_t dimension() const noexcept { return phi_.variables() / 2; }
  std::size_t real_dimension() const noexcept { return phi_.variables(); }
  const std::string& label() const noexcept { return label_; }
  const Polynomial& polynomial() const noexcept { return phi_; }
  const std::map<Exponents, double>& terms() const noexcept { return phi_.terms(); }

  bool is_decoupled() const noexcept { return !parts_.empty(); }
  /// One single-variable weight per complex coordinate; empty unless decoupled.
  const std::vector<WeightSpec>& decoupled_parts() const noexcept { return parts_; }

  const Polynomial& gradient(std::size_t a) const { return gradient_.at(a); }
  const Polynomial& hessian(std::size_t a, std::size_t b) const {
    return hessian_.at(a * real_dimension() + b);
  }
  const Polynomial& laplacian() const noexcept { return laplacian_; }

  void check_point(std::span<const double> p) const {
    if (p.size() != real_dimension()) {
      throw DimensionError("point has " + std::to_string(p.size()) +
                           " coordinates, weight needs " +
                           std::to_string(real_dimension()));
    }
  }

 private:
  static WeightSpec build(Polynomial phi, std::string label, bool detect) {
    if (phi.variables() == 0 || phi.variables() % 2 != 0) {
      throw DimensionError("a weight needs an even, positive number of real variables");
    }
    WeightSpec w;
    w.label_ = std::move(label);
    w.phi_ = std::move(phi);
    const std::size_t m = w.phi_.variables();
    w.gradient_.reserve(m);
    for (std::size_t a = 0; a < m; ++a) w.gradient_.push_back(w.phi_.derivative(a));
    w.hessian_.assign(m * m, Polynomial(m));
    for (std::size_t a = 0; a < m; ++a) {
      for (std::size_t b = a; b < m; ++b) {
        w.hessian_[a * m + b] = w.gradient_[a].derivative(b);
        w.hessian_[b * m + a] = w.hessian_[a * m + b];
      }
    }
    w.laplacian_ = Polynomial(m);
    for (std::size_t a = 0; a < m; ++a) w.laplacian_ += w.hessian_[a * m + a];
    if (detect) w.detect_decoupling();
    return w;
  }

  // φ is decoupled when no term mixes two complex coordinates; constants go
  // to the first part.
  void detect_decoupling() {
    const std::size_t n = dimension();
    std::vector<Polynomial> pieces(n, Polynomial(2));
    for (const auto& [e, c] : phi_.terms()) {
      std::size_t owner = 0;
      int involved = 0;
      for (std::size_t j = 0; j < n; ++j) {
        if (e[2 * j] != 0 || e[2 * j + 1] != 0) {
          owner = j;
          ++involved;
        }
      }
      if (involved > 1) return;
      pieces[owner].add_term({e[2 * owner], e[2 * owner + 1]}, c);
    }
    parts_.reserve(n);
    for (std::size_t j = 0; j < n; ++j) {
      parts_.push_back(build(std::move(pieces[j]),
                             n == 1 ? label_ : label_ + "[z" + std::to_string(j + 1) + "]", false));
    }
  }

  std::string label_;
  Polynomial phi_;
  std::vector<Polynomial> gradient_;
  std::vector<Polynomial> hessian_;
  Polynomial laplacian_;
  std::vector<WeightSpec> parts_;
};

// ---------------------------------------------------------------------------
// Weight expression parser
//
//   expression = [ "+" | "-" ] term { ( "+" | "-" ) term } ;
//   term       = factor { "*" factor } ;
//   factor     = primary [ "^" integer ] | modulus ;
//   modulus    = "|z" index "|" "^" even-integer ;      (* (x_j²+y_j²)^(k/2) *)
//   primary    = number | "x" index | "y" index | "(" expression ")" ;
//   index      = positive integer ;
//
// Whitespace is ignored. Numbers use the usual decimal/exponent notation.
// ---------------------------------------------------------------------------

namespace detail {

class WeightParser {
 public:
  WeightParser(std::string_view text, std::size_t n) : text_(text), n_(n) {}

  Polynomial parse() {
    skip();
    Polynomial p = expression();
    skip();
    if (pos_ != text_.size()) fail("unexpected character '" + std::string(1, text_[pos_]) + "'");
    return p;
  }

  /// Largest variable index mentioned in `text` (0 if none).
  static std::size_t scan_dimension(std::string_view text) {
    std::size_t top = 0;
    for (std::size_t i = 0; i < text.size(); ++i) {
      const char c = text[i];
      if ((c == 'x' || c == 'y' || c == 'z') && i + 1 < text.size() &&
          std::isdigit(static_cast<unsigned char>(text[i + 1]))) {
        std::size_t j = i + 1, v = 0;
        while (j < text.size() && std::isdigit(static_cast<unsigned char>(text[j]))) {
          v = v * 10 + static_cast<std::size_t>(text[j] - '0');
          ++j;
        }
        top = std::max(top, v);
      }
    }
    return top;
  }

 private:
  [[noreturn]] void fail(const std::string& what) const { throw ParseError(what, pos_); }

  void skip() {
    while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
  }

  bool accept(char c) {
    skip();
    if (pos_ < text_.size() && text_[pos_] == c) {
      ++pos_;
      return true;
    }
    return false;
  }

  void expect(char c) {
    if (!accept(c)) fail(std::string("expected '") + c + "'");
  }

  Polynomial expression() {
    Polynomial sum(2 * n_);
    bool negative = false;
    if (accept('-')) negative = true;
    else accept('+');
    Polynomial t = term();
    sum += negative ? t * -1.0 : t;
    for (;;) {
      if (accept('+')) sum += term();
      else if (accept('-')) sum -= term();
      else break;
    }
    return sum;
  }

  Polynomial term() {
    Polynomial p = factor();
    while (accept('*')) p = p * factor();
    return p;
  }

  Polynomial factor() {
    skip();
    if (pos_ < text_.size() && text_[pos_] == '|') return modulus();
    Polynomial base = primary();
    if (accept('^')) {
      skip();
      const std::size_t at = pos_;
      const int k = integer();
      if (k < 0) {
        pos_ = at;
        fail("negative exponent");
      }
      base = base.pow(k);
    }
    return base;
  }

  Polynomial modulus() {
    expect('|');
    skip();
    if (pos_ >= text_.size() || text_[pos_] != 'z') fail("expected 'z' after '|'");
    ++pos_;
    const std::size_t j = index();
    expect('|');
    skip();
    const std::size_t at = pos_;
    int k = 1;
    if (accept('^')) {
      skip();
      k = integer();
    }
    if (k < 0 || k % 2 != 0) {
      pos_ = at;
      fail("odd shorthand exponent " + std::to_string(k) + " for |z" + std::to_string(j) +
           "| (only even powers are polynomial)");
    }
    Polynomial x = Polynomial::variable(2 * n_, 2 * (j - 1));
    Polynomial y = Polynomial::variable(2 * n_, 2 * (j - 1) + 1);
    return (x * x + y * y).pow(k / 2);
  }

  Polynomial primary() {
    skip();
    if (pos_ >= text_.size()) fail("unexpected end of expression");
    const char c = text_[pos_];
    if (c == '(') {
      ++pos_;
      Polynomial inner = expression();
      expect(')');
      return inner;
    }
    if (c == 'x' || c == 'y') {
      ++pos_;
      const std::size_t j = index();
      return Polynomial::variable(2 * n_, 2 * (j - 1) + (c == 'y' ? 1 : 0));
    }
    if (c == 'i' || c == 'I' || c == 'j') fail("non-real coefficient (imaginary unit)");
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') {
      const double v = number();
      skip();
      if (pos_ < text_.size() && (text_[pos_] == 'i' || text_[pos_] == 'I' || text_[pos_] == 'j')) {
        fail("non-real coefficient (imaginary unit)");
      }
      return Polynomial::constant(2 * n_, v);
    }
    fail("unexpected character '" + std::string(1, c) + "'");
  }

  std::size_t index() {
    const std::size_t at = pos_;
    if (pos_ >= text_.size() || !std::isdigit(static_cast<unsigned char>(text_[pos_]))) {
      fail("expected variable index");
    }
    std::size_t v = 0;
    while (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) {
      v = v * 10 + static_cast<std::size_t>(text_[pos_] - '0');
      ++pos_;
    }
    if (v == 0 || v > n_) {
      pos_ = at;
      fail("variable index " + std::to_string(v) + " out of range 1.." + std::to_string(n_));
    }
    return v;
  }

  int integer() {
    if (pos_ >= text_.size() || !std::isdigit(static_cast<unsigned char>(text_[pos_]))) {
      fail("expected integer exponent");
    }
    long v = 0;
    while (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) {
      v = v * 10 + (text_[pos_] - '0');
      if (v > 64) fail("exponent too large");
      ++pos_;
    }
    return static_cast<int>(v);
  }

  double number() {
    const std::size_t start = pos_;
    while (pos_ < text_.size() &&
           (std::isdigit(static_cast<unsigned char>(text_[pos_])) || text_[pos_] == '.')) {
      ++pos_;
    }
    if (pos_ < text_.size() && (text_[pos_] == 'e' || text_[pos_] == 'E')) {
      std::size_t q = pos_ + 1;
      if (q < text_.size() && (text_[q] == '+' || text_[q] == '-')) ++q;
      if (q < text_.size() && std::isdigit(static_cast<unsigned char>(text_[q]))) {
        pos_ = q;
        while (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) ++pos_;
      }
    }
    const std::string token(text_.substr(start, pos_ - start));
    std::size_t used = 0;
    double v = 0.0;
    try {
      v = std::stod(token, &used);
    } catch (const std::exception&) {
      pos_ = start;
      fail("malformed number '" + token + "'");
    }
    if (used != token.size()) {
      pos_ = start;
      fail("malformed number '" + token + "'");
    }
    return v;
  }

  std::string_view text_;
  std::size_t n_;
  std::size_t pos_ = 0;
};

}  // namespace detail

/// Parses a weight expression into its canonical expanded form. The complex
/// dimension is the largest variable index used, or `dimension` if larger.
inline WeightSpec parse_weight(std::string_view text, std::size_t dimension = 0) {
  const std::size_t used = detail::WeightParser::scan_dimension(text);
  if (dimension != 0 && used > dimension) {
    throw DimensionError("weight uses z" + std::to_string(used) + " but dimension is " +
                         std::to_string(dimension));
  }
  const std::size_t n = std::max<std::size_t>({dimension, used, 1});
  detail::WeightParser parser(text, n);
  return WeightSpec::from_polynomial(parser.parse(), std::string(text));
}

// ---------------------------------------------------------------------------
// Pointwise calculus
// ---------------------------------------------------------------------------

inline double eval(const WeightSpec& w, std::span<const double> p) {
  w.check_point(p);
  return w.polynomial()(p);
}

/// A = ½(−φ_{y₁}, φ_{x₁}, …, −φ_{yₙ}, φ_{xₙ}).
inline std::vector<double> magnetic_potential(const WeightSpec& w, std::span<const double> p) {
  w.check_point(p);
  const std::size_t n = w.dimension();
  std::vector<double> a(2 * n);
  for (std::size_t j = 0; j < n; ++j) {
    a[2 * j] = -0.5 * w.gradient(2 * j + 1)(p);
    a[2 * j + 1] = 0.5 * w.gradient(2 * j)(p);
  }
  return a;
}

/// V = ½Δφ.
inline double electric_potential(const WeightSpec& w, std::span<const double> p) {
  w.check_point(p);
  return 0.5 * w.laplacian()(p);
}

struct LeviMatrix {
  Eigen::MatrixXcd entries;

  std::size_t size() const noexcept { return static_cast<std::size_t>(entries.rows()); }
  double trace() const {
    double t = 0.0;
    for (Eigen::Index j = 0; j < entries.rows(); ++j) t += entries(j, j).real();
    return t;
  }
};

/// (∂²φ/∂z_j∂z̄_k) = ¼[(φ_{x_j x_k} + φ_{y_j y_k}) + i(φ_{x_j y_k} − φ_{y_j x_k})],
/// filled on and above the diagonal and mirrored so it is exactly Hermitian.
inline LeviMatrix levi_matrix(const WeightSpec& w, std::span<const double> p) {
  w.check_point(p);
  const std::size_t n = w.dimension();
  LeviMatrix m{Eigen::MatrixXcd::Zero(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n))};
  for (std::size_t j = 0; j < n; ++j) {
    const double diag = 0.25 * (w.hessian(2 * j, 2 * j)(p) + w.hessian(2 * j + 1, 2 * j + 1)(p));
    m.entries(j, j) = {diag, 0.0};
    for (std::size_t k = j + 1; k < n; ++k) {
      const double re = 0.25 * (w.hessian(2 * j, 2 * k)(p) + w.hessian(2 * j + 1, 2 * k + 1)(p));
      const double im = 0.25 * (w.hessian(2 * j, 2 * k + 1)(p) - w.hessian(2 * j + 1, 2 * k)(p));
      m.entries(j, k) = {re, im};
      m.entries(k, j) = {re, -im};
    }
  }
  return m;
}

namespace detail {

/// Cyclic Jacobi eigenvalues of a small real symmetric matrix (ascending).
inline std::vector<double> jacobi_eigenvalues(Eigen::MatrixXd a) {
  const Eigen::Index m = a.rows();
  for (int sweep = 0; sweep < 100; ++sweep) {
    double off = 0.0, scale = 0.0;
    for (Eigen::Index i = 0; i < m; ++i) {
      scale += a(i, i) * a(i, i);
      for (Eigen::Index j = i + 1; j < m; ++j) off += a(i, j) * a(i, j);
    }
    if (off <= 1e-32 * std::max(scale, 1e-300)) break;
    for (Eigen::Index p = 0; p < m; ++p) {
      for (Eigen::Index q = p + 1; q < m; ++q) {
        if (a(p, q) == 0.0) continue;
        const double theta = (a(q, q) - a(p, p)) / (2.0 * a(p, q));
        const double t = (theta >= 0 ? 1.0 : -1.0) / (std::abs(theta) + std::sqrt(theta * theta + 1.0));
        const double c = 1.0 / std::sqrt(t * t + 1.0);
        const double s = t * c;
        for (Eigen::Index k = 0; k < m; ++k) {
          const double akp = a(k, p), akq = a(k, q);
          a(k, p) = c * akp - s * akq;
          a(k, q) = s * akp + c * akq;
        }
        for (Eigen::Index k = 0; k < m; ++k) {
          const double apk = a(p, k), aqk = a(q, k);
          a(p, k) = c * apk - s * aqk;
          a(q, k) = s * apk + c * aqk;
        }
      }
    }
  }
  std::vector<double> ev(static_cast<std::size_t>(m));
  for (Eigen::Index i = 0; i < m; ++i) ev[static_cast<std::size_t>(i)] = a(i, i);
  std::sort(ev.begin(), ev.end());
  return ev;
}

}  // namespace detail

/// Ascending eigenvalues of a Hermitian matrix. Closed form for n ≤ 2;
/// for n ≥ 3 Jacobi on the real 2n×2n embedding [[Re, −Im], [Im, Re]],
/// whose spectrum is that of the input with every eigenvalue doubled.
inline std::vector<double> hermitian_eigenvalues(const Eigen::MatrixXcd& m) {
  const Eigen::Index n = m.rows();
  if (n == 1) return {m(0, 0).real()};
  if (n == 2) {
    const double a = m(0, 0).real(), d = m(1, 1).real();
    const double mean = 0.5 * (a + d);
    const double radius = std::hypot(0.5 * (a - d), std::abs(m(0, 1)));
    return {mean - radius, mean + radius};
  }
  Eigen::MatrixXd big(2 * n, 2 * n);
  big.topLeftCorner(n, n) = m.real();
  big.bottomRightCorner(n, n) = m.real();
  big.topRightCorner(n, n) = -m.imag();
  big.bottomLeftCorner(n, n) = m.imag();
  const std::vector<double> doubled = detail::jacobi_eigenvalues(big);
  std::vector<double> ev;
  ev.reserve(static_cast<std::size_t>(n));
  for (std::size_t i = 0; i < doubled.size(); i += 2) ev.push_back(0.5 * (doubled[i] + doubled[i + 1]));
  return ev;
}

/// Ascending eigenvalues of the Levi matrix: μ_φ is the first entry and s_q
/// the sum of the first q.
inline std::vector<double> levi_spectrum(const WeightSpec& w, std::span<const double> p) {
  return hermitian_eigenvalues(levi_matrix(w, p).entries);
}

inline double lowest_levi_eigenvalue(const WeightSpec& w, std::span<const double> p) {
  return levi_spectrum(w, p).front();
}

inline double levi_partial_sum(const WeightSpec& w, std::span<const double> p, std::size_t q) {
  const auto ev = levi_spectrum(w, p);
  if (q == 0 || q > ev.size()) throw DimensionError("s_q needs 1 <= q <= n");
  double s = 0.0;
  for (std::size_t i = 0; i < q; ++i) s += ev[i];
  return s;
}

// ---------------------------------------------------------------------------
// Sampled plurisubharmonicity certificate
// ---------------------------------------------------------------------------

struct PshCertificate {
  std::size_t points_checked = 0;
  double min_eigenvalue = 0.0;
  double scale = 1.0;
  std::string scope = "certified on sample set only";
};

/// Checks that the Levi matrix is positive semidefinite (smallest eigenvalue
/// ≥ −1e-10·scale) at every sample; throws NumericalError on a violation.
inline PshCertificate certify_plurisubharmonic(const WeightSpec& w,
                                               std::span<const Point> samples) {
  PshCertificate cert;
  double scale = 1.0;
  double worst = std::numeric_limits<double>::infinity();
  const Point* witness = nullptr;
  for (const Point& p : samples) {
    const auto ev = levi_spectrum(w, p);
    scale = std::max({scale, std::abs(ev.front()), std::abs(ev.back())});
    if (ev.front() < worst) {
      worst = ev.front();
      witness = &p;
    }
  }
  cert.points_checked = samples.size();
  cert.scale = scale;
  cert.min_eigenvalue = samples.empty() ? 0.0 : worst;
  if (witness != nullptr && worst < -1e-10 * scale) {
    std::string where;
    for (double c : *witness) where += (where.empty() ? "" : ", ") + std::to_string(c);
    throw NumericalError("weight '" + w.label() + "' is not plurisubharmonic: Levi eigenvalue " +
                         std::to_string(worst) + " at (" + where + ")");
  }
  return cert;
}

}  // namespace pauli
