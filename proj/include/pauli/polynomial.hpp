#pragma once

// Sparse real multivariate polynomials with exact differentiation.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "pauli/error.hpp"

namespace pauli {

using Exponents = std::vector<int>;

/// Real polynomial in a fixed number of variables, stored as a map from
/// exponent vectors to coefficients. Zero coefficients are never stored.
class Polynomial {
 public:
  Polynomial() = default;
  explicit Polynomial(std::size_t variables) : variables_(variables) {}

  static Polynomial constant(std::size_t variables, double c) {
    Polynomial p(variables);
    p.add_term(Exponents(variables, 0), c);
    return p;
  }

  static Polynomial variable(std::size_t variables, std::size_t index) {
    Polynomial p(variables);
    Exponents e(variables, 0);
    e.at(index) = 1;
    p.add_term(e, 1.0);
    return p;
  }

  std::size_t variables() const noexcept { return variables_; }
  const std::map<Exponents, double>& terms() const noexcept { return terms_; }
  bool is_zero() const noexcept { return terms_.empty(); }

  void add_term(const Exponents& e, double c) {
    if (e.size() != variables_) {
      throw DimensionError("exponent vector has " + std::to_string(e.size()) +
                           " entries, expected " + std::to_string(variables_));
    }
    if (c == 0.0) return;
    auto [it, inserted] = terms_.emplace(e, c);
    if (!inserted) {
      it->second += c;
      if (it->second == 0.0) terms_.erase(it);
    }
  }

  int degree() const noexcept {
    int d = 0;
    for (const auto& [e, c] : terms_) {
      int s = 0;
      for (int k : e) s += k;
      d = std::max(d, s);
    }
    return d;
  }

  int max_exponent() const noexcept {
    int d = 0;
    for (const auto& [e, c] : terms_)
      for (int k : e) d = std::max(d, k);
    return d;
  }

  /// Value at `x`; powers of each variable are tabulated once per call.
  double operator()(std::span<const double> x) const {
    if (x.size() != variables_) {
      throw DimensionError("point has " + std::to_string(x.size()) +
                           " coordinates, expected " +
                           std::to_string(variables_));
    }
    if (terms_.empty()) return 0.0;
    const int top = max_exponent();
    const std::size_t stride = static_cast<std::size_t>(top) + 1;
    double table[64];
    std::vector<double> heap;
    double* powers = table;
    if (variables_ * stride > 64) {
      heap.resize(variables_ * stride);
      powers = heap.data();
    }
    for (std::size_t v = 0; v < variables_; ++v) {
      double* row = powers + v * stride;
      row[0] = 1.0;
      for (int k = 1; k <= top; ++k) row[k] = row[k - 1] * x[v];
    }
    double sum = 0.0;
    for (const auto& [e, c] : terms_) {
      double t = c;
      for (std::size_t v = 0; v < variables_; ++v) {
        if (e[v] != 0) t *= powers[v * stride + e[v]];
      }
      sum += t;
    }
    return sum;
  }

  Polynomial derivative(std::size_t index) const {
    if (index >= variables_) throw DimensionError("derivative index out of range");
    Polynomial d(variables_);
    for (const auto& [e, c] : terms_) {
      if (e[index] == 0) continue;
      Exponents f = e;
      f[index] -= 1;
      d.add_term(f, c * e[index]);
    }
    return d;
  }

  /// Antiderivative in one variable with zero constant of integration.
  Polynomial antiderivative(std::size_t index) const {
    if (index >= variables_) throw DimensionError("antiderivative index out of range");
    Polynomial a(variables_);
    for (const auto& [e, c] : terms_) {
      Exponents f = e;
      f[index] += 1;
      a.add_term(f, c / f[index]);
    }
    return a;
  }

  Polynomial& operator+=(const Polynomial& o) {
    check_same(o);
    for (const auto& [e, c] : o.terms_) add_term(e, c);
    return *this;
  }

  Polynomial& operator-=(const Polynomial& o) {
    check_same(o);
    for (const auto& [e, c] : o.terms_) add_term(e, -c);
    return *this;
  }

  Polynomial& operator*=(double s) {
    if (s == 0.0) {
      terms_.clear();
      return *this;
    }
    for (auto& [e, c] : terms_) c *= s;
    return *this;
  }

  friend Polynomial operator+(Polynomial a, const Polynomial& b) { return a += b; }
  friend Polynomial operator-(Polynomial a, const Polynomial& b) { return a -= b; }
  friend Polynomial operator*(Polynomial a, double s) { return a *= s; }
  friend Polynomial operator*(double s, Polynomial a) { return a *= s; }

  friend Polynomial operator*(const Polynomial& a, const Polynomial& b) {
    a.check_same(b);
    Polynomial r(a.variables_);
    for (const auto& [ea, ca] : a.terms_) {
      for (const auto& [eb, cb] : b.terms_) {
        Exponents e(a.variables_);
        for (std::size_t v = 0; v < a.variables_; ++v) e[v] = ea[v] + eb[v];
        r.add_term(e, ca * cb);
      }
    }
    return r;
  }

  Polynomial pow(int k) const {
    Polynomial r = constant(variables_, 1.0);
    for (int i = 0; i < k; ++i) r = r * *this;
    return r;
  }

  friend bool operator==(const Polynomial& a, const Polynomial& b) {
    return a.variables_ == b.variables_ && a.terms_ == b.terms_;
  }

 private:
  void check_same(const Polynomial& o) const {
    if (o.variables_ != variables_) {
      throw DimensionError("polynomials over different variable counts");
    }
  }

  std::size_t variables_ = 0;
  std::map<Exponents, double> terms_;
};

}  // namespace pauli
