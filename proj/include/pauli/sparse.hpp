#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdio>
#include <fstream>
#include <limits>
#include <tuple>
#include <sstream>
#include <string>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/Sparse>

#include "pauli/error.hpp"
#include "pauli/parallel.hpp"

namespace pauli {

using Complex = std::complex<double>;
using SparseMatrix = Eigen::SparseMatrix<Complex, Eigen::RowMajor, int>;
using Triplet = Eigen::Triplet<Complex, int>;

/// Maximum |M(i,j) − conj(M(j,i))| over all stored entries.
inline double hermitian_defect(const SparseMatrix& m) {
  if (m.rows() != m.cols()) return std::numeric_limits<double>::infinity();
  const SparseMatrix adjoint = SparseMatrix(m.adjoint());
  const SparseMatrix diff = m - adjoint;
  double worst = 0.0;
  for (int r = 0; r < diff.outerSize(); ++r)
    for (SparseMatrix::InnerIterator it(diff, r); it; ++it) worst = std::max(worst, std::abs(it.value()));
  return worst;
}

inline SparseMatrix from_triplets(int dim, const std::vector<Triplet>& triplets) {
  SparseMatrix m(dim, dim);
  m.setFromTriplets(triplets.begin(), triplets.end());
  m.prune([](int, int, const Complex& v) { return v != Complex(0.0, 0.0); });
  m.makeCompressed();
  return m;
}

/// Row-parallel assembly: row_entries(row, out) appends the entries of one
/// row. Rows are concatenated in order, so the result does not depend on
/// the thread count.
template <class RowEntries>
SparseMatrix assemble_rows(int dim, RowEntries&& row_entries) {
  const std::size_t chunks = std::max<std::size_t>(1, max_threads());
  std::vector<std::vector<Triplet>> parts(chunks);
  const std::size_t rows = static_cast<std::size_t>(dim);
  const std::size_t chunk = (rows + chunks - 1) / chunks;
  parallel_for(chunks, [&](std::size_t begin, std::size_t end) {
    for (std::size_t c = begin; c < end; ++c) {
      const std::size_t lo = std::min(rows, c * chunk), hi = std::min(rows, lo + chunk);
      for (std::size_t r = lo; r < hi; ++r) row_entries(static_cast<int>(r), parts[c]);
    }
  });
  std::vector<Triplet> all;
  for (auto& p : parts) all.insert(all.end(), p.begin(), p.end());
  return from_triplets(dim, all);
}

/// y = M x with each output row computed as one dot product over its stored
/// entries; row blocks run in parallel without cross-row reductions.
inline Eigen::VectorXcd multiply(const SparseMatrix& m, const Eigen::VectorXcd& x) {
  Eigen::VectorXcd y(m.rows());
  const Complex* xs = x.data();
  parallel_for(static_cast<std::size_t>(m.rows()), [&](std::size_t begin, std::size_t end) {
    for (std::size_t r = begin; r < end; ++r) {
      Complex acc(0.0, 0.0);
      for (SparseMatrix::InnerIterator it(m, static_cast<int>(r)); it; ++it) acc += it.value() * xs[it.col()];
      y[static_cast<Eigen::Index>(r)] = acc;
    }
  });
  return y;
}

/// Sparse matrix whose stored pattern and values are exactly self-adjoint.
class SparseHermitianOperator {
 public:
  SparseHermitianOperator() = default;

  /// Throws NumericalError unless `m` equals its adjoint entrywise.
  explicit SparseHermitianOperator(SparseMatrix m) : matrix_(std::move(m)) {
    matrix_.makeCompressed();
    const double defect = hermitian_defect(matrix_);
    if (defect != 0.0) {
      throw NumericalError("operator is not exactly Hermitian (defect " + std::to_string(defect) + ")");
    }
    hermitian_certified_ = true;
  }

  /// ½(M + M†), which is exactly Hermitian in floating point.
  static SparseHermitianOperator symmetrized(const SparseMatrix& m) {
    SparseMatrix s = 0.5 * (m + SparseMatrix(m.adjoint()));
    s.prune([](int, int, const Complex& v) { return v != Complex(0.0, 0.0); });
    return SparseHermitianOperator(std::move(s));
  }

  int dim() const noexcept { return static_cast<int>(matrix_.rows()); }
  const SparseMatrix& matrix() const noexcept { return matrix_; }
  bool hermitian_certified() const noexcept { return hermitian_certified_; }
  Eigen::Index nonzeros() const noexcept { return matrix_.nonZeros(); }

  Eigen::VectorXcd apply(const Eigen::VectorXcd& x) const { return multiply(matrix_, x); }

  /// Induced 1-norm (max absolute column sum; equal to the row sum here).
  double norm1() const {
    double worst = 0.0;
    for (int r = 0; r < matrix_.outerSize(); ++r) {
      double s = 0.0;
      for (SparseMatrix::InnerIterator it(matrix_, r); it; ++it) s += std::abs(it.value());
      worst = std::max(worst, s);
    }
    return worst;
  }

  Eigen::MatrixXcd dense() const { return Eigen::MatrixXcd(matrix_); }

 private:
  SparseMatrix matrix_;
  bool hermitian_certified_ = false;
};

// ---------------------------------------------------------------------------
// Matrix Market coordinate files (1-based indices)
// ---------------------------------------------------------------------------

/// Hermitian operators are written with symmetry "hermitian" (lower triangle
/// only); anything else as "general".
inline void write_matrix_market(std::ostream& out, const SparseMatrix& m, bool hermitian) {
  std::vector<std::tuple<int, int, Complex>> entries;
  for (int r = 0; r < m.outerSize(); ++r)
    for (SparseMatrix::InnerIterator it(m, r); it; ++it)
      if (!hermitian || it.col() <= r) entries.emplace_back(r, it.col(), it.value());
  std::sort(entries.begin(), entries.end(), [](const auto& a, const auto& b) {
    return std::get<1>(a) != std::get<1>(b) ? std::get<1>(a) < std::get<1>(b) : std::get<0>(a) < std::get<0>(b);
  });
  out << "%%MatrixMarket matrix coordinate complex " << (hermitian ? "hermitian" : "general") << "\n";
  out << m.rows() << " " << m.cols() << " " << entries.size() << "\n";
  char line[128];
  for (const auto& [r, c, v] : entries) {
    std::snprintf(line, sizeof line, "%d %d %.17g %.17g\n", r + 1, c + 1, v.real(), v.imag());
    out << line;
  }
}

inline void write_matrix_market(const std::string& path, const SparseHermitianOperator& op) {
  std::ofstream out(path);
  if (!out) throw ConfigError("cannot open '" + path + "' for writing");
  write_matrix_market(out, op.matrix(), true);
}

/// Reads a complex coordinate file (general or hermitian symmetry).
inline SparseMatrix read_matrix_market(std::istream& in) {
  std::string header;
  if (!std::getline(in, header)) throw ConfigError("empty Matrix Market stream");
  std::istringstream hs(header);
  std::string banner, object, format, field, symmetry;
  hs >> banner >> object >> format >> field >> symmetry;
  if (banner != "%%MatrixMarket" || object != "matrix" || format != "coordinate" || field != "complex") {
    throw ConfigError("unsupported Matrix Market header: " + header);
  }
  const bool hermitian = symmetry == "hermitian";
  if (!hermitian && symmetry != "general") throw ConfigError("unsupported symmetry '" + symmetry + "'");
  std::string line;
  do {
    if (!std::getline(in, line)) throw ConfigError("missing Matrix Market size line");
  } while (!line.empty() && line[0] == '%');
  std::istringstream sizes(line);
  int rows = 0, cols = 0;
  long count = 0;
  sizes >> rows >> cols >> count;
  std::vector<Triplet> t;
  for (long k = 0; k < count; ++k) {
    int r = 0, c = 0;
    double re = 0.0, im = 0.0;
    if (!(in >> r >> c >> re >> im)) throw ConfigError("truncated Matrix Market entries");
    t.emplace_back(r - 1, c - 1, Complex(re, im));
    if (hermitian && r != c) t.emplace_back(c - 1, r - 1, Complex(re, -im));
  }
  SparseMatrix m(rows, cols);
  m.setFromTriplets(t.begin(), t.end());
  m.makeCompressed();
  return m;
}

}  // namespace pauli
