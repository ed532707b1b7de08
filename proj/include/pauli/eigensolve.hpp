#pragma once

// Lowest eigenpairs of sparse Hermitian operators, eigenvalue counting by
// Sylvester inertia, and finite-volume compactness proxies.

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <limits>
#include <optional>
#include <ostream>
#include <random>
#include <string>
#include <vector>

#ifndef lapack_complex_float
#define lapack_complex_float std::complex<float>
#endif
#ifndef lapack_complex_double
#define lapack_complex_double std::complex<double>
#endif
#include <lapacke.h>

#include <Eigen/Dense>
#include <Eigen/Sparse>
#include <Eigen/SparseCholesky>

#include "pauli/discretize.hpp"
#include "pauli/error.hpp"
#include "pauli/grid.hpp"
#include "pauli/sparse.hpp"
#include "pauli/weight.hpp"

namespace pauli {

struct SolverOptions {
  bool shift_invert = true;
  bool force_iterative = false;  // skip the dense path even for small operators
  int max_iterations = 5000;     // block Krylov steps
  double kernel_tol = 0.1;
  std::size_t dense_limit = 3000;
};

struct SpectrumResult {
  std::vector<double> eigenvalues;    // ascending
  std::vector<double> residuals;      // ‖Op v − λv‖₂ / ‖v‖₂
  std::size_t near_kernel_count = 0;  // eigenvalues below kernel_tol
  std::vector<double> boundary_mass;  // ℓ² mass on the two outermost layers (empty without a grid)
  bool converged = true;
  std::string method;
  int iterations = 0;
  double shift = 0.0;
};

/// Location of the unknowns of an operator on a grid. `blocks` > 1 for
/// stacked operators such as 𝒟, whose vectors are `blocks` copies of the grid.
struct GridLayout {
  const Grid* grid = nullptr;
  std::size_t blocks = 1;
};

namespace detail {

using ColSparse = Eigen::SparseMatrix<Complex, Eigen::ColMajor, int>;

/// LDLᴴ factorization of Op − σI (AMD ordering, no pivoting).
class ShiftedFactorization {
 public:
  explicit ShiftedFactorization(const SparseMatrix& op) : matrix_(op) { solver_.analyzePattern(matrix_); }

  bool factor(double sigma) {
    solver_.setShift(-sigma);
    solver_.factorize(matrix_);
    return solver_.info() == Eigen::Success;
  }

  /// Negative pivots of D, which by Sylvester's law of inertia equal the
  /// number of eigenvalues below σ.
  std::size_t negative_pivots() const {
    const auto d = solver_.vectorD();
    std::size_t count = 0;
    for (Eigen::Index i = 0; i < d.size(); ++i) count += std::real(d[i]) < 0.0 ? 1 : 0;
    return count;
  }

  Eigen::MatrixXcd solve(const Eigen::MatrixXcd& b) const { return solver_.solve(b); }

 private:
  ColSparse matrix_;
  Eigen::SimplicialLDLT<ColSparse, Eigen::Lower, Eigen::AMDOrdering<int>> solver_;
};

inline Eigen::MatrixXcd apply_block(const SparseMatrix& m, const Eigen::MatrixXcd& x) {
  Eigen::MatrixXcd y(m.rows(), x.cols());
  for (Eigen::Index c = 0; c < x.cols(); ++c) y.col(c) = multiply(m, x.col(c));
  return y;
}

/// First column all-ones, the rest fixed pseudo-random vectors from a seeded
/// mt19937_64, so that every symmetry sector of the operator is reached.
inline Eigen::MatrixXcd start_block(Eigen::Index dim, Eigen::Index p) {
  Eigen::MatrixXcd x(dim, p);
  x.col(0).setOnes();
  std::mt19937_64 gen(0x9e3779b97f4a7c15ULL);
  const double scale = 1.0 / static_cast<double>(std::mt19937_64::max());
  for (Eigen::Index c = 1; c < p; ++c)
    for (Eigen::Index r = 0; r < dim; ++r) {
      const double re = 2.0 * static_cast<double>(gen()) * scale - 1.0;
      const double im = 2.0 * static_cast<double>(gen()) * scale - 1.0;
      x(r, c) = Complex(re, im);
    }
  return x;
}

/// Orthonormalizes the columns of `w` against the first `used` columns of `q`
/// and against each other, dropping columns that are numerically dependent.
/// The block is first projected against `q` twice (block classical
/// Gram–Schmidt); columns are then orthogonalized within the new block,
/// repeating while a pass removes more than 30% of the norm. Accepted columns
/// are appended to `q`; returns them.
inline Eigen::MatrixXcd extend_basis(Eigen::MatrixXcd& q, Eigen::Index& used, Eigen::MatrixXcd w) {
  const Eigen::VectorXd original = w.colwise().norm().transpose();
  if (used > 0) {
    for (int pass = 0; pass < 2; ++pass) w -= q.leftCols(used) * (q.leftCols(used).adjoint() * w);
  }
  const Eigen::Index start = used;
  std::vector<Eigen::Index> kept;
  for (Eigen::Index c = 0; c < w.cols(); ++c) {
    if (used >= q.cols()) break;
    if (!(original[c] > 0.0)) continue;
    Eigen::VectorXcd v = w.col(c);
    double after = v.norm();
    for (int pass = 0; pass < 4 && used > start; ++pass) {
      const double before = after;
      const auto fresh = q.middleCols(start, used - start);
      v -= fresh * (fresh.adjoint() * v);
      after = v.norm();
      if (after >= 0.7 * before) break;
    }
    if (after < 1e-3 * original[c] && used > 0) {
      v -= q.leftCols(used) * (q.leftCols(used).adjoint() * v);
      after = v.norm();
    }
    if (after <= 1e-13 * original[c]) continue;
    q.col(used++) = v / after;
    kept.push_back(used - 1);
  }
  Eigen::MatrixXcd out(q.rows(), static_cast<Eigen::Index>(kept.size()));
  for (std::size_t i = 0; i < kept.size(); ++i) out.col(static_cast<Eigen::Index>(i)) = q.col(kept[i]);
  return out;
}

inline void fill_boundary_mass(SpectrumResult& r, const Eigen::MatrixXcd& vectors, const GridLayout& layout) {
  if (layout.grid == nullptr) return;
  const std::size_t per = layout.grid->unknowns();
  if (per * layout.blocks != static_cast<std::size_t>(vectors.rows())) {
    throw DimensionError("grid layout does not match operator dimension");
  }
  std::vector<char> outer(per);
  for (std::size_t node = 0; node < per; ++node) outer[node] = layout.grid->layer(node) < 2 ? 1 : 0;
  for (Eigen::Index c = 0; c < vectors.cols(); ++c) {
    double edge = 0.0, total = 0.0;
    for (Eigen::Index i = 0; i < vectors.rows(); ++i) {
      const double m = std::norm(vectors(i, c));
      total += m;
      if (outer[static_cast<std::size_t>(i) % per]) edge += m;
    }
    r.boundary_mass.push_back(total > 0.0 ? edge / total : 0.0);
  }
}

inline void fill_residuals(SpectrumResult& r, const SparseMatrix& op, const Eigen::MatrixXcd& vectors) {
  r.residuals.clear();
  for (Eigen::Index c = 0; c < vectors.cols(); ++c) {
    const Eigen::VectorXcd v = vectors.col(c);
    const Eigen::VectorXcd res = multiply(op, v) - r.eigenvalues[static_cast<std::size_t>(c)] * v;
    r.residuals.push_back(res.norm() / v.norm());
  }
}

struct DenseEigen {
  Eigen::VectorXd values;
  Eigen::MatrixXcd vectors;
};

/// LAPACK zheevr (Householder tridiagonalization + MRRR). `upper` < 0 selects
/// the `count` lowest eigenvalues, otherwise all eigenvalues in (lower, upper].
inline DenseEigen dense_eigensystem(Eigen::MatrixXcd a, lapack_int count, bool vectors,
                                    std::optional<std::pair<double, double>> window = std::nullopt) {
  const lapack_int n = static_cast<lapack_int>(a.rows());
  DenseEigen out;
  if (n == 0) return out;
  Eigen::VectorXd w(n);
  Eigen::MatrixXcd z(vectors ? n : 1, vectors ? std::max<lapack_int>(1, window ? n : count) : 1);
  std::vector<lapack_int> support(2 * static_cast<std::size_t>(n));
  lapack_int found = 0;
  const char range = window ? 'V' : 'I';
  const double vl = window ? window->first : 0.0, vu = window ? window->second : 0.0;
  const lapack_int il = window ? 0 : 1, iu = window ? 0 : count;
  const lapack_int info =
      LAPACKE_zheevr(LAPACK_COL_MAJOR, vectors ? 'V' : 'N', range, 'L', n, a.data(), n, vl, vu, il, iu, 0.0, &found,
                     w.data(), z.data(), static_cast<lapack_int>(z.rows()), support.data());
  if (info != 0) throw NumericalError("dense eigensolver failed (zheevr info " + std::to_string(info) + ")");
  out.values = w.head(found);
  if (vectors) out.vectors = z.leftCols(found);
  return out;
}

}  // namespace detail

/// All eigenvalues of `op` below `upper`, by dense diagonalization. Used as an
/// independent oracle for the counting function.
inline std::vector<double> dense_eigenvalues_below(const SparseHermitianOperator& op, double upper) {
  const double lower = -op.norm1() - 1.0;
  if (!(upper > lower)) return {};
  const auto e = detail::dense_eigensystem(op.dense(), 0, false, std::pair{lower, upper});
  return {e.values.data(), e.values.data() + e.values.size()};
}

/// Number of eigenvalues of `op` strictly below `lambda`, from the inertia of
/// LDLᴴ(Op − λI).
inline std::size_t count_below(const SparseHermitianOperator& op, double lambda) {
  detail::ShiftedFactorization f(op.matrix());
  const double nudge = 1e-13 * (std::abs(lambda) + op.norm1());
  for (int attempt = 0; attempt < 8; ++attempt) {
    if (f.factor(lambda - attempt * nudge)) return f.negative_pivots();
  }
  throw NumericalError("LDL factorization of the shifted operator broke down");
}

namespace detail {

inline SpectrumResult dense_smallest(const SparseHermitianOperator& op, std::size_t k, const SolverOptions& opts,
                                     const GridLayout& layout) {
  const auto e = dense_eigensystem(op.dense(), static_cast<lapack_int>(k), true);
  SpectrumResult r;
  r.method = "dense";
  r.eigenvalues.assign(e.values.data(), e.values.data() + e.values.size());
  fill_residuals(r, op.matrix(), e.vectors);
  fill_boundary_mass(r, e.vectors, layout);
  for (double v : r.eigenvalues) r.near_kernel_count += v < opts.kernel_tol ? 1 : 0;
  return r;
}

/// Restarted block Krylov iteration. Each restart builds
/// span{X, TX, …, T^d X} with T = (Op − σI)⁻¹ (shift-invert, σ below the
/// spectrum by inertia) or T = ‖Op‖₁I − Op, then takes Rayleigh–Ritz pairs of
/// Op itself and restarts from the lowest p Ritz vectors.
inline SpectrumResult krylov_smallest(const SparseHermitianOperator& op, std::size_t k, double tol,
                                      const SolverOptions& opts, const GridLayout& layout) {
  const Eigen::Index dim = op.dim();
  const auto kk = static_cast<Eigen::Index>(k);
  SpectrumResult r;

  std::optional<ShiftedFactorization> factorization;
  double sigma = -1.0;
  if (opts.shift_invert) {
    factorization.emplace(op.matrix());
    const double floor = -op.norm1() - 1.0;
    bool ready = false;
    for (int attempt = 0; attempt < 64 && !ready; ++attempt) {
      if (factorization->factor(sigma) && factorization->negative_pivots() == 0) {
        ready = true;
      } else {
        sigma = std::max(floor, 4.0 * sigma);
        if (sigma == floor && attempt > 0) sigma = floor - attempt;
      }
    }
    if (!ready) factorization.reset();
  }
  const bool inverted = factorization.has_value();
  const double c = op.norm1();
  const double threshold = tol * std::max(1.0, c);
  r.method = inverted ? "block-krylov shift-invert" : "block-krylov";
  r.shift = inverted ? sigma : c;
  const auto apply_t = [&](const Eigen::MatrixXcd& x) -> Eigen::MatrixXcd {
    if (inverted) return factorization->solve(x);
    return c * x - apply_block(op.matrix(), x);
  };

  const Eigen::Index p = std::min<Eigen::Index>(dim, kk + std::max<Eigen::Index>(8, kk / 2));
  const int depth = inverted ? 3 : 8;
  const Eigen::Index capacity = std::min<Eigen::Index>(dim, p * (depth + 1));

  Eigen::MatrixXcd x = start_block(dim, p);
  Eigen::MatrixXcd ritz_vectors, residual_block;
  while (true) {
    Eigen::MatrixXcd q(dim, capacity);
    Eigen::Index used = 0;
    Eigen::MatrixXcd w = extend_basis(q, used, x);
    // After the first pass the block is expanded with T applied to the Ritz
    // residuals; T·(Op − θ)y spans the same space as {y, Ty} but avoids the
    // cancellation that stalls convergence inside a degenerate cluster.
    if (residual_block.size() > 0) w = residual_block;
    for (int d = 0; d < depth && w.cols() > 0 && used < capacity; ++d) {
      w = extend_basis(q, used, apply_t(w));
      ++r.iterations;
    }
    const Eigen::MatrixXcd basis = q.leftCols(used);
    const Eigen::MatrixXcd op_basis = apply_block(op.matrix(), basis);
    Eigen::MatrixXcd h = basis.adjoint() * op_basis;
    h = (0.5 * (h + h.adjoint())).eval();
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> small(h);
    const Eigen::Index keep = std::min(p, used);
    const Eigen::MatrixXcd u = small.eigenvectors().leftCols(keep);
    ritz_vectors = basis * u;
    const Eigen::MatrixXcd op_ritz = op_basis * u;

    bool done = keep >= kk;
    r.eigenvalues.clear();
    r.residuals.clear();
    for (Eigen::Index i = 0; i < std::min(kk, keep); ++i) {
      const double theta = small.eigenvalues()[i];
      r.eigenvalues.push_back(theta);
      const double res = (op_ritz.col(i) - theta * ritz_vectors.col(i)).norm() / ritz_vectors.col(i).norm();
      r.residuals.push_back(res);
      done = done && res <= threshold;
    }
    if (done) break;
    if (r.iterations >= opts.max_iterations || used < kk) {
      r.converged = false;
      break;
    }
    x = ritz_vectors;
    residual_block = op_ritz - ritz_vectors * small.eigenvalues().head(keep).cast<Complex>().asDiagonal();
    // Move σ up towards the wanted eigenvalues so that tight clusters
    // separate, keeping it below the spectrum and not too close: rounding in
    // the solves enters the residuals like ε‖Op‖²/(λ − σ).
    if (inverted && !r.eigenvalues.empty()) {
      const double lowest = r.eigenvalues.front();
      const double spread = r.eigenvalues.back() - lowest;
      double candidate = lowest - std::max(0.5 * spread, 1e-2 * std::max(1.0, std::abs(lowest)));
      for (int attempt = 0; attempt < 8 && candidate > sigma; ++attempt) {
        if (factorization->factor(candidate) && factorization->negative_pivots() == 0) {
          sigma = candidate;
          break;
        }
        candidate = 0.5 * (candidate + sigma);
      }
      if (!(factorization->factor(sigma))) throw NumericalError("refactorization at an accepted shift failed");
      r.shift = sigma;
    }
  }
  const Eigen::MatrixXcd vectors = ritz_vectors.leftCols(static_cast<Eigen::Index>(r.eigenvalues.size()));
  fill_residuals(r, op.matrix(), vectors);
  fill_boundary_mass(r, vectors, layout);
  for (double v : r.eigenvalues) r.near_kernel_count += v < opts.kernel_tol ? 1 : 0;
  return r;
}

}  // namespace detail

/// The k smallest eigenpairs of `op` with residual ≤ tol. Operators of
/// dimension ≤ opts.dense_limit use dense diagonalization; larger ones need
/// k ≤ dim/4 and use the block Krylov iteration. An unconverged run returns
/// its partial results with `converged = false`.
inline SpectrumResult smallest_eigs(const SparseHermitianOperator& op, std::size_t k, double tol,
                                    const SolverOptions& opts = {}, const GridLayout& layout = {}) {
  const auto dim = static_cast<std::size_t>(op.dim());
  if (k < 1) throw ConfigError("smallest_eigs needs k ≥ 1");
  if (!(tol > 0.0)) throw ConfigError("smallest_eigs needs tol > 0");
  if (k > dim) throw ConfigError("k exceeds the operator dimension");
  if (dim <= opts.dense_limit && !opts.force_iterative) return detail::dense_smallest(op, k, opts, layout);
  if (4 * k > dim) throw ConfigError("iterative path needs k ≤ dim/4");
  return detail::krylov_smallest(op, k, tol, opts, layout);
}

struct NearKernelCount {
  std::size_t count = 0;
  bool saturated = false;  // every one of the lowest max_k eigenvalues lies below eps

  std::string label() const { return (saturated ? "≥ " : "") + std::to_string(count); }
};

/// Eigenvalues below eps among the lowest max_k, counted by inertia.
inline NearKernelCount near_kernel_count(const SparseHermitianOperator& op, double eps, std::size_t max_k) {
  if (!(eps > 0.0)) throw ConfigError("near_kernel_count needs eps > 0");
  const std::size_t below = count_below(op, eps);
  return {std::min(below, max_k), below >= max_k};
}

/// Number of index tuples with Σ_j values[j][i_j] < lambda. Each list must be
/// sorted ascending and contain every eigenvalue of its factor that can
/// contribute.
inline std::size_t kronecker_count_below(const std::vector<std::vector<double>>& values, double lambda,
                                         std::size_t factor = 0) {
  if (factor + 1 == values.size()) {
    const auto& v = values[factor];
    return static_cast<std::size_t>(std::lower_bound(v.begin(), v.end(), lambda) - v.begin());
  }
  std::size_t total = 0;
  for (double x : values[factor]) {
    const std::size_t rest = kronecker_count_below(values, lambda - x, factor + 1);
    if (rest == 0) break;
    total += rest;
  }
  return total;
}

/// The k smallest sums Σ_j values[j][i_j] (two factors).
inline std::vector<double> kronecker_smallest(const std::vector<std::vector<double>>& values, std::size_t k) {
  if (values.size() == 1) {
    return {values[0].begin(), values[0].begin() + static_cast<std::ptrdiff_t>(std::min(k, values[0].size()))};
  }
  if (values.size() != 2) throw DimensionError("kronecker_smallest supports two factors");
  std::vector<double> sums;
  for (std::size_t i = 0; i < std::min(k, values[0].size()); ++i)
    for (std::size_t j = 0; j < std::min(k, values[1].size()); ++j) sums.push_back(values[0][i] + values[1][j]);
  std::sort(sums.begin(), sums.end());
  sums.resize(std::min(k, sums.size()));
  return sums;
}

// ---------------------------------------------------------------------------
// Compactness proxy
// ---------------------------------------------------------------------------

inline const std::string kKernelGrows = "kernel grows — resolvent not compact (proxy)";
inline const std::string kClusterGrows = "near-zero cluster grows — not compact (proxy)";
inline const std::string kGapStable = "gap stable, spectrum discrete (proxy)";
inline const std::string kInconclusive = "inconclusive";

/// At least three values, each ≥ 1.2× and strictly above its predecessor.
inline bool grows(const std::vector<std::size_t>& counts) {
  if (counts.size() < 3) return false;
  for (std::size_t i = 0; i + 1 < counts.size(); ++i) {
    const auto a = static_cast<double>(counts[i]), b = static_cast<double>(counts[i + 1]);
    if (!(b > a && b >= 1.2 * a)) return false;
  }
  return true;
}

/// |c_last − c_prev| / max(c_prev, 1) < 5%.
inline bool stabilizes(const std::vector<std::size_t>& counts) {
  if (counts.size() < 2) return false;
  const auto a = static_cast<double>(counts[counts.size() - 2]), b = static_cast<double>(counts.back());
  return std::abs(b - a) / std::max(a, 1.0) < 0.05;
}

struct ProxyOptions {
  double eps = 0.1;      // zero-mode threshold for P−
  double Lambda = 10.0;  // counting threshold for P+
  double tol = 1e-6;
  Scheme scheme = Scheme::peierls;
  SolverOptions solver;
  std::size_t cap = kDefaultGridCap;
};

struct CompactnessProxy {
  std::string weight;
  std::vector<double> L_values;
  double h = 0.0;
  std::size_t k = 0;
  double eps = 0.0;
  double Lambda = 0.0;
  std::string method;  // "direct" or "kronecker"
  std::vector<std::size_t> pminus_zero_counts;
  std::vector<std::size_t> pplus_counts_below;
  std::vector<double> pplus_gap;
  std::vector<double> pplus_eig_growth;  // k-th smallest P+ eigenvalue
  std::vector<bool> converged;
  std::string verdict_pminus;
  std::string verdict_pplus;
};

namespace detail {

struct LevelCounts {
  std::size_t pminus_zero = 0;
  std::size_t pplus_below = 0;
  std::vector<double> pplus_lowest;
  bool converged = true;
};

/// Lowest eigenvalues of a factor: at least `k`, and every one below `bound`.
inline std::vector<double> factor_eigenvalues(const SparseHermitianOperator& op, std::size_t k, double bound,
                                              const ProxyOptions& o, bool& converged) {
  const std::size_t dim = static_cast<std::size_t>(op.dim());
  const std::size_t need = std::min(dim, std::max(k, count_below(op, bound)));
  if (need == 0) return {};
  SolverOptions so = o.solver;
  if (4 * need > dim) so.dense_limit = dim;
  const SpectrumResult r = smallest_eigs(op, need, o.tol, so);
  converged = converged && r.converged;
  return r.eigenvalues;
}

/// Exact for decoupled weights: the discrete P± is the Kronecker sum of the
/// one-variable factors, so its spectrum is {Σ_j λ_j}.
inline LevelCounts kronecker_level(const WeightSpec& w, double L, double h, std::size_t k, const ProxyOptions& o) {
  LevelCounts out;
  const auto& parts = w.decoupled_parts();
  // Identical factors share one operator and one eigenvalue computation.
  std::vector<std::size_t> same(parts.size());
  for (std::size_t j = 0; j < parts.size(); ++j) {
    same[j] = j;
    for (std::size_t i = 0; i < j; ++i)
      if (parts[i].polynomial() == parts[j].polynomial()) {
        same[j] = same[i];
        break;
      }
  }
  std::vector<SparseHermitianOperator> minus(parts.size()), plus(parts.size());
  const Grid g = build_grid(1, L, h, o.cap);
  for (std::size_t j = 0; j < parts.size(); ++j) {
    if (same[j] != j) continue;
    minus[j] = pauli_operator(parts[j], g, Sign::minus, o.scheme);
    plus[j] = pauli_operator(parts[j], g, Sign::plus, o.scheme);
  }
  const auto lists = [&](const std::vector<SparseHermitianOperator>& ops, double lambda) {
    std::vector<double> mins(parts.size());
    for (std::size_t j = 0; j < parts.size(); ++j)
      mins[j] = same[j] != j ? mins[same[j]] : smallest_eigs(ops[j], 1, o.tol, o.solver).eigenvalues.at(0);
    std::vector<std::vector<double>> v(parts.size());
    std::vector<double> bound(parts.size());
    for (std::size_t j = 0; j < parts.size(); ++j) {
      double others = 0.0;
      for (std::size_t i = 0; i < parts.size(); ++i)
        if (i != j) others += mins[i];
      bound[j] = lambda - others;
      const std::size_t src = same[j];
      if (src != j && bound[src] == bound[j]) {
        v[j] = v[src];
      } else {
        v[j] = factor_eigenvalues(ops[src], k, bound[j], o, out.converged);
      }
    }
    return v;
  };
  out.pminus_zero = kronecker_count_below(lists(minus, o.eps), o.eps);
  const auto plus_lists = lists(plus, o.Lambda);
  out.pplus_below = kronecker_count_below(plus_lists, o.Lambda);
  out.pplus_lowest = kronecker_smallest(plus_lists, k);
  return out;
}

inline LevelCounts direct_level(const WeightSpec& w, double L, double h, std::size_t k, const ProxyOptions& o) {
  LevelCounts out;
  const Grid g = build_grid(w.dimension(), L, h, o.cap);
  const SparseHermitianOperator minus = pauli_operator(w, g, Sign::minus, o.scheme);
  const SparseHermitianOperator plus = pauli_operator(w, g, Sign::plus, o.scheme);
  out.pminus_zero = count_below(minus, o.eps);
  out.pplus_below = count_below(plus, o.Lambda);
  const SpectrumResult r = smallest_eigs(plus, k, o.tol, o.solver);
  out.converged = r.converged;
  out.pplus_lowest = r.eigenvalues;
  return out;
}

}  // namespace detail

/// Sweeps the box half-width L and records P− zero-mode counts (eigenvalues
/// below eps), the P+ gap, the k-th P+ eigenvalue and P+ counts below Λ.
/// Decision rule: a count series "grows" when it rises by ≥ 20% at every step
/// over ≥ 3 values of L; the P+ spectrum is "stable" when the count below Λ
/// changes by < 5% on the last step.
inline CompactnessProxy compactness_proxy(const WeightSpec& w, const std::vector<double>& L_values, double h,
                                          std::size_t k, const ProxyOptions& o = {}) {
  if (L_values.size() < 3) throw ConfigError("compactness_proxy needs at least three values of L");
  for (std::size_t i = 0; i + 1 < L_values.size(); ++i)
    if (!(L_values[i + 1] > L_values[i])) throw ConfigError("L values must be increasing");
  CompactnessProxy c;
  c.weight = w.label();
  c.L_values = L_values;
  c.h = h;
  c.k = k;
  c.eps = o.eps;
  c.Lambda = o.Lambda;
  const bool kron = w.dimension() > 1 && w.is_decoupled();
  c.method = kron ? "kronecker" : "direct";
  for (double L : L_values) {
    const detail::LevelCounts lv = kron ? detail::kronecker_level(w, L, h, k, o) : detail::direct_level(w, L, h, k, o);
    c.pminus_zero_counts.push_back(lv.pminus_zero);
    c.pplus_counts_below.push_back(lv.pplus_below);
    c.pplus_gap.push_back(lv.pplus_lowest.empty() ? std::numeric_limits<double>::quiet_NaN() : lv.pplus_lowest.front());
    c.pplus_eig_growth.push_back(lv.pplus_lowest.size() >= k ? lv.pplus_lowest[k - 1]
                                                             : std::numeric_limits<double>::quiet_NaN());
    c.converged.push_back(lv.converged);
  }
  c.verdict_pminus = grows(c.pminus_zero_counts) ? kKernelGrows : kInconclusive;
  if (grows(c.pplus_counts_below)) {
    c.verdict_pplus = kClusterGrows;
  } else if (stabilizes(c.pplus_counts_below)) {
    c.verdict_pplus = kGapStable;
  } else {
    c.verdict_pplus = kInconclusive;
  }
  return c;
}

/// CSV with header index,eigenvalue,residual,boundary_mass.
inline void write_spectrum_csv(std::ostream& out, const SpectrumResult& r) {
  out << "index,eigenvalue,residual,boundary_mass\r\n";
  char line[160];
  for (std::size_t i = 0; i < r.eigenvalues.size(); ++i) {
    const double bm = i < r.boundary_mass.size() ? r.boundary_mass[i] : std::numeric_limits<double>::quiet_NaN();
    std::snprintf(line, sizeof line, "%zu,%.17g,%.17g,%.17g\r\n", i, r.eigenvalues[i], r.residuals[i], bm);
    out << line;
  }
}

}  // namespace pauli
