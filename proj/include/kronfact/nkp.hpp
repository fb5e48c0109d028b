#pragma once

// Nearest Kronecker product approximation of real matrices.
//
// For fixed sizes (n1, n2), min ||B - X (x) Y||_F is a rank-1 approximation
// problem for the rearranged n1^2 x n2^2 matrix R(B), whose rows are indexed by
// the linear index of the block and whose columns are indexed by the linear
// index inside the block. The dominant singular triplet (s, u, v) of R(B)
// gives X = reshape(sqrt(s) u) and Y = reshape(sqrt(s) v).

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "kronfact/errors.hpp"
#include "kronfact/pattern.hpp"

namespace kronfact {

/// Column-major dense matrix with 0-based element access.
class DenseRealMatrix {
 public:
  DenseRealMatrix() = default;

  DenseRealMatrix(index_t rows, index_t cols)
      : rows_(rows), cols_(cols), values_(checked_count(rows, cols), 0.0) {}

  DenseRealMatrix(index_t rows, index_t cols, std::vector<double> values)
      : rows_(rows), cols_(cols), values_(std::move(values)) {
    if (values_.size() != checked_count(rows, cols)) {
      throw DomainError("value count does not match " + std::to_string(rows) + "x" +
                        std::to_string(cols));
    }
    for (double x : values_) {
      if (!std::isfinite(x)) throw DomainError("matrix entries must be finite");
    }
  }

  static DenseRealMatrix identity(index_t n) {
    DenseRealMatrix m(n, n);
    for (index_t k = 0; k < n; ++k) m(k, k) = 1.0;
    return m;
  }

  index_t rows() const noexcept { return rows_; }
  index_t cols() const noexcept { return cols_; }
  bool square() const noexcept { return rows_ == cols_; }

  double& operator()(index_t i, index_t j) {
    return values_[static_cast<std::size_t>(j * rows_ + i)];
  }
  double operator()(index_t i, index_t j) const {
    return values_[static_cast<std::size_t>(j * rows_ + i)];
  }

  std::span<double> values() noexcept { return values_; }
  std::span<const double> values() const noexcept { return values_; }

  double frobenius_norm() const {
    double scale = 0.0;
    for (double x : values_) scale = std::max(scale, std::abs(x));
    if (scale == 0.0) return 0.0;
    double acc = 0.0;
    for (double x : values_) acc += (x / scale) * (x / scale);
    return scale * std::sqrt(acc);
  }

  friend bool operator==(const DenseRealMatrix&, const DenseRealMatrix&) = default;

 private:
  static std::size_t checked_count(index_t rows, index_t cols) {
    if (rows < 1 || cols < 1) throw DomainError("matrix dimensions must be positive");
    return static_cast<std::size_t>(rows) * static_cast<std::size_t>(cols);
  }

  index_t rows_ = 0;
  index_t cols_ = 0;
  std::vector<double> values_;
};

/// Positions of the nonzero entries.
inline BinaryPattern sparsity(const DenseRealMatrix& b) {
  if (!b.square()) throw DomainError("sparsity: matrix is not square");
  std::vector<index_t> offsets;
  const auto vals = b.values();
  for (std::size_t k = 0; k < vals.size(); ++k) {
    if (vals[k] != 0.0) offsets.push_back(static_cast<index_t>(k));
  }
  return BinaryPattern::from_sorted_offsets(b.rows(), std::move(offsets));
}

inline DenseRealMatrix kron(const DenseRealMatrix& a, const DenseRealMatrix& b) {
  DenseRealMatrix out(a.rows() * b.rows(), a.cols() * b.cols());
  for (index_t ja = 0; ja < a.cols(); ++ja) {
    for (index_t ia = 0; ia < a.rows(); ++ia) {
      const double s = a(ia, ja);
      if (s == 0.0) continue;
      for (index_t jb = 0; jb < b.cols(); ++jb) {
        for (index_t ib = 0; ib < b.rows(); ++ib) {
          out(ia * b.rows() + ib, ja * b.cols() + jb) = s * b(ib, jb);
        }
      }
    }
  }
  return out;
}

inline DenseRealMatrix kron(std::span<const DenseRealMatrix> factors) {
  if (factors.empty()) throw DomainError("kron needs at least one factor");
  DenseRealMatrix out = factors.front();
  for (std::size_t k = 1; k < factors.size(); ++k) out = kron(out, factors[k]);
  return out;
}

/// n1^2 x n2^2 rearrangement; entry (l1, l2) holds B((i1-1)n2+i2, (j1-1)n2+j2)
/// where l1 = l_n1(i1, j1) and l2 = l_n2(i2, j2).
inline DenseRealMatrix rearrange(const DenseRealMatrix& b, index_t n1, index_t n2) {
  if (!b.square() || n1 < 1 || n2 < 1 || b.rows() != n1 * n2) {
    throw DomainError("rearrange: matrix of size " + std::to_string(b.rows()) + "x" +
                      std::to_string(b.cols()) + " is not (" + std::to_string(n1) + "*" +
                      std::to_string(n2) + ") square");
  }
  DenseRealMatrix r(n1 * n1, n2 * n2);
  for (index_t j = 0; j < b.cols(); ++j) {
    const index_t j1 = j / n2;
    const index_t j2 = j % n2;
    for (index_t i = 0; i < b.rows(); ++i) {
      const index_t i1 = i / n2;
      const index_t i2 = i % n2;
      r(j1 * n1 + i1, j2 * n2 + i2) = b(i, j);
    }
  }
  return r;
}

struct SingularTriplet {
  double sigma = 0.0;
  std::vector<double> u;
  std::vector<double> v;
  int iterations = 0;
  /// ||M^T u - sigma v|| at exit.
  double residual = 0.0;
};

struct PowerOptions {
  double tol = 1e-10;
  int maxit = 5000;
};

class NonConvergenceError : public std::runtime_error {
 public:
  NonConvergenceError(const std::string& what, SingularTriplet last)
      : std::runtime_error(what), last_(std::move(last)) {}
  const SingularTriplet& last_iterate() const noexcept { return last_; }

 private:
  SingularTriplet last_;
};

namespace detail {

inline double norm2(std::span<const double> x) {
  double scale = 0.0;
  for (double t : x) scale = std::max(scale, std::abs(t));
  if (scale == 0.0) return 0.0;
  double acc = 0.0;
  for (double t : x) acc += (t / scale) * (t / scale);
  return scale * std::sqrt(acc);
}

/// Reproducible start vector in [-1, 1)^n from a splitmix64 stream.
inline std::vector<double> seeded_vector(std::size_t n, std::uint64_t seed) {
  std::vector<double> out(n);
  std::uint64_t state = seed;
  for (double& x : out) {
    state += 0x9E3779B97F4A7C15ULL;
    std::uint64_t z = state;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    z ^= z >> 31;
    x = 2.0 * static_cast<double>(z >> 11) * 0x1.0p-53 - 1.0;
  }
  return out;
}

inline void multiply(const DenseRealMatrix& m, std::span<const double> x, std::span<double> y) {
  std::fill(y.begin(), y.end(), 0.0);
  for (index_t j = 0; j < m.cols(); ++j) {
    const double xj = x[static_cast<std::size_t>(j)];
    if (xj == 0.0) continue;
    for (index_t i = 0; i < m.rows(); ++i) y[static_cast<std::size_t>(i)] += m(i, j) * xj;
  }
}

inline void multiply_transposed(const DenseRealMatrix& m, std::span<const double> x,
                                std::span<double> y) {
  for (index_t j = 0; j < m.cols(); ++j) {
    double acc = 0.0;
    for (index_t i = 0; i < m.rows(); ++i) acc += m(i, j) * x[static_cast<std::size_t>(i)];
    y[static_cast<std::size_t>(j)] = acc;
  }
}

inline void scale(std::span<double> x, double s) {
  for (double& t : x) t *= s;
}

}  // namespace detail

inline constexpr std::uint64_t kPowerSeed = 0x5EED;

/// Power iteration on M^T M. Converged when ||M^T u - sigma v|| <= tol * sigma.
/// The sign is fixed so that the largest-magnitude entry of u is positive.
inline SingularTriplet dominant_singular_triplet(const DenseRealMatrix& m,
                                                 const PowerOptions& opts = {}) {
  const double norm = m.frobenius_norm();
  if (norm == 0.0) throw DomainError("dominant_singular_triplet: matrix is zero");
  const auto rows = static_cast<std::size_t>(m.rows());
  const auto cols = static_cast<std::size_t>(m.cols());

  SingularTriplet t;
  t.u.assign(rows, 0.0);
  std::vector<double> z(cols);
  std::uint64_t seed = kPowerSeed;
  t.v = detail::seeded_vector(cols, seed);
  detail::scale(t.v, 1.0 / detail::norm2(t.v));

  for (t.iterations = 1; t.iterations <= opts.maxit; ++t.iterations) {
    detail::multiply(m, t.v, t.u);
    t.sigma = detail::norm2(t.u);
    if (t.sigma <= 1e-300 || t.sigma < 1e-14 * norm) {
      // Start vector (nearly) in the null space: draw another one.
      t.v = detail::seeded_vector(cols, ++seed);
      detail::scale(t.v, 1.0 / detail::norm2(t.v));
      continue;
    }
    detail::scale(t.u, 1.0 / t.sigma);
    detail::multiply_transposed(m, t.u, z);
    double res = 0.0;
    for (std::size_t k = 0; k < cols; ++k) {
      const double d = z[k] - t.sigma * t.v[k];
      res += d * d;
    }
    t.residual = std::sqrt(res);
    if (t.residual <= opts.tol * t.sigma) break;
    const double zn = detail::norm2(z);
    for (std::size_t k = 0; k < cols; ++k) t.v[k] = z[k] / zn;
  }
  if (t.iterations > opts.maxit) {
    t.iterations = opts.maxit;
    throw NonConvergenceError("power iteration did not converge in " +
                                  std::to_string(opts.maxit) + " iterations (residual " +
                                  std::to_string(t.residual) + ")",
                              t);
  }

  const auto peak = std::max_element(t.u.begin(), t.u.end(),
                                     [](double a, double b) { return std::abs(a) < std::abs(b); });
  if (*peak < 0.0) {
    detail::scale(t.u, -1.0);
    detail::scale(t.v, -1.0);
  }
  return t;
}

/// ||B - F1 (x) ... (x) Fk||_F, streamed without forming the product.
inline double frobenius_error(const DenseRealMatrix& b, std::span<const DenseRealMatrix> factors) {
  if (factors.empty()) throw DomainError("frobenius_error needs at least one factor");
  index_t n = 1;
  for (const auto& f : factors) {
    if (!f.square()) throw DomainError("frobenius_error: factors must be square");
    n *= f.rows();
  }
  if (!b.square() || b.rows() != n) {
    throw DomainError("frobenius_error: factor sizes do not multiply to the matrix size");
  }
  // digits[i * d + k]: index of i inside factor k (most significant first).
  const std::size_t d = factors.size();
  std::vector<index_t> digits(static_cast<std::size_t>(n) * d);
  for (index_t i = 0; i < n; ++i) {
    index_t rest = i;
    for (std::size_t k = d; k-- > 0;) {
      digits[static_cast<std::size_t>(i) * d + k] = rest % factors[k].rows();
      rest /= factors[k].rows();
    }
  }
  double acc = 0.0;
  for (index_t j = 0; j < n; ++j) {
    const index_t* dj = &digits[static_cast<std::size_t>(j) * d];
    for (index_t i = 0; i < n; ++i) {
      const index_t* di = &digits[static_cast<std::size_t>(i) * d];
      double p = 1.0;
      for (std::size_t k = 0; k < d && p != 0.0; ++k) p *= factors[k](di[k], dj[k]);
      const double diff = b(i, j) - p;
      acc += diff * diff;
    }
  }
  return std::sqrt(acc);
}

struct NkpResult {
  std::vector<DenseRealMatrix> factors;
  std::vector<index_t> sizes;
  double frobenius_error = 0.0;
  /// Leading singular value of the first rearrangement.
  double sigma = 0.0;
};

/// Best single Kronecker product X (x) Y with X of size n1 and Y of size n2.
/// Both factors carry Frobenius norm sqrt(sigma).
inline NkpResult nkp2(const DenseRealMatrix& b, index_t n1, index_t n2,
                      const PowerOptions& opts = {}) {
  const DenseRealMatrix r = rearrange(b, n1, n2);
  if (b.frobenius_norm() == 0.0) throw DomainError("nkp: matrix is zero");
  const SingularTriplet t = dominant_singular_triplet(r, opts);
  const double root = std::sqrt(t.sigma);
  std::vector<double> left(t.u);
  std::vector<double> right(t.v);
  detail::scale(left, root);
  detail::scale(right, root);

  NkpResult out;
  out.sizes = {n1, n2};
  out.sigma = t.sigma;
  out.factors.emplace_back(n1, n1, std::move(left));
  out.factors.emplace_back(n2, n2, std::move(right));
  out.frobenius_error = frobenius_error(b, out.factors);
  return out;
}

/// Greedy left-to-right approximation: split off the first size with nkp2,
/// then approximate the remaining right factor the same way. Factors are
/// rescaled to share one Frobenius norm; the error is recomputed against B.
inline NkpResult nkp_multi(const DenseRealMatrix& b, std::span<const index_t> sizes,
                           const PowerOptions& opts = {}) {
  if (sizes.size() < 2) throw DomainError("nkp_multi needs at least two sizes");
  index_t n = 1;
  for (index_t s : sizes) {
    if (s < 1) throw DomainError("nkp_multi: sizes must be positive");
    n *= s;
  }
  if (!b.square() || b.rows() != n) {
    throw DomainError("nkp_multi: sizes multiply to " + std::to_string(n) +
                      ", matrix has size " + std::to_string(b.rows()));
  }

  NkpResult out;
  out.sizes.assign(sizes.begin(), sizes.end());
  DenseRealMatrix rest = b;
  index_t rest_size = n;
  for (std::size_t k = 0; k + 1 < sizes.size(); ++k) {
    rest_size /= sizes[k];
    NkpResult step = nkp2(rest, sizes[k], rest_size, opts);
    if (k == 0) out.sigma = step.sigma;
    out.factors.push_back(std::move(step.factors[0]));
    rest = std::move(step.factors[1]);
  }
  out.factors.push_back(std::move(rest));

  double log_total = 0.0;
  for (const auto& f : out.factors) log_total += std::log(f.frobenius_norm());
  const double target = std::exp(log_total / static_cast<double>(out.factors.size()));
  for (auto& f : out.factors) detail::scale(f.values(), target / f.frobenius_norm());

  out.frobenius_error = frobenius_error(b, out.factors);
  return out;
}

}  // namespace kronfact
