#pragma once

// Seeded fixture generators. All randomness goes through std::mt19937_64 and
// explicit bit manipulation, so outputs are identical across standard
// library implementations.

#include <cstdint>
#include <random>
#include <span>
#include <vector>

#include "kronfact/errors.hpp"
#include "kronfact/nkp.hpp"
#include "kronfact/pattern.hpp"

namespace kronfact {

using Rng = std::mt19937_64;

inline constexpr std::uint64_t kDefaultSeed = 42;

/// Uniform double in [0, 1).
inline double uniform01(Rng& rng) { return static_cast<double>(rng() >> 11) * 0x1.0p-53; }

/// Each entry present independently with probability `density`.
inline BinaryPattern random_pattern(index_t n, double density, Rng& rng) {
  check_size(n);
  if (!(density >= 0.0 && density <= 1.0)) throw DomainError("density must lie in [0, 1]");
  std::vector<index_t> offsets;
  for (index_t k = 0; k < n * n; ++k) {
    if (uniform01(rng) < density) offsets.push_back(k);
  }
  return BinaryPattern::from_sorted_offsets(n, std::move(offsets));
}

/// Like random_pattern, redrawn until it has at least one entry.
inline BinaryPattern random_nonzero_pattern(index_t n, double density, Rng& rng) {
  if (!(density > 0.0)) throw DomainError("density must be positive for a nonzero pattern");
  for (;;) {
    BinaryPattern p = random_pattern(n, density, rng);
    if (!p.empty()) return p;
  }
}

/// Entries with -lower <= col - row <= upper.
inline BinaryPattern banded_pattern(index_t n, index_t lower, index_t upper) {
  check_size(n);
  if (lower < 0 || upper < 0) throw DomainError("bandwidths must be nonnegative");
  std::vector<index_t> offsets;
  for (index_t j = 0; j < n; ++j) {
    for (index_t i = std::max<index_t>(0, j - upper); i <= std::min(n - 1, j + lower); ++i) {
      offsets.push_back(j * n + i);
    }
  }
  return BinaryPattern::from_sorted_offsets(n, std::move(offsets));
}

namespace detail {

/// Tridiagonal matrix with entries base * (1 + jitter * u), u uniform in [-1, 1).
inline DenseRealMatrix jittered_tridiagonal(index_t n, double diag, double off_lower,
                                            double off_upper, double jitter, Rng& rng) {
  DenseRealMatrix m(n, n);
  auto draw = [&](double base) { return base * (1.0 + jitter * (2.0 * uniform01(rng) - 1.0)); };
  for (index_t j = 0; j < n; ++j) {
    for (index_t i = std::max<index_t>(0, j - 1); i <= std::min(n - 1, j + 1); ++i) {
      m(i, j) = i == j ? draw(diag) : (i > j ? draw(off_lower) : draw(off_upper));
    }
  }
  return m;
}

}  // namespace detail

/// Synthetic space-time style operator W (x) M + M' (x) K.
///
/// sizes = (nt, s1, ..., sd). W and M' are banded "temporal" matrices of size
/// nt; M = M1 (x) ... (x) Md is a product of banded "mass" matrices and
/// K = sum_k M1 (x) ... Kk ... (x) Md sums banded "stiffness" terms. Every
/// factor is tridiagonal with seeded jitter, so the sparsity pattern is the
/// product of tridiagonal patterns while the matrix itself is not an exact
/// Kronecker product.
inline DenseRealMatrix two_term_operator(std::span<const index_t> sizes, Rng& rng) {
  if (sizes.size() < 2) throw DomainError("two_term_operator needs a temporal and a spatial size");
  for (index_t s : sizes) {
    if (s < 2) throw DomainError("two_term_operator sizes must be at least 2");
  }
  const index_t nt = sizes.front();
  const DenseRealMatrix w = detail::jittered_tridiagonal(nt, 0.5, -0.5, 0.5, 0.2, rng);
  const DenseRealMatrix mt = detail::jittered_tridiagonal(nt, 4.0, 1.0, 1.0, 0.2, rng);

  const std::size_t d = sizes.size() - 1;
  std::vector<DenseRealMatrix> mass;
  std::vector<DenseRealMatrix> stiff;
  for (std::size_t k = 0; k < d; ++k) {
    mass.push_back(detail::jittered_tridiagonal(sizes[k + 1], 4.0, 1.0, 1.0, 0.2, rng));
    stiff.push_back(detail::jittered_tridiagonal(sizes[k + 1], 2.0, -1.0, -1.0, 0.2, rng));
  }
  const DenseRealMatrix ms = kron(mass);
  DenseRealMatrix ks(ms.rows(), ms.cols());
  for (std::size_t k = 0; k < d; ++k) {
    std::vector<DenseRealMatrix> term = mass;
    term[k] = stiff[k];
    const DenseRealMatrix t = kron(term);
    for (std::size_t q = 0; q < t.values().size(); ++q) ks.values()[q] += t.values()[q];
  }
  DenseRealMatrix b = kron(w, ms);
  const DenseRealMatrix second = kron(mt, ks);
  for (std::size_t q = 0; q < b.values().size(); ++q) b.values()[q] += second.values()[q];
  return b;
}

/// Dense matrix with standard-normal-like entries (sum of uniforms).
inline DenseRealMatrix random_dense(index_t rows, index_t cols, Rng& rng) {
  DenseRealMatrix m(rows, cols);
  for (double& x : m.values()) {
    double acc = 0.0;
    for (int k = 0; k < 12; ++k) acc += uniform01(rng);
    x = acc - 6.0;
  }
  return m;
}

}  // namespace kronfact
