#pragma once

// Sparsity patterns of square binary matrices.
//
// All indices crossing the public interface are 1-based and column-major:
// the linear index of (i, j) in a size-n matrix is (j - 1) * n + i. Internally
// a pattern stores the 0-based offsets (j - 1) * n + (i - 1), strictly
// increasing, so iteration order is column-major.

#include <algorithm>
#include <compare>
#include <cstdint>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "kronfact/errors.hpp"

namespace kronfact {

using index_t = std::int64_t;

/// Largest supported matrix size; n * n stays well inside 64 bits.
inline constexpr index_t kMaxSize = 2147483647;

struct Coordinate {
  index_t row = 1;
  index_t col = 1;

  friend auto operator<=>(const Coordinate&, const Coordinate&) = default;
};

inline void check_size(index_t n, const char* what = "size") {
  if (n < 1 || n > kMaxSize) {
    throw DomainError(std::string(what) + " out of range: " + std::to_string(n));
  }
}

/// (j - 1) * n + i for 1 <= i, j <= n.
inline index_t linear_index(index_t i, index_t j, index_t n) {
  check_size(n);
  if (i < 1 || i > n || j < 1 || j > n) {
    throw DomainError("index (" + std::to_string(i) + "," + std::to_string(j) +
                      ") outside a matrix of size " + std::to_string(n));
  }
  return (j - 1) * n + i;
}

inline Coordinate inverse_linear_index(index_t l, index_t n) {
  check_size(n);
  if (l < 1 || l > n * n) {
    throw DomainError("linear index " + std::to_string(l) + " outside 1.." +
                      std::to_string(n * n));
  }
  const index_t q = l - 1;
  return {q % n + 1, q / n + 1};
}

/// Block coordinate and in-block coordinate of a 1-based index for blocks of
/// size `inner_size`: i - 1 = (outer - 1) * inner_size + (inner - 1).
struct SplitIndex {
  index_t outer;
  index_t inner;

  friend bool operator==(const SplitIndex&, const SplitIndex&) = default;
};

inline SplitIndex split_coordinate(index_t i, index_t inner_size) {
  if (i < 1 || inner_size < 1) {
    throw DomainError("split_coordinate requires i >= 1 and a positive block size");
  }
  return {(i - 1) / inner_size + 1, (i - 1) % inner_size + 1};
}

class BinaryPattern {
 public:
  /// Empty 1x1 pattern.
  BinaryPattern() = default;

  /// Empty pattern of size n.
  explicit BinaryPattern(index_t n) : n_(n) { check_size(n); }

  /// Sorts and removes duplicates. Throws DomainError on out-of-range entries.
  static BinaryPattern from_coordinates(index_t n, std::span<const Coordinate> entries) {
    check_size(n);
    std::vector<index_t> offsets;
    offsets.reserve(entries.size());
    for (const auto& c : entries) offsets.push_back(linear_index(c.row, c.col, n) - 1);
    return from_offsets(n, std::move(offsets));
  }

  static BinaryPattern from_coordinates(index_t n, std::initializer_list<Coordinate> entries) {
    return from_coordinates(n, std::span<const Coordinate>(entries.begin(), entries.size()));
  }

  /// From 0-based column-major offsets in any order; duplicates removed.
  static BinaryPattern from_offsets(index_t n, std::vector<index_t> offsets) {
    check_size(n);
    std::sort(offsets.begin(), offsets.end());
    offsets.erase(std::unique(offsets.begin(), offsets.end()), offsets.end());
    if (!offsets.empty() && (offsets.front() < 0 || offsets.back() >= n * n)) {
      throw DomainError("pattern offset outside a matrix of size " + std::to_string(n));
    }
    return BinaryPattern(n, std::move(offsets), Trusted{});
  }

  /// Offsets must already be strictly increasing and in range.
  static BinaryPattern from_sorted_offsets(index_t n, std::vector<index_t> offsets) {
    return BinaryPattern(n, std::move(offsets), Trusted{});
  }

  index_t size() const noexcept { return n_; }
  index_t nnz() const noexcept { return static_cast<index_t>(offsets_.size()); }
  bool empty() const noexcept { return offsets_.empty(); }

  /// 0-based column-major offsets, strictly increasing.
  std::span<const index_t> offsets() const noexcept { return offsets_; }

  /// k-th entry in column-major order (k is 0-based), 1-based coordinates.
  Coordinate coordinate(index_t k) const {
    const index_t off = offsets_.at(static_cast<std::size_t>(k));
    return {off % n_ + 1, off / n_ + 1};
  }

  std::vector<Coordinate> coordinates() const {
    std::vector<Coordinate> out;
    out.reserve(offsets_.size());
    for (index_t off : offsets_) out.push_back({off % n_ + 1, off / n_ + 1});
    return out;
  }

  bool contains(Coordinate c) const {
    if (c.row < 1 || c.row > n_ || c.col < 1 || c.col > n_) return false;
    return std::binary_search(offsets_.begin(), offsets_.end(), (c.col - 1) * n_ + c.row - 1);
  }

  friend bool operator==(const BinaryPattern&, const BinaryPattern&) = default;

 private:
  struct Trusted {};
  BinaryPattern(index_t n, std::vector<index_t> offsets, Trusted)
      : n_(n), offsets_(std::move(offsets)) {}

  index_t n_ = 1;
  std::vector<index_t> offsets_;
};

inline index_t nnz(const BinaryPattern& a) { return a.nnz(); }

inline bool pattern_equals(const BinaryPattern& a, const BinaryPattern& b) { return a == b; }

inline BinaryPattern identity_pattern(index_t n) {
  check_size(n);
  std::vector<index_t> offsets(static_cast<std::size_t>(n));
  for (index_t k = 0; k < n; ++k) offsets[static_cast<std::size_t>(k)] = k * n + k;
  return BinaryPattern::from_sorted_offsets(n, std::move(offsets));
}

inline BinaryPattern ones_pattern(index_t n) {
  check_size(n);
  std::vector<index_t> offsets(static_cast<std::size_t>(n * n));
  for (index_t k = 0; k < n * n; ++k) offsets[static_cast<std::size_t>(k)] = k;
  return BinaryPattern::from_sorted_offsets(n, std::move(offsets));
}

/// E_ij: a single entry at (i, j).
inline BinaryPattern basis_pattern(index_t n, index_t i, index_t j) {
  return BinaryPattern::from_sorted_offsets(n, {linear_index(i, j, n) - 1});
}

namespace detail {

/// Nonempty columns of a pattern with the 0-based rows of each.
struct ColumnRuns {
  std::vector<index_t> cols;   // 0-based column ids, ascending
  std::vector<index_t> start;  // rows[start[k] .. start[k+1]) belong to cols[k]
  std::vector<index_t> rows;   // 0-based rows

  explicit ColumnRuns(const BinaryPattern& a) {
    const index_t n = a.size();
    rows.reserve(static_cast<std::size_t>(a.nnz()));
    index_t col_end = 0;
    for (index_t off : a.offsets()) {
      if (off >= col_end) {
        const index_t c = off / n;
        cols.push_back(c);
        start.push_back(static_cast<index_t>(rows.size()));
        col_end = (c + 1) * n;
      }
      rows.push_back(off - (col_end - n));
    }
    start.push_back(static_cast<index_t>(rows.size()));
  }

  std::size_t num_cols() const noexcept { return cols.size(); }
};

}  // namespace detail

/// Boolean Kronecker product. Output is produced directly in sorted order.
inline BinaryPattern kron_pattern(const BinaryPattern& a, const BinaryPattern& b) {
  const index_t na = a.size();
  const index_t nb = b.size();
  if (na > kMaxSize / nb) throw DomainError("Kronecker product size exceeds the supported maximum");
  const index_t n = na * nb;

  const detail::ColumnRuns ca(a);
  const detail::ColumnRuns cb(b);
  std::vector<index_t> offsets;
  offsets.reserve(static_cast<std::size_t>(a.nnz() * b.nnz()));
  for (std::size_t ka = 0; ka < ca.num_cols(); ++ka) {
    for (std::size_t kb = 0; kb < cb.num_cols(); ++kb) {
      const index_t col_base = (ca.cols[ka] * nb + cb.cols[kb]) * n;
      for (index_t p = ca.start[ka]; p < ca.start[ka + 1]; ++p) {
        const index_t row_base = col_base + ca.rows[static_cast<std::size_t>(p)] * nb;
        for (index_t q = cb.start[kb]; q < cb.start[kb + 1]; ++q) {
          offsets.push_back(row_base + cb.rows[static_cast<std::size_t>(q)]);
        }
      }
    }
  }
  return BinaryPattern::from_sorted_offsets(n, std::move(offsets));
}

/// Left-to-right product of one or more factors.
inline BinaryPattern kron_pattern(std::span<const BinaryPattern> factors) {
  if (factors.empty()) throw DomainError("kron_pattern needs at least one factor");
  BinaryPattern out = factors.front();
  for (std::size_t k = 1; k < factors.size(); ++k) out = kron_pattern(out, factors[k]);
  return out;
}

/// Dense 0/1 rendering, one row per line. Meant for small patterns.
inline std::string to_string(const BinaryPattern& a) {
  const index_t n = a.size();
  std::string grid(static_cast<std::size_t>(n * (n + 1)), '0');
  for (index_t r = 0; r < n; ++r) grid[static_cast<std::size_t>(r * (n + 1) + n)] = '\n';
  for (index_t off : a.offsets()) {
    grid[static_cast<std::size_t>((off % n) * (n + 1) + off / n)] = '1';
  }
  return grid;
}

}  // namespace kronfact
