#pragma once

// Length-2 Kronecker factorizations of binary patterns.
//
// For a compatible pair (n1, n2) every entry (i, j) of A splits into a block
// coordinate (i1, j1) and an in-block coordinate (i2, j2). A = A1 (x) A2 holds
// exactly when the set of linear-index pairs (l1, l2) is a Cartesian product
// S1 x S2; S1 and S2 are then the patterns of A1 and A2.

#include <algorithm>
#include <cstdint>
#include <optional>
#include <span>
#include <thread>
#include <unordered_map>
#include <utility>
#include <vector>

#include "kronfact/errors.hpp"
#include "kronfact/number_theory.hpp"
#include "kronfact/pattern.hpp"

namespace kronfact {

/// Pattern positions mapped into the rearranged n1^2 x n2^2 matrix.
struct RearrangedSupport {
  index_t n1 = 1;
  index_t n2 = 1;
  /// (l1, l2) pairs, 1-based, sorted lexicographically.
  std::vector<std::pair<index_t, index_t>> pairs;
};

struct Length2Factorization {
  SizePair sizes;
  BinaryPattern left;
  BinaryPattern right;

  friend bool operator==(const Length2Factorization&, const Length2Factorization&) = default;
};

struct EngineOptions {
  /// Worker threads for the sweep over compatible pairs; 0 picks the
  /// hardware concurrency. Results are ordered the same way regardless.
  unsigned threads = 1;
};

namespace detail {

inline void check_split(const BinaryPattern& a, index_t n1, index_t n2) {
  if (n1 < 1 || n2 < 1 || n1 > a.size() / n2 || n1 * n2 != a.size()) {
    throw DomainError("sizes (" + std::to_string(n1) + "," + std::to_string(n2) +
                      ") do not split a pattern of size " + std::to_string(a.size()));
  }
}

/// Per-block cursor storage: dense when the block row count is modest
/// relative to the input, hashed otherwise.
class BlockCursors {
 public:
  BlockCursors(index_t blocks, index_t nnz)
      : dense_(blocks <= 4 * nnz + 4096) {
    if (dense_) slots_.assign(static_cast<std::size_t>(blocks), -1);
  }

  /// Returns a reference to the cursor of `block`, creating it at -1.
  index_t& operator[](index_t block) {
    if (dense_) return slots_[static_cast<std::size_t>(block)];
    return sparse_.try_emplace(block, -1).first->second;
  }

  void reset(index_t block) {
    if (dense_) {
      slots_[static_cast<std::size_t>(block)] = -1;
    } else {
      sparse_.erase(block);
    }
  }

 private:
  bool dense_;
  std::vector<index_t> slots_;
  std::unordered_map<index_t, index_t> sparse_;
};

/// Streaming Cartesian test over the column runs of A.
///
/// Entries of one block column arrive column by column with rows ascending,
/// so the entries of each block show up in increasing in-block offset. A is
/// a Kronecker product iff every nonzero block replays the in-block offsets
/// of the first block exactly, which a cursor per block checks in one pass.
inline std::optional<Length2Factorization> factorize_runs(const ColumnRuns& runs, index_t nnz,
                                                          index_t n1, index_t n2) {
  if (nnz == 0) throw EmptyPatternError();

  // In-block offsets of the block holding the first entry.
  std::vector<index_t> reference;
  const index_t first_block_col = runs.cols.front() / n2;
  const index_t first_block_row = runs.rows.front() / n2;
  for (std::size_t k = 0; k < runs.num_cols() && runs.cols[k] / n2 == first_block_col; ++k) {
    const index_t inner_col = runs.cols[k] % n2;
    for (index_t p = runs.start[k]; p < runs.start[k + 1]; ++p) {
      const index_t r = runs.rows[static_cast<std::size_t>(p)];
      if (r / n2 == first_block_row) reference.push_back(inner_col * n2 + r % n2);
    }
  }
  const auto block_nnz = static_cast<index_t>(reference.size());
  if (nnz % block_nnz != 0) return std::nullopt;

  BlockCursors cursor(n1, nnz);
  std::vector<index_t> active;      // block rows seen in the current block column
  std::vector<index_t> left_offsets;
  left_offsets.reserve(static_cast<std::size_t>(nnz / block_nnz));

  auto close_block_column = [&](index_t block_col) {
    for (index_t br : active) {
      if (cursor[br] != block_nnz) return false;
      cursor.reset(br);
    }
    std::sort(active.begin(), active.end());
    for (index_t br : active) left_offsets.push_back(block_col * n1 + br);
    active.clear();
    return true;
  };

  index_t current_block_col = -1;
  for (std::size_t k = 0; k < runs.num_cols(); ++k) {
    const index_t c = runs.cols[k];
    const index_t block_col = c / n2;
    const index_t inner_col = c - block_col * n2;
    if (block_col != current_block_col) {
      if (current_block_col >= 0 && !close_block_column(current_block_col)) return std::nullopt;
      current_block_col = block_col;
    }
    for (index_t p = runs.start[k]; p < runs.start[k + 1]; ++p) {
      const index_t r = runs.rows[static_cast<std::size_t>(p)];
      const index_t br = r / n2;
      index_t& pos = cursor[br];
      if (pos < 0) {
        pos = 0;
        active.push_back(br);
      }
      if (pos >= block_nnz ||
          reference[static_cast<std::size_t>(pos)] != inner_col * n2 + (r - br * n2)) {
        return std::nullopt;
      }
      ++pos;
    }
  }
  if (!close_block_column(current_block_col)) return std::nullopt;

  return Length2Factorization{{n1, n2},
                              BinaryPattern::from_sorted_offsets(n1, std::move(left_offsets)),
                              BinaryPattern::from_sorted_offsets(n2, std::move(reference))};
}

inline unsigned resolve_threads(unsigned requested, std::size_t jobs) {
  unsigned t = requested == 0 ? std::max(1u, std::thread::hardware_concurrency()) : requested;
  return static_cast<unsigned>(std::min<std::size_t>(t, std::max<std::size_t>(jobs, 1)));
}

}  // namespace detail

/// S for the pair (n1, n2): one (l1, l2) per entry of A, sorted.
inline RearrangedSupport rearranged_support(const BinaryPattern& a, index_t n1, index_t n2) {
  detail::check_split(a, n1, n2);
  if (a.empty()) throw EmptyPatternError();
  RearrangedSupport s{n1, n2, {}};
  s.pairs.reserve(static_cast<std::size_t>(a.nnz()));
  for (const Coordinate& c : a.coordinates()) {
    const SplitIndex i = split_coordinate(c.row, n2);
    const SplitIndex j = split_coordinate(c.col, n2);
    s.pairs.emplace_back(linear_index(i.outer, j.outer, n1), linear_index(i.inner, j.inner, n2));
  }
  std::sort(s.pairs.begin(), s.pairs.end());
  return s;
}

/// Writes S as S1 x S2 if possible. Groups pairs by l1; every group must carry
/// the l2-set of the first group. Returns (S1, S2), both sorted.
inline std::optional<std::pair<std::vector<index_t>, std::vector<index_t>>> cartesian_factors(
    const RearrangedSupport& s) {
  if (s.pairs.empty()) throw EmptyPatternError();
  std::vector<index_t> left;
  std::vector<index_t> right;
  const index_t first = s.pairs.front().first;
  std::size_t k = 0;
  while (k < s.pairs.size() && s.pairs[k].first == first) right.push_back(s.pairs[k++].second);
  const std::size_t width = right.size();
  if (s.pairs.size() % width != 0) return std::nullopt;
  for (std::size_t g = 0; g < s.pairs.size(); g += width) {
    const index_t l1 = s.pairs[g].first;
    for (std::size_t t = 0; t < width; ++t) {
      if (s.pairs[g + t].first != l1 || s.pairs[g + t].second != right[t]) return std::nullopt;
    }
    left.push_back(l1);
  }
  return std::make_pair(std::move(left), std::move(right));
}

/// The (n1, n2) factorization of A, if it exists; unique when it does.
inline std::optional<Length2Factorization> try_factorize(const BinaryPattern& a, index_t n1,
                                                         index_t n2) {
  detail::check_split(a, n1, n2);
  if (a.empty()) throw EmptyPatternError();
  return detail::factorize_runs(detail::ColumnRuns(a), a.nnz(), n1, n2);
}

/// Factorizations for the given pairs, in the order given, failures dropped.
inline std::vector<Length2Factorization> all_length2(const BinaryPattern& a,
                                                     std::span<const SizePair> pairs,
                                                     const EngineOptions& opts = {}) {
  if (a.empty()) throw EmptyPatternError();
  for (const auto& p : pairs) detail::check_split(a, p.left, p.right);
  const detail::ColumnRuns runs(a);

  std::vector<std::optional<Length2Factorization>> results(pairs.size());
  const unsigned workers = detail::resolve_threads(opts.threads, pairs.size());
  auto work = [&](unsigned w) {
    for (std::size_t k = w; k < pairs.size(); k += workers) {
      results[k] = detail::factorize_runs(runs, a.nnz(), pairs[k].left, pairs[k].right);
    }
  };
  if (workers <= 1) {
    work(0);
  } else {
    std::vector<std::jthread> pool;
    for (unsigned w = 0; w < workers; ++w) pool.emplace_back(work, w);
  }

  std::vector<Length2Factorization> out;
  for (auto& r : results) {
    if (r) out.push_back(std::move(*r));
  }
  return out;
}

/// Every length-2 factorization of A over all compatible pairs, sorted by the
/// left size.
inline std::vector<Length2Factorization> all_length2(const BinaryPattern& a,
                                                     const EngineOptions& opts = {}) {
  if (a.empty()) throw EmptyPatternError();
  if (a.size() < 2) return {};
  const auto pairs = compatible_pairs(a.size());
  return all_length2(a, pairs, opts);
}

inline bool is_prime(const BinaryPattern& a) { return all_length2(a).empty(); }

inline bool is_maximal(const BinaryPattern& a) {
  if (a.empty()) throw EmptyPatternError();
  if (a.size() < 2) return false;
  const auto pairs = compatible_pairs(a.size());
  return !pairs.empty() && all_length2(a, pairs).size() == pairs.size();
}

/// Given P = K (x) R with K and P known, reads R off the block of P selected by
/// the first entry of K and re-checks the product.
inline BinaryPattern extract_right_factor(const BinaryPattern& product, const BinaryPattern& left,
                                          index_t right_size) {
  if (left.empty()) throw EmptyPatternError("left factor has no nonzero entries");
  if (right_size < 1 || left.size() > product.size() / right_size ||
      left.size() * right_size != product.size()) {
    throw DomainError("extract_right_factor: size " + std::to_string(product.size()) +
                      " is not " + std::to_string(left.size()) + " * " +
                      std::to_string(right_size));
  }
  const index_t n = product.size();
  const index_t r = right_size;
  const Coordinate anchor = left.coordinate(0);
  const index_t row0 = (anchor.row - 1) * r;
  const index_t col0 = (anchor.col - 1) * r;
  const auto offs = product.offsets();

  std::vector<index_t> block;
  for (index_t jc = 0; jc < r; ++jc) {
    const index_t base = (col0 + jc) * n;
    auto it = std::lower_bound(offs.begin(), offs.end(), base + row0);
    for (; it != offs.end() && *it < base + row0 + r; ++it) {
      block.push_back(jc * r + (*it - base - row0));
    }
  }
  BinaryPattern right = BinaryPattern::from_sorted_offsets(r, std::move(block));
  if (!(kron_pattern(left, right) == product)) {
    throw ConsistencyError("product is not the Kronecker product of the given left factor "
                           "and any right factor of size " + std::to_string(r));
  }
  return right;
}

}  // namespace kronfact
