#pragma once

// Combining length-2 factorizations into prime decompositions.
//
// If A factorizes as (l, p*r) and as (p*l, r), it also factorizes as
// (l, p, r). A branch is a chain of left sizes l0 | l1 | ... | lq from the
// set L of left sizes of all length-2 factorizations; it yields the
// decomposition (l0, l1/l0, ..., lq/l(q-1), n/lq). Choosing l0 among the
// elements of L without a divisor in L, and each next element among the
// minimal proper multiples of the previous one, makes every factor prime
// provided the list of length-2 factorizations is complete.

#include <algorithm>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "kronfact/errors.hpp"
#include "kronfact/factorization.hpp"
#include "kronfact/number_theory.hpp"
#include "kronfact/pattern.hpp"

namespace kronfact {

struct Branch {
  /// Left sizes, each a proper divisor of the next.
  std::vector<index_t> chain;
  /// weights[k] = chain[k + 1] / chain[k].
  std::vector<index_t> weights;

  friend auto operator<=>(const Branch&, const Branch&) = default;
};

struct PrimeDecomposition {
  std::vector<index_t> sizes;
  std::vector<BinaryPattern> factors;
};

struct GraphEdge {
  index_t from;
  index_t to;
  index_t weight;
  int branch;  // 1-based branch id
  int position;  // 0-based position along the branch path
};

/// Multigraph on the left sizes. Every branch is a path; a branch with a
/// single left size is an isolated root.
struct DecompositionGraph {
  index_t n = 1;
  std::vector<index_t> vertices;
  std::vector<GraphEdge> edges;
  /// (branch id, vertex) for branches consisting of a single vertex.
  std::vector<std::pair<int, index_t>> isolated;
  std::vector<Branch> branches;
};

inline std::vector<index_t> left_sizes(std::span<const Length2Factorization> f) {
  std::vector<index_t> out;
  out.reserve(f.size());
  for (const auto& x : f) out.push_back(x.sizes.left);
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

namespace detail {

inline void extend_branches(std::span<const index_t> lefts, std::vector<index_t>& chain,
                            std::vector<Branch>& out) {
  const index_t last = chain.back();
  std::vector<index_t> multiples;
  for (index_t x : lefts) {
    if (x != last && x % last == 0) multiples.push_back(x);
  }
  if (multiples.empty()) {
    Branch b;
    b.chain = chain;
    for (std::size_t k = 1; k < chain.size(); ++k) b.weights.push_back(chain[k] / chain[k - 1]);
    out.push_back(std::move(b));
    return;
  }
  for (index_t next : reduce_multiples(multiples)) {
    chain.push_back(next);
    extend_branches(lefts, chain, out);
    chain.pop_back();
  }
}

}  // namespace detail

/// Depth-first enumeration of all branches over the left sizes; output is
/// lexicographic by chain.
inline std::vector<Branch> build_branches(std::span<const index_t> lefts) {
  std::vector<index_t> sorted(lefts.begin(), lefts.end());
  std::sort(sorted.begin(), sorted.end());
  sorted.erase(std::unique(sorted.begin(), sorted.end()), sorted.end());
  std::vector<Branch> out;
  std::vector<index_t> chain;
  for (index_t root : reduce_multiples(sorted)) {
    chain.assign(1, root);
    detail::extend_branches(sorted, chain, out);
  }
  std::sort(out.begin(), out.end(),
            [](const Branch& a, const Branch& b) { return a.chain < b.chain; });
  return out;
}

inline std::vector<Branch> build_branches(std::span<const Length2Factorization> f) {
  const auto lefts = left_sizes(f);
  return build_branches(std::span<const index_t>(lefts));
}

/// (l0, p1, ..., pq, n / lq).
inline std::vector<index_t> sizes_of(const Branch& branch, index_t n) {
  if (branch.chain.empty() || n % branch.chain.back() != 0) {
    throw DomainError("branch does not divide the matrix size " + std::to_string(n));
  }
  std::vector<index_t> sizes{branch.chain.front()};
  sizes.insert(sizes.end(), branch.weights.begin(), branch.weights.end());
  sizes.push_back(n / branch.chain.back());
  return sizes;
}

/// Recovers the factor patterns along a branch, left to right: the first
/// factor is the left pattern of the (l0, .) factorization, each inner factor
/// is peeled off the next left pattern, and the last factor is the right
/// pattern of the (lq, .) factorization. The product is re-checked against A.
inline PrimeDecomposition compose_prime_decomposition(const BinaryPattern& a,
                                                      const Branch& branch,
                                                      std::span<const Length2Factorization> f) {
  auto find = [&](index_t left) -> const Length2Factorization& {
    for (const auto& x : f) {
      if (x.sizes.left == left) return x;
    }
    throw DomainError("no length-2 factorization with left size " + std::to_string(left));
  };

  PrimeDecomposition out;
  out.sizes = sizes_of(branch, a.size());
  const Length2Factorization* prev = &find(branch.chain.front());
  out.factors.push_back(prev->left);
  for (std::size_t k = 0; k < branch.weights.size(); ++k) {
    const Length2Factorization& next = find(branch.chain[k + 1]);
    out.factors.push_back(extract_right_factor(next.left, prev->left, branch.weights[k]));
    prev = &next;
  }
  out.factors.push_back(prev->right);

  if (!(kron_pattern(out.factors) == a)) {
    throw ConsistencyError("factors recovered along a branch do not reproduce the pattern");
  }
  return out;
}

inline DecompositionGraph decomposition_graph(std::span<const Branch> branches,
                                              std::span<const Length2Factorization> f,
                                              index_t n) {
  DecompositionGraph g;
  g.n = n;
  g.vertices = left_sizes(f);
  g.branches.assign(branches.begin(), branches.end());
  for (std::size_t b = 0; b < branches.size(); ++b) {
    const auto& chain = branches[b].chain;
    const int id = static_cast<int>(b) + 1;
    if (chain.size() == 1) g.isolated.emplace_back(id, chain.front());
    for (std::size_t k = 1; k < chain.size(); ++k) {
      g.edges.push_back({chain[k - 1], chain[k], branches[b].weights[k - 1], id,
                         static_cast<int>(k - 1)});
    }
  }
  return g;
}

/// Everything learned about one pattern.
struct Analysis {
  index_t n = 1;
  index_t nnz = 0;
  std::vector<SizePair> pairs_tested;
  std::vector<Length2Factorization> length2;
  std::vector<Branch> branches;
  std::vector<PrimeDecomposition> decompositions;
  /// False when only a subset of the compatible pairs was examined.
  bool complete = true;
  bool maximal = false;

  bool prime() const { return complete && length2.empty(); }
};

/// Runs the full pipeline. When `pairs` is given, only those pairs are tried
/// and the resulting decompositions are not guaranteed to be prime.
inline Analysis analyze(const BinaryPattern& a, const EngineOptions& opts = {},
                        std::span<const SizePair> pairs = {}, bool restrict_pairs = false) {
  if (a.empty()) throw EmptyPatternError();
  Analysis out;
  out.n = a.size();
  out.nnz = a.nnz();
  const auto all_pairs = a.size() < 2 ? std::vector<SizePair>{} : compatible_pairs(a.size());
  if (restrict_pairs) {
    out.pairs_tested.assign(pairs.begin(), pairs.end());
    std::sort(out.pairs_tested.begin(), out.pairs_tested.end());
    out.pairs_tested.erase(std::unique(out.pairs_tested.begin(), out.pairs_tested.end()),
                           out.pairs_tested.end());
    out.complete = out.pairs_tested == all_pairs;
  } else {
    out.pairs_tested = all_pairs;
  }
  out.length2 = all_length2(a, out.pairs_tested, opts);
  out.maximal = out.complete && !all_pairs.empty() && out.length2.size() == all_pairs.size();
  out.branches = build_branches(std::span<const Length2Factorization>(out.length2));
  for (const auto& b : out.branches) {
    out.decompositions.push_back(compose_prime_decomposition(a, b, out.length2));
  }
  return out;
}

/// All prime decompositions of A, one per branch; empty when A is prime.
inline std::vector<PrimeDecomposition> all_prime_decompositions(const BinaryPattern& a,
                                                                const EngineOptions& opts = {}) {
  return analyze(a, opts).decompositions;
}

}  // namespace kronfact
