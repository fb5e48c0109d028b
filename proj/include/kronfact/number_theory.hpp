#pragma once

// Divisor arithmetic for candidate factor sizes.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <span>
#include <utility>
#include <vector>

#include "kronfact/errors.hpp"
#include "kronfact/pattern.hpp"

namespace kronfact {

struct PrimePower {
  index_t prime;
  int exponent;

  friend bool operator==(const PrimePower&, const PrimePower&) = default;
};

/// Primes strictly increasing; the product of prime^exponent is the input.
using PrimeFactorization = std::vector<PrimePower>;

/// (left size, right size) with both > 1 and left * right = n.
struct SizePair {
  index_t left;
  index_t right;

  friend auto operator<=>(const SizePair&, const SizePair&) = default;
};

inline std::vector<index_t> divisors(index_t n) {
  if (n < 1) throw DomainError("divisors: n must be positive");
  std::vector<index_t> small;
  std::vector<index_t> large;
  for (index_t d = 1; d <= n / d; ++d) {
    if (n % d == 0) {
      small.push_back(d);
      if (d != n / d) large.push_back(n / d);
    }
  }
  small.insert(small.end(), large.rbegin(), large.rend());
  return small;
}

/// Trial division.
inline PrimeFactorization prime_factorization(index_t n) {
  if (n < 2) throw DomainError("prime_factorization: n must be at least 2");
  PrimeFactorization out;
  for (index_t p = 2; p <= n / p; p += (p == 2 ? 1 : 2)) {
    if (n % p != 0) continue;
    int k = 0;
    while (n % p == 0) {
      n /= p;
      ++k;
    }
    out.push_back({p, k});
  }
  if (n > 1) out.push_back({n, 1});
  return out;
}

inline bool is_prime_number(index_t n) {
  if (n < 2) return false;
  const auto f = prime_factorization(n);
  return f.size() == 1 && f.front().exponent == 1;
}

/// All nontrivial splits n = left * right, sorted by left. Empty when n is prime.
inline std::vector<SizePair> compatible_pairs(index_t n) {
  if (n < 2) throw DomainError("compatible_pairs: n must be at least 2");
  std::vector<SizePair> out;
  for (index_t d : divisors(n)) {
    if (d != 1 && d != n) out.push_back({d, n / d});
  }
  return out;
}

/// Drops every element that is a multiple of another element; result sorted.
inline std::vector<index_t> reduce_multiples(std::span<const index_t> values) {
  std::vector<index_t> sorted(values.begin(), values.end());
  std::sort(sorted.begin(), sorted.end());
  sorted.erase(std::unique(sorted.begin(), sorted.end()), sorted.end());
  std::vector<index_t> out;
  for (index_t y : sorted) {
    // Any proper divisor of y in the set is smaller than y, hence already seen.
    const bool divisible = std::any_of(sorted.begin(), sorted.end(), [y](index_t x) {
      return x < y && x > 0 && y % x == 0;
    });
    if (!divisible) out.push_back(y);
  }
  return out;
}

/// Sum of the prime exponents: the longest possible factorization length.
inline int max_factorization_length(index_t n) {
  int total = 0;
  for (const auto& pk : prime_factorization(n)) total += pk.exponent;
  return total;
}

/// Number of distinct orderings of the prime multiset of n.
inline std::uint64_t maximal_branch_count(index_t n) {
  // Product of binomials C(k_1 + ... + k_j, k_j); each partial product is
  // itself a multinomial coefficient, so nothing overflows for n < 2^31.
  std::uint64_t count = 1;
  int placed = 0;
  for (const auto& pk : prime_factorization(n)) {
    for (int t = 1; t <= pk.exponent; ++t) {
      ++placed;
      count = count * static_cast<std::uint64_t>(placed) / static_cast<std::uint64_t>(t);
    }
  }
  return count;
}

struct ProbabilityBound {
  double log2_bound;   // -inf when there are no compatible pairs
  double probability;  // min(1, 2^log2_bound)
};

/// Union bound on the chance that an i.i.d. Be(1/2) pattern of size n admits
/// some length-2 factorization: sum over pairs of 2^(n1^2 + n2^2) / 2^(n^2).
inline ProbabilityBound factorizable_probability_bound(index_t n) {
  const auto pairs = compatible_pairs(n);
  if (pairs.empty()) return {-std::numeric_limits<double>::infinity(), 0.0};
  const double nn = static_cast<double>(n) * static_cast<double>(n);
  std::vector<double> exps;
  exps.reserve(pairs.size());
  for (const auto& p : pairs) {
    const double a = static_cast<double>(p.left);
    const double b = static_cast<double>(p.right);
    exps.push_back(a * a + b * b - nn);
  }
  const double top = *std::max_element(exps.begin(), exps.end());
  double acc = 0.0;
  for (double e : exps) acc += std::exp2(e - top);
  const double log2_bound = top + std::log2(acc);
  return {log2_bound, log2_bound >= 0.0 ? 1.0 : std::exp2(log2_bound)};
}

}  // namespace kronfact
