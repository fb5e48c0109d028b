#include <catch_amalgamated.hpp>

#include <algorithm>
#include <map>
#include <set>

#include "fixtures.hpp"
#include "kronfact/branches.hpp"
#include "kronfact/generators.hpp"
#include "oracles.hpp"

using namespace kronfact;

namespace {

using Sizes = std::vector<index_t>;

std::set<Sizes> reported_sizes(const Analysis& r) {
  std::set<Sizes> out;
  for (const auto& d : r.decompositions) out.insert(d.sizes);
  return out;
}

}  // namespace

TEST_CASE("branch construction over a full divisor lattice") {
  const std::vector<index_t> lefts{2, 3, 4, 6, 8, 12};
  const auto b = build_branches(lefts);
  REQUIRE(b.size() == 4);
  CHECK(b[0].chain == Sizes{2, 4, 8});
  CHECK(b[1].chain == Sizes{2, 4, 12});
  CHECK(b[2].chain == Sizes{2, 6, 12});
  CHECK(b[3].chain == Sizes{3, 6, 12});
  CHECK(b[0].weights == Sizes{2, 2});
  CHECK(sizes_of(b[0], 24) == Sizes{2, 2, 2, 3});
  CHECK(sizes_of(b[3], 24) == Sizes{3, 2, 2, 2});
  CHECK_THROWS_AS(sizes_of(b[0], 12), DomainError);
}

TEST_CASE("branch construction with an isolated root") {
  const std::vector<index_t> lefts{4, 2, 3};
  const auto b = build_branches(lefts);
  REQUIRE(b.size() == 2);
  CHECK(b[0].chain == Sizes{2, 4});
  CHECK(b[1].chain == Sizes{3});
  CHECK(build_branches(std::vector<index_t>{}).empty());
}

TEST_CASE("maximal 12x12 product") {
  const auto a = fixtures::maximal_12();
  const auto r = analyze(a);
  CHECK(r.maximal);
  CHECK_FALSE(r.prime());
  CHECK(reported_sizes(r) == std::set<Sizes>{{2, 2, 3}, {2, 3, 2}, {3, 2, 2}});
  for (const auto& d : r.decompositions) {
    CHECK(oracle::kron(d.factors) == a);
    for (const auto& f : d.factors) CHECK(oracle::prime_by_blocks(f));
  }
  CHECK(reported_sizes(r) == oracle::prime_decomposition_sizes(a));
}

TEST_CASE("12x12 product with an isolated left size") {
  const auto a = fixtures::three_left_sizes_12();
  const auto r = analyze(a);
  CHECK(left_sizes(r.length2) == Sizes{2, 3, 4});
  REQUIRE(r.branches.size() == 2);
  CHECK(r.branches[0].chain == Sizes{2, 4});
  CHECK(r.branches[1].chain == Sizes{3});
  CHECK(reported_sizes(r) == std::set<Sizes>{{2, 2, 3}, {3, 4}});
  CHECK_FALSE(r.maximal);

  const auto g = decomposition_graph(r.branches, r.length2, a.size());
  CHECK(g.vertices == Sizes{2, 3, 4});
  REQUIRE(g.edges.size() == 1);
  CHECK(g.edges[0].from == 2);
  CHECK(g.edges[0].to == 4);
  CHECK(g.edges[0].weight == 2);
  REQUIRE(g.isolated.size() == 1);
  CHECK(g.isolated[0] == std::pair<int, index_t>{2, 3});
  CHECK(reported_sizes(r) == oracle::prime_decomposition_sizes(a));
}

TEST_CASE("square of the maximal 6x6 pattern") {
  const auto a6 = fixtures::maximal_6();
  CHECK(is_maximal(a6));
  const auto a = kron_pattern(a6, a6);
  const auto r = analyze(a);
  const auto sizes = reported_sizes(r);
  CHECK(sizes.size() == 5);
  CHECK(r.decompositions.size() == 5);
  CHECK_FALSE(sizes.count({2, 2, 3, 3}));
  CHECK(sizes == oracle::prime_decomposition_sizes(a));
}

TEST_CASE("identity and all-ones follow the multinomial count") {
  for (index_t n : {8, 12, 16, 24, 36, 48}) {
    for (const auto& a : {identity_pattern(n), ones_pattern(n)}) {
      const auto r = analyze(a);
      CHECK(r.maximal);
      CHECK(r.decompositions.size() == maximal_branch_count(n));
      for (const auto& d : r.decompositions) {
        CHECK(static_cast<int>(d.sizes.size()) == max_factorization_length(n));
        for (index_t s : d.sizes) CHECK(is_prime_number(s));
      }
    }
  }
}

TEST_CASE("decompositions of random products match the exhaustive oracle") {
  Rng rng(31);
  const index_t primes[] = {2, 3};
  for (int t = 0; t < 300; ++t) {
    const int len = 2 + static_cast<int>(rng() % 2);
    std::vector<BinaryPattern> factors;
    for (int k = 0; k < len; ++k) {
      factors.push_back(random_nonzero_pattern(primes[rng() % 2], 0.3 + 0.5 * uniform01(rng), rng));
    }
    const auto a = kron_pattern(factors);
    const auto r = analyze(a);
    REQUIRE(reported_sizes(r) == oracle::prime_decomposition_sizes(a));
    for (const auto& d : r.decompositions) CHECK(kron_pattern(d.factors) == a);
  }
}

TEST_CASE("prime patterns produce no branches") {
  const auto a = fixtures::diagonal_three_4();
  const auto r = analyze(a);
  CHECK(r.prime());
  CHECK(r.branches.empty());
  CHECK(r.decompositions.empty());
  CHECK(analyze(identity_pattern(7)).prime());
  CHECK_THROWS_AS(analyze(BinaryPattern(6)), EmptyPatternError);
}

TEST_CASE("restricted pairs are flagged incomplete") {
  const auto a = fixtures::three_left_sizes_12();
  const std::vector<SizePair> pairs{{2, 6}};
  const auto r = analyze(a, {}, pairs, true);
  CHECK_FALSE(r.complete);
  CHECK_FALSE(r.prime());
  REQUIRE(r.length2.size() == 1);
  CHECK(r.length2[0].sizes == SizePair{2, 6});
  REQUIRE(r.decompositions.size() == 1);
  CHECK(r.decompositions[0].sizes == Sizes{2, 6});

  const auto all = analyze(a, {}, compatible_pairs(12), true);
  CHECK(all.complete);
}
