// Acceptance gate: one PASS/FAIL line per criterion, nonzero exit on failure.
//
// Timings are the median of kTimingRuns runs measured with steady_clock.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "fixtures.hpp"
#include "kronfact/kronfact.hpp"
#include "oracles.hpp"

using namespace kronfact;
using Sizes = std::vector<index_t>;

namespace {

// Tolerances and limits.
constexpr double kWorkedExampleSeconds = 1e-3;
constexpr double kTwelveSeconds = 10e-3;
constexpr double kRoundTripSeconds = 60.0;
constexpr double kLargeSeconds = 5.0;
constexpr int kRoundTripTrials = 10000;
constexpr int kBernoulliTrials = 100000;
constexpr int kNkpTrials = 100;
constexpr double kNkpRelativeError = 1e-10;
constexpr double kEckartYoungRelative = 1e-8;
constexpr double kSigmaRelative = 1e-8;
constexpr double kSelfSimilarity = 1e-10;
constexpr int kTimingRuns = 5;
constexpr int kMismatchedBeaten = 2;

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

template <typename F>
double median_seconds(F&& f) {
  std::vector<double> t;
  for (int k = 0; k < kTimingRuns; ++k) {
    const auto t0 = Clock::now();
    f();
    t.push_back(seconds_since(t0));
  }
  std::sort(t.begin(), t.end());
  return t[t.size() / 2];
}

struct Outcome {
  bool pass = true;
  std::string detail;

  void require(bool ok, const std::string& what) {
    if (!ok) {
      pass = false;
      if (!detail.empty()) detail += "; ";
      detail += "failed: " + what;
    }
  }
  void note(const std::string& s) {
    if (!detail.empty()) detail += "; ";
    detail += s;
  }
};

std::string fmt(const char* f, double x) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, x);
  return buf;
}

std::string join(const Sizes& v) {
  std::string s = "(";
  for (std::size_t k = 0; k < v.size(); ++k) s += (k ? "," : "") + std::to_string(v[k]);
  return s + ")";
}

std::set<Sizes> size_set(const Analysis& r) {
  std::set<Sizes> out;
  for (const auto& d : r.decompositions) out.insert(d.sizes);
  return out;
}

bool all_verify(const Analysis& r, const BinaryPattern& a) {
  for (const auto& d : r.decompositions) {
    if (!(oracle::kron(d.factors) == a)) return false;
  }
  return true;
}

Outcome worked_examples() {
  Outcome o;
  const auto diag = fixtures::diagonal_three_4();
  const auto s = rearranged_support(diag, 2, 2);
  o.require(s.pairs == std::vector<std::pair<index_t, index_t>>{{1, 1}, {1, 4}, {4, 1}},
            "S of the partial diagonal");
  o.require(!try_factorize(diag, 2, 2).has_value(), "partial diagonal not factorizable");
  o.require(!cartesian_factors(s).has_value(), "S not a Cartesian product");

  const auto corner = fixtures::lower_corner_4();
  const auto f = cartesian_factors(rearranged_support(corner, 2, 2));
  o.require(f && f->first == Sizes{1} && f->second == Sizes{1, 2, 4}, "S1 = {1}, S2 = {1,2,4}");
  const auto t = try_factorize(corner, 2, 2);
  o.require(t && t->left == BinaryPattern::from_coordinates(2, {{1, 1}}) &&
                t->right == BinaryPattern::from_coordinates(2, {{1, 1}, {2, 1}, {2, 2}}),
            "factor patterns");

  const double secs = median_seconds([&] {
    (void)try_factorize(diag, 2, 2);
    (void)try_factorize(corner, 2, 2);
  });
  o.require(secs < kWorkedExampleSeconds, "runtime < 1 ms");
  o.note(fmt("%.1f us", secs * 1e6));
  return o;
}

Outcome maximal_twelve() {
  Outcome o;
  const auto a = fixtures::maximal_12();
  Analysis r;
  const double secs = median_seconds([&] { r = analyze(a); });
  o.require(size_set(r) == std::set<Sizes>{{2, 2, 3}, {2, 3, 2}, {3, 2, 2}},
            "decompositions (2,2,3), (2,3,2), (3,2,2)");
  o.require(r.decompositions.size() == 3, "exactly three decompositions");
  o.require(r.maximal, "maximal");
  o.require(all_verify(r, a), "kron oracle");
  o.require(secs < kTwelveSeconds, "runtime < 10 ms");
  o.note(fmt("%.1f us", secs * 1e6));
  return o;
}

Outcome isolated_root() {
  Outcome o;
  const auto a = fixtures::three_left_sizes_12();
  const auto r = analyze(a);
  o.require(left_sizes(r.length2) == Sizes{2, 3, 4}, "L = {2,3,4}");
  o.require(r.branches.size() == 2, "two branches");
  o.require(size_set(r) == std::set<Sizes>{{3, 4}, {2, 2, 3}}, "sizes (3,4) and (2,2,3)");
  const auto g = decomposition_graph(r.branches, r.length2, a.size());
  const bool path = g.edges.size() == 1 && g.edges[0].from == 2 && g.edges[0].to == 4 &&
                    g.edges[0].weight == 2;
  o.require(path, "single edge 2 -> 4 with weight 2");
  o.require(g.isolated.size() == 1 && g.isolated[0].second == 3, "isolated vertex 3");
  o.require(all_verify(r, a), "kron oracle");
  return o;
}

Outcome lattice_24() {
  Outcome o;
  const auto r = analyze(identity_pattern(24));
  o.require(left_sizes(r.length2) == Sizes{2, 3, 4, 6, 8, 12}, "L = {2,3,4,6,8,12}");
  std::vector<Sizes> chains;
  for (const auto& b : r.branches) chains.push_back(b.chain);
  o.require(chains == std::vector<Sizes>{{2, 4, 8}, {2, 4, 12}, {2, 6, 12}, {3, 6, 12}},
            "branches [2,4,8] [2,4,12] [2,6,12] [3,6,12]");
  o.require(size_set(r) == std::set<Sizes>{{2, 2, 2, 3}, {2, 2, 3, 2}, {2, 3, 2, 2}, {3, 2, 2, 2}},
            "sizes");
  o.require(max_factorization_length(24) == 4 && maximal_branch_count(24) == 4 &&
                r.decompositions.size() == 4,
            "length 4 and 4!/(3!1!) = 4 branches");
  return o;
}

Outcome square_of_six() {
  Outcome o;
  const auto a6 = fixtures::maximal_6();
  const auto a = kron_pattern(a6, a6);
  const auto r = analyze(a);
  const auto sizes = size_set(r);
  o.require(is_maximal(a6), "6x6 factor maximal");
  o.require(r.decompositions.size() == 5 && sizes.size() == 5, "exactly 5 decompositions");
  o.require(!sizes.count({2, 2, 3, 3}), "(2,2,3,3) absent");
  o.require(sizes == oracle::prime_decomposition_sizes(a), "matches exhaustive oracle");
  o.require(all_verify(r, a), "kron oracle");
  std::string listed;
  for (const auto& s : sizes) listed += join(s);
  o.note(listed);
  return o;
}

Outcome round_trip() {
  Outcome o;
  Rng rng(kDefaultSeed);
  const index_t primes[] = {2, 3, 5, 7};
  int misses = 0;
  int bad_products = 0;
  std::int64_t total_nnz = 0;
  const auto t0 = Clock::now();
  for (int t = 0; t < kRoundTripTrials; ++t) {
    const int len = 2 + static_cast<int>(rng() % 3);
    Sizes sizes;
    std::vector<BinaryPattern> factors;
    for (int k = 0; k < len; ++k) {
      sizes.push_back(primes[rng() % 4]);
      const double density = 0.2 + 0.6 * uniform01(rng);
      factors.push_back(random_nonzero_pattern(sizes.back(), density, rng));
    }
    const auto a = kron_pattern(factors);
    total_nnz += a.nnz();
    const auto r = analyze(a);
    if (!size_set(r).count(sizes)) ++misses;
    for (const auto& d : r.decompositions) {
      if (!(kron_pattern(d.factors) == a)) ++bad_products;
    }
  }
  const double secs = seconds_since(t0);
  o.require(misses == 0, std::to_string(misses) + " generating tuples not recovered");
  o.require(bad_products == 0, std::to_string(bad_products) + " outputs failed verification");
  o.require(secs < kRoundTripSeconds, "runtime < 60 s");
  o.note(std::to_string(kRoundTripTrials) + " trials, " + std::to_string(total_nnz) +
         " nonzeros total, " + fmt("%.2f s", secs));
  return o;
}

Outcome multinomial_counts() {
  Outcome o;
  for (index_t n : {8, 12, 16, 24, 36, 48}) {
    for (int which = 0; which < 2; ++which) {
      const auto a = which == 0 ? identity_pattern(n) : ones_pattern(n);
      const auto r = analyze(a);
      const std::string tag = (which == 0 ? "identity " : "ones ") + std::to_string(n);
      o.require(r.decompositions.size() == maximal_branch_count(n), tag + " count");
      o.require(size_set(r).size() == r.decompositions.size(), tag + " distinct");
      for (const auto& d : r.decompositions) {
        bool prime_sizes = static_cast<int>(d.sizes.size()) == max_factorization_length(n);
        for (index_t s : d.sizes) prime_sizes = prime_sizes && is_prime_number(s);
        o.require(prime_sizes, tag + " sizes " + join(d.sizes));
      }
    }
  }
  return o;
}

Outcome bernoulli_fraction() {
  Outcome o;
  Rng rng(kDefaultSeed);
  int factorizable = 0;
  for (int t = 0; t < kBernoulliTrials; ++t) {
    const auto a = random_pattern(4, 0.5, rng);
    // The zero pattern is counted as factorizable.
    if (a.empty() || try_factorize(a, 2, 2)) ++factorizable;
  }
  const double p = std::ldexp(1.0, -8);
  const double threshold = p + 3.0 * std::sqrt(p / kBernoulliTrials);
  const double fraction = static_cast<double>(factorizable) / kBernoulliTrials;
  o.require(fraction <= threshold, "fraction within bound");
  o.note(std::to_string(factorizable) + "/" + std::to_string(kBernoulliTrials) + " = " +
         fmt("%.5f", fraction) + " <= " + fmt("%.5f", threshold));
  return o;
}

Outcome nkp_checks() {
  Outcome o;
  Rng rng(kDefaultSeed);
  const std::pair<index_t, index_t> shapes[] = {{3, 4}, {4, 4}, {2, 6}};
  double worst_rel = 0.0, worst_ey = 0.0, worst_sigma = 0.0;
  for (int t = 0; t < kNkpTrials; ++t) {
    const auto [n1, n2] = shapes[t % 3];
    const auto b = kron(random_dense(n1, n1, rng), random_dense(n2, n2, rng));
    const auto r = nkp2(b, n1, n2);
    const double norm = b.frobenius_norm();
    worst_rel = std::max(worst_rel, r.frobenius_error / norm);
    worst_ey = std::max(worst_ey, std::abs(r.frobenius_error * r.frobenius_error +
                                           r.sigma * r.sigma - norm * norm) /
                                      (norm * norm));
    const double ref = oracle::singular_values(rearrange(b, n1, n2))[0];
    worst_sigma = std::max(worst_sigma, std::abs(r.sigma - ref) / ref);
  }
  o.require(worst_rel <= kNkpRelativeError, "relative error <= 1e-10");
  o.require(worst_ey <= kEckartYoungRelative, "error^2 + sigma^2 = ||B||^2");
  o.require(worst_sigma <= kSigmaRelative, "sigma matches reference SVD");
  o.note("max rel err " + fmt("%.1e", worst_rel) + ", identity " + fmt("%.1e", worst_ey) +
         ", sigma " + fmt("%.1e", worst_sigma));

  // Synthetic two-term operator standing in for a discretized model.
  Rng op_rng(kDefaultSeed);
  const Sizes construction{5, 4, 4, 4};
  const auto b = two_term_operator(construction, op_rng);
  const auto r = analyze(sparsity(b));
  o.require(size_set(r).count(construction) == 1, "sparsity recovers (5,4,4,4)");
  const auto good = nkp_multi(b, construction);
  // Scaled-down analogues of the mismatched tuples used for the
  // (31,12,12,12) operator: merge-and-split, split-and-merge, double split.
  const Sizes mismatched[] = {{5, 16, 2, 2}, {5, 4, 2, 8}, {10, 2, 2, 8}};
  const double norm_b = b.frobenius_norm();
  std::string errs = "err" + join(construction) + " = " + fmt("%.4f", good.frobenius_error / norm_b);
  int beaten = 0;
  for (const auto& m : mismatched) {
    const auto bad = nkp_multi(b, m);
    beaten += good.frobenius_error < bad.frobenius_error ? 1 : 0;
    errs += ", err" + join(m) + " = " + fmt("%.4f", bad.frobenius_error / norm_b);
  }
  o.require(beaten >= kMismatchedBeaten, "construction sizes beat only " + std::to_string(beaten) +
                                             " of 3 mismatched tuples");
  o.note(errs + " (relative)");
  return o;
}

std::string svg_for(const BinaryPattern& a, const LayoutConfig& cfg) {
  const auto layout = layout_positions(cfg);
  std::ostringstream out;
  write_svg(out, layout, cfg.radii, edge_segments(a, layout));
  return out.str();
}

Outcome layout_checks() {
  Outcome o;
  const auto a = fixtures::adjacency_24();
  const auto cfg = make_layout_config({4, 3, 2});
  const auto layout = layout_positions(cfg);
  const auto segs = edge_segments(a, layout);
  o.require(layout.positions.size() == 24, "24 vertices");
  o.require(segs.size() == 56, "56 edges");

  // Each outer cluster is the sub-layout rotated and moved onto its circle point.
  LayoutConfig sub;
  sub.sizes = {3, 2};
  sub.radii = {cfg.radii[1], cfg.radii[2]};
  sub.phase_shift = cfg.phase_shift;
  const auto inner = layout_positions(sub);
  const auto outer = circle_points(4, cfg.radii[0]);
  double worst = 0.0;
  for (std::size_t k = 0; k < 4; ++k) {
    const Point rot = std::polar(1.0, std::arg(outer[k]) + cfg.phase_shift);
    for (std::size_t q = 0; q < 6; ++q) {
      worst = std::max(worst, std::abs(layout.positions[k * 6 + q] - (outer[k] + rot * inner.positions[q])));
    }
  }
  o.require(worst <= kSelfSimilarity, "cluster self-similarity");
  const std::string first = svg_for(a, cfg);
  o.require(first == svg_for(a, cfg), "SVG byte-identical");
  std::size_t circles = 0, lines = 0;
  for (auto p = first.find("<circle "); p != std::string::npos; p = first.find("<circle ", p + 1)) ++circles;
  for (auto p = first.find("<line "); p != std::string::npos; p = first.find("<line ", p + 1)) ++lines;
  o.require(circles == 24 && lines == 56, "SVG has 24 circles and 56 lines");
  o.note("self-similarity deviation " + fmt("%.1e", worst));
  return o;
}

Outcome three_factor_prime() {
  Outcome o;
  Rng rng(kDefaultSeed);
  const Sizes sizes{4, 8, 2};
  std::vector<BinaryPattern> factors;
  for (index_t s : sizes) {
    BinaryPattern f;
    do {
      f = random_nonzero_pattern(s, 0.5, rng);
    } while (!is_prime(f));
    factors.push_back(f);
  }
  const auto a = kron_pattern(factors);
  const auto r = analyze(a);
  o.require(r.decompositions.size() == 1, "unique prime decomposition");
  o.require(size_set(r) == std::set<Sizes>{sizes}, "sizes (4,8,2)");
  o.require(all_verify(r, a), "kron oracle");
  return o;
}

Outcome large_banded() {
  Outcome o;
  // tridiagonal(31) (x) bidiagonal(12)^3: n = 53568.
  const BinaryPattern bidiag = banded_pattern(12, 1, 0);
  const BinaryPattern factors[] = {banded_pattern(31, 1, 1), bidiag, bidiag, bidiag};
  const auto a = kron_pattern(factors);
  o.require(a.size() == 53568, "n = 53568");
  const auto t0 = Clock::now();
  const auto r = analyze(a, EngineOptions{0});
  const double secs = seconds_since(t0);
  o.require(size_set(r) == std::set<Sizes>{{31, 12, 12, 12}}, "unique sizes (31,12,12,12)");
  o.require(r.pairs_tested.size() == 54, "54 compatible pairs");
  o.require(secs < kLargeSeconds, "runtime < 5 s");
  o.note("nnz " + std::to_string(a.nnz()) + ", " + fmt("%.3f s", secs));
  return o;
}

}  // namespace

int main() {
  const std::pair<const char*, std::function<Outcome()>> criteria[] = {
      {"worked 4x4 examples", worked_examples},
      {"maximal 12x12 product", maximal_twelve},
      {"isolated branch root", isolated_root},
      {"divisor lattice of 24", lattice_24},
      {"square of a maximal 6x6 pattern", square_of_six},
      {"random product round trip", round_trip},
      {"multinomial branch counts", multinomial_counts},
      {"Be(1/2) factorizable fraction", bernoulli_fraction},
      {"nearest Kronecker product", nkp_checks},
      {"hierarchical layout", layout_checks},
      {"three-factor prime product", three_factor_prime},
      {"large banded pattern", large_banded},
  };
  int failures = 0;
  int id = 0;
  for (const auto& [name, check] : criteria) {
    ++id;
    Outcome out;
    try {
      out = check();
    } catch (const std::exception& e) {
      out.pass = false;
      out.detail = std::string("exception: ") + e.what();
    }
    failures += out.pass ? 0 : 1;
    std::printf("%s %2d %s: %s\n", out.pass ? "PASS" : "FAIL", id, name, out.detail.c_str());
    std::fflush(stdout);
  }
  std::printf("%d/%d criteria passed\n", id - failures, id);
  return failures == 0 ? 0 : 1;
}
