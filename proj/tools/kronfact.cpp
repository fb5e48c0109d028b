// kronfact: Kronecker factorization of sparsity patterns from the command line.
//
// Exit codes: 0 decomposable / success, 1 parse or I/O failure, 2 invalid
// input or parameters, 3 prime (no factorization found), 4 power iteration did
// not converge, 5 internal consistency check failed.

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include <CLI11.hpp>

#include "kronfact/kronfact.hpp"
#include "kronfact/report.hpp"

namespace kf = kronfact;

namespace {

enum Exit : int {
  kOk = 0,
  kParse = 1,
  kDomain = 2,
  kPrime = 3,
  kNoConvergence = 4,
  kConsistency = 5,
};

unsigned thread_count(unsigned requested) {
  unsigned threads = requested == 0 ? std::max(1u, std::thread::hardware_concurrency()) : requested;
  if (const char* cap = std::getenv("KRONFACT_THREADS")) {
    char* end = nullptr;
    const long v = std::strtol(cap, &end, 10);
    if (end != cap && *end == '\0' && v > 0) threads = std::min(threads, static_cast<unsigned>(v));
  }
  return threads;
}

// Writes through `fn` to a file, or to stdout for "-".
template <typename Fn>
void emit(const std::string& path, Fn&& fn) {
  if (path == "-") {
    fn(std::cout);
    std::cout.flush();
    return;
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write '" + path + "'");
  fn(out);
  if (!out) throw std::runtime_error("write to '" + path + "' failed");
}

kf::BinaryPattern load_pattern(const std::string& path, bool edge_list) {
  if (edge_list) return kf::read_edge_list(path);
  return kf::read_pattern(path);
}

std::string join(const std::vector<kf::index_t>& v, const char* sep = ",") {
  std::string s;
  for (std::size_t k = 0; k < v.size(); ++k) {
    if (k) s += sep;
    s += std::to_string(v[k]);
  }
  return s;
}

void check_product(const std::vector<kf::index_t>& sizes, kf::index_t n, const char* what) {
  kf::index_t prod = 1;
  for (kf::index_t s : sizes) {
    if (s < 1) throw kf::DomainError(std::string(what) + " must be positive");
    if (prod > n) break;
    prod *= s;
  }
  if (prod != n) {
    throw kf::DomainError(std::string(what) + " " + join(sizes) + " do not multiply to " +
                          std::to_string(n));
  }
}

// ---- factorize ------------------------------------------------------------

struct FactorizeArgs {
  std::string input;
  std::vector<std::vector<kf::index_t>> pairs;
  std::string json;
  bool verify = false;
  bool edge_list = false;
  bool quiet = false;
  unsigned threads = 0;
};

void print_summary(std::ostream& out, const kf::Analysis& r) {
  out << "n = " << r.n << ", nnz = " << r.nnz << ", pairs tested = " << r.pairs_tested.size()
      << (r.complete ? "" : " (restricted)") << '\n';
  out << "length-2 factorizations:";
  if (r.length2.empty()) out << " none";
  for (const auto& f : r.length2) out << " (" << f.sizes.left << "," << f.sizes.right << ")";
  out << '\n';
  if (r.decompositions.empty()) {
    out << (r.complete ? "prime\n" : "no factorization for the given pairs\n");
    return;
  }
  out << (r.complete ? "prime decompositions: " : "decompositions: ") << r.decompositions.size()
      << (r.maximal ? " (maximal pattern)" : "") << '\n';
  for (std::size_t k = 0; k < r.decompositions.size(); ++k) {
    out << "  branch " << k + 1 << " [" << join(r.branches[k].chain) << "]: ("
        << join(r.decompositions[k].sizes) << ")\n";
  }
}

int run_factorize(const FactorizeArgs& args) {
  const kf::BinaryPattern a = load_pattern(args.input, args.edge_list);
  std::vector<kf::SizePair> pairs;
  for (const auto& p : args.pairs) pairs.push_back({p.at(0), p.at(1)});
  const kf::Analysis r =
      kf::analyze(a, kf::EngineOptions{thread_count(args.threads)}, pairs, !args.pairs.empty());

  bool verified = false;
  if (args.verify) {
    for (const auto& d : r.decompositions) {
      if (!(kf::kron_pattern(d.factors) == a)) {
        throw kf::ConsistencyError("decomposition (" + join(d.sizes) +
                                   ") does not reproduce the input");
      }
    }
    for (const auto& f : r.length2) {
      if (!(kf::kron_pattern(f.left, f.right) == a)) {
        throw kf::ConsistencyError("length-2 factorization does not reproduce the input");
      }
    }
    verified = true;
  }

  if (!args.quiet && args.json != "-") print_summary(std::cout, r);
  if (!args.json.empty()) {
    emit(args.json, [&](std::ostream& o) { kf::write_json(o, kf::factorization_report(r, verified)); });
  }
  return r.decompositions.empty() ? kPrime : kOk;
}

// ---- graph ----------------------------------------------------------------

struct GraphArgs {
  std::string input;
  std::string dot = "-";
  bool edge_list = false;
  unsigned threads = 0;
};

int run_graph(const GraphArgs& args) {
  const kf::BinaryPattern a = load_pattern(args.input, args.edge_list);
  const kf::Analysis r = kf::analyze(a, kf::EngineOptions{thread_count(args.threads)});
  const auto g = kf::decomposition_graph(r.branches, r.length2, a.size());
  emit(args.dot, [&](std::ostream& o) { kf::write_dot(o, g); });
  return kOk;
}

// ---- layout ---------------------------------------------------------------

struct LayoutArgs {
  std::string input;
  std::vector<kf::index_t> sizes;
  std::vector<double> radii;
  std::optional<double> shift;
  std::string svg;
  std::string json;
  double opacity = 0.5;
  double width = 800.0;
  bool arrows = false;
  bool edge_list = false;
};

int run_layout(const LayoutArgs& args) {
  const kf::BinaryPattern a = load_pattern(args.input, args.edge_list);
  std::vector<kf::index_t> sizes = args.sizes;
  if (sizes.empty()) {
    // No sizes given: use the first prime decomposition, or one level.
    const kf::Analysis r = kf::analyze(a, kf::EngineOptions{thread_count(0)});
    sizes = r.decompositions.empty() ? std::vector<kf::index_t>{a.size()}
                                     : r.decompositions.front().sizes;
  }
  check_product(sizes, a.size(), "layout sizes");
  kf::LayoutConfig cfg = kf::make_layout_config(sizes);
  if (!args.radii.empty()) cfg.radii = args.radii;
  if (args.shift) cfg.phase_shift = *args.shift;
  if (!(args.opacity >= 0.0 && args.opacity <= 1.0)) {
    throw kf::DomainError("opacity must lie in [0, 1]");
  }
  if (!(args.width > 0.0)) throw kf::DomainError("width must be positive");

  const kf::LayoutResult layout = kf::layout_positions(cfg);
  const auto segments = kf::edge_segments(a, layout);
  kf::SvgStyle style;
  style.edge_opacity = args.opacity;
  style.arrows = args.arrows;
  style.width_px = args.width;

  std::string svg = args.svg;
  if (svg.empty() && args.json.empty()) svg = "-";
  if (!svg.empty()) {
    emit(svg, [&](std::ostream& o) { kf::write_svg(o, layout, cfg.radii, segments, style); });
  }
  if (!args.json.empty()) {
    emit(args.json, [&](std::ostream& o) {
      kf::write_json(o, kf::layout_report(cfg, layout, segments.size()));
    });
  }
  return kOk;
}

// ---- nkp ------------------------------------------------------------------

struct NkpArgs {
  std::string input;
  std::vector<kf::index_t> sizes;
  double tol = 1e-10;
  int maxit = 5000;
  std::string out;
  std::string json;
  unsigned threads = 0;
};

int run_nkp(const NkpArgs& args) {
  const kf::DenseRealMatrix b = kf::read_real(args.input);
  if (b.frobenius_norm() == 0.0) throw kf::DomainError("matrix is zero");
  std::vector<kf::index_t> sizes = args.sizes;
  if (sizes.empty()) {
    // Sparsity-informed sizes: the first prime decomposition of the pattern.
    const kf::Analysis r = kf::analyze(kf::sparsity(b), kf::EngineOptions{thread_count(args.threads)});
    if (r.decompositions.empty()) {
      throw kf::DomainError("the sparsity pattern is prime; pass --sizes explicitly");
    }
    sizes = r.decompositions.front().sizes;
  }
  if (sizes.size() < 2) throw kf::DomainError("nkp needs at least two sizes");
  check_product(sizes, b.rows(), "nkp sizes");

  kf::PowerOptions opts;
  opts.tol = args.tol;
  opts.maxit = args.maxit;
  if (!(opts.tol > 0.0) || opts.maxit < 1) throw kf::DomainError("tol and maxit must be positive");
  const kf::NkpResult r = kf::nkp_multi(b, sizes, opts);

  std::vector<std::string> files;
  if (!args.out.empty()) {
    for (std::size_t k = 0; k < r.factors.size(); ++k) {
      files.push_back(args.out + "_" + std::to_string(k + 1) + ".mtx");
      kf::write_matrix_market(files.back(), r.factors[k]);
    }
  }
  const auto report = kf::nkp_report(r, b.frobenius_norm(), files);
  if (args.json != "-") {
    std::cout << "sizes (" << join(sizes) << "): sigma = " << kf::detail::format_real(r.sigma)
              << ", frobenius error = " << kf::detail::format_real(r.frobenius_error)
              << ", relative error = " << kf::detail::format_real(report["relative_error"].get<double>())
              << '\n';
  }
  if (!args.json.empty()) emit(args.json, [&](std::ostream& o) { kf::write_json(o, report); });
  return kOk;
}

// ---- gen ------------------------------------------------------------------

struct GenArgs {
  std::string kind;
  std::vector<std::string> params;
  std::uint64_t seed = kf::kDefaultSeed;
  std::string out = "-";
};

kf::index_t int_param(const GenArgs& a, std::size_t k, const char* name) {
  if (k >= a.params.size()) throw kf::DomainError("gen " + a.kind + ": missing " + name);
  const std::string& s = a.params[k];
  kf::index_t v = 0;
  const auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || p != s.data() + s.size()) {
    throw kf::DomainError("gen " + a.kind + ": " + name + " must be an integer, got '" + s + "'");
  }
  return v;
}

double real_param(const GenArgs& a, std::size_t k, const char* name) {
  if (k >= a.params.size()) throw kf::DomainError("gen " + a.kind + ": missing " + name);
  const std::string& s = a.params[k];
  double v = 0;
  const auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || p != s.data() + s.size()) {
    throw kf::DomainError("gen " + a.kind + ": " + name + " must be a number, got '" + s + "'");
  }
  return v;
}

std::vector<kf::index_t> size_list(const GenArgs& a, std::size_t k) {
  if (k >= a.params.size()) throw kf::DomainError("gen " + a.kind + ": missing size list");
  std::vector<kf::index_t> out;
  std::stringstream ss(a.params[k]);
  std::string item;
  while (std::getline(ss, item, ',')) {
    GenArgs one{a.kind, {item}, 0, ""};
    out.push_back(int_param(one, 0, "size"));
  }
  if (out.empty()) throw kf::DomainError("gen " + a.kind + ": empty size list");
  return out;
}

void expect_params(const GenArgs& a, std::size_t count, const char* usage) {
  if (a.params.size() != count) {
    throw kf::DomainError("usage: gen " + a.kind + " " + usage);
  }
}

int run_gen(const GenArgs& a) {
  kf::Rng rng(a.seed);
  std::optional<kf::BinaryPattern> pattern;
  std::optional<kf::DenseRealMatrix> real;
  if (a.kind == "identity") {
    expect_params(a, 1, "N");
    pattern = kf::identity_pattern(int_param(a, 0, "N"));
  } else if (a.kind == "ones") {
    expect_params(a, 1, "N");
    pattern = kf::ones_pattern(int_param(a, 0, "N"));
  } else if (a.kind == "basis") {
    expect_params(a, 3, "N I J");
    pattern = kf::basis_pattern(int_param(a, 0, "N"), int_param(a, 1, "I"), int_param(a, 2, "J"));
  } else if (a.kind == "random") {
    expect_params(a, 2, "N DENSITY");
    pattern = kf::random_pattern(int_param(a, 0, "N"), real_param(a, 1, "DENSITY"), rng);
  } else if (a.kind == "banded") {
    expect_params(a, 3, "N LOWER UPPER");
    pattern = kf::banded_pattern(int_param(a, 0, "N"), int_param(a, 1, "LOWER"),
                                 int_param(a, 2, "UPPER"));
  } else if (a.kind == "kron") {
    if (a.params.size() < 2) throw kf::DomainError("usage: gen kron FILE FILE [FILE...]");
    std::vector<kf::BinaryPattern> factors;
    for (const auto& path : a.params) factors.push_back(kf::read_pattern(path));
    pattern = kf::kron_pattern(factors);
  } else if (a.kind == "kron-random") {
    expect_params(a, 2, "SIZES DENSITY");
    const double density = real_param(a, 1, "DENSITY");
    std::vector<kf::BinaryPattern> factors;
    for (kf::index_t s : size_list(a, 0)) factors.push_back(kf::random_nonzero_pattern(s, density, rng));
    pattern = kf::kron_pattern(factors);
  } else if (a.kind == "two-term") {
    expect_params(a, 1, "NT,S1[,S2...]");
    const auto sizes = size_list(a, 0);
    real = kf::two_term_operator(sizes, rng);
  } else {
    throw kf::DomainError("unknown generator '" + a.kind +
                          "' (identity, ones, basis, random, banded, kron, kron-random, two-term)");
  }
  emit(a.out, [&](std::ostream& o) {
    if (pattern) {
      kf::write_matrix_market(o, *pattern);
    } else {
      kf::write_matrix_market_coordinate(o, *real);
    }
  });
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Kronecker factorization of sparsity patterns"};
  app.require_subcommand(1);
  app.set_version_flag("--version", "kronfact 1.0");

  FactorizeArgs fa;
  auto* factorize = app.add_subcommand("factorize", "Find all prime decompositions of a pattern");
  factorize->add_option("input", fa.input, "Matrix Market file")->required();
  factorize->add_option("--pair", fa.pairs, "Only try the split N1 N2 (repeatable)")
      ->type_size(2)
      ->allow_extra_args(false);
  factorize->add_option("--json", fa.json, "Write a JSON report ('-' for stdout)");
  factorize->add_flag("--verify", fa.verify, "Re-check every decomposition by multiplying out");
  factorize->add_flag("--edge-list", fa.edge_list, "Input is a 'u v' edge list");
  factorize->add_flag("-q,--quiet", fa.quiet, "No summary on stdout");
  factorize->add_option("--threads", fa.threads, "Worker threads (0: all cores)");

  GraphArgs ga;
  auto* graph = app.add_subcommand("graph", "Export the decomposition graph as DOT");
  graph->add_option("input", ga.input, "Matrix Market file")->required();
  graph->add_option("--dot", ga.dot, "Output file ('-' for stdout)");
  graph->add_flag("--edge-list", ga.edge_list, "Input is a 'u v' edge list");
  graph->add_option("--threads", ga.threads, "Worker threads (0: all cores)");

  LayoutArgs la;
  auto* layout = app.add_subcommand("layout", "Hierarchical circular layout of a Kronecker graph");
  layout->add_option("input", la.input, "Matrix Market file or edge list")->required();
  layout->add_option("--sizes", la.sizes, "Factor sizes, outermost first")->delimiter(',');
  layout->add_option("--radii", la.radii, "Circle radii per level")->delimiter(',');
  layout->add_option("--shift", la.shift, "Phase shift in radians (default pi/2)");
  layout->add_option("--svg", la.svg, "SVG output ('-' for stdout)");
  layout->add_option("--json", la.json, "JSON positions output ('-' for stdout)");
  layout->add_option("--opacity", la.opacity, "Edge opacity");
  layout->add_option("--width", la.width, "Drawing width in pixels");
  layout->add_flag("--arrows", la.arrows, "Draw arrow heads");
  layout->add_flag("--edge-list", la.edge_list, "Input is a 'u v' edge list");

  NkpArgs na;
  auto* nkp = app.add_subcommand("nkp", "Nearest Kronecker product approximation");
  nkp->add_option("input", na.input, "Matrix Market file with real values")->required();
  nkp->add_option("--sizes", na.sizes, "Factor sizes (default: from the sparsity pattern)")
      ->delimiter(',');
  nkp->add_option("--tol", na.tol, "Power iteration tolerance");
  nkp->add_option("--maxit", na.maxit, "Power iteration limit");
  nkp->add_option("--out", na.out, "Write factors to PREFIX_k.mtx");
  nkp->add_option("--json", na.json, "JSON report ('-' for stdout)");
  nkp->add_option("--threads", na.threads, "Worker threads for the sparsity analysis");

  GenArgs gen_args;
  auto* gen = app.add_subcommand("gen", "Generate test fixtures");
  gen->add_option("kind", gen_args.kind,
                  "identity N | ones N | basis N I J | random N DENSITY | banded N L U | "
                  "kron FILE... | kron-random SIZES DENSITY | two-term NT,S1,...")
      ->required();
  gen->add_option("params", gen_args.params, "Generator parameters");
  gen->add_option("--seed", gen_args.seed, "Random seed");
  gen->add_option("--out", gen_args.out, "Output file ('-' for stdout)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::Success& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kDomain;
  }

  try {
    if (*factorize) return run_factorize(fa);
    if (*graph) return run_graph(ga);
    if (*layout) return run_layout(la);
    if (*nkp) return run_nkp(na);
    if (*gen) return run_gen(gen_args);
  } catch (const kf::ParseError& e) {
    std::cerr << "kronfact: parse error: " << e.what() << '\n';
    return kParse;
  } catch (const kf::NonConvergenceError& e) {
    std::cerr << "kronfact: " << e.what() << '\n';
    return kNoConvergence;
  } catch (const kf::ConsistencyError& e) {
    std::cerr << "kronfact: consistency check failed: " << e.what() << '\n';
    return kConsistency;
  } catch (const std::domain_error& e) {
    std::cerr << "kronfact: " << e.what() << '\n';
    return kDomain;
  } catch (const std::exception& e) {
    std::cerr << "kronfact: " << e.what() << '\n';
    return kParse;
  }
  return kDomain;
}
