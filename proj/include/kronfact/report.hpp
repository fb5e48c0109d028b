#pragma once

// JSON reports. Objects use nlohmann::json's default std::map storage, so keys
// come out sorted; integers are unquoted and reals use the shortest decimal
// form that round-trips.

#include <ostream>
#include <string>
#include <vector>

#include <json.hpp>

#include "kronfact/branches.hpp"
#include "kronfact/io.hpp"
#include "kronfact/layout.hpp"
#include "kronfact/nkp.hpp"

namespace kronfact {

inline constexpr const char* kSchema = "kronfact/1";

inline nlohmann::json pattern_json(const BinaryPattern& p) {
  nlohmann::json entries = nlohmann::json::array();
  for (const Coordinate& c : p.coordinates()) entries.push_back({c.row, c.col});
  return {{"size", p.size()}, {"nnz", p.nnz()}, {"entries", std::move(entries)}};
}

/// Report for one run of the factorization pipeline.
inline nlohmann::json factorization_report(const Analysis& a, bool verified) {
  nlohmann::json pairs = nlohmann::json::array();
  for (const auto& p : a.pairs_tested) pairs.push_back({p.left, p.right});

  nlohmann::json length2 = nlohmann::json::array();
  for (const auto& f : a.length2) {
    length2.push_back({{"n1", f.sizes.left},
                       {"n2", f.sizes.right},
                       {"left_nnz", f.left.nnz()},
                       {"right_nnz", f.right.nnz()}});
  }

  nlohmann::json branches = nlohmann::json::array();
  nlohmann::json decompositions = nlohmann::json::array();
  for (std::size_t k = 0; k < a.branches.size(); ++k) {
    const int id = static_cast<int>(k) + 1;
    branches.push_back({{"id", id},
                        {"chain", a.branches[k].chain},
                        {"weights", a.branches[k].weights},
                        {"sizes", sizes_of(a.branches[k], a.n)}});
    nlohmann::json factors = nlohmann::json::array();
    for (const auto& f : a.decompositions[k].factors) factors.push_back(pattern_json(f));
    decompositions.push_back({{"branch", id},
                              {"sizes", a.decompositions[k].sizes},
                              {"length", a.decompositions[k].sizes.size()},
                              {"factors", std::move(factors)}});
  }

  return {{"schema", kSchema},
          {"kind", "factorization"},
          {"n", a.n},
          {"nnz", a.nnz},
          {"pairs_tested", std::move(pairs)},
          {"length2", std::move(length2)},
          {"branches", std::move(branches)},
          {"decompositions", std::move(decompositions)},
          {"prime", a.prime()},
          {"maximal", a.maximal},
          {"restricted_pairs", !a.complete},
          {"primality_guaranteed", a.complete},
          {"verified", verified}};
}

inline nlohmann::json nkp_report(const NkpResult& r, double input_norm,
                                 const std::vector<std::string>& factor_files) {
  return {{"schema", kSchema},
          {"kind", "nkp"},
          {"method", r.sizes.size() == 2 ? "rank-1 rearrangement"
                                         : "greedy left-to-right rank-1 rearrangement"},
          {"sizes", r.sizes},
          {"sigma", r.sigma},
          {"frobenius_error", r.frobenius_error},
          {"relative_error", input_norm > 0.0 ? r.frobenius_error / input_norm : 0.0},
          {"input_norm", input_norm},
          {"factors", factor_files}};
}

inline nlohmann::json layout_report(const LayoutConfig& cfg, const LayoutResult& layout,
                                    std::size_t edge_count) {
  nlohmann::json vertices = nlohmann::json::array();
  for (std::size_t v = 0; v < layout.positions.size(); ++v) {
    const auto id = static_cast<index_t>(v) + 1;
    vertices.push_back({{"id", id},
                        {"multi_index", multi_index_of(id, layout.sizes)},
                        {"x", layout.positions[v].real()},
                        {"y", layout.positions[v].imag()}});
  }
  return {{"schema", kSchema},
          {"kind", "layout"},
          {"sizes", cfg.sizes},
          {"radii", cfg.radii},
          {"phase_shift", cfg.phase_shift},
          {"edges", edge_count},
          {"vertices", std::move(vertices)}};
}

inline void write_json(std::ostream& out, const nlohmann::json& j) { out << j.dump(2) << '\n'; }

inline void write_json(const std::string& path, const nlohmann::json& j) {
  auto out = detail::open_output(path);
  write_json(out, j);
}

}  // namespace kronfact
