#pragma once

// Hierarchical circular layout for graphs whose adjacency matrix is a
// Kronecker product with factor sizes (n1, ..., nd).
//
// Level j places n_j points on a circle of radius r_j. A vertex with
// multi-index (k1, ..., kd) sits at
//   g1 = z1[k1] + rot1[k1] * (z2[k2] + rot2[k2] * (... + rot(d-1) * zd[kd]))
// where rot_j[k] = exp(i * (arg z_j[k] + shift)).
//
// Vertex numbering follows the Kronecker row index,
//   1 + sum_i (k_i - 1) * prod_{j > i} n_j,
// so entry (u, v) of the pattern connects the vertices numbered u and v.

#include <cmath>
#include <complex>
#include <cstdint>
#include <numbers>
#include <span>
#include <string>
#include <vector>

#include "kronfact/errors.hpp"
#include "kronfact/pattern.hpp"

namespace kronfact {

using Point = std::complex<double>;

struct LayoutConfig {
  std::vector<index_t> sizes;
  std::vector<double> radii;
  double phase_shift = std::numbers::pi / 2.0;
};

/// r1 = 1, r(j+1) = 0.35 * r(j).
inline std::vector<double> default_radii(std::size_t levels) {
  std::vector<double> radii;
  double r = 1.0;
  for (std::size_t j = 0; j < levels; ++j, r *= 0.35) radii.push_back(r);
  return radii;
}

inline LayoutConfig make_layout_config(std::vector<index_t> sizes) {
  LayoutConfig cfg;
  cfg.radii = default_radii(sizes.size());
  cfg.sizes = std::move(sizes);
  return cfg;
}

inline void validate(const LayoutConfig& cfg) {
  if (cfg.sizes.empty()) throw DomainError("layout needs at least one level");
  if (cfg.radii.size() != cfg.sizes.size()) {
    throw DomainError("layout needs one radius per level");
  }
  for (std::size_t j = 0; j < cfg.sizes.size(); ++j) {
    if (cfg.sizes[j] < 1) throw DomainError("layout sizes must be positive");
    if (!(cfg.radii[j] > 0.0) || !std::isfinite(cfg.radii[j])) {
      throw DomainError("layout radii must be positive and finite");
    }
    if (j > 0 && !(cfg.radii[j] < cfg.radii[j - 1])) {
      throw DomainError("layout radii must be strictly decreasing");
    }
  }
  if (!std::isfinite(cfg.phase_shift)) throw DomainError("phase shift must be finite");
}

/// r * exp(2 pi i (k - 1) / n), k = 1..n.
inline std::vector<Point> circle_points(index_t n, double r) {
  if (n < 1 || !(r > 0.0)) throw DomainError("circle_points needs n >= 1 and r > 0");
  std::vector<Point> out;
  out.reserve(static_cast<std::size_t>(n));
  for (index_t k = 0; k < n; ++k) {
    out.push_back(std::polar(r, 2.0 * std::numbers::pi * static_cast<double>(k) /
                                    static_cast<double>(n)));
  }
  return out;
}

struct LayoutResult {
  std::vector<index_t> sizes;
  /// positions[v - 1] is the position of vertex v.
  std::vector<Point> positions;
};

inline index_t vertex_row_index(std::span<const index_t> multi_index,
                                std::span<const index_t> sizes) {
  if (multi_index.size() != sizes.size()) {
    throw DomainError("multi-index length does not match the number of levels");
  }
  index_t v = 0;
  for (std::size_t i = 0; i < sizes.size(); ++i) {
    if (multi_index[i] < 1 || multi_index[i] > sizes[i]) {
      throw DomainError("multi-index component out of range");
    }
    v = v * sizes[i] + (multi_index[i] - 1);
  }
  return v + 1;
}

inline std::vector<index_t> multi_index_of(index_t vertex, std::span<const index_t> sizes) {
  index_t total = 1;
  for (index_t s : sizes) total *= s;
  if (vertex < 1 || vertex > total) throw DomainError("vertex index out of range");
  std::vector<index_t> k(sizes.size());
  index_t rest = vertex - 1;
  for (std::size_t i = sizes.size(); i-- > 0;) {
    k[i] = rest % sizes[i] + 1;
    rest /= sizes[i];
  }
  return k;
}

inline LayoutResult layout_positions(const LayoutConfig& cfg) {
  validate(cfg);
  const std::size_t d = cfg.sizes.size();
  std::vector<std::vector<Point>> z(d);
  std::vector<std::vector<Point>> rot(d);
  for (std::size_t j = 0; j < d; ++j) {
    z[j] = circle_points(cfg.sizes[j], cfg.radii[j]);
    for (index_t k = 0; k < cfg.sizes[j]; ++k) {
      const double theta = 2.0 * std::numbers::pi * static_cast<double>(k) /
                               static_cast<double>(cfg.sizes[j]) +
                           cfg.phase_shift;
      rot[j].push_back(std::polar(1.0, theta));
    }
  }

  index_t total = 1;
  for (index_t s : cfg.sizes) total *= s;
  LayoutResult out;
  out.sizes = cfg.sizes;
  out.positions.reserve(static_cast<std::size_t>(total));
  std::vector<index_t> k(d, 0);  // 0-based digits, last level fastest
  for (index_t v = 0; v < total; ++v) {
    // Innermost level first, matching the bottom-up recursion.
    Point g = z[d - 1][static_cast<std::size_t>(k[d - 1])];
    for (std::size_t j = d - 1; j-- > 0;) {
      const auto kj = static_cast<std::size_t>(k[j]);
      g = z[j][kj] + rot[j][kj] * g;
    }
    out.positions.push_back(g);
    for (std::size_t j = d; j-- > 0;) {
      if (++k[j] < cfg.sizes[j]) break;
      k[j] = 0;
    }
  }
  return out;
}

struct Segment {
  Point from;
  Point to;
  index_t source;  // 1-based vertex ids
  index_t target;
  bool self_loop;
};

/// One segment per entry (u, v) of A, in the pattern's column-major order.
inline std::vector<Segment> edge_segments(const BinaryPattern& a, const LayoutResult& layout) {
  if (static_cast<index_t>(layout.positions.size()) != a.size()) {
    throw DomainError("pattern size " + std::to_string(a.size()) + " does not match " +
                      std::to_string(layout.positions.size()) + " laid-out vertices");
  }
  std::vector<Segment> out;
  out.reserve(static_cast<std::size_t>(a.nnz()));
  for (const Coordinate& c : a.coordinates()) {
    out.push_back({layout.positions[static_cast<std::size_t>(c.row - 1)],
                   layout.positions[static_cast<std::size_t>(c.col - 1)], c.row, c.col,
                   c.row == c.col});
  }
  return out;
}

}  // namespace kronfact
