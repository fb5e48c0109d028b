#pragma once

// Hand-built patterns shared by the unit tests and the acceptance binary.

#include <vector>

#include "kronfact/pattern.hpp"

namespace kronfact::fixtures {

/// Dense 0/1 rows -> pattern.
inline BinaryPattern from_rows(const std::vector<std::vector<int>>& rows) {
  const auto n = static_cast<index_t>(rows.size());
  std::vector<Coordinate> entries;
  for (index_t i = 0; i < n; ++i) {
    for (index_t j = 0; j < n; ++j) {
      if (rows[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] != 0) {
        entries.push_back({i + 1, j + 1});
      }
    }
  }
  return BinaryPattern::from_coordinates(n, entries);
}

inline BinaryPattern top_row_2() { return from_rows({{1, 1}, {0, 0}}); }
inline BinaryPattern outer_rows_3() { return from_rows({{1, 1, 1}, {0, 0, 0}, {1, 1, 1}}); }

/// 12x12 pattern factorizable for every compatible pair.
inline BinaryPattern maximal_12() {
  const BinaryPattern f[] = {top_row_2(), top_row_2(), outer_rows_3()};
  return kron_pattern(f);
}

/// 12x12 pattern whose length-2 factorizations have left sizes {2, 3, 4}.
inline BinaryPattern three_left_sizes_12() {
  const BinaryPattern e11_3 = basis_pattern(3, 1, 1);
  const BinaryPattern corners_4 = BinaryPattern::from_coordinates(4, {{1, 1}, {4, 1}});
  return kron_pattern(e11_3, corners_4);
}

/// 6x6 maximal pattern [[1,0],[1,0]] (x) [[1,0,1],[1,0,1],[1,0,1]].
inline BinaryPattern maximal_6() {
  return kron_pattern(from_rows({{1, 0}, {1, 0}}), from_rows({{1, 0, 1}, {1, 0, 1}, {1, 0, 1}}));
}

inline BinaryPattern adjacency_4() {
  return from_rows({{1, 0, 0, 0}, {1, 1, 0, 0}, {1, 1, 1, 0}, {0, 0, 0, 1}});
}
inline BinaryPattern adjacency_3() { return from_rows({{1, 0, 0}, {1, 1, 0}, {0, 0, 1}}); }
inline BinaryPattern adjacency_2() { return from_rows({{0, 1}, {1, 0}}); }

/// 24-vertex graph with factor sizes (4, 3, 2).
inline BinaryPattern adjacency_24() {
  const BinaryPattern f[] = {adjacency_4(), adjacency_3(), adjacency_2()};
  return kron_pattern(f);
}

inline BinaryPattern diagonal_three_4() {
  return BinaryPattern::from_coordinates(4, {{1, 1}, {2, 2}, {3, 3}});
}

inline BinaryPattern lower_corner_4() {
  return BinaryPattern::from_coordinates(4, {{1, 1}, {2, 1}, {2, 2}});
}

}  // namespace kronfact::fixtures
