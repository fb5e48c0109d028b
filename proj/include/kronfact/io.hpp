#pragma once

// Readers and writers: Matrix Market (pattern and real), whitespace edge
// lists, Graphviz DOT for decomposition graphs, SVG for layouts.

#include <algorithm>
#include <array>
#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>
#include <string_view>
#include <system_error>
#include <utility>
#include <variant>
#include <vector>

#include "kronfact/branches.hpp"
#include "kronfact/errors.hpp"
#include "kronfact/layout.hpp"
#include "kronfact/nkp.hpp"
#include "kronfact/pattern.hpp"

namespace kronfact {

using MatrixData = std::variant<BinaryPattern, DenseRealMatrix>;

struct MatrixMarketHeader {
  enum class Format { coordinate, array };
  enum class Field { pattern, real };
  enum class Symmetry { general, symmetric, skew_symmetric };

  Format format = Format::coordinate;
  Field field = Field::pattern;
  Symmetry symmetry = Symmetry::general;
};

namespace detail {

inline std::string lower(std::string_view s) {
  std::string out(s);
  for (char& c : out) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return out;
}

inline std::vector<std::string_view> tokens(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t k = 0;
  while (k < line.size()) {
    while (k < line.size() && std::isspace(static_cast<unsigned char>(line[k]))) ++k;
    const std::size_t b = k;
    while (k < line.size() && !std::isspace(static_cast<unsigned char>(line[k]))) ++k;
    if (k > b) out.push_back(line.substr(b, k - b));
  }
  return out;
}

inline index_t parse_index(std::string_view tok, std::int64_t line) {
  index_t v = 0;
  const auto [p, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), v);
  if (ec != std::errc() || p != tok.data() + tok.size()) {
    throw ParseError("expected an integer, got '" + std::string(tok) + "'", line);
  }
  return v;
}

inline double parse_real(std::string_view tok, std::int64_t line) {
  double v = 0.0;
  const char* first = tok.data();
  if (!tok.empty() && tok.front() == '+') ++first;
  const auto [p, ec] = std::from_chars(first, tok.data() + tok.size(), v);
  if (ec != std::errc() || p != tok.data() + tok.size() || !std::isfinite(v)) {
    throw ParseError("expected a finite real, got '" + std::string(tok) + "'", line);
  }
  return v;
}

/// Line reader that skips comments and blank lines, tracking line numbers.
class LineReader {
 public:
  explicit LineReader(std::istream& in) : in_(in) {}

  bool next(std::string& line) {
    while (std::getline(in_, line)) {
      ++number_;
      const auto first = line.find_first_not_of(" \t\r");
      if (first == std::string::npos || line[first] == '%') continue;
      return true;
    }
    return false;
  }

  bool raw(std::string& line) {
    if (!std::getline(in_, line)) return false;
    ++number_;
    return true;
  }

  std::int64_t number() const noexcept { return number_; }

 private:
  std::istream& in_;
  std::int64_t number_ = 0;
};

inline MatrixMarketHeader parse_header(const std::string& line) {
  const auto t = tokens(line);
  if (t.size() != 5 || lower(t[0]) != "%%matrixmarket" || lower(t[1]) != "matrix") {
    throw ParseError("missing '%%MatrixMarket matrix <format> <field> <symmetry>' header", 1);
  }
  MatrixMarketHeader h;
  const std::string format = lower(t[2]);
  const std::string field = lower(t[3]);
  const std::string symmetry = lower(t[4]);
  if (format == "coordinate") {
    h.format = MatrixMarketHeader::Format::coordinate;
  } else if (format == "array") {
    h.format = MatrixMarketHeader::Format::array;
  } else {
    throw ParseError("unsupported format '" + format + "'", 1);
  }
  if (field == "pattern") {
    h.field = MatrixMarketHeader::Field::pattern;
  } else if (field == "real" || field == "integer" || field == "double") {
    h.field = MatrixMarketHeader::Field::real;
  } else {
    throw ParseError("unsupported field '" + field + "'", 1);
  }
  if (symmetry == "general") {
    h.symmetry = MatrixMarketHeader::Symmetry::general;
  } else if (symmetry == "symmetric") {
    h.symmetry = MatrixMarketHeader::Symmetry::symmetric;
  } else if (symmetry == "skew-symmetric") {
    h.symmetry = MatrixMarketHeader::Symmetry::skew_symmetric;
  } else {
    throw ParseError("unsupported symmetry '" + symmetry + "'", 1);
  }
  if (h.format == MatrixMarketHeader::Format::array &&
      h.field == MatrixMarketHeader::Field::pattern) {
    throw ParseError("array format cannot carry a pattern field", 1);
  }
  if (h.field == MatrixMarketHeader::Field::pattern &&
      h.symmetry == MatrixMarketHeader::Symmetry::skew_symmetric) {
    throw ParseError("pattern matrices cannot be skew-symmetric", 1);
  }
  return h;
}

/// Entries as (0-based column-major offset, value), duplicates summed,
/// symmetric parts expanded. Values are 1 for pattern files.
struct RawMatrix {
  MatrixMarketHeader header;
  index_t n = 0;
  std::vector<std::pair<index_t, double>> entries;  // sorted by offset, unique
};

inline RawMatrix read_raw(std::istream& in) {
  LineReader reader(in);
  std::string line;
  if (!reader.raw(line)) throw ParseError("empty input", 1);
  RawMatrix m;
  m.header = parse_header(line);
  const bool coordinate = m.header.format == MatrixMarketHeader::Format::coordinate;
  const bool pattern = m.header.field == MatrixMarketHeader::Field::pattern;

  if (!reader.next(line)) throw ParseError("missing size line", reader.number() + 1);
  const auto dims = tokens(line);
  if (dims.size() != (coordinate ? 3u : 2u)) {
    throw ParseError("size line must hold " + std::string(coordinate ? "3" : "2") + " integers",
                     reader.number());
  }
  const index_t rows = parse_index(dims[0], reader.number());
  const index_t cols = parse_index(dims[1], reader.number());
  if (rows < 1 || cols < 1 || rows > kMaxSize || cols > kMaxSize) {
    throw ParseError("matrix dimensions must be positive and at most 2^31-1", reader.number());
  }
  if (rows != cols) {
    throw DomainError("matrix is " + std::to_string(rows) + "x" + std::to_string(cols) +
                      ", only square matrices are supported");
  }
  const index_t n = rows;
  m.n = n;
  const auto symmetry = m.header.symmetry;

  auto add = [&](index_t i, index_t j, double v) {
    m.entries.emplace_back(j * n + i, v);
    if (symmetry != MatrixMarketHeader::Symmetry::general && i != j) {
      m.entries.emplace_back(i * n + j,
                             symmetry == MatrixMarketHeader::Symmetry::skew_symmetric ? -v : v);
    }
  };

  if (coordinate) {
    const index_t count = parse_index(dims[2], reader.number());
    if (count < 0) throw ParseError("negative entry count", reader.number());
    m.entries.reserve(static_cast<std::size_t>(count));
    for (index_t k = 0; k < count; ++k) {
      if (!reader.next(line)) {
        throw ParseError("expected " + std::to_string(count) + " entries, found " +
                             std::to_string(k),
                         reader.number() + 1);
      }
      const auto t = tokens(line);
      if (t.size() != (pattern ? 2u : 3u)) {
        throw ParseError(pattern ? "pattern entries hold 2 integers"
                                 : "real entries hold 2 integers and a value",
                         reader.number());
      }
      const index_t i = parse_index(t[0], reader.number());
      const index_t j = parse_index(t[1], reader.number());
      if (i < 1 || i > n || j < 1 || j > n) {
        throw ParseError("entry (" + std::to_string(i) + "," + std::to_string(j) +
                             ") outside a matrix of size " + std::to_string(n),
                         reader.number());
      }
      if (symmetry != MatrixMarketHeader::Symmetry::general && i < j) {
        throw ParseError("symmetric storage expects the lower triangle only", reader.number());
      }
      add(i - 1, j - 1, pattern ? 1.0 : parse_real(t[2], reader.number()));
    }
  } else {
    const bool skew = symmetry == MatrixMarketHeader::Symmetry::skew_symmetric;
    for (index_t j = 0; j < n; ++j) {
      const index_t first_row = symmetry == MatrixMarketHeader::Symmetry::general ? 0
                                : skew                                           ? j + 1
                                                                                 : j;
      for (index_t i = first_row; i < n; ++i) {
        if (!reader.next(line)) throw ParseError("array data ended early", reader.number() + 1);
        const auto t = tokens(line);
        if (t.size() != 1) throw ParseError("array entries hold one value", reader.number());
        add(i, j, parse_real(t[0], reader.number()));
      }
    }
  }
  if (reader.next(line)) throw ParseError("unexpected data after the last entry", reader.number());

  std::sort(m.entries.begin(), m.entries.end(),
            [](const auto& a, const auto& b) { return a.first < b.first; });
  std::size_t out = 0;
  for (std::size_t k = 0; k < m.entries.size(); ++k) {
    if (out > 0 && m.entries[out - 1].first == m.entries[k].first) {
      if (!pattern) m.entries[out - 1].second += m.entries[k].second;
    } else {
      m.entries[out++] = m.entries[k];
    }
  }
  m.entries.resize(out);
  return m;
}

inline std::ifstream open_input(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open '" + path + "'", 0);
  return in;
}

inline std::ofstream open_output(const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write '" + path + "'");
  return out;
}

inline std::string format_real(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

/// Fixed 6-decimal formatting for drawing coordinates; never prints "-0".
inline std::string format_fixed(double x) {
  char buf[48];
  std::snprintf(buf, sizeof buf, "%.6f", x);
  std::string s(buf);
  if (s.find_first_not_of("-0.") == std::string::npos && s.front() == '-') s.erase(0, 1);
  return s;
}

}  // namespace detail

/// Pattern files load as BinaryPattern; real, integer and array files load
/// as DenseRealMatrix.
inline MatrixData read_matrix_market(std::istream& in) {
  detail::RawMatrix raw = detail::read_raw(in);
  if (raw.header.field == MatrixMarketHeader::Field::pattern) {
    std::vector<index_t> offsets;
    offsets.reserve(raw.entries.size());
    for (const auto& e : raw.entries) offsets.push_back(e.first);
    return BinaryPattern::from_sorted_offsets(raw.n, std::move(offsets));
  }
  DenseRealMatrix b(raw.n, raw.n);
  for (const auto& [off, v] : raw.entries) b.values()[static_cast<std::size_t>(off)] = v;
  return b;
}

inline MatrixData read_matrix_market(const std::string& path) {
  auto in = detail::open_input(path);
  return read_matrix_market(in);
}

/// Sparsity pattern of any Matrix Market file; for real files the pattern of
/// the nonzero values after duplicate summation. Never densifies.
inline BinaryPattern read_pattern(std::istream& in) {
  detail::RawMatrix raw = detail::read_raw(in);
  std::vector<index_t> offsets;
  offsets.reserve(raw.entries.size());
  for (const auto& e : raw.entries) {
    if (e.second != 0.0) offsets.push_back(e.first);
  }
  return BinaryPattern::from_sorted_offsets(raw.n, std::move(offsets));
}

inline BinaryPattern read_pattern(const std::string& path) {
  auto in = detail::open_input(path);
  return read_pattern(in);
}

/// Dense real matrix from any Matrix Market file; pattern entries become 1.
inline DenseRealMatrix read_real(std::istream& in) {
  detail::RawMatrix raw = detail::read_raw(in);
  DenseRealMatrix b(raw.n, raw.n);
  for (const auto& [off, v] : raw.entries) b.values()[static_cast<std::size_t>(off)] = v;
  return b;
}

inline DenseRealMatrix read_real(const std::string& path) {
  auto in = detail::open_input(path);
  return read_real(in);
}

/// Whitespace-separated "u v" pairs, 1-based; '#' and '%' start comments.
/// With n == 0 the size is the largest vertex id seen.
inline BinaryPattern read_edge_list(std::istream& in, index_t n = 0) {
  std::vector<std::pair<index_t, index_t>> edges;
  std::string line;
  std::int64_t number = 0;
  index_t largest = 0;
  while (std::getline(in, line)) {
    ++number;
    const auto cut = line.find_first_of("#%");
    const auto t = detail::tokens(std::string_view(line).substr(0, cut));
    if (t.empty()) continue;
    if (t.size() != 2) throw ParseError("edge lines hold two vertex ids", number);
    const index_t u = detail::parse_index(t[0], number);
    const index_t v = detail::parse_index(t[1], number);
    if (u < 1 || v < 1 || (n > 0 && (u > n || v > n))) {
      throw ParseError("vertex id out of range", number);
    }
    largest = std::max({largest, u, v});
    edges.emplace_back(u, v);
  }
  const index_t size = n > 0 ? n : std::max<index_t>(largest, 1);
  check_size(size);
  std::vector<Coordinate> coords;
  coords.reserve(edges.size());
  for (const auto& [u, v] : edges) coords.push_back({u, v});
  return BinaryPattern::from_coordinates(size, coords);
}

inline BinaryPattern read_edge_list(const std::string& path, index_t n = 0) {
  auto in = detail::open_input(path);
  return read_edge_list(in, n);
}

inline void write_matrix_market(std::ostream& out, const BinaryPattern& a) {
  out << "%%MatrixMarket matrix coordinate pattern general\n";
  out << a.size() << ' ' << a.size() << ' ' << a.nnz() << '\n';
  for (const Coordinate& c : a.coordinates()) out << c.row << ' ' << c.col << '\n';
}

/// Dense "array real general" output with 17 significant digits.
inline void write_matrix_market(std::ostream& out, const DenseRealMatrix& b) {
  out << "%%MatrixMarket matrix array real general\n";
  out << b.rows() << ' ' << b.cols() << '\n';
  for (double x : b.values()) out << detail::format_real(x) << '\n';
}

/// Nonzero entries only, "coordinate real general".
inline void write_matrix_market_coordinate(std::ostream& out, const DenseRealMatrix& b) {
  index_t count = 0;
  for (double x : b.values()) count += x != 0.0;
  out << "%%MatrixMarket matrix coordinate real general\n";
  out << b.rows() << ' ' << b.cols() << ' ' << count << '\n';
  for (index_t j = 0; j < b.cols(); ++j) {
    for (index_t i = 0; i < b.rows(); ++i) {
      if (b(i, j) != 0.0) {
        out << i + 1 << ' ' << j + 1 << ' ' << detail::format_real(b(i, j)) << '\n';
      }
    }
  }
}

template <typename Matrix>
void write_matrix_market(const std::string& path, const Matrix& m) {
  auto out = detail::open_output(path);
  write_matrix_market(out, m);
}

/// Branch colors, cycled by branch id.
inline constexpr std::array<std::string_view, 12> kBranchPalette = {
    "#1f77b4", "#ff7f0e", "#2ca02c", "#d62728", "#9467bd", "#8c564b",
    "#e377c2", "#7f7f7f", "#bcbd22", "#17becf", "#393b79", "#637939"};

inline std::string_view branch_color(int branch_id) {
  return kBranchPalette[static_cast<std::size_t>(branch_id - 1) % kBranchPalette.size()];
}

/// Vertices ascending, then edges by (branch id, position along the path).
inline void write_dot(std::ostream& out, const DecompositionGraph& g) {
  out << "digraph decomposition {\n";
  out << "  graph [rankdir=LR, label=\"n = " << g.n << "\"];\n";
  out << "  node [shape=circle];\n";
  for (index_t v : g.vertices) {
    out << "  " << v << " [label=\"" << v << "\"";
    for (const auto& [id, root] : g.isolated) {
      if (root == v) {
        out << ", color=\"" << branch_color(id) << "\", xlabel=\"branch " << id << "\"";
      }
    }
    out << "];\n";
  }
  std::vector<GraphEdge> edges = g.edges;
  std::stable_sort(edges.begin(), edges.end(), [](const GraphEdge& a, const GraphEdge& b) {
    return std::pair(a.branch, a.position) < std::pair(b.branch, b.position);
  });
  for (const auto& e : edges) {
    out << "  " << e.from << " -> " << e.to << " [label=\"" << e.weight << " (branch "
        << e.branch << ")\", color=\"" << branch_color(e.branch) << "\", fontcolor=\""
        << branch_color(e.branch) << "\"];\n";
  }
  out << "}\n";
}

inline void write_dot(const std::string& path, const DecompositionGraph& g) {
  auto out = detail::open_output(path);
  write_dot(out, g);
}

struct SvgStyle {
  double width_px = 800.0;
  double edge_opacity = 0.5;
  bool arrows = false;
  std::string vertex_color = "#222222";
  std::string edge_color = "#1f77b4";
};

/// Vertex radius: a quarter of the spacing between neighbours on the
/// innermost circles.
inline double vertex_radius(const LayoutResult& layout, std::span<const double> radii) {
  const double r = radii.empty() ? 1.0 : radii.back();
  const index_t n = layout.sizes.empty() ? 1 : layout.sizes.back();
  const double spacing = n > 1 ? 2.0 * r * std::sin(std::numbers::pi / static_cast<double>(n)) : r;
  return 0.25 * spacing;
}

/// Static drawing: y grows upwards (the SVG y axis is flipped); viewBox is
/// the bounding box plus a 5% margin. Self-loops are drawn as small arcs.
inline void write_svg(std::ostream& out, const LayoutResult& layout,
                      std::span<const double> radii, std::span<const Segment> segments,
                      const SvgStyle& style = {}) {
  using detail::format_fixed;
  const double vr = vertex_radius(layout, radii);
  double xmin = 0.0, xmax = 0.0, ymin = 0.0, ymax = 0.0;
  bool first = true;
  for (const Point& p : layout.positions) {
    const double x = p.real();
    const double y = -p.imag();
    if (first) {
      xmin = xmax = x;
      ymin = ymax = y;
      first = false;
    }
    xmin = std::min(xmin, x - 3 * vr);
    xmax = std::max(xmax, x + 3 * vr);
    ymin = std::min(ymin, y - 3 * vr);
    ymax = std::max(ymax, y + 3 * vr);
  }
  const double span = std::max(xmax - xmin, ymax - ymin);
  const double margin = 0.05 * (span > 0.0 ? span : 1.0);
  const double vx = xmin - margin;
  const double vy = ymin - margin;
  const double vw = xmax - xmin + 2 * margin;
  const double vh = ymax - ymin + 2 * margin;
  const double height_px = style.width_px * vh / vw;
  const double stroke = 0.3 * vr;

  out << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << format_fixed(style.width_px)
      << "\" height=\"" << format_fixed(height_px) << "\" viewBox=\"" << format_fixed(vx) << ' '
      << format_fixed(vy) << ' ' << format_fixed(vw) << ' ' << format_fixed(vh) << "\">\n";
  if (style.arrows) {
    out << "<defs><marker id=\"arrow\" viewBox=\"0 0 10 10\" refX=\"10\" refY=\"5\" "
           "markerWidth=\"6\" markerHeight=\"6\" orient=\"auto-start-reverse\">"
           "<path d=\"M 0 0 L 10 5 L 0 10 z\" fill=\""
        << style.edge_color << "\"/></marker></defs>\n";
  }
  out << "<g stroke=\"" << style.edge_color << "\" stroke-opacity=\""
      << format_fixed(style.edge_opacity) << "\" stroke-width=\"" << format_fixed(stroke)
      << "\" fill=\"none\">\n";
  for (const Segment& s : segments) {
    if (s.self_loop) {
      const double x = s.from.real();
      const double y = -s.from.imag();
      out << "<path class=\"loop\" d=\"M " << format_fixed(x) << ' ' << format_fixed(y - vr)
          << " a " << format_fixed(vr) << ' ' << format_fixed(vr) << " 0 1 1 "
          << format_fixed(0.001 * vr) << " 0\"/>\n";
      continue;
    }
    out << "<line x1=\"" << format_fixed(s.from.real()) << "\" y1=\""
        << format_fixed(-s.from.imag()) << "\" x2=\"" << format_fixed(s.to.real()) << "\" y2=\""
        << format_fixed(-s.to.imag()) << "\"";
    if (style.arrows) out << " marker-end=\"url(#arrow)\"";
    out << "/>\n";
  }
  out << "</g>\n";
  out << "<g fill=\"" << style.vertex_color << "\" stroke=\"none\">\n";
  for (std::size_t v = 0; v < layout.positions.size(); ++v) {
    const Point& p = layout.positions[v];
    out << "<circle id=\"v" << v + 1 << "\" cx=\"" << format_fixed(p.real()) << "\" cy=\""
        << format_fixed(-p.imag()) << "\" r=\"" << format_fixed(vr) << "\"/>\n";
  }
  out << "</g>\n</svg>\n";
}

inline void write_svg(const std::string& path, const LayoutResult& layout,
                      std::span<const double> radii, std::span<const Segment> segments,
                      const SvgStyle& style = {}) {
  auto out = detail::open_output(path);
  write_svg(out, layout, radii, segments, style);
}

}  // namespace kronfact
