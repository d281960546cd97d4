#pragma once

// Field exporters: CSV (lossless), 16-bit PGM heatmap, SVG region map.

#include "gaugedist/grid.hpp"

#include <array>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

namespace gaugedist::cli {

inline std::string fmt17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

inline std::string csv_quote(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

/// Rows in grid order (x1 fastest). Nodes outside the domain have an empty rho
/// and the region "outside_domain".
inline std::string field_csv(const FieldGrid& g) {
  std::string out;
  const int n = 2 + static_cast<int>(g.slice.size());
  for (int k = 0; k < n; ++k) out += "x" + std::to_string(k + 1) + ",";
  out += "rho,region,n_closest\n";
  for (int j = 0; j < g.ny; ++j)
    for (int i = 0; i < g.nx; ++i) {
      const std::size_t k = g.index(i, j);
      const Vector x = g.point(i, j);
      for (int a = 0; a < n; ++a) out += fmt17(x[a]) + ",";
      if (g.label[k] < 0) {
        out += ",outside_domain,0\n";
        continue;
      }
      out += fmt17(g.value[k]) + "," + csv_quote(g.labels[static_cast<std::size_t>(g.label[k])]) + "," +
             std::to_string(g.n_closest[k]) + "\n";
    }
  return out;
}

struct CsvRow {
  Vector x;
  double rho = 0.0;  // NaN outside the domain
  std::string region;
  int n_closest = 0;
};

inline std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> out(1);
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    const char c = line[i];
    if (quoted) {
      if (c == '"' && i + 1 < line.size() && line[i + 1] == '"') out.back() += '"', ++i;
      else if (c == '"') quoted = false;
      else out.back() += c;
    } else if (c == '"') {
      quoted = true;
    } else if (c == ',') {
      out.emplace_back();
    } else {
      out.back() += c;
    }
  }
  return out;
}

inline std::vector<CsvRow> read_field_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) fail(ErrorCode::ConfigError, "empty field csv");
  const auto header = split_csv_line(line);
  if (header.size() < 5) fail(ErrorCode::ConfigError, "field csv header too short");
  const std::size_t n = header.size() - 3;
  std::vector<CsvRow> rows;
  long lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    const auto f = split_csv_line(line);
    if (f.size() != header.size()) fail(ErrorCode::ConfigError, "field csv line " + std::to_string(lineno) + ": wrong field count");
    CsvRow r;
    r.x.resize(static_cast<Eigen::Index>(n));
    for (std::size_t a = 0; a < n; ++a) r.x[static_cast<Eigen::Index>(a)] = std::stod(f[a]);
    r.rho = f[n].empty() ? std::numeric_limits<double>::quiet_NaN() : std::stod(f[n]);
    r.region = f[n + 1];
    r.n_closest = std::stoi(f[n + 2]);
    rows.push_back(std::move(r));
  }
  return rows;
}

/// Binary 16-bit PGM, rho min-max normalized over the domain; the top row is the
/// largest x2. Nodes outside the domain are black.
inline std::string field_pgm(const FieldGrid& g) {
  double lo = std::numeric_limits<double>::infinity(), hi = -lo;
  for (std::size_t k = 0; k < g.size(); ++k)
    if (g.label[k] >= 0) lo = std::min(lo, g.value[k]), hi = std::max(hi, g.value[k]);
  std::string out = "P5\n" + std::to_string(g.nx) + " " + std::to_string(g.ny) + "\n65535\n";
  for (int j = g.ny - 1; j >= 0; --j)
    for (int i = 0; i < g.nx; ++i) {
      const std::size_t k = g.index(i, j);
      unsigned v = 0;
      if (g.label[k] >= 0 && hi > lo) v = static_cast<unsigned>(std::lround((g.value[k] - lo) / (hi - lo) * 65535.0));
      out += static_cast<char>((v >> 8) & 0xff);
      out += static_cast<char>(v & 0xff);
    }
  return out;
}

/// A grid edge between two neighbouring nodes with different labels, as the
/// segment of the cell outline separating them (world coordinates).
struct RegionEdge {
  Eigen::Vector2d a, b;
};

inline std::vector<RegionEdge> region_edges(const FieldGrid& g) {
  std::vector<RegionEdge> out;
  const double dx = g.cell_width(0), dy = g.cell_width(1);
  for (int j = 0; j < g.ny; ++j)
    for (int i = 0; i < g.nx; ++i) {
      const int l = g.label[g.index(i, j)];
      const double x = g.coord(0, i), y = g.coord(1, j);
      if (i + 1 < g.nx && g.label[g.index(i + 1, j)] != l)
        out.push_back({{x + dx / 2, y - dy / 2}, {x + dx / 2, y + dy / 2}});
      if (j + 1 < g.ny && g.label[g.index(i, j + 1)] != l)
        out.push_back({{x - dx / 2, y + dy / 2}, {x + dx / 2, y + dy / 2}});
    }
  return out;
}

/// Region map: one filled path per label (cells merged into row runs), dashed
/// lines between differently labelled cells, and a legend.
inline std::string regions_svg(const FieldGrid& g) {
  static constexpr std::array<const char*, 12> palette = {"#cfe2f3", "#f4cccc", "#d9ead3", "#fff2cc", "#d9d2e9", "#fce5cd",
                                                          "#d0e0e3", "#ead1dc", "#b6d7a8", "#f9cb9c", "#a4c2f4", "#ea9999"};
  const double s = std::max(1.0, 800.0 / std::max(g.nx, g.ny));
  const double W = g.nx * s, H = g.ny * s;
  const double legend = 18.0 * static_cast<double>(g.labels.size()) + 10;
  std::ostringstream o;
  o << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << W << "\" height=\"" << H + legend << "\" viewBox=\"0 0 "
    << W << " " << H + legend << "\">\n";
  o << "<rect width=\"" << W << "\" height=\"" << H << "\" fill=\"white\"/>\n";
  auto px = [&](int i) { return i * s; };
  auto py = [&](int j) { return (g.ny - 1 - j) * s; };

  for (std::size_t l = 0; l < g.labels.size(); ++l) {
    o << "<path fill=\"" << palette[l % palette.size()] << "\" d=\"";
    for (int j = 0; j < g.ny; ++j)
      for (int i = 0; i < g.nx;) {
        if (g.label[g.index(i, j)] != static_cast<int>(l)) {
          ++i;
          continue;
        }
        int e = i;
        while (e < g.nx && g.label[g.index(e, j)] == static_cast<int>(l)) ++e;
        o << "M" << px(i) << " " << py(j) << "h" << (e - i) * s << "v" << s << "h" << -(e - i) * s << "z";
        i = e;
      }
    o << "\"><title>" << g.labels[l] << "</title></path>\n";
  }

  o << "<path fill=\"none\" stroke=\"#333\" stroke-width=\"" << std::max(0.5, s / 4)
    << "\" stroke-dasharray=\"" << 2 * s << " " << s << "\" d=\"";
  for (int j = 0; j < g.ny; ++j)
    for (int i = 0; i < g.nx; ++i) {
      const int l = g.label[g.index(i, j)];
      if (i + 1 < g.nx && g.label[g.index(i + 1, j)] != l) o << "M" << px(i + 1) << " " << py(j) << "v" << s;
      if (j + 1 < g.ny && g.label[g.index(i, j + 1)] != l) o << "M" << px(i) << " " << py(j) << "h" << s;
    }
  o << "\"/>\n";

  for (std::size_t l = 0; l < g.labels.size(); ++l) {
    const double y = H + 6 + 18.0 * static_cast<double>(l);
    o << "<rect x=\"6\" y=\"" << y << "\" width=\"12\" height=\"12\" fill=\"" << palette[l % palette.size()]
      << "\" stroke=\"#333\"/><text x=\"24\" y=\"" << y + 10 << "\" font-family=\"monospace\" font-size=\"12\">"
      << g.labels[l] << "</text>\n";
  }
  o << "</svg>\n";
  return o.str();
}

inline void write_file(const std::string& path, const std::string& data) {
  std::ofstream out(path, std::ios::binary);
  if (!out) fail(ErrorCode::ConfigError, path + ": cannot open for writing");
  out << data;
  if (!out) fail(ErrorCode::ConfigError, path + ": write failed");
}

}  // namespace gaugedist::cli
