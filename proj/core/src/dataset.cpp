#include "letc/error.hpp"
#include "letc/harness.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <limits>
#include <sstream>
#include <unordered_map>
#include <unordered_set>

namespace letc {
namespace {

std::string trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r\n");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r\n");
  return std::string(s.substr(first, last - first + 1));
}

std::string lower(std::string s) {
  std::transform(s.begin(), s.end(), s.begin(), [](unsigned char c) { return std::tolower(c); });
  return s;
}

char detect_delimiter(const std::string& line) {
  if (line.find(',') != std::string::npos) return ',';
  if (line.find('\t') != std::string::npos) return '\t';
  if (line.find(';') != std::string::npos) return ';';
  return ',';
}

std::vector<std::string> split(const std::string& line, char delim) {
  std::vector<std::string> cells;
  std::size_t start = 0;
  while (true) {
    const auto pos = line.find(delim, start);
    cells.push_back(trim(std::string_view(line).substr(start, pos == std::string::npos ? std::string::npos : pos - start)));
    if (pos == std::string::npos) break;
    start = pos + 1;
  }
  return cells;
}

std::optional<double> parse_number(const std::string& cell) {
  if (cell.empty()) return std::nullopt;
  double v = 0.0;
  const char* begin = cell.data();
  const char* end = cell.data() + cell.size();
  if (*begin == '+') ++begin;
  auto [ptr, ec] = std::from_chars(begin, end, v);
  if (ec != std::errc() || ptr != end || !std::isfinite(v)) return std::nullopt;
  return v;
}

struct Table {
  std::vector<std::vector<std::string>> rows;
  std::vector<std::size_t> lines;  // 1-based source line per row
};

Table read_table(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IngestionError(path.string(), 0, "cannot open file");
  Table t;
  std::string line;
  std::size_t lineno = 0;
  char delim = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (trim(line).empty()) continue;
    if (!delim) delim = detect_delimiter(line);
    t.rows.push_back(split(line, delim));
    t.lines.push_back(lineno);
  }
  return t;
}

bool one_of(const std::string& s, std::initializer_list<const char*> names) {
  for (const char* n : names)
    if (s == n) return true;
  return false;
}

enum class GraphKind { edges, coordinates };

}  // namespace

void SpeedDataset::validate() const {
  if (intervals_per_day == 0 || static_cast<std::size_t>(values.rows()) != intervals_per_day * days)
    throw ShapeError("SpeedDataset: row count must equal intervals_per_day * days");
  if (location_ids.size() != locations())
    throw ShapeError("SpeedDataset: location id count does not match value columns");
  for (const DistanceEdge& e : edges) {
    if (e.src >= locations() || e.dst >= locations())
      throw ParameterError("SpeedDataset: edge endpoint out of range");
    if (!(e.distance >= 0.0)) throw ParameterError("SpeedDataset: negative edge distance");
  }
  if (coordinates && (static_cast<std::size_t>(coordinates->rows()) != locations() || coordinates->cols() != 2))
    throw ShapeError("SpeedDataset: coordinates must be J x 2");
}

SpatialGraph build_spatial_graph(const SpeedDataset& ds, const GraphOptions& options) {
  if (!ds.coordinates) {
    return gaussian_adjacency(std::span<const DistanceEdge>(ds.edges), ds.locations(), options.sigma,
                              options.delta, options.degree_mode);
  }
  const Matrix& xy = *ds.coordinates;
  const auto n = xy.rows();
  Matrix dist(n, n);
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j < n; ++j) dist(i, j) = (xy.row(i) - xy.row(j)).norm();
  const double sigma = options.sigma.value_or(distance_std(dist));
  if (!(sigma > 0.0)) throw ParameterError("build_spatial_graph: distance spread is zero; set sigma");
  // Keep pairs whose weight exp(-(d/(δσ))²) reaches the threshold.
  const double reach = options.delta * sigma * std::sqrt(-std::log(options.coordinate_weight_threshold));
  std::vector<std::pair<std::size_t, std::size_t>> pairs;
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j < n; ++j)
      if (i != j && dist(i, j) <= reach)
        pairs.emplace_back(static_cast<std::size_t>(i), static_cast<std::size_t>(j));
  return gaussian_adjacency(dist, pairs, sigma, options.delta, options.degree_mode);
}

SpeedDataset load_dataset(const std::filesystem::path& values_path,
                          const std::filesystem::path& graph_path, std::size_t intervals_per_day) {
  if (intervals_per_day == 0) throw ParameterError("load_dataset: intervals per day must be >= 1");
  const std::string vname = values_path.string();
  const Table vt = read_table(values_path);
  if (vt.rows.empty()) throw IngestionError(vname, 0, "file is empty");

  SpeedDataset ds;
  ds.intervals_per_day = intervals_per_day;
  ds.location_ids = vt.rows[0];
  std::unordered_map<std::string, std::size_t> index;
  for (std::size_t j = 0; j < ds.location_ids.size(); ++j) {
    if (ds.location_ids[j].empty()) throw IngestionError(vname, vt.lines[0], "empty location id in header");
    if (!index.emplace(ds.location_ids[j], j).second)
      throw IngestionError(vname, vt.lines[0], "duplicate location id '" + ds.location_ids[j] + "'");
  }

  const std::size_t cols = ds.location_ids.size();
  const std::size_t rows = vt.rows.size() - 1;
  if (rows == 0) throw IngestionError(vname, 0, "no data rows");
  if (rows % intervals_per_day != 0) {
    throw IngestionError(vname, 0, std::to_string(rows) + " data rows are not a multiple of " +
                                       std::to_string(intervals_per_day) + " intervals per day");
  }
  ds.days = rows / intervals_per_day;
  ds.values.resize(static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(cols));
  for (std::size_t r = 0; r < rows; ++r) {
    const auto& cells = vt.rows[r + 1];
    if (cells.size() != cols) {
      throw IngestionError(vname, vt.lines[r + 1], "expected " + std::to_string(cols) + " cells, found " +
                                                       std::to_string(cells.size()));
    }
    for (std::size_t c = 0; c < cols; ++c) {
      const auto ri = static_cast<Eigen::Index>(r);
      const auto ci = static_cast<Eigen::Index>(c);
      if (cells[c].empty()) {
        ds.values(ri, ci) = std::numeric_limits<double>::quiet_NaN();
        continue;
      }
      const auto v = parse_number(cells[c]);
      if (!v) {
        throw IngestionError(vname, vt.lines[r + 1],
                             "value '" + cells[c] + "' in column '" + ds.location_ids[c] +
                                 "' is not a finite number (leave the cell empty for missing data)");
      }
      ds.values(ri, ci) = *v;
    }
  }

  const std::string gname = graph_path.string();
  const Table gt = read_table(graph_path);
  if (gt.rows.empty()) throw IngestionError(gname, 0, "file is empty");

  std::size_t first = 0;
  std::optional<GraphKind> kind;
  const auto& head = gt.rows[0];
  if (head.size() == 3) {
    const std::string a = lower(head[0]), b = lower(head[1]), c = lower(head[2]);
    if (one_of(a, {"src", "source", "from"}) && one_of(b, {"dst", "target", "to"}) &&
        one_of(c, {"distance", "dist", "cost", "length"})) {
      kind = GraphKind::edges;
      first = 1;
    } else if (one_of(a, {"id", "node", "location", "sensor"}) && one_of(b, {"x", "lon", "longitude"}) &&
               one_of(c, {"y", "lat", "latitude"})) {
      kind = GraphKind::coordinates;
      first = 1;
    }
  }
  for (std::size_t r = first; r < gt.rows.size(); ++r) {
    if (gt.rows[r].size() != 3) {
      throw IngestionError(gname, gt.lines[r], "expected 3 columns (src,dst,distance or id,x,y), found " +
                                                    std::to_string(gt.rows[r].size()));
    }
  }
  if (!kind) {
    // No recognised header: decide from the contents.
    bool edges_ok = true;
    bool coords_ok = true;
    std::unordered_set<std::string> coord_ids;
    for (std::size_t r = 0; r < gt.rows.size(); ++r) {
      const auto& row = gt.rows[r];
      const bool id0 = index.count(row[0]) > 0;
      const bool id1 = index.count(row[1]) > 0;
      edges_ok = edges_ok && id0 && id1 && parse_number(row[2]).has_value();
      coords_ok = coords_ok && id0 && parse_number(row[1]).has_value() && parse_number(row[2]).has_value() &&
                  coord_ids.insert(row[0]).second;
    }
    coords_ok = coords_ok && coord_ids.size() == cols;
    if (edges_ok && coords_ok) {
      throw IngestionError(gname, 0,
                           "cannot tell an edge list from a coordinate table; add a header "
                           "'src,dst,distance' or 'id,x,y'");
    }
    if (!edges_ok && !coords_ok) {
      throw IngestionError(gname, gt.lines[0],
                           "unrecognised graph table; expected 'src,dst,distance' or 'id,x,y' rows");
    }
    kind = edges_ok ? GraphKind::edges : GraphKind::coordinates;
  }

  auto lookup = [&](const std::string& id, std::size_t line) {
    const auto it = index.find(id);
    if (it == index.end()) throw IngestionError(gname, line, "unknown location id '" + id + "'");
    return it->second;
  };
  auto number = [&](const std::string& cell, std::size_t line, const char* what) {
    const auto v = parse_number(cell);
    if (!v) throw IngestionError(gname, line, std::string(what) + " '" + cell + "' is not a finite number");
    return *v;
  };

  if (*kind == GraphKind::edges) {
    for (std::size_t r = first; r < gt.rows.size(); ++r) {
      const auto& row = gt.rows[r];
      DistanceEdge e{lookup(row[0], gt.lines[r]), lookup(row[1], gt.lines[r]),
                     number(row[2], gt.lines[r], "distance")};
      if (e.distance < 0.0) throw IngestionError(gname, gt.lines[r], "negative distance");
      ds.edges.push_back(e);
    }
  } else {
    Matrix xy = Matrix::Constant(static_cast<Eigen::Index>(cols), 2, std::numeric_limits<double>::quiet_NaN());
    for (std::size_t r = first; r < gt.rows.size(); ++r) {
      const auto& row = gt.rows[r];
      const auto j = static_cast<Eigen::Index>(lookup(row[0], gt.lines[r]));
      if (!std::isnan(xy(j, 0))) throw IngestionError(gname, gt.lines[r], "duplicate coordinates for '" + row[0] + "'");
      xy(j, 0) = number(row[1], gt.lines[r], "x");
      xy(j, 1) = number(row[2], gt.lines[r], "y");
    }
    for (std::size_t j = 0; j < cols; ++j) {
      if (std::isnan(xy(static_cast<Eigen::Index>(j), 0)))
        throw IngestionError(gname, 0, "no coordinates for location '" + ds.location_ids[j] + "'");
    }
    ds.coordinates = std::move(xy);
  }
  ds.validate();
  return ds;
}

void write_value_table(std::ostream& out, const Matrix& values, std::span<const std::string> ids) {
  if (ids.size() != static_cast<std::size_t>(values.cols()))
    throw ShapeError("write_value_table: id count does not match columns");
  for (std::size_t j = 0; j < ids.size(); ++j) out << (j ? "," : "") << ids[j];
  out << '\n';
  out << std::setprecision(std::numeric_limits<double>::max_digits10);
  for (Eigen::Index i = 0; i < values.rows(); ++i) {
    for (Eigen::Index j = 0; j < values.cols(); ++j) {
      if (j) out << ',';
      if (std::isfinite(values(i, j))) out << values(i, j);
    }
    out << '\n';
  }
}

void write_value_table(const std::filesystem::path& path, const Matrix& values,
                       std::span<const std::string> ids) {
  std::ofstream out(path);
  if (!out) throw IngestionError(path.string(), 0, "cannot open file for writing");
  write_value_table(out, values, ids);
  if (!out) throw IngestionError(path.string(), 0, "write failed");
}

void write_edge_table(const std::filesystem::path& path, std::span<const DistanceEdge> edges,
                      std::span<const std::string> ids) {
  std::ofstream out(path);
  if (!out) throw IngestionError(path.string(), 0, "cannot open file for writing");
  out << "src,dst,distance\n" << std::setprecision(std::numeric_limits<double>::max_digits10);
  for (const DistanceEdge& e : edges) {
    if (e.src >= ids.size() || e.dst >= ids.size()) throw ParameterError("write_edge_table: edge out of range");
    out << ids[e.src] << ',' << ids[e.dst] << ',' << e.distance << '\n';
  }
  if (!out) throw IngestionError(path.string(), 0, "write failed");
}

}  // namespace letc
