#include "lud/io.h"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <vector>

#include "lud/error.h"

namespace lud {
namespace {

// Splits the next non-comment, non-blank line into tokens.
bool next_record(std::istream& in, std::vector<std::string>* tokens, int* line_no) {
  std::string line;
  while (std::getline(in, line)) {
    ++*line_no;
    std::istringstream ss(line);
    tokens->clear();
    std::string tok;
    while (ss >> tok) tokens->push_back(tok);
    if (tokens->empty() || (*tokens)[0][0] == '#') continue;
    return true;
  }
  return false;
}

template <typename T>
T parse_number(const std::string& tok, int line_no) {
  T value{};
  auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), value);
  if (ec != std::errc() || ptr != tok.data() + tok.size()) {
    throw Error(ErrorCode::kParse, "line " + std::to_string(line_no) +
                                       ": bad number '" + tok + "'");
  }
  return value;
}

void expect_fields(const std::vector<std::string>& tokens, std::size_t count,
                   int line_no) {
  if (tokens.size() != count) {
    throw Error(ErrorCode::kParse, "line " + std::to_string(line_no) +
                                       ": expected " + std::to_string(count) +
                                       " fields, got " +
                                       std::to_string(tokens.size()));
  }
}

}  // namespace

std::string format_double(double value) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.17g", value);
  return buf;
}

void write_formation(std::ostream& out, const Formation& formation) {
  const int d = formation.dimension();
  out << d << ' ' << formation.num_vertices() << ' ' << formation.num_edges()
      << '\n';
  for (int e = 0; e < formation.num_edges(); ++e) {
    const Edge& ed = formation.graph().edge(e);
    out << ed.i << ' ' << ed.j;
    for (int k = 0; k < d; ++k) {
      out << ' ' << format_double(formation.directions()(k, e));
    }
    out << '\n';
  }
}

Formation read_formation(std::istream& in) {
  std::vector<std::string> tok;
  int line_no = 0;
  if (!next_record(in, &tok, &line_no)) {
    throw Error(ErrorCode::kParse, "empty formation file");
  }
  expect_fields(tok, 3, line_no);
  const int d = parse_number<int>(tok[0], line_no);
  const int n = parse_number<int>(tok[1], line_no);
  const int m = parse_number<int>(tok[2], line_no);
  if (d < 2 || n < 0 || m < 0) {
    throw Error(ErrorCode::kParse, "bad formation header");
  }
  std::vector<Edge> edges;
  std::vector<Eigen::VectorXd> dirs;
  for (int e = 0; e < m; ++e) {
    if (!next_record(in, &tok, &line_no)) {
      throw Error(ErrorCode::kParse, "expected " + std::to_string(m) +
                                         " edges, got " + std::to_string(e));
    }
    expect_fields(tok, 2 + d, line_no);
    Edge ed{parse_number<int>(tok[0], line_no), parse_number<int>(tok[1], line_no)};
    if (ed.i >= ed.j) {
      throw Error(ErrorCode::kParse, "line " + std::to_string(line_no) +
                                         ": edge must satisfy i < j");
    }
    Eigen::VectorXd g(d);
    for (int k = 0; k < d; ++k) g[k] = parse_number<double>(tok[2 + k], line_no);
    const double norm = g.norm();
    if (!(norm > 0.0) || !std::isfinite(norm)) {
      throw Error(ErrorCode::kParse, "line " + std::to_string(line_no) +
                                         ": zero or non-finite direction");
    }
    if (std::abs(norm - 1.0) > kUnitNormTolerance) g /= norm;
    edges.push_back(ed);
    dirs.push_back(std::move(g));
  }
  if (next_record(in, &tok, &line_no)) {
    throw Error(ErrorCode::kParse, "trailing data at line " + std::to_string(line_no));
  }
  // Graph sorts its edges; carry each direction along with its edge.
  std::vector<int> order(m);
  for (int e = 0; e < m; ++e) order[e] = e;
  std::sort(order.begin(), order.end(),
            [&](int a, int b) { return edges[a] < edges[b]; });
  std::vector<Edge> sorted_edges;
  Eigen::MatrixXd directions(d, m);
  for (int k = 0; k < m; ++k) {
    sorted_edges.push_back(edges[order[k]]);
    directions.col(k) = dirs[order[k]];
  }
  try {
    return Formation(Graph(n, std::move(sorted_edges)), std::move(directions));
  } catch (const Error& err) {
    throw Error(ErrorCode::kParse, err.what());
  }
}

void write_locations(std::ostream& out, const LocationSet& locations) {
  const int d = locations.dimension();
  out << d << ' ' << locations.size() << '\n';
  for (int i = 0; i < locations.size(); ++i) {
    for (int k = 0; k < d; ++k) {
      if (k) out << ' ';
      out << format_double(locations.points()(k, i));
    }
    out << '\n';
  }
}

LocationSet read_locations(std::istream& in) {
  std::vector<std::string> tok;
  int line_no = 0;
  if (!next_record(in, &tok, &line_no)) {
    throw Error(ErrorCode::kParse, "empty location file");
  }
  expect_fields(tok, 2, line_no);
  const int d = parse_number<int>(tok[0], line_no);
  const int n = parse_number<int>(tok[1], line_no);
  if (d < 2 || n < 2) throw Error(ErrorCode::kParse, "bad location header");
  Eigen::MatrixXd points(d, n);
  for (int i = 0; i < n; ++i) {
    if (!next_record(in, &tok, &line_no)) {
      throw Error(ErrorCode::kParse, "expected " + std::to_string(n) + " points");
    }
    expect_fields(tok, d, line_no);
    for (int k = 0; k < d; ++k) points(k, i) = parse_number<double>(tok[k], line_no);
  }
  if (next_record(in, &tok, &line_no)) {
    throw Error(ErrorCode::kParse, "trailing data at line " + std::to_string(line_no));
  }
  return LocationSet(std::move(points));
}

Formation load_formation(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::kParse, "cannot open " + path);
  return read_formation(in);
}

void save_formation(const std::string& path, const Formation& formation) {
  std::ofstream out(path);
  if (!out) throw Error(ErrorCode::kInvalidArgument, "cannot write " + path);
  write_formation(out, formation);
}

LocationSet load_locations(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::kParse, "cannot open " + path);
  return read_locations(in);
}

void save_locations(const std::string& path, const LocationSet& locations) {
  std::ofstream out(path);
  if (!out) throw Error(ErrorCode::kInvalidArgument, "cannot write " + path);
  write_locations(out, locations);
}

}  // namespace lud
