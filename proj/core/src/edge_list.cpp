#include "resparse/edge_list.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <istream>
#include <ostream>
#include <sstream>
#include <vector>

#include "resparse/error.hpp"

namespace resparse {
namespace {

void split_fields(std::string_view line, std::vector<std::string_view>& out) {
  out.clear();
  std::size_t i = 0;
  while (i < line.size()) {
    while (i < line.size() && (line[i] == ' ' || line[i] == '\t')) ++i;
    if (i == line.size()) break;
    std::size_t j = i;
    while (j < line.size() && line[j] != ' ' && line[j] != '\t') ++j;
    out.push_back(line.substr(i, j - i));
    i = j;
  }
}

template <typename T>
bool parse_integer(std::string_view s, T& out) {
  const char* end = s.data() + s.size();
  auto [ptr, ec] = std::from_chars(s.data(), end, out);
  return ec == std::errc() && ptr == end;
}

bool parse_double(std::string_view s, double& out) {
  const char* end = s.data() + s.size();
  auto [ptr, ec] = std::from_chars(s.data(), end, out);
  return ec == std::errc() && ptr == end;
}

}  // namespace

std::string format_weight(double w) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", w);
  return buf;
}

EdgeListReader::EdgeListReader(std::istream& in) : in_(in) {
  std::string line;
  if (!next_content_line(line)) fail("missing header");
  std::vector<std::string_view> fields;
  split_fields(line, fields);
  if (fields.size() != 2 || !parse_integer(fields[0], n_) ||
      !parse_integer(fields[1], m_)) {
    fail("malformed header");
  }
  if (n_ == 0) fail("vertex count must be at least 1");
}

bool EdgeListReader::next_content_line(std::string& line) {
  while (std::getline(in_, line)) {
    ++line_no_;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    std::size_t first = line.find_first_not_of(" \t");
    if (first == std::string::npos) continue;
    if (line[first] == '#') continue;
    return true;
  }
  return false;
}

void EdgeListReader::fail(const std::string& what) const {
  throw InputError(what + " at line " + std::to_string(line_no_));
}

std::optional<Edge> EdgeListReader::next() {
  if (finished_) return std::nullopt;
  std::string line;
  if (read_ == m_) {
    finished_ = true;
    if (next_content_line(line)) fail("more edges than declared");
    return std::nullopt;
  }
  if (!next_content_line(line)) {
    ++line_no_;
    fail("unexpected end of input (" + std::to_string(read_) + " of " +
         std::to_string(m_) + " edges read)");
  }
  std::vector<std::string_view> fields;
  split_fields(line, fields);
  std::uint64_t u = 0, v = 0;
  double w = 0.0;
  if (fields.size() != 3 || !parse_integer(fields[0], u) ||
      !parse_integer(fields[1], v) || !parse_double(fields[2], w)) {
    fail("malformed line");
  }
  if (u >= n_ || v >= n_) fail("vertex id out of range");
  if (u == v) fail("self-loop");
  if (!std::isfinite(w)) fail("non-finite weight");
  if (!(w > 0.0)) fail("nonpositive weight");
  ++read_;
  return Edge{static_cast<Vertex>(u), static_cast<Vertex>(v), w};
}

WeightedGraph read_edge_list(std::istream& in) {
  EdgeListReader reader(in);
  std::vector<Edge> edges;
  edges.reserve(reader.declared_edges());
  while (auto e = reader.next()) edges.push_back(*e);
  return WeightedGraph(reader.num_vertices(), std::move(edges));
}

WeightedGraph parse_edge_list(std::string_view text) {
  std::istringstream in{std::string(text)};
  return read_edge_list(in);
}

void write_edge_list(std::ostream& out, const WeightedGraph& g) {
  out << g.num_vertices() << ' ' << g.num_edges() << '\n';
  for (const Edge& e : g.edges()) {
    out << e.u << ' ' << e.v << ' ' << format_weight(e.w) << '\n';
  }
}

std::string format_edge_list(const WeightedGraph& g) {
  std::ostringstream out;
  write_edge_list(out, g);
  return out.str();
}

}  // namespace resparse
