#pragma once

#include <cstddef>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>

#include "resparse/graph.hpp"

namespace resparse {

// Text format:
//
//   n m
//   u v w      (m lines, 0-based vertex ids, decimal weight)
//
// Lines starting with '#' are comments. Blank lines are skipped. Weights are
// written with 17 significant digits so read(write(g)) == g bit for bit.

std::string format_weight(double w);

WeightedGraph read_edge_list(std::istream& in);
WeightedGraph parse_edge_list(std::string_view text);

void write_edge_list(std::ostream& out, const WeightedGraph& g);
std::string format_edge_list(const WeightedGraph& g);

// Pull parser for the same format. Reads one edge at a time so a stream
// consumer never has to hold the whole graph. Errors are InputError with the
// offending line number.
class EdgeListReader {
 public:
  explicit EdgeListReader(std::istream& in);

  std::size_t num_vertices() const { return n_; }
  std::size_t declared_edges() const { return m_; }
  std::size_t edges_read() const { return read_; }

  // Next edge, or nullopt once all m edges are consumed. Trailing non-comment
  // content and a short file are both reported as errors.
  std::optional<Edge> next();

 private:
  bool next_content_line(std::string& line);
  [[noreturn]] void fail(const std::string& what) const;

  std::istream& in_;
  std::size_t n_ = 0;
  std::size_t m_ = 0;
  std::size_t read_ = 0;
  std::size_t line_no_ = 0;
  bool finished_ = false;
};

}  // namespace resparse
