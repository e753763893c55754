#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "resparse/random.hpp"

namespace resparse {

using Vertex = std::uint32_t;

struct Edge {
  Vertex u = 0;
  Vertex v = 0;
  double w = 1.0;

  friend bool operator==(const Edge&, const Edge&) = default;
};

// Undirected multigraph on vertices 0..n-1 with strictly positive finite
// weights. Self-loops are rejected; parallel edges are kept separately and
// in insertion order. Immutable once built.
class WeightedGraph {
 public:
  // Throws InputError if n == 0 or any edge violates the invariants.
  explicit WeightedGraph(std::size_t n, std::vector<Edge> edges = {});

  std::size_t num_vertices() const { return n_; }
  std::size_t num_edges() const { return edges_.size(); }
  const std::vector<Edge>& edges() const { return edges_; }
  const Edge& edge(std::size_t id) const { return edges_[id]; }

  friend bool operator==(const WeightedGraph&, const WeightedGraph&) = default;

 private:
  std::size_t n_;
  std::vector<Edge> edges_;
};

enum class GraphFamily { path, cycle, complete, grid, star, barbell, gnp };

std::optional<GraphFamily> parse_family(std::string_view name);
std::string_view family_name(GraphFamily family);

// Unit-weight member of `family` on n vertices. `p` is only read for gnp,
// which is resampled until connected (at most 100 attempts).
WeightedGraph generate(GraphFamily family, std::size_t n, Seed seed,
                       double p = 0.5);

struct Components {
  std::vector<std::uint32_t> label;  // component id per vertex, 0-based
  std::size_t count = 0;
};

Components connected_components(std::size_t n, std::span<const Edge> edges);
inline Components connected_components(const WeightedGraph& g) {
  return connected_components(g.num_vertices(), g.edges());
}

// bridge[e] is true iff removing edge e disconnects its endpoints. A pair of
// parallel edges is never a bridge.
std::vector<bool> find_bridges(const WeightedGraph& g);

// Edges of g with the given ids, in the given order.
WeightedGraph edge_subgraph(const WeightedGraph& g,
                            std::span<const std::size_t> ids);

class DisjointSets {
 public:
  explicit DisjointSets(std::size_t n);
  std::size_t find(std::size_t x);
  // False if already in the same set.
  bool unite(std::size_t a, std::size_t b);

 private:
  std::vector<std::size_t> parent_;
  std::vector<std::uint8_t> rank_;
};

}  // namespace resparse
