#pragma once

#include <cstddef>
#include <cstdint>
#include <limits>
#include <span>
#include <vector>

#include "resparse/graph.hpp"
#include "resparse/random.hpp"

namespace resparse {

inline constexpr std::size_t kNoEdge = std::numeric_limits<std::size_t>::max();

struct ClusterConfig {
  double beta = 1.0 / 3.0;
  double c0 = 4.0;
  // Throw ContractViolation if a tree diameter exceeds c0 ln(n) / beta.
  bool strict = false;
};

// Exponential start time clustering. Tree edges are ids into the edge list
// the partition was computed from.
struct ClusterPartition {
  std::vector<std::uint32_t> cluster;  // cluster id per vertex
  std::vector<Vertex> center;          // per cluster
  std::vector<std::size_t> parent_edge;  // per vertex, kNoEdge at centers
  std::vector<std::uint32_t> depth;      // hops to the center
  std::vector<std::vector<std::size_t>> tree_edges;  // per cluster
  std::vector<std::uint32_t> diameter;               // per cluster, in hops

  std::size_t num_clusters() const { return center.size(); }
  std::vector<std::size_t> all_tree_edges() const;
};

// c0 ln(n) / beta
double cluster_diameter_bound(std::size_t n, double beta, double c0);

// Edge weights are ignored. Every vertex u draws delta_u ~ Exp(beta) (redrawn
// above half the diameter bound when that bound is below n - 1) and v joins
// the u minimizing (hops(u, v) - delta_u, u).
ClusterPartition est_cluster(std::size_t n, std::span<const Edge> edges,
                             const ClusterConfig& config, Seed seed);
inline ClusterPartition est_cluster(const WeightedGraph& g, const ClusterConfig& config,
                                    Seed seed) {
  return est_cluster(g.num_vertices(), g.edges(), config, seed);
}

}  // namespace resparse
