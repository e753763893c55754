#include "resparse/clustering.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <queue>
#include <string>
#include <tuple>

#include "resparse/error.hpp"

namespace resparse {
namespace {

struct Adjacency {
  std::vector<std::size_t> offset;
  std::vector<std::pair<Vertex, std::size_t>> items;  // (neighbor, edge id)

  Adjacency(std::size_t n, std::span<const Edge> edges) : offset(n + 1, 0) {
    for (const Edge& e : edges) {
      ++offset[e.u + 1];
      ++offset[e.v + 1];
    }
    for (std::size_t v = 0; v < n; ++v) offset[v + 1] += offset[v];
    items.resize(offset[n]);
    std::vector<std::size_t> fill(offset.begin(), offset.end() - 1);
    for (std::size_t id = 0; id < edges.size(); ++id) {
      items[fill[edges[id].u]++] = {edges[id].v, id};
      items[fill[edges[id].v]++] = {edges[id].u, id};
    }
  }
};

// Hop eccentricity sweep inside one tree; returns (farthest vertex, distance).
std::pair<Vertex, std::uint32_t> farthest(Vertex start,
                                          const std::vector<std::vector<Vertex>>& tree,
                                          std::vector<std::uint32_t>& dist,
                                          std::vector<Vertex>& touched) {
  touched.clear();
  dist[start] = 0;
  touched.push_back(start);
  Vertex best = start;
  for (std::size_t head = 0; head < touched.size(); ++head) {
    const Vertex v = touched[head];
    if (dist[v] > dist[best]) best = v;
    for (Vertex w : tree[v]) {
      if (dist[w] == std::numeric_limits<std::uint32_t>::max()) {
        dist[w] = dist[v] + 1;
        touched.push_back(w);
      }
    }
  }
  const std::uint32_t d = dist[best];
  for (Vertex v : touched) dist[v] = std::numeric_limits<std::uint32_t>::max();
  return {best, d};
}

}  // namespace

std::vector<std::size_t> ClusterPartition::all_tree_edges() const {
  std::vector<std::size_t> out;
  for (const auto& t : tree_edges) out.insert(out.end(), t.begin(), t.end());
  std::sort(out.begin(), out.end());
  return out;
}

double cluster_diameter_bound(std::size_t n, double beta, double c0) {
  return c0 * std::log(static_cast<double>(std::max<std::size_t>(n, 1))) / beta;
}

ClusterPartition est_cluster(std::size_t n, std::span<const Edge> edges,
                             const ClusterConfig& config, Seed seed) {
  if (!(config.beta > 0.0 && config.beta < 1.0)) {
    throw InputError("est_cluster: beta must lie in (0, 1)");
  }
  if (!(config.c0 > 0.0)) throw InputError("est_cluster: c0 must be positive");
  for (const Edge& e : edges) {
    if (e.u >= n || e.v >= n) throw InputError("est_cluster: vertex id out of range");
  }

  const double bound = cluster_diameter_bound(n, config.beta, config.c0);
  // Shifts capped at bound / 2 keep every cluster radius below it. The cap
  // only matters when a shortest path can be that long.
  const bool clamp = static_cast<double>(n) - 1.0 > bound;
  Rng rng(seed);
  std::vector<double> shift(n);
  for (double& d : shift) {
    do {
      d = rng.exponential(config.beta);
    } while (clamp && d > bound / 2.0);
  }

  const Adjacency adj(n, edges);
  // Lexicographic Dijkstra on (hops - shift[source], source).
  using Label = std::tuple<double, Vertex, Vertex, std::uint32_t, std::size_t>;
  // (key, source, vertex, hops, via edge)
  std::priority_queue<Label, std::vector<Label>, std::greater<Label>> queue;
  for (Vertex v = 0; v < n; ++v) queue.emplace(-shift[v], v, v, 0u, kNoEdge);

  ClusterPartition part;
  std::vector<Vertex> owner(n);
  std::vector<bool> settled(n, false);
  part.parent_edge.assign(n, kNoEdge);
  part.depth.assign(n, 0);
  while (!queue.empty()) {
    const auto [key, source, v, hops, via] = queue.top();
    queue.pop();
    if (settled[v]) continue;
    settled[v] = true;
    owner[v] = source;
    part.parent_edge[v] = via;
    part.depth[v] = hops;
    for (std::size_t k = adj.offset[v]; k < adj.offset[v + 1]; ++k) {
      const auto [w, id] = adj.items[k];
      if (settled[w]) continue;
      queue.emplace(static_cast<double>(hops + 1) - shift[source], source, w, hops + 1, id);
    }
  }

  // Number clusters by their center in increasing id order.
  std::vector<std::uint32_t> id_of(n, std::numeric_limits<std::uint32_t>::max());
  for (Vertex v = 0; v < n; ++v) {
    if (owner[v] == v) {
      id_of[v] = static_cast<std::uint32_t>(part.center.size());
      part.center.push_back(v);
    }
  }
  part.cluster.resize(n);
  part.tree_edges.resize(part.center.size());
  std::vector<std::vector<Vertex>> tree(n);
  for (Vertex v = 0; v < n; ++v) {
    part.cluster[v] = id_of[owner[v]];
    if (part.cluster[v] == std::numeric_limits<std::uint32_t>::max()) {
      throw ContractViolation("est_cluster: vertex assigned to a non-center");
    }
    const std::size_t id = part.parent_edge[v];
    if (id == kNoEdge) continue;
    const Vertex parent = edges[id].u == v ? edges[id].v : edges[id].u;
    if (owner[parent] != owner[v]) {
      throw ContractViolation("est_cluster: tree edge leaves its cluster");
    }
    part.tree_edges[part.cluster[v]].push_back(id);
    tree[v].push_back(parent);
    tree[parent].push_back(v);
  }
  for (auto& t : part.tree_edges) std::sort(t.begin(), t.end());

  part.diameter.resize(part.center.size());
  std::vector<std::uint32_t> dist(n, std::numeric_limits<std::uint32_t>::max());
  std::vector<Vertex> touched;
  for (std::size_t c = 0; c < part.center.size(); ++c) {
    const Vertex far = farthest(part.center[c], tree, dist, touched).first;
    const std::uint32_t diam = farthest(far, tree, dist, touched).second;
    if (touched.size() != part.tree_edges[c].size() + 1) {
      throw ContractViolation("est_cluster: cluster tree is not spanning");
    }
    part.diameter[c] = diam;
    if (config.strict && static_cast<double>(diam) > bound) {
      throw ContractViolation("est_cluster: cluster " + std::to_string(c) + " has diameter " +
                              std::to_string(diam) + " above bound");
    }
  }
  return part;
}

}  // namespace resparse
