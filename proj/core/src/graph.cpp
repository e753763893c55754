#include "resparse/graph.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "resparse/error.hpp"

namespace resparse {

WeightedGraph::WeightedGraph(std::size_t n, std::vector<Edge> edges)
    : n_(n), edges_(std::move(edges)) {
  if (n_ == 0) throw InputError("graph must have at least one vertex");
  for (std::size_t i = 0; i < edges_.size(); ++i) {
    const Edge& e = edges_[i];
    if (e.u >= n_ || e.v >= n_) {
      throw InputError("edge " + std::to_string(i) + ": vertex id out of range");
    }
    if (e.u == e.v) {
      throw InputError("edge " + std::to_string(i) + ": self-loop");
    }
    if (!std::isfinite(e.w) || !(e.w > 0.0)) {
      throw InputError("edge " + std::to_string(i) + ": nonpositive weight");
    }
  }
}

namespace {

constexpr std::pair<GraphFamily, std::string_view> kFamilyNames[] = {
    {GraphFamily::path, "path"},         {GraphFamily::cycle, "cycle"},
    {GraphFamily::complete, "complete"}, {GraphFamily::grid, "grid"},
    {GraphFamily::star, "star"},         {GraphFamily::barbell, "barbell"},
    {GraphFamily::gnp, "gnp"},
};

void add_clique(std::vector<Edge>& edges, Vertex first, Vertex last) {
  for (Vertex i = first; i < last; ++i) {
    for (Vertex j = i + 1; j < last; ++j) edges.push_back({i, j, 1.0});
  }
}

std::vector<Edge> gnp_edges(std::size_t n, double p, Rng& rng) {
  std::vector<Edge> edges;
  for (Vertex i = 0; i < n; ++i) {
    for (Vertex j = i + 1; j < n; ++j) {
      if (rng.bernoulli(p)) edges.push_back({i, j, 1.0});
    }
  }
  return edges;
}

}  // namespace

std::optional<GraphFamily> parse_family(std::string_view name) {
  for (const auto& [family, n] : kFamilyNames) {
    if (n == name) return family;
  }
  return std::nullopt;
}

std::string_view family_name(GraphFamily family) {
  for (const auto& [f, n] : kFamilyNames) {
    if (f == family) return n;
  }
  return "unknown";
}

WeightedGraph generate(GraphFamily family, std::size_t n, Seed seed,
                       double p) {
  if (n == 0) throw InputError("generate: n must be at least 1");
  const auto nv = static_cast<Vertex>(n);
  std::vector<Edge> edges;
  switch (family) {
    case GraphFamily::path:
      for (Vertex i = 0; i + 1 < nv; ++i) edges.push_back({i, i + 1, 1.0});
      break;
    case GraphFamily::cycle:
      if (n < 3) throw InputError("generate: cycle needs n >= 3");
      for (Vertex i = 0; i + 1 < nv; ++i) edges.push_back({i, i + 1, 1.0});
      edges.push_back({0, nv - 1, 1.0});
      break;
    case GraphFamily::complete:
      add_clique(edges, 0, nv);
      break;
    case GraphFamily::grid: {
      // Row-major layout, ceil(sqrt(n)) columns; the last row may be partial.
      const auto width = static_cast<Vertex>(
          std::ceil(std::sqrt(static_cast<double>(n))));
      for (Vertex i = 0; i < nv; ++i) {
        if ((i + 1) % width != 0 && i + 1 < nv) edges.push_back({i, i + 1, 1.0});
        if (i + width < nv) edges.push_back({i, i + width, 1.0});
      }
      break;
    }
    case GraphFamily::star:
      for (Vertex i = 1; i < nv; ++i) edges.push_back({0, i, 1.0});
      break;
    case GraphFamily::barbell: {
      if (n < 6) throw InputError("generate: barbell needs n >= 6");
      const Vertex half = nv / 2;
      add_clique(edges, 0, half);
      add_clique(edges, half, nv);
      edges.push_back({half - 1, half, 1.0});
      break;
    }
    case GraphFamily::gnp: {
      if (!(p > 0.0 && p <= 1.0)) {
        throw InputError("generate: gnp needs p in (0, 1]");
      }
      Rng rng(seed);
      constexpr int kMaxAttempts = 100;
      for (int attempt = 0; attempt < kMaxAttempts; ++attempt) {
        edges = gnp_edges(n, p, rng);
        if (connected_components(n, edges).count == 1) {
          return WeightedGraph(n, std::move(edges));
        }
      }
      throw InputError("generate: gnp did not produce a connected graph in " +
                       std::to_string(kMaxAttempts) + " attempts");
    }
  }
  return WeightedGraph(n, std::move(edges));
}

Components connected_components(std::size_t n, std::span<const Edge> edges) {
  DisjointSets sets(n);
  for (const Edge& e : edges) sets.unite(e.u, e.v);
  Components out;
  out.label.assign(n, 0);
  std::vector<std::uint32_t> root_label(n, UINT32_MAX);
  for (std::size_t v = 0; v < n; ++v) {
    const std::size_t r = sets.find(v);
    if (root_label[r] == UINT32_MAX) {
      root_label[r] = static_cast<std::uint32_t>(out.count++);
    }
    out.label[v] = root_label[r];
  }
  return out;
}

std::vector<bool> find_bridges(const WeightedGraph& g) {
  const std::size_t n = g.num_vertices();
  const std::size_t m = g.num_edges();
  std::vector<std::vector<std::pair<Vertex, std::size_t>>> adj(n);
  for (std::size_t id = 0; id < m; ++id) {
    const Edge& e = g.edge(id);
    adj[e.u].push_back({e.v, id});
    adj[e.v].push_back({e.u, id});
  }
  // Iterative lowpoint DFS; the tree edge is identified by id so parallel
  // edges are handled correctly.
  constexpr std::size_t kNone = SIZE_MAX;
  std::vector<std::size_t> order(n, kNone), low(n, 0);
  std::vector<bool> bridge(m, false);
  struct Frame {
    Vertex v;
    std::size_t parent_edge;
    std::size_t next;
  };
  std::size_t clock = 0;
  std::vector<Frame> stack;
  for (Vertex root = 0; root < n; ++root) {
    if (order[root] != kNone) continue;
    order[root] = low[root] = clock++;
    stack.push_back({root, kNone, 0});
    while (!stack.empty()) {
      Frame& f = stack.back();
      if (f.next < adj[f.v].size()) {
        const auto [to, id] = adj[f.v][f.next++];
        if (id == f.parent_edge) continue;
        if (order[to] == kNone) {
          order[to] = low[to] = clock++;
          stack.push_back({to, id, 0});
        } else {
          low[f.v] = std::min(low[f.v], order[to]);
        }
      } else {
        const Frame done = f;
        stack.pop_back();
        if (!stack.empty()) {
          Frame& up = stack.back();
          low[up.v] = std::min(low[up.v], low[done.v]);
          if (low[done.v] > order[up.v]) bridge[done.parent_edge] = true;
        }
      }
    }
  }
  return bridge;
}

WeightedGraph edge_subgraph(const WeightedGraph& g,
                            std::span<const std::size_t> ids) {
  std::vector<Edge> edges;
  edges.reserve(ids.size());
  for (std::size_t id : ids) edges.push_back(g.edge(id));
  return WeightedGraph(g.num_vertices(), std::move(edges));
}

DisjointSets::DisjointSets(std::size_t n) : parent_(n), rank_(n, 0) {
  std::iota(parent_.begin(), parent_.end(), std::size_t{0});
}

std::size_t DisjointSets::find(std::size_t x) {
  while (parent_[x] != x) {
    parent_[x] = parent_[parent_[x]];
    x = parent_[x];
  }
  return x;
}

bool DisjointSets::unite(std::size_t a, std::size_t b) {
  a = find(a);
  b = find(b);
  if (a == b) return false;
  if (rank_[a] < rank_[b]) std::swap(a, b);
  parent_[b] = a;
  if (rank_[a] == rank_[b]) ++rank_[a];
  return true;
}

}  // namespace resparse
