#include "resparse/spanner.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <ostream>
#include <string>

#include "resparse/edge_list.hpp"
#include "resparse/error.hpp"

namespace resparse {
namespace {

struct Bucket {
  int scale = 0;
  std::vector<std::size_t> ids;
  std::vector<std::size_t> tree;  // C^(i), ids into g
};

std::size_t group_of(int scale, std::size_t t) {
  const long long m = static_cast<long long>(t);
  return static_cast<std::size_t>(((scale % m) + m) % m);
}

// Largest length-weighted diameter over the components of a forest.
double max_forest_diameter(std::size_t n, const WeightedGraph& g,
                           std::span<const std::size_t> ids,
                           std::span<const double> lengths) {
  std::vector<std::vector<std::pair<Vertex, double>>> adj(n);
  for (std::size_t id : ids) {
    const Edge& e = g.edge(id);
    adj[e.u].emplace_back(e.v, lengths[id]);
    adj[e.v].emplace_back(e.u, lengths[id]);
  }
  std::vector<double> dist(n, -1.0);
  std::vector<bool> seen(n, false);
  std::vector<Vertex> stack;
  std::vector<Vertex> order;
  auto sweep = [&](Vertex s) {
    order.clear();
    stack.assign(1, s);
    dist[s] = 0.0;
    Vertex far = s;
    while (!stack.empty()) {
      const Vertex v = stack.back();
      stack.pop_back();
      order.push_back(v);
      if (dist[v] > dist[far]) far = v;
      for (auto [w, l] : adj[v]) {
        if (dist[w] < 0.0) {
          dist[w] = dist[v] + l;
          stack.push_back(w);
        }
      }
    }
    const double d = dist[far];
    for (Vertex v : order) dist[v] = -1.0;
    return std::pair{far, d};
  };
  double best = 0.0;
  for (Vertex s = 0; s < n; ++s) {
    if (seen[s] || adj[s].empty()) continue;
    const Vertex far = sweep(s).first;
    for (Vertex v : order) seen[v] = true;
    best = std::max(best, sweep(far).second);
  }
  return best;
}

}  // namespace

std::size_t spanner_groups(std::size_t n, double c0) {
  if (n < 2) return 1;
  const double x = 8.0 * c0 * std::log2(static_cast<double>(n));
  if (x <= 2.0) return 1;
  return std::max<std::size_t>(1, static_cast<std::size_t>(std::ceil(std::log2(x))));
}

int length_scale(double length) { return std::ilogb(length); }

std::size_t SpannerForest::num_edges() const {
  std::size_t total = 0;
  for (const Forest& f : forests) total += f.edges.size();
  return total;
}

std::vector<std::size_t> SpannerForest::edge_ids() const {
  std::vector<std::size_t> out;
  for (const Forest& f : forests) out.insert(out.end(), f.edges.begin(), f.edges.end());
  std::sort(out.begin(), out.end());
  return out;
}

SpannerForest prob_spanner(const WeightedGraph& g, std::span<const double> lengths,
                           const SpannerConfig& config, Seed seed) {
  const std::size_t n = g.num_vertices();
  if (lengths.size() != g.num_edges()) throw InputError("prob_spanner: one length per edge");
  for (double l : lengths) {
    if (!(std::isfinite(l) && l > 0.0)) throw InputError("prob_spanner: lengths must be finite and positive");
  }
  if (config.t_override && *config.t_override == 0) throw InputError("prob_spanner: t must be positive");

  std::map<int, std::vector<std::size_t>> by_scale;
  for (std::size_t id = 0; id < lengths.size(); ++id) by_scale[length_scale(lengths[id])].push_back(id);
  std::vector<Bucket> buckets;
  for (auto& [scale, ids] : by_scale) buckets.push_back(Bucket{scale, std::move(ids), {}});

  const ClusterConfig cluster{config.beta, config.c0, config.strict};
  std::exception_ptr failure;
#pragma omp parallel for schedule(dynamic, 1)
  for (std::ptrdiff_t b = 0; b < static_cast<std::ptrdiff_t>(buckets.size()); ++b) {
    try {
      Bucket& bucket = buckets[static_cast<std::size_t>(b)];
      std::vector<Edge> local;
      local.reserve(bucket.ids.size());
      for (std::size_t id : bucket.ids) local.push_back(g.edge(id));
      const Seed s = derive_seed(seed, static_cast<std::uint64_t>(static_cast<std::int64_t>(bucket.scale)));
      const ClusterPartition part = est_cluster(n, local, cluster, s);
      for (std::size_t k : part.all_tree_edges()) bucket.tree.push_back(bucket.ids[k]);
    } catch (...) {
#pragma omp critical(resparse_spanner_failure)
      if (!failure) failure = std::current_exception();
    }
  }
  if (failure) std::rethrow_exception(failure);

  SpannerForest out;
  out.num_vertices = n;
  out.t = config.t_override ? *config.t_override : spanner_groups(n, config.c0);
  out.forests.resize(out.t);
  const double log_n = std::log2(static_cast<double>(std::max<std::size_t>(n, 2)));
  // Hop diameter constant of the clusters in units of log2 n.
  const double c0_hops = config.c0 * std::log(2.0) / config.beta;

  for (std::size_t j = 0; j < out.t; ++j) {
    Forest& forest = out.forests[j];
    forest.group = j;
    DisjointSets sets(n);
    for (const Bucket& bucket : buckets) {  // ascending scale
      if (group_of(bucket.scale, out.t) != j || bucket.tree.empty()) continue;
      std::vector<std::size_t> ids = bucket.tree;
      std::sort(ids.begin(), ids.end(), [&](std::size_t a, std::size_t b) {
        return lengths[a] != lengths[b] ? lengths[a] < lengths[b] : a < b;
      });
      for (std::size_t id : ids) {
        const Edge& e = g.edge(id);
        if (sets.unite(e.u, e.v)) {
          forest.edges.push_back(id);
          forest.scales.push_back(bucket.scale);
        }
      }
      if (config.strict) {
        const double bound = 4.0 * c0_hops * std::ldexp(1.0, bucket.scale) * log_n;
        const double diam = max_forest_diameter(n, g, forest.edges, lengths);
        if (diam > bound) {
          throw ContractViolation("prob_spanner: forest " + std::to_string(j) + " diameter " +
                                  format_weight(diam) + " exceeds " + format_weight(bound) +
                                  " at scale " + std::to_string(bucket.scale));
        }
      }
    }
  }
  if (config.strict) check_forest(g, out);
  return out;
}

void check_forest(const WeightedGraph& g, const SpannerForest& forest) {
  const std::size_t n = g.num_vertices();
  for (const Forest& f : forest.forests) {
    DisjointSets sets(n);
    for (std::size_t id : f.edges) {
      const Edge& e = g.edge(id);
      if (!sets.unite(e.u, e.v)) {
        throw ContractViolation("spanner forest " + std::to_string(f.group) + " has a cycle");
      }
    }
  }
  if (forest.forests.size() > forest.t) throw ContractViolation("spanner has more than t forests");
  if (forest.num_edges() > forest.t * (n - 1)) {
    throw ContractViolation("spanner has more than t (n - 1) edges");
  }
}

void write_spanner_forest(std::ostream& out, const WeightedGraph& g,
                          const SpannerForest& forest) {
  out << g.num_vertices() << ' ' << forest.num_edges() << '\n';
  for (const Forest& f : forest.forests) {
    for (std::size_t k = 0; k < f.edges.size(); ++k) {
      if (k == 0 || f.scales[k] != f.scales[k - 1]) {
        out << "# forest " << f.group << " scale " << f.scales[k] << '\n';
      }
      const Edge& e = g.edge(f.edges[k]);
      out << e.u << ' ' << e.v << ' ' << format_weight(e.w) << '\n';
    }
  }
}

std::size_t peel_rounds(std::size_t n, double alpha_est, double c_k) {
  const double k = std::ceil(c_k * alpha_est * std::log(static_cast<double>(std::max<std::size_t>(n, 1))));
  return std::max<std::size_t>(1, static_cast<std::size_t>(k));
}

SpannerEstimate spanner_estimate(const WeightedGraph& g, double alpha_est,
                                 const SpannerEstimateConfig& config, Seed seed) {
  if (!(alpha_est >= 1.0) || !std::isfinite(alpha_est)) {
    throw InputError("spanner_estimate: alpha must be at least 1");
  }
  if (!(config.c_k > 0.0)) throw InputError("spanner_estimate: c_k must be positive");
  const std::size_t m = g.num_edges();
  SpannerEstimate est{LeverageEstimates({}, Provenance::spanner), std::vector<bool>(m, false),
                      peel_rounds(g.num_vertices(), alpha_est, config.c_k), 0, 0, {}};

  std::vector<std::size_t> residual(m);
  for (std::size_t id = 0; id < m; ++id) residual[id] = id;
  for (std::size_t round = 0; round < est.rounds_planned && !residual.empty(); ++round) {
    const WeightedGraph sub = edge_subgraph(g, residual);
    std::vector<double> lengths(sub.num_edges());
    for (std::size_t k = 0; k < lengths.size(); ++k) lengths[k] = 1.0 / sub.edge(k).w;
    SpannerForest peel = prob_spanner(sub, lengths, config.spanner, derive_seed(seed, round));
    for (Forest& f : peel.forests) {
      for (std::size_t& id : f.edges) {
        id = residual[id];
        est.in_spanner[id] = true;
      }
    }
    std::erase_if(residual, [&](std::size_t id) { return est.in_spanner[id]; });
    est.peels.push_back(std::move(peel));
    ++est.rounds_run;
  }

  std::vector<double> tau(m);
  for (std::size_t id = 0; id < m; ++id) {
    tau[id] = est.in_spanner[id] ? 1.0 : 1.0 / alpha_est;
    if (est.in_spanner[id]) ++est.spanner_edges;
  }
  est.tau = LeverageEstimates(std::move(tau), Provenance::spanner);
  return est;
}

}  // namespace resparse
