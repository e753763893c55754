#include "resparse/parallel.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>
#include <string>

#include "resparse/edge_list.hpp"
#include "resparse/error.hpp"
#include "resparse/linalg.hpp"

namespace resparse {

double parallel_alpha(std::size_t n, double epsilon, double alpha_coeff) {
  const double ln_n = std::log(static_cast<double>(std::max<std::size_t>(n, 2)));
  return alpha_coeff * ln_n / (epsilon * epsilon);
}

double parallel_threshold(std::size_t n, double epsilon, double alpha_coeff,
                          double stop_coeff) {
  const double ln_n = std::log(static_cast<double>(std::max<std::size_t>(n, 2)));
  return stop_coeff * parallel_alpha(n, epsilon, alpha_coeff) * static_cast<double>(n) *
         ln_n * std::max(1.0, std::log(ln_n));
}

std::size_t default_max_rounds(std::size_t n) {
  const double r = std::ceil(2.0 * std::log2(static_cast<double>(std::max<std::size_t>(n, 2))));
  return static_cast<std::size_t>(r);
}

WeightedGraph sample_edges(const WeightedGraph& g, const LeverageEstimates& tau_hat,
                           double alpha, Rng& rng, std::vector<std::size_t>& kept,
                           std::vector<EdgeDecision>* decisions) {
  if (tau_hat.size() != g.num_edges()) throw InputError("sample_edges: one estimate per edge");
  std::vector<Edge> edges;
  kept.clear();
  for (std::size_t id = 0; id < g.num_edges(); ++id) {
    const double p = std::min(1.0, alpha * tau_hat[id]);
    const Edge& e = g.edge(id);
    if (p < 1.0) {
      const bool keep = rng.uniform() < p;
      if (decisions) decisions->push_back({id, p, keep});
      if (!keep) continue;
      edges.push_back(Edge{e.u, e.v, e.w / p});
    } else {
      edges.push_back(e);
    }
    kept.push_back(id);
  }
  return WeightedGraph(g.num_vertices(), std::move(edges));
}

ParallelResult parallel_sparsify(const WeightedGraph& g, const ParallelConfig& config) {
  if (!(config.epsilon > 0.0 && config.epsilon <= 0.5)) {
    throw InputError("parallel: epsilon must lie in (0, 1/2]");
  }
  if (!(config.alpha_coeff > 0.0 && config.stop_coeff > 0.0 && config.estimate_ratio > 0.0)) {
    throw InputError("parallel: alpha_coeff, stop_coeff and estimate_ratio must be positive");
  }
  const std::size_t n = g.num_vertices();
  ParallelResult result{g, {}, parallel_alpha(n, config.epsilon, config.alpha_coeff),
                        parallel_threshold(n, config.epsilon, config.alpha_coeff, config.stop_coeff),
                        config.track_forests, {}};
  result.origin.resize(g.num_edges());
  for (std::size_t id = 0; id < result.origin.size(); ++id) result.origin[id] = id;

  const double alpha_est = config.estimate_ratio * result.alpha;
  if (alpha_est < 1.0) throw InputError("parallel: estimate_ratio * alpha must be at least 1");
  const std::size_t max_rounds = config.max_rounds ? *config.max_rounds : default_max_rounds(n);
  const SpannerEstimateConfig est_config{config.c_k, config.spanner};

  while (static_cast<double>(result.graph.num_edges()) > result.threshold) {
    if (result.rounds.size() >= max_rounds) {
      throw SolverError("parallel: " + std::to_string(max_rounds) + " rounds ran and " +
                        std::to_string(result.graph.num_edges()) + " edges remain above threshold " +
                        format_weight(result.threshold));
    }
    const std::uint64_t r = result.rounds.size();
    const WeightedGraph& cur = result.graph;
    SpannerEstimate est = spanner_estimate(cur, alpha_est, est_config, derive_seed(config.seed, r, 1));

    ParallelRound info;
    info.round = result.rounds.size() + 1;
    info.edges_in = cur.num_edges();
    info.spanner_edges = est.spanner_edges;
    info.peel_rounds = est.rounds_run;

    Rng rng(derive_seed(config.seed, r, 2));
    std::vector<std::size_t> kept;
    WeightedGraph next = sample_edges(cur, est.tau, result.alpha, rng, kept,
                                      config.record_decisions ? &info.decisions : nullptr);
    std::vector<std::size_t> origin(kept.size());
    for (std::size_t k = 0; k < kept.size(); ++k) origin[k] = result.origin[kept[k]];
    for (EdgeDecision& d : info.decisions) d.origin = result.origin[d.origin];
    if (config.track_forests) {
      for (SpannerForest& peel : est.peels) {
        for (Forest& f : peel.forests) {
          for (std::size_t& id : f.edges) id = result.origin[id];
        }
      }
      info.peels = std::move(est.peels);
    }

    result.graph = std::move(next);
    result.origin = std::move(origin);
    info.edges_out = result.graph.num_edges();
    if (config.measure_epsilon) {
      const SpectralError err = spectral_epsilon(g, result.graph, derive_seed(config.seed, r, 3));
      info.epsilon_star = err.epsilon;
      info.epsilon_lower_bound = err.lower_bound;
    }
    result.rounds.push_back(std::move(info));
  }
  return result;
}

void write_round_log_csv(std::ostream& out, const ParallelResult& result) {
  out << "round,edges_in,edges_out,spanner_edges,epsilon_star,epsilon_kind\n";
  for (const ParallelRound& r : result.rounds) {
    out << r.round << ',' << r.edges_in << ',' << r.edges_out << ',' << r.spanner_edges << ',';
    if (r.epsilon_star) out << format_weight(*r.epsilon_star);
    out << ',';
    if (r.epsilon_star) out << (r.epsilon_lower_bound ? "lower_bound" : "exact");
    out << '\n';
  }
}

ForestDecomposition forest_decomposition(const WeightedGraph& input,
                                         const ParallelResult& result) {
  if (result.rounds.empty()) throw InputError("forest_decomposition: no rounds");
  if (!result.forests_tracked) throw InputError("forest_decomposition: forest tracking disabled");
  const std::size_t n = input.num_vertices();
  const WeightedGraph& out = result.graph;

  // Output edge ids by input edge id (input ids are unique in the output).
  std::vector<std::size_t> output_of(input.num_edges(), kNoEdge);
  for (std::size_t k = 0; k < result.origin.size(); ++k) output_of[result.origin[k]] = k;

  ForestDecomposition dec;
  std::vector<bool> covered(out.num_edges(), false);
  for (const ParallelRound& round : result.rounds) {
    for (const SpannerForest& peel : round.peels) {
      for (const Forest& f : peel.forests) {
        std::vector<std::size_t> part;
        for (std::size_t id : f.edges) {
          const std::size_t k = output_of[id];
          if (k == kNoEdge || covered[k]) continue;
          covered[k] = true;
          part.push_back(k);
        }
        if (!part.empty()) dec.forests.push_back(std::move(part));
      }
    }
  }
  dec.from_peels = dec.forests.size();

  std::vector<std::size_t> rest;
  for (std::size_t k = 0; k < covered.size(); ++k) {
    if (!covered[k]) rest.push_back(k);
  }
  while (!rest.empty()) {
    DisjointSets sets(n);
    std::vector<std::size_t> forest;
    std::vector<std::size_t> left;
    for (std::size_t k : rest) {
      const Edge& e = out.edge(k);
      (sets.unite(e.u, e.v) ? forest : left).push_back(k);
    }
    dec.forests.push_back(std::move(forest));
    rest = std::move(left);
  }

  std::size_t total = 0;
  for (const auto& f : dec.forests) {
    DisjointSets sets(n);
    for (std::size_t k : f) {
      const Edge& e = out.edge(k);
      if (!sets.unite(e.u, e.v)) throw ContractViolation("forest_decomposition: forest has a cycle");
    }
    total += f.size();
  }
  if (total != out.num_edges()) throw ContractViolation("forest_decomposition: forests do not cover the output");
  return dec;
}

}  // namespace resparse
