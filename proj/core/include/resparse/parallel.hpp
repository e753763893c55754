#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <vector>

#include "resparse/graph.hpp"
#include "resparse/leverage.hpp"
#include "resparse/random.hpp"
#include "resparse/spanner.hpp"

namespace resparse {

struct ParallelConfig {
  double epsilon = 0.25;
  double alpha_coeff = 100.0;
  double stop_coeff = 100.0;
  // SpannerEstimate is called with estimate_ratio * alpha.
  double estimate_ratio = 10.0;
  double c_k = 3.0;
  SpannerConfig spanner;
  Seed seed = 0;
  // Default ceil(2 log2 n).
  std::optional<std::size_t> max_rounds;
  // Measure eps* of every round against the input.
  bool measure_epsilon = true;
  // Keep each round's spanner peels for forest_decomposition.
  bool track_forests = false;
  // Keep every p < 1 sampling decision for a game replay.
  bool record_decisions = false;
};

// alpha_coeff ln(n) / eps^2
double parallel_alpha(std::size_t n, double epsilon, double alpha_coeff);
// stop_coeff alpha n ln(n) max(1, ln ln n)
double parallel_threshold(std::size_t n, double epsilon, double alpha_coeff,
                          double stop_coeff);
std::size_t default_max_rounds(std::size_t n);

struct EdgeDecision {
  std::size_t origin = 0;  // input edge id
  double p = 1.0;
  bool kept = true;
};

struct ParallelRound {
  std::size_t round = 0;  // 1-based
  std::size_t edges_in = 0;
  std::size_t edges_out = 0;
  std::size_t spanner_edges = 0;
  std::size_t peel_rounds = 0;
  std::optional<double> epsilon_star;
  bool epsilon_lower_bound = false;
  std::vector<EdgeDecision> decisions;  // when recorded
  // Peels of this round with edge ids into the input graph (when tracked).
  std::vector<SpannerForest> peels;
};

struct ParallelResult {
  WeightedGraph graph;
  std::vector<std::size_t> origin;  // input edge id of each output edge
  double alpha = 0.0;
  double threshold = 0.0;
  bool forests_tracked = false;
  std::vector<ParallelRound> rounds;
};

// One sampling step: p_e = min(1, alpha tau_hat_e), kept edges reweighted
// by 1/p_e, in edge order. kept[k] is the input id of output edge k.
// Decisions with p < 1 are appended when requested.
WeightedGraph sample_edges(const WeightedGraph& g, const LeverageEstimates& tau_hat,
                           double alpha, Rng& rng, std::vector<std::size_t>& kept,
                           std::vector<EdgeDecision>* decisions = nullptr);

// Estimate, sample and reweight until the edge count drops below the
// threshold. Throws SolverError when max_rounds pass without reaching the
// threshold, InputError on a bad config.
ParallelResult parallel_sparsify(const WeightedGraph& g, const ParallelConfig& config);

// round,edges_in,edges_out,spanner_edges,epsilon_star,epsilon_kind
void write_round_log_csv(std::ostream& out, const ParallelResult& result);

struct ForestDecomposition {
  // Output edge ids per forest.
  std::vector<std::vector<std::size_t>> forests;
  std::size_t from_peels = 0;  // forests taken from spanner peels
};

// Splits the output into forests: each spanner forest of every peel,
// restricted to output edges not yet covered, then greedy forests for what
// no peel covered. Every forest is checked acyclic. Throws InputError when
// no round ran or forests were not tracked.
ForestDecomposition forest_decomposition(const WeightedGraph& input,
                                         const ParallelResult& result);

}  // namespace resparse
