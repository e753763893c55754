#pragma once

#include <cstddef>
#include <iosfwd>
#include <optional>
#include <span>
#include <vector>

#include "resparse/clustering.hpp"
#include "resparse/graph.hpp"
#include "resparse/leverage.hpp"
#include "resparse/random.hpp"

namespace resparse {

struct SpannerConfig {
  double c0 = 4.0;
  double beta = 1.0 / 3.0;
  std::optional<std::size_t> t_override;
  // Stretch constant C_str in C_str * log2(n); only used by callers that
  // measure stretch. Calibrated on unit-length K_20 and G(200, 0.1): the
  // worst per-edge success rate is flat from 1 upward (0.93 and 0.85).
  double c_str = 1.0;
  // Assert cluster diameters and the per-group forest diameter induction.
  bool strict = false;
};

// max(1, ceil(log2(8 c0 log2 n)))
std::size_t spanner_groups(std::size_t n, double c0);

// floor(log2 l)
int length_scale(double length);

struct Forest {
  std::size_t group = 0;
  std::vector<std::size_t> edges;  // ids into the graph, by scale then length
  std::vector<int> scales;         // origin scale per edge
};

struct SpannerForest {
  std::size_t num_vertices = 0;
  std::size_t t = 1;
  std::vector<Forest> forests;  // exactly t, group j at index j

  std::size_t num_edges() const;
  // Sorted ids of all spanner edges.
  std::vector<std::size_t> edge_ids() const;
};

// One forest per length scale group, unioned mod t. lengths[e] must be finite and positive.
SpannerForest prob_spanner(const WeightedGraph& g, std::span<const double> lengths,
                           const SpannerConfig& config, Seed seed);

// Throws ContractViolation if some forest has a cycle or the edge total
// exceeds t (n - 1).
void check_forest(const WeightedGraph& g, const SpannerForest& forest);

// Edge-list file of the spanner edges with a "# forest j scale i" comment
// before each run of edges of one forest and scale.
void write_spanner_forest(std::ostream& out, const WeightedGraph& g,
                          const SpannerForest& forest);

struct SpannerEstimateConfig {
  double c_k = 3.0;
  SpannerConfig spanner;
};

struct SpannerEstimate {
  LeverageEstimates tau;
  std::vector<bool> in_spanner;
  std::size_t rounds_planned = 0;
  std::size_t rounds_run = 0;  // peels on a nonempty residual
  std::size_t spanner_edges = 0;
  // One spanner per peel with edge ids into the input graph.
  std::vector<SpannerForest> peels;
};

// ceil(c_k alpha_est ln n), at least 1
std::size_t peel_rounds(std::size_t n, double alpha_est, double c_k);

// Peel spanners of the residual graph with lengths 1/w; peeled
// edges get 1, the rest 1/alpha_est.
SpannerEstimate spanner_estimate(const WeightedGraph& g, double alpha_est,
                                 const SpannerEstimateConfig& config, Seed seed);

}  // namespace resparse
