#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "resparse/graph.hpp"
#include "resparse/leverage.hpp"
#include "resparse/random.hpp"
#include "resparse/rows.hpp"

namespace resparse {

enum class LeverageMode {
  // exact below dense_cap(), sketched above
  automatic,
  exact,
  sketched,
};

struct StreamConfig {
  double epsilon = 0.25;
  double beta_coeff = 200.0;
  double buffer_coeff = 20.0;
  double delta_jl = 0.25;
  LeverageMode leverage_mode = LeverageMode::automatic;
  Seed seed = 0;
  // Throw ContractViolation when the peak buffer exceeds the space bound.
  bool assert_space = false;
  // Keep every sampling decision so the run can be replayed as a game.
  bool record_decisions = false;
};

// beta = beta_coeff * ln(n) / eps^2 (ln 2 is used for n = 1).
double stream_beta(std::size_t n, double epsilon, double beta_coeff);
// buffer_coeff * n * beta; the buffer is resparsified once it holds more.
double stream_threshold(std::size_t n, double epsilon, double beta_coeff,
                        double buffer_coeff);

struct BufferedRow {
  std::uint64_t source = 0;  // 0-based position in the input stream
  Row row;                   // as it arrived
  double multiplier = 1.0;   // retained row is sqrt(multiplier) * row
};

class SparsifierBuffer {
 public:
  explicit SparsifierBuffer(std::size_t dimension) : dimension_(dimension) {}

  std::size_t dimension() const { return dimension_; }
  std::size_t size() const { return rows_.size(); }
  bool empty() const { return rows_.empty(); }
  const BufferedRow& operator[](std::size_t i) const { return rows_[i]; }
  std::span<const BufferedRow> rows() const { return rows_; }

  void append(std::uint64_t source, Row row);
  // Multiplies row i's multiplier by factor (0 drops it at the next compact).
  void rescale(std::size_t i, double factor);
  // Removes rows with zero multiplier, keeping arrival order.
  void compact();

  // The plain rows and multipliers, for leverage computations.
  std::vector<Row> plain_rows() const;
  std::vector<double> multipliers() const;
  // sum multiplier * a a^T
  DenseMatrix matrix() const;

 private:
  std::size_t dimension_;
  std::vector<BufferedRow> rows_;
};

struct SampleDecision {
  std::uint64_t source = 0;
  double p = 1.0;  // beta * tau_hat, only recorded when below 1
  bool kept = true;
};

// One resparsification of the buffer with the given estimates: rows with
// beta * tau_hat < 1 are kept with that probability and rescaled by
// 1 / (beta tau_hat), the rest are untouched. Throws ContractViolation when
// the estimates sum past 2n or do not match the buffer.
std::vector<SampleDecision> resparsify_once(SparsifierBuffer& buffer,
                                            const LeverageEstimates& tau_hat,
                                            double beta, Rng& rng);

// Leverage upper bounds of the current buffer rows per the configured mode.
LeverageEstimates buffer_leverage(const SparsifierBuffer& buffer,
                                  const StreamConfig& config, Seed seed);

struct StreamRound {
  std::uint64_t at_row = 0;  // stream rows consumed when it fired
  std::size_t rows_in = 0;
  std::size_t rows_out = 0;
  double tau_sum = 0.0;
  Provenance provenance = Provenance::exact;
};

struct StreamResult {
  SparsifierBuffer buffer;
  std::uint64_t rows_consumed = 0;
  double beta = 0.0;
  double threshold = 0.0;
  std::size_t peak_rows = 0;
  std::vector<StreamRound> rounds;
  // Filled when record_decisions is set, one vector per round.
  std::vector<std::vector<SampleDecision>> decisions;
};

// StreamSparsify over a single forward pass. Errors: InputError on bad
// config or a row of the wrong dimension, SolverError after 3 consecutive
// rounds that leave the buffer above threshold.
StreamResult stream_sparsify(RowStream& stream, const StreamConfig& config);

struct StreamGraphResult {
  WeightedGraph graph;
  StreamResult stats;
};

// Graph specialization. Every row must carry its origin edge; the output
// keeps surviving edges in arrival order with weight multiplier * w.
StreamGraphResult stream_sparsify_graph(RowStream& stream, const StreamConfig& config);

WeightedGraph buffer_graph(const SparsifierBuffer& buffer);

}  // namespace resparse
