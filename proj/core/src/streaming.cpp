#include "resparse/streaming.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "resparse/error.hpp"
#include "resparse/linalg.hpp"

namespace resparse {
namespace {

constexpr int kMaxStalledRounds = 3;

void validate(const StreamConfig& c) {
  if (!(c.epsilon > 0.0 && c.epsilon <= 0.5)) {
    throw InputError("stream: epsilon must lie in (0, 1/2]");
  }
  if (!(c.beta_coeff > 0.0) || !(c.buffer_coeff > 0.0)) {
    throw InputError("stream: beta_coeff and buffer_coeff must be positive");
  }
  if (c.leverage_mode != LeverageMode::exact && !(c.delta_jl > 0.0 && c.delta_jl <= 1.0 / 3.0)) {
    throw InputError("stream: delta_jl must lie in (0, 1/3]");
  }
}

}  // namespace

double stream_beta(std::size_t n, double epsilon, double beta_coeff) {
  const double ln_n = std::log(static_cast<double>(std::max<std::size_t>(n, 2)));
  return beta_coeff * ln_n / (epsilon * epsilon);
}

double stream_threshold(std::size_t n, double epsilon, double beta_coeff,
                        double buffer_coeff) {
  return buffer_coeff * static_cast<double>(n) * stream_beta(n, epsilon, beta_coeff);
}

void SparsifierBuffer::append(std::uint64_t source, Row row) {
  if (row.dimension() != dimension_) throw InputError("buffer: row dimension mismatch");
  rows_.push_back(BufferedRow{source, std::move(row), 1.0});
}

void SparsifierBuffer::rescale(std::size_t i, double factor) {
  rows_[i].multiplier *= factor;
}

void SparsifierBuffer::compact() {
  std::erase_if(rows_, [](const BufferedRow& r) { return r.multiplier == 0.0; });
}

std::vector<Row> SparsifierBuffer::plain_rows() const {
  std::vector<Row> out;
  out.reserve(rows_.size());
  for (const BufferedRow& r : rows_) out.push_back(r.row);
  return out;
}

std::vector<double> SparsifierBuffer::multipliers() const {
  std::vector<double> out;
  out.reserve(rows_.size());
  for (const BufferedRow& r : rows_) out.push_back(r.multiplier);
  return out;
}

DenseMatrix SparsifierBuffer::matrix() const {
  DenseMatrix m = DenseMatrix::Zero(static_cast<Eigen::Index>(dimension_),
                                    static_cast<Eigen::Index>(dimension_));
  for (const BufferedRow& r : rows_) r.row.add_outer_product(m, r.multiplier);
  return m;
}

std::vector<SampleDecision> resparsify_once(SparsifierBuffer& buffer,
                                            const LeverageEstimates& tau_hat,
                                            double beta, Rng& rng) {
  if (tau_hat.size() != buffer.size()) {
    throw ContractViolation("resparsify: estimate count does not match buffer");
  }
  const double n = static_cast<double>(buffer.dimension());
  if (tau_hat.sum() > 2.0 * n) {
    throw ContractViolation("resparsify: leverage estimates sum to " +
                            format_weight(tau_hat.sum()) + " > 2n");
  }
  std::vector<SampleDecision> decisions;
  for (std::size_t i = 0; i < buffer.size(); ++i) {
    const double p = beta * tau_hat[i];
    if (p >= 1.0) continue;
    const bool kept = rng.uniform() < p;
    buffer.rescale(i, kept ? 1.0 / p : 0.0);
    decisions.push_back(SampleDecision{buffer[i].source, p, kept});
  }
  buffer.compact();
  return decisions;
}

LeverageEstimates buffer_leverage(const SparsifierBuffer& buffer,
                                  const StreamConfig& config, Seed seed) {
  const std::vector<Row> rows = buffer.plain_rows();
  const std::vector<double> weights = buffer.multipliers();
  bool exact = config.leverage_mode == LeverageMode::exact;
  if (config.leverage_mode == LeverageMode::automatic) exact = buffer.dimension() <= dense_cap();
  if (exact) return exact_leverage(buffer.dimension(), rows, weights);
  return sketched_leverage_upper(buffer.dimension(), rows, weights, config.delta_jl, seed);
}

StreamResult stream_sparsify(RowStream& stream, const StreamConfig& config) {
  validate(config);
  const std::size_t n = stream.dimension();
  if (n < 1) throw InputError("stream: dimension must be at least 1");

  StreamResult result{SparsifierBuffer(n), 0, 0.0, 0.0, 0, {}, {}};
  result.beta = stream_beta(n, config.epsilon, config.beta_coeff);
  result.threshold = stream_threshold(n, config.epsilon, config.beta_coeff, config.buffer_coeff);

  SparsifierBuffer& buffer = result.buffer;
  int stalled = 0;
  while (std::optional<Row> row = stream.next()) {
    if (row->dimension() != n) {
      throw InputError("stream: row " + std::to_string(result.rows_consumed) +
                       " has dimension " + std::to_string(row->dimension()) +
                       ", expected " + std::to_string(n));
    }
    buffer.append(result.rows_consumed, std::move(*row));
    ++result.rows_consumed;
    result.peak_rows = std::max(result.peak_rows, buffer.size());
    if (static_cast<double>(buffer.size()) <= result.threshold) continue;

    const std::uint64_t round = result.rounds.size();
    const LeverageEstimates tau = buffer_leverage(buffer, config, derive_seed(config.seed, round, 1));
    Rng rng(derive_seed(config.seed, round, 2));
    StreamRound info{result.rows_consumed, buffer.size(), 0, tau.sum(), tau.provenance()};
    std::vector<SampleDecision> decisions = resparsify_once(buffer, tau, result.beta, rng);
    info.rows_out = buffer.size();
    result.rounds.push_back(info);
    if (config.record_decisions) result.decisions.push_back(std::move(decisions));

    if (static_cast<double>(buffer.size()) > result.threshold) {
      if (++stalled >= kMaxStalledRounds) {
        throw SolverError("stream: " + std::to_string(kMaxStalledRounds) +
                          " consecutive resparsifications left the buffer above threshold");
      }
    } else {
      stalled = 0;
    }
  }

  if (stream.delivered() != result.rows_consumed) {
    throw ContractViolation("stream: rows were not consumed exactly once");
  }
  if (config.assert_space && static_cast<double>(result.peak_rows) > result.threshold + 1.0) {
    throw ContractViolation("stream: peak buffer " + std::to_string(result.peak_rows) +
                            " rows exceeds bound " + format_weight(result.threshold + 1.0));
  }
  return result;
}

WeightedGraph buffer_graph(const SparsifierBuffer& buffer) {
  std::vector<Edge> edges;
  edges.reserve(buffer.size());
  for (const BufferedRow& r : buffer.rows()) {
    const auto& e = r.row.edge();
    if (!e) throw InputError("stream: graph output needs rows that carry their edge");
    edges.push_back(Edge{e->u, e->v, e->w * r.multiplier});
  }
  return WeightedGraph(buffer.dimension(), std::move(edges));
}

StreamGraphResult stream_sparsify_graph(RowStream& stream, const StreamConfig& config) {
  StreamResult stats = stream_sparsify(stream, config);
  WeightedGraph g = buffer_graph(stats.buffer);
  return StreamGraphResult{std::move(g), std::move(stats)};
}

}  // namespace resparse
