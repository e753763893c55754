#pragma once

#include <cstddef>
#include <memory>
#include <optional>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "resparse/edge_list.hpp"
#include "resparse/graph.hpp"

namespace resparse {

using Vector = Eigen::VectorXd;
using DenseMatrix = Eigen::MatrixXd;

struct RowEntry {
  std::size_t index = 0;
  double value = 0.0;
};

// A row a_i of an m x n matrix A, stored by its nonzeros. Rows that come
// from a graph edge remember that edge so a sampled row can be turned back
// into a reweighted edge without losing the original weight bits.
class Row {
 public:
  // Entries must have distinct in-range indices and finite values; they are
  // sorted by index on construction.
  Row(std::size_t dimension, std::vector<RowEntry> entries);

  static Row from_dense(const Vector& values);
  // sqrt(w) (e_u - e_v) oriented so the smaller endpoint carries +sqrt(w).
  static Row from_edge(std::size_t n, const Edge& e);

  std::size_t dimension() const { return dimension_; }
  std::span<const RowEntry> entries() const { return entries_; }
  const std::optional<Edge>& edge() const { return edge_; }

  double dot(const Vector& x) const;
  double squared_norm() const;
  Vector dense() const;
  // m += weight * a a^T
  void add_outer_product(DenseMatrix& m, double weight) const;

 private:
  std::size_t dimension_;
  std::vector<RowEntry> entries_;
  std::optional<Edge> edge_;
};

std::vector<Row> graph_rows(const WeightedGraph& g);

// Forward-only, single-consumer source of rows of a fixed dimension. Every
// row is handed out exactly once; delivered() counts them.
class RowStream {
 public:
  virtual ~RowStream() = default;

  virtual std::size_t dimension() const = 0;

  std::optional<Row> next() {
    if (exhausted_) return std::nullopt;
    auto row = produce();
    if (!row) {
      exhausted_ = true;
      return std::nullopt;
    }
    ++delivered_;
    return row;
  }

  std::size_t delivered() const { return delivered_; }
  bool exhausted() const { return exhausted_; }

 protected:
  virtual std::optional<Row> produce() = 0;

 private:
  std::size_t delivered_ = 0;
  bool exhausted_ = false;
};

class VectorRowStream final : public RowStream {
 public:
  VectorRowStream(std::size_t dimension, std::vector<Row> rows);
  std::size_t dimension() const override { return dimension_; }

 protected:
  std::optional<Row> produce() override;

 private:
  std::size_t dimension_;
  std::vector<Row> rows_;
  std::size_t cursor_ = 0;
};

// Rows of an in-memory graph in edge-list order. The graph must outlive the
// stream.
class GraphRowStream final : public RowStream {
 public:
  explicit GraphRowStream(const WeightedGraph& g) : graph_(&g) {}
  std::size_t dimension() const override { return graph_->num_vertices(); }

 protected:
  std::optional<Row> produce() override;

 private:
  const WeightedGraph* graph_;
  std::size_t cursor_ = 0;
};

// Rows parsed lazily from an edge-list reader; the graph is never held.
class EdgeReaderRowStream final : public RowStream {
 public:
  explicit EdgeReaderRowStream(EdgeListReader& reader) : reader_(&reader) {}
  std::size_t dimension() const override { return reader_->num_vertices(); }

 protected:
  std::optional<Row> produce() override;

 private:
  EdgeListReader* reader_;
};

inline GraphRowStream rows_of(const WeightedGraph& g) {
  return GraphRowStream(g);
}

}  // namespace resparse
