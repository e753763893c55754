#include "resparse/rows.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "resparse/error.hpp"

namespace resparse {

Row::Row(std::size_t dimension, std::vector<RowEntry> entries)
    : dimension_(dimension), entries_(std::move(entries)) {
  std::sort(entries_.begin(), entries_.end(),
            [](const RowEntry& a, const RowEntry& b) { return a.index < b.index; });
  for (std::size_t k = 0; k < entries_.size(); ++k) {
    if (entries_[k].index >= dimension_) {
      throw InputError("row entry index " + std::to_string(entries_[k].index) +
                       " out of range for dimension " + std::to_string(dimension_));
    }
    if (!std::isfinite(entries_[k].value)) {
      throw InputError("row entry is not finite");
    }
    if (k > 0 && entries_[k].index == entries_[k - 1].index) {
      throw InputError("duplicate row entry index");
    }
  }
}

Row Row::from_dense(const Vector& values) {
  std::vector<RowEntry> entries;
  for (Eigen::Index i = 0; i < values.size(); ++i) {
    if (values[i] != 0.0) entries.push_back({static_cast<std::size_t>(i), values[i]});
  }
  return Row(static_cast<std::size_t>(values.size()), std::move(entries));
}

Row Row::from_edge(std::size_t n, const Edge& e) {
  const double s = std::sqrt(e.w);
  const std::size_t lo = std::min(e.u, e.v);
  const std::size_t hi = std::max(e.u, e.v);
  Row row(n, {{lo, s}, {hi, -s}});
  row.edge_ = e;
  return row;
}

double Row::dot(const Vector& x) const {
  double sum = 0.0;
  for (const RowEntry& e : entries_) sum += e.value * x[static_cast<Eigen::Index>(e.index)];
  return sum;
}

double Row::squared_norm() const {
  double sum = 0.0;
  for (const RowEntry& e : entries_) sum += e.value * e.value;
  return sum;
}

Vector Row::dense() const {
  Vector out = Vector::Zero(static_cast<Eigen::Index>(dimension_));
  for (const RowEntry& e : entries_) out[static_cast<Eigen::Index>(e.index)] = e.value;
  return out;
}

void Row::add_outer_product(DenseMatrix& m, double weight) const {
  for (const RowEntry& a : entries_) {
    for (const RowEntry& b : entries_) {
      m(static_cast<Eigen::Index>(a.index), static_cast<Eigen::Index>(b.index)) +=
          weight * a.value * b.value;
    }
  }
}

std::vector<Row> graph_rows(const WeightedGraph& g) {
  std::vector<Row> rows;
  rows.reserve(g.num_edges());
  for (const Edge& e : g.edges()) rows.push_back(Row::from_edge(g.num_vertices(), e));
  return rows;
}

VectorRowStream::VectorRowStream(std::size_t dimension, std::vector<Row> rows)
    : dimension_(dimension), rows_(std::move(rows)) {
  for (const Row& r : rows_) {
    if (r.dimension() != dimension_) throw InputError("row dimension mismatch");
  }
}

std::optional<Row> VectorRowStream::produce() {
  if (cursor_ == rows_.size()) return std::nullopt;
  return std::move(rows_[cursor_++]);
}

std::optional<Row> GraphRowStream::produce() {
  if (cursor_ == graph_->num_edges()) return std::nullopt;
  return Row::from_edge(graph_->num_vertices(), graph_->edge(cursor_++));
}

std::optional<Row> EdgeReaderRowStream::produce() {
  auto e = reader_->next();
  if (!e) return std::nullopt;
  return Row::from_edge(reader_->num_vertices(), *e);
}

}  // namespace resparse
