#include "resparse/leverage.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <string>

#include "resparse/error.hpp"

namespace resparse {

std::string_view provenance_name(Provenance p) {
  switch (p) {
    case Provenance::exact: return "exact";
    case Provenance::sketched: return "sketched";
    case Provenance::spanner: return "spanner";
  }
  return "unknown";
}

LeverageEstimates::LeverageEstimates(std::vector<double> values, Provenance provenance)
    : values_(std::move(values)), provenance_(provenance) {
  for (double v : values_) {
    if (!(v >= 0.0 && v <= 1.0)) {
      throw ContractViolation("leverage estimate outside [0, 1]: " + std::to_string(v));
    }
    sum_ += v;
  }
}

namespace {

void require_dense(std::size_t n, const char* what) {
  if (n > dense_cap()) {
    throw CapExceeded(std::string(what) + ": n = " + std::to_string(n) +
                      " exceeds dense cap " + std::to_string(dense_cap()));
  }
}

double weight_at(std::span<const double> weights, std::size_t i) {
  return weights.empty() ? 1.0 : weights[i];
}

}  // namespace

LeverageEstimates exact_leverage(const WeightedGraph& g) {
  require_dense(g.num_vertices(), "exact_leverage");
  const DenseMatrix l = laplacian(g);
  const ComponentKernel kernel = ComponentKernel::of(g);
  const DenseMatrix pinv = RangeFactor::of(l, kernel.dimension()).pseudo_inverse();
  const std::vector<bool> bridge = find_bridges(g);
  std::vector<double> tau(g.num_edges());
  for (std::size_t id = 0; id < g.num_edges(); ++id) {
    const Edge& e = g.edge(id);
    if (bridge[id]) {
      tau[id] = 1.0;
      continue;
    }
    const double r_eff = pinv(e.u, e.u) + pinv(e.v, e.v) - 2.0 * pinv(e.u, e.v);
    tau[id] = std::clamp(e.w * r_eff, 0.0, 1.0);
  }
  return LeverageEstimates(std::move(tau), Provenance::exact);
}

LeverageEstimates exact_leverage(std::size_t n, std::span<const Row> rows,
                                 std::span<const double> weights) {
  require_dense(n, "exact_leverage");
  const DenseMatrix m = gram(n, rows, weights);
  const DenseMatrix w = RangeFactor::of(m).whitening();
  std::vector<double> tau(rows.size());
  Vector coords(w.cols());
  for (std::size_t i = 0; i < rows.size(); ++i) {
    coords.setZero();
    for (const RowEntry& e : rows[i].entries()) {
      coords.noalias() += e.value * w.row(static_cast<Eigen::Index>(e.index)).transpose();
    }
    tau[i] = std::clamp(weight_at(weights, i) * coords.squaredNorm(), 0.0, 1.0);
  }
  return LeverageEstimates(std::move(tau), Provenance::exact);
}

std::size_t sketch_dimension(std::size_t n, double delta) {
  const double k = std::ceil(24.0 * std::log(static_cast<double>(n)) / (delta * delta));
  return std::max<std::size_t>(1, static_cast<std::size_t>(k));
}

namespace {

// Only graph-derived rows have a kernel we know combinatorially.
std::optional<ComponentKernel> graph_row_kernel(std::size_t n, std::span<const Row> rows) {
  std::vector<Edge> support;
  support.reserve(rows.size());
  for (const Row& r : rows) {
    if (!r.edge()) return std::nullopt;
    support.push_back(*r.edge());
  }
  return ComponentKernel(connected_components(n, support));
}

}  // namespace

LeverageEstimates sketched_leverage_upper(std::size_t n, std::span<const Row> rows,
                                          std::span<const double> weights,
                                          double delta, Seed seed) {
  if (!(delta > 0.0 && delta <= 1.0 / 3.0)) {
    throw InputError("sketched_leverage_upper: delta must lie in (0, 1/3]");
  }
  const std::size_t m = rows.size();
  const std::size_t k = sketch_dimension(n, delta);
  const double q_scale = 1.0 / std::sqrt(static_cast<double>(k));
  const std::optional<ComponentKernel> kernel = graph_row_kernel(n, rows);
  const GramOperator op(n, rows, weights);
  std::vector<double> root_weight(m);
  for (std::size_t i = 0; i < m; ++i) root_weight[i] = std::sqrt(weight_at(weights, i));

  std::vector<double> acc(m, 0.0);
  constexpr std::size_t kBlock = 32;
  std::vector<Vector> z(kBlock);
  for (std::size_t start = 0; start < k; start += kBlock) {
    const auto count = static_cast<std::ptrdiff_t>(std::min(kBlock, k - start));
    std::exception_ptr failure;
#pragma omp parallel for schedule(dynamic)
    for (std::ptrdiff_t j = 0; j < count; ++j) {
      try {
        Rng rng(derive_seed(seed, start + static_cast<std::size_t>(j)));
        Vector b = Vector::Zero(static_cast<Eigen::Index>(n));
        for (std::size_t i = 0; i < m; ++i) {
          const double q = rng.sign() * q_scale * root_weight[i];
          for (const RowEntry& e : rows[i].entries()) b[static_cast<Eigen::Index>(e.index)] += q * e.value;
        }
        z[static_cast<std::size_t>(j)] = pinv_apply(op, b, kernel ? &*kernel : nullptr).x;
      } catch (...) {
#pragma omp critical(resparse_sketch_failure)
        if (!failure) failure = std::current_exception();
      }
    }
    if (failure) std::rethrow_exception(failure);
    // Accumulate in a fixed order so results do not depend on thread count.
    for (std::ptrdiff_t j = 0; j < count; ++j) {
      const Vector& zj = z[static_cast<std::size_t>(j)];
      for (std::size_t i = 0; i < m; ++i) {
        const double t = root_weight[i] * rows[i].dot(zj);
        acc[i] += t * t;
      }
    }
  }
  std::vector<double> tau(m);
  for (std::size_t i = 0; i < m; ++i) tau[i] = std::min(1.0, acc[i] / (1.0 - delta));
  return LeverageEstimates(std::move(tau), Provenance::sketched);
}

LeverageEstimates sketched_leverage_upper(const WeightedGraph& g, double delta,
                                          Seed seed) {
  const std::vector<Row> rows = graph_rows(g);
  LeverageEstimates sketch = sketched_leverage_upper(g.num_vertices(), rows, {}, delta, seed);
  std::vector<double> tau = sketch.values();
  const std::vector<bool> bridge = find_bridges(g);
  for (std::size_t id = 0; id < tau.size(); ++id) {
    if (bridge[id]) tau[id] = 1.0;
  }
  return LeverageEstimates(std::move(tau), Provenance::sketched);
}

}  // namespace resparse
