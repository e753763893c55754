#pragma once

#include <cstddef>
#include <span>
#include <string_view>
#include <vector>

#include "resparse/graph.hpp"
#include "resparse/linalg.hpp"
#include "resparse/random.hpp"
#include "resparse/rows.hpp"

namespace resparse {

enum class Provenance { exact, sketched, spanner };

std::string_view provenance_name(Provenance p);

// Per-row leverage scores or upper bounds on them. Values lie in [0, 1]
// (strictly positive for graph rows); the sum is cached.
class LeverageEstimates {
 public:
  LeverageEstimates(std::vector<double> values, Provenance provenance);

  std::size_t size() const { return values_.size(); }
  double operator[](std::size_t i) const { return values_[i]; }
  const std::vector<double>& values() const { return values_; }
  Provenance provenance() const { return provenance_; }
  double sum() const { return sum_; }

 private:
  std::vector<double> values_;
  Provenance provenance_;
  double sum_ = 0.0;
};

// tau_e = w_e b_e^T L^+ b_e from a dense pseudoinverse. Bridges are exactly 1.
// Throws CapExceeded above dense_cap().
LeverageEstimates exact_leverage(const WeightedGraph& g);

// tau_i = weight_i a_i^T M^+ a_i with M = sum_j weight_j a_j a_j^T.
LeverageEstimates exact_leverage(std::size_t n, std::span<const Row> rows,
                                 std::span<const double> weights = {});

// Sketch rows used for accuracy delta: ceil(24 ln n / delta^2), at least 1.
std::size_t sketch_dimension(std::size_t n, double delta);

// Johnson-Lindenstrauss upper bounds: tau_hat_i = min(1, |Z a_i|^2 / (1 - delta))
// with Z = Q A M^+ and Q a random +-1/sqrt(k) matrix, one CG solve per sketch
// row. With high probability every tau_hat dominates the true leverage and
// the total is at most (1 + delta) / (1 - delta) * n <= 2n. delta must lie in
// (0, 1/3].
LeverageEstimates sketched_leverage_upper(const WeightedGraph& g, double delta,
                                          Seed seed);
LeverageEstimates sketched_leverage_upper(std::size_t n, std::span<const Row> rows,
                                          std::span<const double> weights,
                                          double delta, Seed seed);

}  // namespace resparse
