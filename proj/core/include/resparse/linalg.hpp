#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "resparse/graph.hpp"
#include "resparse/random.hpp"
#include "resparse/rows.hpp"

namespace resparse {

// Largest n handed to dense O(n^3) routines. 1024 unless the environment
// variable RESPARSE_DENSE_CAP holds a positive integer.
std::size_t dense_cap();

DenseMatrix laplacian(const WeightedGraph& g);

// sum_i weight_i a_i a_i^T; empty weights mean all ones.
DenseMatrix gram(std::size_t n, std::span<const Row> rows,
                 std::span<const double> weights = {});

double quadratic_form(const DenseMatrix& m, const Vector& x);
// sum_e w_e (x_u - x_v)^2 without forming L.
double quadratic_form(const WeightedGraph& g, const Vector& x);

// Null space spanned by indicator vectors of disjoint vertex groups, i.e.
// the kernel of a graph Laplacian (isolated vertices are singleton groups).
class ComponentKernel {
 public:
  explicit ComponentKernel(Components components);

  static ComponentKernel of(const WeightedGraph& g);
  // Groups from the off-diagonal sparsity pattern of a Laplacian.
  static ComponentKernel of_laplacian(const DenseMatrix& l);

  std::size_t dimension() const { return count_; }
  std::size_t size() const { return label_.size(); }
  const std::vector<std::uint32_t>& label() const { return label_; }

  // x <- x minus its per-group mean.
  void project_out(Vector& x) const;
  // Max over groups of |mean of x on the group|.
  double max_component_mean(const Vector& x) const;

 private:
  std::vector<std::uint32_t> label_;
  std::vector<double> group_size_;
  std::size_t count_;
};

// Symmetric, zero row sums, nonpositive off-diagonal (to tol * max|entry|).
bool looks_like_laplacian(const DenseMatrix& m, double tol = 1e-10);

// Kernel dimension used by the dense routines: component count for
// Laplacians, numerical rank deficiency (relative 1e-10) otherwise.
std::size_t infer_kernel_dimension(const DenseMatrix& m);

// Eigen-decomposition of a PSD matrix restricted to its range:
// M = U diag(lambda) U^T with U n x r orthonormal.
class RangeFactor {
 public:
  static RangeFactor of(const DenseMatrix& m);
  static RangeFactor of(const DenseMatrix& m, std::size_t kernel_dimension);

  std::size_t dimension() const { return static_cast<std::size_t>(range_.rows()); }
  std::size_t rank() const { return static_cast<std::size_t>(range_.cols()); }
  const DenseMatrix& range_basis() const { return range_; }
  const DenseMatrix& kernel_basis() const { return kernel_; }
  const Vector& eigenvalues() const { return eigenvalues_; }

  DenseMatrix pseudo_inverse() const;
  // W = U diag(lambda)^{-1/2}, n x r. W^T a gives coordinates in which M is
  // the identity, so |W^T a|^2 = a^T M^+ a.
  DenseMatrix whitening() const;

 private:
  DenseMatrix range_;
  DenseMatrix kernel_;
  Vector eigenvalues_;
};

// y = A x for a symmetric PSD operator, plus its diagonal for Jacobi
// preconditioning.
class LinearOperator {
 public:
  virtual ~LinearOperator() = default;
  virtual std::size_t size() const = 0;
  virtual void apply(const Vector& x, Vector& y) const = 0;
  virtual Vector diagonal() const = 0;
};

class DenseOperator final : public LinearOperator {
 public:
  explicit DenseOperator(const DenseMatrix& m) : m_(&m) {}
  std::size_t size() const override { return static_cast<std::size_t>(m_->rows()); }
  void apply(const Vector& x, Vector& y) const override { y.noalias() = *m_ * x; }
  Vector diagonal() const override { return m_->diagonal(); }

 private:
  const DenseMatrix* m_;
};

// M = sum_i weight_i a_i a_i^T applied row by row in O(nnz).
class GramOperator final : public LinearOperator {
 public:
  GramOperator(std::size_t n, std::span<const Row> rows,
               std::span<const double> weights = {});
  std::size_t size() const override { return n_; }
  void apply(const Vector& x, Vector& y) const override;
  Vector diagonal() const override;

 private:
  std::size_t n_;
  std::span<const Row> rows_;
  std::span<const double> weights_;
};

struct SolveOptions {
  double tolerance = 1e-10;
  // 0 means 10 * n.
  std::size_t max_iterations = 0;
};

struct SolveResult {
  Vector x;
  std::size_t iterations = 0;
  double relative_residual = 0.0;
};

// x = A^+ b by Jacobi-preconditioned conjugate gradient. When a kernel is
// given, b and every iterate are projected onto its complement, so
// |A x - P b| <= tol |P b| and x is orthogonal to the kernel. Without a
// kernel, b must already lie in range(A). Throws SolverError if the cap is
// reached first.
SolveResult pinv_apply(const LinearOperator& a, const Vector& b,
                       const ComponentKernel* kernel,
                       const SolveOptions& options = {});
// Laplacian convenience: kernel taken from the sparsity pattern of l.
Vector pinv_apply(const DenseMatrix& l, const Vector& b, double tol = 1e-10);

struct SpectralError {
  double epsilon = 0.0;
  // True when n exceeded the dense cap and epsilon is only the best
  // Rayleigh-quotient witness found over random vectors.
  bool lower_bound = false;
};

// Smallest eps with (1-eps) G <= H <= (1+eps) G on range(G): max |lambda - 1|
// over the eigenvalues of G^{+/2} H G^{+/2} restricted to range(G). Throws
// InputError if H does not vanish on ker(G).
SpectralError spectral_epsilon(const DenseMatrix& reference,
                               const DenseMatrix& approx, Seed seed = 0);
SpectralError spectral_epsilon(const WeightedGraph& reference,
                               const WeightedGraph& approx, Seed seed = 0);

// Number of Gaussian probes used above the dense cap.
inline constexpr int kRayleighProbes = 200;

}  // namespace resparse
