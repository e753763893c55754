#include "resparse/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <limits>
#include <string>

#include <Eigen/Eigenvalues>

#include "resparse/error.hpp"

namespace resparse {

std::size_t dense_cap() {
  constexpr std::size_t kDefault = 1024;
  const char* env = std::getenv("RESPARSE_DENSE_CAP");
  if (env == nullptr || *env == '\0') return kDefault;
  char* end = nullptr;
  const unsigned long long value = std::strtoull(env, &end, 10);
  if (*end != '\0' || value == 0) return kDefault;
  return static_cast<std::size_t>(value);
}

DenseMatrix laplacian(const WeightedGraph& g) {
  const auto n = static_cast<Eigen::Index>(g.num_vertices());
  DenseMatrix l = DenseMatrix::Zero(n, n);
  for (const Edge& e : g.edges()) {
    l(e.u, e.u) += e.w;
    l(e.v, e.v) += e.w;
    l(e.u, e.v) -= e.w;
    l(e.v, e.u) -= e.w;
  }
  return l;
}

DenseMatrix gram(std::size_t n, std::span<const Row> rows,
                 std::span<const double> weights) {
  const auto dim = static_cast<Eigen::Index>(n);
  DenseMatrix m = DenseMatrix::Zero(dim, dim);
  for (std::size_t i = 0; i < rows.size(); ++i) {
    if (rows[i].dimension() != n) throw InputError("gram: row dimension mismatch");
    rows[i].add_outer_product(m, weights.empty() ? 1.0 : weights[i]);
  }
  return m;
}

double quadratic_form(const DenseMatrix& m, const Vector& x) {
  if (m.rows() != x.size() || m.cols() != x.size()) {
    throw InputError("quadratic_form: dimension mismatch");
  }
  return x.dot(m * x);
}

double quadratic_form(const WeightedGraph& g, const Vector& x) {
  if (static_cast<std::size_t>(x.size()) != g.num_vertices()) {
    throw InputError("quadratic_form: dimension mismatch");
  }
  double sum = 0.0;
  for (const Edge& e : g.edges()) {
    const double d = x[e.u] - x[e.v];
    sum += e.w * d * d;
  }
  return sum;
}

// ---------------------------------------------------------------------------
// Kernel

ComponentKernel::ComponentKernel(Components components)
    : label_(std::move(components.label)),
      group_size_(components.count, 0.0),
      count_(components.count) {
  for (std::uint32_t l : label_) group_size_[l] += 1.0;
}

ComponentKernel ComponentKernel::of(const WeightedGraph& g) {
  return ComponentKernel(connected_components(g));
}

ComponentKernel ComponentKernel::of_laplacian(const DenseMatrix& l) {
  const auto n = static_cast<std::size_t>(l.rows());
  std::vector<Edge> pattern;
  for (Eigen::Index i = 0; i < l.rows(); ++i) {
    for (Eigen::Index j = i + 1; j < l.cols(); ++j) {
      if (l(i, j) != 0.0 || l(j, i) != 0.0) {
        pattern.push_back({static_cast<Vertex>(i), static_cast<Vertex>(j), 1.0});
      }
    }
  }
  return ComponentKernel(connected_components(n, pattern));
}

void ComponentKernel::project_out(Vector& x) const {
  std::vector<double> sum(count_, 0.0);
  for (std::size_t i = 0; i < label_.size(); ++i) sum[label_[i]] += x[static_cast<Eigen::Index>(i)];
  for (std::size_t c = 0; c < count_; ++c) sum[c] /= group_size_[c];
  for (std::size_t i = 0; i < label_.size(); ++i) x[static_cast<Eigen::Index>(i)] -= sum[label_[i]];
}

double ComponentKernel::max_component_mean(const Vector& x) const {
  std::vector<double> sum(count_, 0.0);
  for (std::size_t i = 0; i < label_.size(); ++i) sum[label_[i]] += x[static_cast<Eigen::Index>(i)];
  double worst = 0.0;
  for (std::size_t c = 0; c < count_; ++c) {
    worst = std::max(worst, std::abs(sum[c] / group_size_[c]));
  }
  return worst;
}

bool looks_like_laplacian(const DenseMatrix& m, double tol) {
  if (m.rows() != m.cols()) return false;
  const double scale = std::max(m.cwiseAbs().maxCoeff(), std::numeric_limits<double>::min());
  const double slack = tol * scale;
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    double row_sum = 0.0;
    for (Eigen::Index j = 0; j < m.cols(); ++j) {
      row_sum += m(i, j);
      if (std::abs(m(i, j) - m(j, i)) > slack) return false;
      if (i != j && m(i, j) > slack) return false;
    }
    if (std::abs(row_sum) > slack * static_cast<double>(m.cols())) return false;
  }
  return true;
}

std::size_t infer_kernel_dimension(const DenseMatrix& m) {
  if (m.rows() == 0) return 0;
  if (looks_like_laplacian(m)) return ComponentKernel::of_laplacian(m).dimension();
  Eigen::SelfAdjointEigenSolver<DenseMatrix> eig(m, Eigen::EigenvaluesOnly);
  const Vector& lambda = eig.eigenvalues();
  const double cutoff = 1e-10 * std::max(std::abs(lambda[lambda.size() - 1]),
                                         std::numeric_limits<double>::min());
  std::size_t k = 0;
  while (k < static_cast<std::size_t>(lambda.size()) &&
         lambda[static_cast<Eigen::Index>(k)] <= cutoff) {
    ++k;
  }
  return k;
}

// ---------------------------------------------------------------------------
// Dense factorization

RangeFactor RangeFactor::of(const DenseMatrix& m) {
  return of(m, infer_kernel_dimension(m));
}

RangeFactor RangeFactor::of(const DenseMatrix& m, std::size_t kernel_dimension) {
  if (m.rows() != m.cols()) throw InputError("RangeFactor: matrix is not square");
  const auto n = m.rows();
  const auto k = static_cast<Eigen::Index>(kernel_dimension);
  if (k > n) throw InputError("RangeFactor: kernel larger than matrix");
  Eigen::SelfAdjointEigenSolver<DenseMatrix> eig(m);
  if (eig.info() != Eigen::Success) throw SolverError("eigen-decomposition failed");
  RangeFactor f;
  f.kernel_ = eig.eigenvectors().leftCols(k);
  f.range_ = eig.eigenvectors().rightCols(n - k);
  f.eigenvalues_ = eig.eigenvalues().tail(n - k);
  if (n - k > 0 && !(f.eigenvalues_[0] > 0.0)) {
    throw SolverError("matrix is numerically singular on its expected range");
  }
  return f;
}

DenseMatrix RangeFactor::pseudo_inverse() const {
  return range_ * eigenvalues_.cwiseInverse().asDiagonal() * range_.transpose();
}

DenseMatrix RangeFactor::whitening() const {
  return range_ * eigenvalues_.cwiseSqrt().cwiseInverse().asDiagonal();
}

// ---------------------------------------------------------------------------
// Iterative solve

GramOperator::GramOperator(std::size_t n, std::span<const Row> rows,
                           std::span<const double> weights)
    : n_(n), rows_(rows), weights_(weights) {
  if (!weights_.empty() && weights_.size() != rows_.size()) {
    throw InputError("GramOperator: weight count does not match row count");
  }
}

void GramOperator::apply(const Vector& x, Vector& y) const {
  y.setZero(static_cast<Eigen::Index>(n_));
  for (std::size_t i = 0; i < rows_.size(); ++i) {
    const double s = (weights_.empty() ? 1.0 : weights_[i]) * rows_[i].dot(x);
    if (s == 0.0) continue;
    for (const RowEntry& e : rows_[i].entries()) y[static_cast<Eigen::Index>(e.index)] += s * e.value;
  }
}

Vector GramOperator::diagonal() const {
  Vector d = Vector::Zero(static_cast<Eigen::Index>(n_));
  for (std::size_t i = 0; i < rows_.size(); ++i) {
    const double w = weights_.empty() ? 1.0 : weights_[i];
    for (const RowEntry& e : rows_[i].entries()) d[static_cast<Eigen::Index>(e.index)] += w * e.value * e.value;
  }
  return d;
}

SolveResult pinv_apply(const LinearOperator& a, const Vector& b,
                       const ComponentKernel* kernel,
                       const SolveOptions& options) {
  const std::size_t n = a.size();
  if (static_cast<std::size_t>(b.size()) != n) throw InputError("pinv_apply: dimension mismatch");
  if (kernel != nullptr && kernel->size() != n) throw InputError("pinv_apply: kernel dimension mismatch");
  const std::size_t cap = options.max_iterations > 0 ? options.max_iterations
                                                     : std::max<std::size_t>(10 * n, 10);
  auto project = [kernel](Vector& v) {
    if (kernel != nullptr) kernel->project_out(v);
  };

  Vector rhs = b;
  project(rhs);
  const double rhs_norm = rhs.norm();
  SolveResult result;
  result.x = Vector::Zero(static_cast<Eigen::Index>(n));
  if (rhs_norm == 0.0) return result;

  Vector inv_diag = a.diagonal();
  for (Eigen::Index i = 0; i < inv_diag.size(); ++i) {
    inv_diag[i] = inv_diag[i] > 0.0 ? 1.0 / inv_diag[i] : 1.0;
  }

  Vector r = rhs;
  Vector z = inv_diag.cwiseProduct(r);
  project(z);
  Vector p = z;
  Vector ap(static_cast<Eigen::Index>(n));
  double rz = r.dot(z);

  for (std::size_t it = 1; it <= cap; ++it) {
    a.apply(p, ap);
    const double pap = p.dot(ap);
    if (!(pap > 0.0)) break;
    const double step = rz / pap;
    result.x.noalias() += step * p;
    r.noalias() -= step * ap;
    project(r);
    result.iterations = it;
    if (r.norm() <= options.tolerance * rhs_norm) {
      // Confirm against the true residual; recursive residuals drift.
      project(result.x);
      a.apply(result.x, ap);
      r = rhs - ap;
      project(r);
      result.relative_residual = r.norm() / rhs_norm;
      if (result.relative_residual <= options.tolerance) return result;
      // Restart from the true residual.
      z = inv_diag.cwiseProduct(r);
      project(z);
      p = z;
      rz = r.dot(z);
      continue;
    }
    z = inv_diag.cwiseProduct(r);
    project(z);
    const double rz_next = r.dot(z);
    p = z + (rz_next / rz) * p;
    rz = rz_next;
  }
  a.apply(result.x, ap);
  Vector residual = rhs - ap;
  project(residual);
  result.relative_residual = residual.norm() / rhs_norm;
  if (result.relative_residual <= options.tolerance) {
    project(result.x);
    return result;
  }
  throw SolverError("conjugate gradient did not converge: relative residual " +
                    std::to_string(result.relative_residual) + " after " +
                    std::to_string(result.iterations) + " iterations");
}

Vector pinv_apply(const DenseMatrix& l, const Vector& b, double tol) {
  const ComponentKernel kernel = ComponentKernel::of_laplacian(l);
  SolveOptions options;
  options.tolerance = tol;
  return pinv_apply(DenseOperator(l), b, &kernel, options).x;
}

// ---------------------------------------------------------------------------
// Spectral error

namespace {

template <typename QuadReference, typename QuadApprox>
SpectralError rayleigh_lower_bound(std::size_t n, const ComponentKernel& kernel,
                                   QuadReference&& q_ref, QuadApprox&& q_approx,
                                   Seed seed) {
  Rng rng(seed);
  SpectralError out;
  out.lower_bound = true;
  Vector x(static_cast<Eigen::Index>(n));
  for (int probe = 0; probe < kRayleighProbes; ++probe) {
    for (Eigen::Index i = 0; i < x.size(); ++i) x[i] = rng.gaussian();
    kernel.project_out(x);
    const double denom = q_ref(x);
    if (!(denom > 0.0)) continue;
    out.epsilon = std::max(out.epsilon, std::abs(q_approx(x) / denom - 1.0));
  }
  return out;
}

}  // namespace

SpectralError spectral_epsilon(const DenseMatrix& reference,
                               const DenseMatrix& approx, Seed seed) {
  if (reference.rows() != reference.cols() || approx.rows() != reference.rows() ||
      approx.cols() != reference.cols()) {
    throw InputError("spectral_epsilon: dimension mismatch");
  }
  const auto n = static_cast<std::size_t>(reference.rows());
  if (n > dense_cap()) {
    if (!looks_like_laplacian(reference)) {
      throw CapExceeded("spectral_epsilon: n = " + std::to_string(n) +
                        " exceeds dense cap and input is not a Laplacian");
    }
    const ComponentKernel kernel = ComponentKernel::of_laplacian(reference);
    return rayleigh_lower_bound(
        n, kernel, [&](const Vector& x) { return x.dot(reference * x); },
        [&](const Vector& x) { return x.dot(approx * x); }, seed);
  }
  const RangeFactor factor = RangeFactor::of(reference);
  const double scale = std::max(1.0, approx.cwiseAbs().maxCoeff());
  if (factor.kernel_basis().cols() > 0 &&
      (approx * factor.kernel_basis()).cwiseAbs().maxCoeff() > 1e-8 * scale) {
    throw InputError("spectral_epsilon: kernel mismatch (approximation acts on the "
                     "reference's null space)");
  }
  SpectralError out;
  if (factor.rank() == 0) return out;
  const DenseMatrix w = factor.whitening();
  const DenseMatrix s = w.transpose() * approx * w;
  Eigen::SelfAdjointEigenSolver<DenseMatrix> eig(s, Eigen::EigenvaluesOnly);
  const Vector& lambda = eig.eigenvalues();
  out.epsilon = std::max(std::abs(lambda[0] - 1.0), std::abs(lambda[lambda.size() - 1] - 1.0));
  return out;
}

SpectralError spectral_epsilon(const WeightedGraph& reference,
                               const WeightedGraph& approx, Seed seed) {
  if (reference.num_vertices() != approx.num_vertices()) {
    throw InputError("spectral_epsilon: vertex counts differ");
  }
  const std::size_t n = reference.num_vertices();
  const ComponentKernel kernel = ComponentKernel::of(reference);
  for (const Edge& e : approx.edges()) {
    if (kernel.label()[e.u] != kernel.label()[e.v]) {
      throw InputError("spectral_epsilon: kernel mismatch (approximation has an "
                       "edge between components of the reference)");
    }
  }
  if (n > dense_cap()) {
    return rayleigh_lower_bound(
        n, kernel, [&](const Vector& x) { return quadratic_form(reference, x); },
        [&](const Vector& x) { return quadratic_form(approx, x); }, seed);
  }
  return spectral_epsilon(laplacian(reference), laplacian(approx), seed);
}

}  // namespace resparse
