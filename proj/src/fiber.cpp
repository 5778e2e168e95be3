#include "pie/fiber.hpp"

#include <cmath>

namespace pie {

namespace {

Eigen::MatrixXcd identity_minus(const Eigen::MatrixXcd& m, Complex kappa) {
  Eigen::MatrixXcd r = -kappa * m;
  r.diagonal().array() += 1.0;
  return r;
}

// I - kappa * K * W, the plain Nystrom system matrix.
Eigen::MatrixXcd system_matrix(const FiberOperator& op, Complex kappa) {
  const auto& g = op.disc->space;
  Eigen::MatrixXcd b = op.samples;
  for (Eigen::Index j = 0; j < b.cols(); ++j)
    b.col(j) *= -kappa * g.weight(static_cast<std::size_t>(j));
  b.diagonal().array() += 1.0;
  return b;
}

}  // namespace

FiberOperator assemble(const KernelView& view, const DiscretizationPtr& disc,
                       std::size_t fiber_index) {
  const std::size_t n = disc->space.size();
  if (fiber_index >= disc->fiber.size())
    throw std::invalid_argument("assemble: fiber index out of range");
  Eigen::MatrixXcd k(n, n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) {
      const Complex v = view.eval_indexed(*disc, i, j, fiber_index);
      if (!std::isfinite(v.real()) || !std::isfinite(v.imag()))
        throw std::runtime_error("assemble: non-finite kernel sample");
      k(i, j) = v;
    }
  Eigen::MatrixXcd a = k;
  for (std::size_t i = 0; i < n; ++i) {
    const double sw = std::sqrt(disc->space.weight(i));
    a.row(i) *= sw;
    a.col(i) *= sw;
  }
  return {fiber_index, disc, std::move(k), std::move(a)};
}

Complex fiber_determinant(const FiberOperator& op, Complex kappa) {
  if (kappa == Complex(0.0)) return 1.0;
  return identity_minus(op.symmetrized, kappa).partialPivLu().determinant();
}

std::pair<double, double> fiber_sigma_range(const FiberOperator& op, Complex kappa) {
  Eigen::JacobiSVD<Eigen::MatrixXcd> svd(identity_minus(op.symmetrized, kappa));
  const auto& s = svd.singularValues();
  return {s[s.size() - 1], s[0]};
}

Eigen::VectorXcd fiber_solve(const FiberOperator& op, Complex kappa,
                             const Eigen::VectorXcd& rhs) {
  if (rhs.size() != op.samples.rows())
    throw std::invalid_argument("fiber_solve: rhs size mismatch");
  auto [smin, smax] = fiber_sigma_range(op, kappa);
  if (smax <= 0.0 || smin <= kSingularRelTol * smax)
    throw SingularFiberError(op.fiber_index, std::abs(fiber_determinant(op, kappa)));
  return system_matrix(op, kappa).partialPivLu().solve(rhs);
}

FiberNullspace fiber_nullspace(const FiberOperator& op, Complex kappa, double tol) {
  if (tol <= 0) throw std::invalid_argument("fiber_nullspace: tol > 0 required");
  Eigen::JacobiSVD<Eigen::MatrixXcd> svd(identity_minus(op.symmetrized, kappa),
                                         Eigen::ComputeFullV);
  const auto& s = svd.singularValues();
  const double smax = s[0];
  const Eigen::Index n = s.size();
  int dim = 0;
  for (Eigen::Index i = n - 1; i >= 0; --i) {
    if (smax > 0.0 && s[i] > tol * smax) break;
    ++dim;
  }
  Eigen::MatrixXcd basis(n, dim);
  // Columns ordered by ascending singular value; map back from the
  // symmetrized coordinates so they are orthonormal in the weighted norm.
  for (int c = 0; c < dim; ++c) basis.col(c) = svd.matrixV().col(n - 1 - c);
  for (Eigen::Index i = 0; i < n; ++i)
    basis.row(i) /= std::sqrt(op.disc->space.weight(static_cast<std::size_t>(i)));
  return {op.fiber_index, kappa, std::move(basis), dim, s[n - 1], smax};
}

Eigen::MatrixXcd resolvent_kernel(const FiberOperator& op, Complex kappa) {
  auto [smin, smax] = fiber_sigma_range(op, kappa);
  if (smax <= 0.0 || smin <= kSingularRelTol * smax)
    throw SingularFiberError(op.fiber_index, std::abs(fiber_determinant(op, kappa)));
  return system_matrix(op, kappa).partialPivLu().solve(op.samples);
}

}  // namespace pie
