#ifndef PIE_L0_HPP
#define PIE_L0_HPP

#include <Eigen/Dense>
#include <optional>
#include <span>
#include <vector>

#include "pie/grid.hpp"

namespace pie {

class Kernel;

/// Sampled element of L0(Omega): a function of the fiber coordinate only,
/// one value per fiber node.
class L0Scalar {
 public:
  L0Scalar() = default;  // empty placeholder, no grid attached
  L0Scalar(DiscretizationPtr disc, Eigen::VectorXcd values);

  const Eigen::VectorXcd& values() const { return values_; }
  Eigen::VectorXcd& values() { return values_; }
  const DiscretizationPtr& disc() const { return disc_; }

  double max_abs() const { return values_.size() ? values_.cwiseAbs().maxCoeff() : 0.0; }
  /// Discrete L2(Omega) norm over the fiber grid.
  double norm() const;

 private:
  DiscretizationPtr disc_;
  Eigen::VectorXcd values_;
};

/// Sampled element of L_{2,0}(Omega^2): values f(x_i, alpha_j) on
/// x-nodes (rows) times fiber nodes (columns).
class FiberFunction {
 public:
  FiberFunction(DiscretizationPtr disc, Eigen::MatrixXcd values);

  static FiberFunction zero(DiscretizationPtr disc);

  const Eigen::MatrixXcd& values() const { return values_; }
  Eigen::MatrixXcd& values() { return values_; }
  const DiscretizationPtr& disc() const { return disc_; }

  Eigen::VectorXcd fiber_slice(std::size_t j) const { return values_.col(j); }

  /// Discrete L2(Omega^2) norm, weighted on both axes.
  double norm() const;

 private:
  DiscretizationPtr disc_;
  Eigen::MatrixXcd values_;  // space.size() x fiber.size()
};

/// A measurable fiber mask, the grid stand-in for an idempotent of the
/// Boolean algebra of L0.
struct NablaMask {
  std::vector<bool> flags;

  static NablaMask full(std::size_t n) { return {std::vector<bool>(n, true)}; }
  static NablaMask empty(std::size_t n) { return {std::vector<bool>(n, false)}; }

  std::size_t count() const {
    std::size_t c = 0;
    for (bool b : flags) c += b ? 1 : 0;
    return c;
  }
  double fraction() const {
    return flags.empty() ? 0.0 : static_cast<double>(count()) / flags.size();
  }
  bool any() const { return count() > 0; }
};

/// L0-valued inner product <f,g>(y) = int f(s,y) conj(g(s,y)) ds.
L0Scalar inner(const FiberFunction& f, const FiberFunction& g);

/// Module action (b o f)(x,y) = b(y) f(x,y).
FiberFunction scale(const L0Scalar& b, const FiberFunction& f);

struct OrthonormalizeResult {
  std::vector<FiberFunction> functions;
  std::vector<NablaMask> support;
};

/// Fiberwise Gram-Schmidt. Outputs satisfy inner(f_i,f_j) = delta_ij on each
/// output's support mask; off-support fibers hold zeros.
OrthonormalizeResult l0_orthonormalize(std::span<const FiberFunction> fs,
                                       double rank_tol);

struct IndependenceResult {
  bool independent;
  NablaMask witness;  // fibers where the Gram matrix is rank deficient
};

IndependenceResult nabla_independent(std::span<const FiberFunction> fs,
                                     double rank_tol);

struct BesselBound {
  long long m_max;
  double kernel_l2_sq;  // triple integral of |q|^2
};

/// m <= |lambda|^{-2} * triple integral of |q|^2, by quadrature.
BesselBound bessel_bound(const Kernel& kernel, const Discretization& disc,
                         Complex lambda);

/// Max over grid points of |lambda|^2 sum_j |f_j(x,y)|^2 - int |q(s,x,y)|^2 ds.
/// Nonpositive (within tolerance) for an orthonormal eigenfamily.
double bessel_pointwise_gap(const Kernel& kernel, const Discretization& disc,
                            Complex lambda, std::span<const FiberFunction> family);

}  // namespace pie

#endif
