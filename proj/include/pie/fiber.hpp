#ifndef PIE_FIBER_HPP
#define PIE_FIBER_HPP

#include <Eigen/Dense>

#include "pie/kernel.hpp"

namespace pie {

/// Relative sigma_min threshold below which a fiber counts as singular.
inline constexpr double kSingularRelTol = 1e-8;

class SingularFiberError : public std::runtime_error {
 public:
  SingularFiberError(std::size_t fiber_index, double det_abs)
      : std::runtime_error("singular fiber at index " + std::to_string(fiber_index) +
                           " (|det| = " + std::to_string(det_abs) + ")"),
        fiber_index(fiber_index),
        det_abs(det_abs) {}
  std::size_t fiber_index;
  double det_abs;
};

/// Nystrom discretization of S_alpha at one fiber node. Immutable.
/// samples K[i,j] = q(x_i, x_j, alpha); symmetrized A = W^{1/2} K W^{1/2}.
struct FiberOperator {
  std::size_t fiber_index;
  DiscretizationPtr disc;
  Eigen::MatrixXcd samples;      // unweighted kernel samples K
  Eigen::MatrixXcd symmetrized;  // A-hat, used for determinants and SVD
};

FiberOperator assemble(const KernelView& view, const DiscretizationPtr& disc,
                       std::size_t fiber_index);

/// det(I - kappa * A-hat): the Nystrom approximation of the fiberwise
/// Fredholm determinant D1(alpha; kappa).
Complex fiber_determinant(const FiberOperator& op, Complex kappa);

/// Solves phi - kappa * K W phi = rhs. Throws SingularFiberError when the
/// fiber is numerically singular (sigma_min <= kSingularRelTol * sigma_max).
Eigen::VectorXcd fiber_solve(const FiberOperator& op, Complex kappa,
                             const Eigen::VectorXcd& rhs);

struct FiberNullspace {
  std::size_t fiber_index;
  Complex kappa;
  Eigen::MatrixXcd basis;  // node samples, columns orthonormal in the weighted norm
  int dim;
  double sigma_min;
  double sigma_max;
};

FiberNullspace fiber_nullspace(const FiberOperator& op, Complex kappa, double tol);

/// Resolvent kernel samples R = (I - kappa K W)^{-1} K, the discrete
/// M1(x_i, x_j, alpha; kappa) / D1(alpha; kappa).
Eigen::MatrixXcd resolvent_kernel(const FiberOperator& op, Complex kappa);

/// sigma_min and sigma_max of (I - kappa * A-hat).
std::pair<double, double> fiber_sigma_range(const FiberOperator& op, Complex kappa);

}  // namespace pie

#endif
