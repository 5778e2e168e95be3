#ifndef PIE_SERIES_HPP
#define PIE_SERIES_HPP

#include <Eigen/Dense>
#include <vector>

#include "pie/fiber.hpp"
#include "pie/kernel.hpp"

namespace pie {

enum class CoefficientMethod { TensorQuadrature, TraceRecursion };

struct SeriesConfig {
  int max_order = 30;
  double tail_tol = 1e-12;
  CoefficientMethod method = CoefficientMethod::TraceRecursion;

  void validate() const {
    if (max_order < 1) throw std::invalid_argument("SeriesConfig: max_order >= 1");
    if (tail_tol <= 0) throw std::invalid_argument("SeriesConfig: tail_tol > 0");
  }
};

/// Ordinary n x n determinant of kernel samples q(x_i, s_j, alpha).
Complex pi_n(const KernelView& view, const Discretization& disc,
             const std::vector<std::vector<double>>& xs,
             const std::vector<std::vector<double>>& ss,
             std::span<const double> alpha);

/// Determinant-series coefficient d_k(alpha): the k-fold integral of the
/// diagonal k-determinant. TensorQuadrature is the literal k-fold sum
/// (k <= 3); TraceRecursion derives the same coefficient from power sums
/// of the symmetrized sample matrix via the Newton identities.
Complex d_k(const KernelView& view, const DiscretizationPtr& disc,
            std::size_t fiber_index, int k, CoefficientMethod method);

/// Minor-series coefficient q_k(x_ix, x_is, alpha): the k-fold integral of
/// the bordered (k+1)-determinant.
Complex q_k(const KernelView& view, const DiscretizationPtr& disc, std::size_t ix,
            std::size_t is, std::size_t fiber_index, int k, CoefficientMethod method);

struct SeriesResult {
  Complex value;
  double tail_bound;
  int order_used;
  bool converged;
};

/// D1(alpha; kappa) = 1 + sum_{n>=1} (-kappa)^n / n! d_n(alpha), truncated
/// at the first term with magnitude <= tail_tol.
SeriesResult determinant_series(const KernelView& view, const DiscretizationPtr& disc,
                                std::size_t fiber_index, Complex kappa,
                                const SeriesConfig& cfg);

/// M1(x_ix, x_is, alpha; kappa) = q + sum_{n>=1} (-kappa)^n / n! q_n, truncated.
SeriesResult minor_series(const KernelView& view, const DiscretizationPtr& disc,
                          std::size_t ix, std::size_t is, std::size_t fiber_index,
                          Complex kappa, const SeriesConfig& cfg);

/// Full minor sample matrix at one fiber, from the same truncated series.
struct MinorMatrixResult {
  Eigen::MatrixXcd values;
  double tail_bound;
  int order_used;
  bool converged;
};
MinorMatrixResult minor_series_matrix(const KernelView& view,
                                      const DiscretizationPtr& disc,
                                      std::size_t fiber_index, Complex kappa,
                                      const SeriesConfig& cfg);

struct Lemma1Report {
  bool all_finite;
  std::vector<double> minor_l2_sq;       // per fiber: double integral of |M1|^2
  std::vector<Complex> determinant;      // per fiber: D1(alpha; kappa)
  std::vector<bool> series_converged;    // per fiber
};

/// Finiteness checks for the determinant and minor at every fiber
/// (measurability is vacuous at grid level).
Lemma1Report lemma1_checks(const KernelView& view, const DiscretizationPtr& disc,
                           Complex kappa, const SeriesConfig& cfg = {});

}  // namespace pie

#endif
