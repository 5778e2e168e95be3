#ifndef PIE_ORACLES_HPP
#define PIE_ORACLES_HPP

#include <functional>

#include "pie/kernel.hpp"
#include "pie/l0.hpp"

namespace pie {
namespace oracles {

/// Closed-form separable kernel q(x,s,y) = sum_j a_j(x,y) b_j(s,y) used as an
/// independent reference against the production paths.
struct SeparableSpec {
  std::vector<SeparableTerm> terms;

  Kernel to_kernel() const { return Kernel::finite_rank(terms); }
};

struct Rank1Reference {
  Complex det;
  bool singular;
  /// Resolvent kernel sample a(x, alpha) b(s, alpha) / det.
  std::function<Complex(double x, double s)> resolvent;
};

/// Classical rank-1 Fredholm formulas, quadrature at double the given order.
Rank1Reference rank1_reference(const SeparableSpec& spec, Complex kappa,
                               double alpha, const Domain& dom, int order);

/// det(I_r - kappa G) with G[j,k] = int b_j(t, alpha) a_k(t, alpha) dt.
Complex finite_rank_reference(const SeparableSpec& spec, Complex kappa, double alpha,
                              const Domain& dom, int order);

/// Assembles the full block-diagonal system over all fibers at once and
/// solves it monolithically. All fibers must be regular.
FiberFunction dense_direct_solve(const KernelView& view, const DiscretizationPtr& disc,
                                 Complex kappa, const FiberFunction& g0);

}  // namespace oracles
}  // namespace pie

#endif
