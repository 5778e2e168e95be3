#ifndef PIE_SOLVER_HPP
#define PIE_SOLVER_HPP

#include <optional>
#include <vector>

#include "pie/fiber.hpp"
#include "pie/l0.hpp"

namespace pie {

class InternalConsistencyError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct Thresholds {
  double singular_rel_tol = kSingularRelTol;
  double tau = 0.05;           // positive-measure fraction of fiber nodes
  double cluster_tol = 1e-6;   // characteristic-number grouping
  double solve_tol = 1e-8;     // residual / solvability acceptance
  double rank_tol = 1e-8;      // L0 orthonormalization / independence
  int workers = 1;
};

enum class KappaKind { Regular, Characteristic, SingularFibers };

std::string kappa_kind_name(KappaKind k);

struct Classification {
  Complex kappa;
  KappaKind kind;
  int m = 0;  // max fiber nullity (Characteristic only)
  NablaMask deficient;
  L0Scalar det_profile;
  double deficient_fraction = 0.0;
};

Classification classify(const KernelView& view, const DiscretizationPtr& disc,
                        Complex kappa, const Thresholds& thr = {});

struct SearchRegion {
  double re_min = -10.0, re_max = 10.0;
  double im_min = -10.0, im_max = 10.0;
  bool contains(Complex z) const {
    return z.real() >= re_min && z.real() <= re_max && z.imag() >= im_min &&
           z.imag() <= im_max;
  }
};

struct CharNumber {
  Complex kappa;
  int multiplicity;
  double fiber_fraction;
};

/// Reciprocal fiber eigenvalues clustered across the fiber sweep; only
/// clusters persisting on >= tau of fibers survive, each confirmed by
/// classify. Zero is never returned.
std::vector<CharNumber> find_characteristic_numbers(const KernelView& view,
                                                    const DiscretizationPtr& disc,
                                                    const SearchRegion& region,
                                                    const Thresholds& thr = {});

enum class NullSide { Direct, Adjoint };

struct NullFamily {
  std::vector<FiberFunction> functions;  // L0-orthonormal
  std::vector<NablaMask> support;
  int count = 0;
  NullSide side = NullSide::Direct;
  double max_residual = 0.0;  // homogeneous-equation residual over members
};

struct NullFamilies {
  NullFamily direct;
  NullFamily adjoint;
};

struct NullFamilyOptions {
  /// Test hook: pretend the adjoint family has this many extra members, to
  /// exercise the count-equality consistency check.
  int debug_adjoint_pad = 0;
};

/// Fiberwise nullspace bases assembled into phase-aligned FiberFunctions for
/// both the direct and adjoint homogeneous equations. Throws
/// InternalConsistencyError if the two counts disagree.
NullFamilies null_families(const KernelView& view, const DiscretizationPtr& disc,
                           Complex kappa0, const Thresholds& thr = {},
                           const NullFamilyOptions& opts = {});

struct SolvabilityResult {
  bool solvable = true;
  std::optional<L0Scalar> witness;  // first offending inner product
  double max_violation = 0.0;
};

/// Condition (I): g0 must be L0-orthogonal to every adjoint null function.
SolvabilityResult check_solvability(const FiberFunction& g0,
                                    const NullFamily& adjoint, double tol);

struct SolveReport {
  std::optional<FiberFunction> solution;
  double residual = 0.0;  // relative, against the original equation
  Classification classification;
  SolvabilityResult solvability;
  std::optional<NullFamilies> families;
  std::vector<std::size_t> excluded_fibers;  // singular fibers skipped
  double max_null_overlap = 0.0;  // |<f0, f_j>| in the characteristic case
};

/// End-to-end solve of f - kappa S f = g0 with Fredholm-alternative handling.
SolveReport solve(const KernelView& view, const DiscretizationPtr& disc,
                  Complex kappa, const FiberFunction& g0, const Thresholds& thr = {});

/// Applies the partial integral operator of `view` to f, fiber by fiber.
FiberFunction apply_pio(const KernelView& view, const FiberFunction& f,
                        int workers = 1);

/// Relative residual ||f - kappa S f - g0|| / (||g0|| + ||f||), optionally
/// restricted to non-excluded fibers.
double equation_residual(const KernelView& view, Complex kappa,
                         const FiberFunction& f, const FiberFunction& g0,
                         const std::vector<std::size_t>& excluded = {},
                         int workers = 1);

}  // namespace pie

#endif
