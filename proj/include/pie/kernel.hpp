#ifndef PIE_KERNEL_HPP
#define PIE_KERNEL_HPP

#include <Eigen/Dense>
#include <memory>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "pie/grid.hpp"
#include "pie/l0.hpp"

namespace pie {

/// Named 1-D basis function. Evaluated on the coordinate mapped to [0,1],
/// except "t"/"t2" which use the raw coordinate. "legendre-k" is the shifted
/// Legendre polynomial of degree k, normalized to unit L2 norm on the domain.
struct Basis1D {
  enum class Kind { One, T, T2, Sin, Cos, Legendre };
  Kind kind = Kind::One;
  int degree = 0;  // Legendre only

  double eval(double t, const Domain& dom) const;

  static Basis1D parse(const std::string& name);
  std::string name() const;
};

/// One separable term a(x,y) * b(s,y) with
/// a(x,y) = coeff * ax(x) * ay(y) and b(s,y) = bs(s) * by(y).
/// For dim > 1 each 1-D factor acts coordinatewise (product over axes).
struct SeparableTerm {
  Basis1D ax, ay, bs, by;
  Complex coeff = 1.0;
};

/// Evaluation model for the kernel q(x,s,y) of the partial integral operator.
class Kernel {
 public:
  enum class Type { Constant, Polynomial, Gaussian, FiniteRank, Sampled };

  static Kernel constant(Complex value);
  /// q = coeff * x^p * s^r * y^t (coordinatewise product for dim > 1).
  static Kernel polynomial(int p, int r, int t, Complex coeff = 1.0);
  /// q = coeff * exp(-gamma (|x-s|^2 + |y-center|^2)).
  static Kernel gaussian(double gamma, double center, Complex coeff = 1.0);
  static Kernel finite_rank(std::vector<SeparableTerm> terms);
  /// Grid-aligned tensor, q(x_i, s_j, alpha_k) = values[(i*ns + j)*ny + k].
  static Kernel sampled(std::size_t nx, std::size_t ns, std::size_t ny,
                        std::vector<Complex> values);

  Type type() const { return type_; }
  bool is_closed_form() const { return type_ != Type::Sampled; }
  const std::vector<SeparableTerm>& terms() const { return terms_; }
  int finite_rank_count() const {
    return type_ == Type::FiniteRank ? static_cast<int>(terms_.size()) : -1;
  }

  /// Closed-form evaluation at arbitrary points; throws for Sampled kernels.
  Complex eval(std::span<const double> x, std::span<const double> s,
               std::span<const double> y, const Domain& dom) const;

  /// Evaluation at grid indices: x_ix, x_is on the space grid, alpha_iy on the
  /// fiber grid. Works for every kernel type.
  Complex eval_indexed(const Discretization& disc, std::size_t ix, std::size_t is,
                       std::size_t iy) const;

  void check_sampled_shape(const Discretization& disc) const;

  // Builtin parameters (valid per type).
  Complex coeff() const { return coeff_; }
  int pow_x() const { return px_; }
  int pow_s() const { return ps_; }
  int pow_y() const { return py_; }
  double gamma() const { return gamma_; }
  double center() const { return center_; }

 private:
  Kernel() = default;

  Type type_ = Type::Constant;
  Complex coeff_ = 1.0;
  int px_ = 0, ps_ = 0, py_ = 0;
  double gamma_ = 1.0, center_ = 0.0;
  std::vector<SeparableTerm> terms_;
  std::size_t nx_ = 0, ns_ = 0, ny_ = 0;
  std::vector<Complex> samples_;
};

using KernelPtr = std::shared_ptr<const Kernel>;

/// A kernel together with a usage mode: plain q(x,s,y), the adjoint kernel
/// conj(q(s,x,y)), or the deflated kernel
/// p(x,s,y) = q(x,s,y) - sum_j conj(f_j(s,y)) g_j(x,y).
class KernelView {
 public:
  enum class Mode { Plain, Adjoint, Deflated };

  explicit KernelView(KernelPtr base) : base_(std::move(base)) {}

  KernelView adjoint() const;
  KernelView deflated(std::vector<std::pair<FiberFunction, FiberFunction>> pairs) const;

  Mode mode() const { return mode_; }
  const Kernel& base() const { return *base_; }
  const KernelPtr& base_ptr() const { return base_; }
  const std::vector<std::pair<FiberFunction, FiberFunction>>& pairs() const {
    return pairs_;
  }

  Complex eval_indexed(const Discretization& disc, std::size_t ix, std::size_t is,
                       std::size_t iy) const;

  /// Point-based evaluation; Sampled bases and deflation pairs require exact
  /// grid points (located within 1e-12).
  Complex eval_at(const Discretization& disc, std::span<const double> x,
                  std::span<const double> s, std::span<const double> y) const;

 private:
  KernelPtr base_;
  Mode mode_ = Mode::Plain;
  std::vector<std::pair<FiberFunction, FiberFunction>> pairs_;
};

struct BoundFunction {
  L0Scalar values;  // b(t) = double integral of |q(x,s,t)|^2 dx ds
  double sup;
};

/// Condition (II) boundedness profile of the kernel over the fiber grid.
BoundFunction bound_function(const Kernel& kernel, const DiscretizationPtr& disc);

}  // namespace pie

#endif
