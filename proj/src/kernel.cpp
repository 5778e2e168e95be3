#include "pie/kernel.hpp"

#include <cmath>
#include <numbers>

namespace pie {

namespace {

double legendre(int k, double x) {
  double p0 = 1.0, p1 = x;
  if (k == 0) return p0;
  if (k == 1) return p1;
  for (int j = 1; j < k; ++j) {
    double p2 = ((2.0 * j + 1.0) * x * p1 - j * p0) / (j + 1.0);
    p0 = p1;
    p1 = p2;
  }
  return p1;
}

double ipow(double x, int p) {
  double r = 1.0;
  for (int i = 0; i < p; ++i) r *= x;
  return r;
}

}  // namespace

double Basis1D::eval(double t, const Domain& dom) const {
  const double u = (t - dom.lower) / dom.length();
  switch (kind) {
    case Kind::One: return 1.0;
    case Kind::T: return t;
    case Kind::T2: return t * t;
    case Kind::Sin: return std::sin(std::numbers::pi * u);
    case Kind::Cos: return std::cos(std::numbers::pi * u);
    case Kind::Legendre:
      return std::sqrt((2.0 * degree + 1.0) / dom.length()) *
             legendre(degree, 2.0 * u - 1.0);
  }
  return 0.0;
}

Basis1D Basis1D::parse(const std::string& name) {
  if (name == "1") return {Kind::One, 0};
  if (name == "t") return {Kind::T, 0};
  if (name == "t2") return {Kind::T2, 0};
  if (name == "sin") return {Kind::Sin, 0};
  if (name == "cos") return {Kind::Cos, 0};
  if (name.rfind("legendre-", 0) == 0) {
    int deg = std::stoi(name.substr(9));
    if (deg < 0) throw std::invalid_argument("negative legendre degree");
    return {Kind::Legendre, deg};
  }
  throw std::invalid_argument("unknown basis function: " + name);
}

std::string Basis1D::name() const {
  switch (kind) {
    case Kind::One: return "1";
    case Kind::T: return "t";
    case Kind::T2: return "t2";
    case Kind::Sin: return "sin";
    case Kind::Cos: return "cos";
    case Kind::Legendre: return "legendre-" + std::to_string(degree);
  }
  return "?";
}

Kernel Kernel::constant(Complex value) {
  Kernel k;
  k.type_ = Type::Constant;
  k.coeff_ = value;
  return k;
}

Kernel Kernel::polynomial(int p, int r, int t, Complex coeff) {
  if (p < 0 || r < 0 || t < 0)
    throw std::invalid_argument("polynomial kernel: exponents must be nonnegative");
  Kernel k;
  k.type_ = Type::Polynomial;
  k.px_ = p;
  k.ps_ = r;
  k.py_ = t;
  k.coeff_ = coeff;
  return k;
}

Kernel Kernel::gaussian(double gamma, double center, Complex coeff) {
  if (gamma <= 0) throw std::invalid_argument("gaussian kernel: gamma must be positive");
  Kernel k;
  k.type_ = Type::Gaussian;
  k.gamma_ = gamma;
  k.center_ = center;
  k.coeff_ = coeff;
  return k;
}

Kernel Kernel::finite_rank(std::vector<SeparableTerm> terms) {
  if (terms.empty())
    throw std::invalid_argument("finite-rank kernel needs at least one term");
  Kernel k;
  k.type_ = Type::FiniteRank;
  k.terms_ = std::move(terms);
  return k;
}

Kernel Kernel::sampled(std::size_t nx, std::size_t ns, std::size_t ny,
                       std::vector<Complex> values) {
  if (values.size() != nx * ns * ny)
    throw std::invalid_argument("sampled kernel: tensor size does not match dimensions");
  for (const Complex& v : values)
    if (!std::isfinite(v.real()) || !std::isfinite(v.imag()))
      throw std::invalid_argument("sampled kernel: non-finite entry");
  Kernel k;
  k.type_ = Type::Sampled;
  k.nx_ = nx;
  k.ns_ = ns;
  k.ny_ = ny;
  k.samples_ = std::move(values);
  return k;
}

void Kernel::check_sampled_shape(const Discretization& disc) const {
  if (type_ != Type::Sampled) return;
  if (nx_ != disc.space.size() || ns_ != disc.space.size() || ny_ != disc.fiber.size())
    throw std::invalid_argument("sampled kernel tensor shape does not match the grids");
}

Complex Kernel::eval(std::span<const double> x, std::span<const double> s,
                     std::span<const double> y, const Domain& dom) const {
  if (!dom.contains(x) || !dom.contains(s) || !dom.contains(y))
    throw std::domain_error("kernel eval: point outside the domain");
  switch (type_) {
    case Type::Constant:
      return coeff_;
    case Type::Polynomial: {
      double v = 1.0;
      for (double c : x) v *= ipow(c, px_);
      for (double c : s) v *= ipow(c, ps_);
      for (double c : y) v *= ipow(c, py_);
      return coeff_ * v;
    }
    case Type::Gaussian: {
      double d2 = 0.0;
      for (std::size_t d = 0; d < x.size(); ++d) d2 += (x[d] - s[d]) * (x[d] - s[d]);
      for (double c : y) d2 += (c - center_) * (c - center_);
      return coeff_ * std::exp(-gamma_ * d2);
    }
    case Type::FiniteRank: {
      Complex acc = 0.0;
      for (const auto& t : terms_) {
        double a = 1.0, b = 1.0;
        for (double c : x) a *= t.ax.eval(c, dom);
        for (double c : y) a *= t.ay.eval(c, dom);
        for (double c : s) b *= t.bs.eval(c, dom);
        for (double c : y) b *= t.by.eval(c, dom);
        acc += t.coeff * a * b;
      }
      return acc;
    }
    case Type::Sampled:
      throw std::invalid_argument(
          "sampled kernel: off-grid evaluation unsupported (exact grid points only)");
  }
  return 0.0;
}

Complex Kernel::eval_indexed(const Discretization& disc, std::size_t ix,
                             std::size_t is, std::size_t iy) const {
  if (type_ == Type::Sampled) {
    check_sampled_shape(disc);
    return samples_[(ix * ns_ + is) * ny_ + iy];
  }
  return eval(disc.space.node(ix), disc.space.node(is), disc.fiber.node(iy),
              disc.space.domain());
}

KernelView KernelView::adjoint() const {
  if (mode_ == Mode::Deflated)
    throw std::invalid_argument("adjoint of a deflated view is not supported");
  KernelView v(base_);
  v.mode_ = (mode_ == Mode::Adjoint) ? Mode::Plain : Mode::Adjoint;
  return v;
}

KernelView KernelView::deflated(
    std::vector<std::pair<FiberFunction, FiberFunction>> pairs) const {
  if (mode_ != Mode::Plain)
    throw std::invalid_argument("deflation is only applied to a plain view");
  KernelView v(base_);
  v.mode_ = Mode::Deflated;
  v.pairs_ = std::move(pairs);
  return v;
}

Complex KernelView::eval_indexed(const Discretization& disc, std::size_t ix,
                                 std::size_t is, std::size_t iy) const {
  switch (mode_) {
    case Mode::Plain:
      return base_->eval_indexed(disc, ix, is, iy);
    case Mode::Adjoint:
      return std::conj(base_->eval_indexed(disc, is, ix, iy));
    case Mode::Deflated: {
      Complex v = base_->eval_indexed(disc, ix, is, iy);
      for (const auto& [f, g] : pairs_)
        v -= std::conj(f.values()(is, iy)) * g.values()(ix, iy);
      return v;
    }
  }
  return 0.0;
}

Complex KernelView::eval_at(const Discretization& disc, std::span<const double> x,
                            std::span<const double> s,
                            std::span<const double> y) const {
  if (base_->is_closed_form() && mode_ != Mode::Deflated) {
    const Domain& dom = disc.space.domain();
    if (mode_ == Mode::Adjoint) return std::conj(base_->eval(s, x, y, dom));
    return base_->eval(x, s, y, dom);
  }
  return eval_indexed(disc, disc.space.locate(x), disc.space.locate(s),
                      disc.fiber.locate(y));
}

BoundFunction bound_function(const Kernel& kernel, const DiscretizationPtr& disc) {
  kernel.check_sampled_shape(*disc);
  const std::size_t n = disc->space.size(), nf = disc->fiber.size();
  Eigen::VectorXcd b(nf);
  double sup = 0.0;
  for (std::size_t k = 0; k < nf; ++k) {
    double acc = 0.0;
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j) {
        const Complex q = kernel.eval_indexed(*disc, i, j, k);
        if (!std::isfinite(q.real()) || !std::isfinite(q.imag()))
          throw std::runtime_error("bound_function: non-finite kernel sample");
        acc += disc->space.weight(i) * disc->space.weight(j) * std::norm(q);
      }
    b[static_cast<Eigen::Index>(k)] = acc;
    sup = std::max(sup, acc);
  }
  return {L0Scalar(disc, std::move(b)), sup};
}

}  // namespace pie
