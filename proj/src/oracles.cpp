#include "pie/oracles.hpp"

#include <cmath>

#include "pie/fiber.hpp"

namespace pie {
namespace oracles {

namespace {

// 1-D factors of one separable term at a fixed fiber coordinate. The
// coefficient is folded into the a-factor.
struct TermAt {
  std::function<Complex(double)> a;  // coeff * ax(x) * ay(alpha)
  std::function<double(double)> b;   // bs(s) * by(alpha)
};

TermAt term_at(const SeparableTerm& t, double alpha, const Domain& dom) {
  const double ay = t.ay.eval(alpha, dom);
  const double by = t.by.eval(alpha, dom);
  const Complex c = t.coeff;
  return {[=, ax = t.ax](double x) { return c * ax.eval(x, dom) * ay; },
          [=, bs = t.bs](double s) { return bs.eval(s, dom) * by; }};
}

Complex quad_product(const std::function<Complex(double)>& a,
                     const std::function<double(double)>& b, const Domain& dom,
                     int order) {
  const QuadratureGrid g = build_grid(Domain(dom.lower, dom.upper, 1),
                                      Rule::GaussLegendre, order);
  Complex acc = 0.0;
  for (std::size_t i = 0; i < g.size(); ++i) {
    const double t = g.node(i)[0];
    acc += g.weight(i) * b(t) * a(t);
  }
  return acc;
}

}  // namespace

Rank1Reference rank1_reference(const SeparableSpec& spec, Complex kappa, double alpha,
                               const Domain& dom, int order) {
  if (spec.terms.size() != 1)
    throw std::invalid_argument("rank1_reference: exactly one term required");
  if (dom.dim != 1)
    throw std::invalid_argument("rank1_reference: one-dimensional domains only");
  const TermAt t = term_at(spec.terms[0], alpha, dom);
  const Complex trace = quad_product(t.a, t.b, dom, 2 * order);
  const Complex det = 1.0 - kappa * trace;
  const bool singular = std::abs(det) <= 1e-14 * std::max(1.0, std::abs(kappa * trace));
  Rank1Reference ref;
  ref.det = det;
  ref.singular = singular;
  ref.resolvent = [t, det, singular](double x, double s) -> Complex {
    if (singular) throw std::runtime_error("rank1_reference: singular resolvent");
    return t.a(x) * t.b(s) / det;
  };
  return ref;
}

Complex finite_rank_reference(const SeparableSpec& spec, Complex kappa, double alpha,
                              const Domain& dom, int order) {
  if (dom.dim != 1)
    throw std::invalid_argument("finite_rank_reference: one-dimensional domains only");
  const int r = static_cast<int>(spec.terms.size());
  Eigen::MatrixXcd g(r, r);
  for (int j = 0; j < r; ++j) {
    const TermAt tj = term_at(spec.terms[static_cast<std::size_t>(j)], alpha, dom);
    for (int k = 0; k < r; ++k) {
      const TermAt tk = term_at(spec.terms[static_cast<std::size_t>(k)], alpha, dom);
      g(j, k) = quad_product(tk.a, tj.b, dom, 2 * order);
    }
  }
  const Eigen::MatrixXcd m = Eigen::MatrixXcd::Identity(r, r) - kappa * g;
  return m.determinant();
}

FiberFunction dense_direct_solve(const KernelView& view, const DiscretizationPtr& disc,
                                 Complex kappa, const FiberFunction& g0) {
  const std::size_t n = disc->space.size();
  const std::size_t nf = disc->fiber.size();

  // Regularity check per block before committing to the monolithic solve.
  for (std::size_t j = 0; j < nf; ++j) {
    const FiberOperator op = assemble(view, disc, j);
    auto [smin, smax] = fiber_sigma_range(op, kappa);
    if (smax <= 0.0 || smin <= kSingularRelTol * smax)
      throw SingularFiberError(j, std::abs(fiber_determinant(op, kappa)));
  }

  Eigen::MatrixXcd big = Eigen::MatrixXcd::Zero(n * nf, n * nf);
  Eigen::VectorXcd rhs(n * nf);
  for (std::size_t j = 0; j < nf; ++j) {
    const FiberOperator op = assemble(view, disc, j);
    Eigen::MatrixXcd block = -kappa * op.samples;
    for (Eigen::Index c = 0; c < block.cols(); ++c)
      block.col(c) *= disc->space.weight(static_cast<std::size_t>(c));
    block.diagonal().array() += 1.0;
    big.block(static_cast<Eigen::Index>(j * n), static_cast<Eigen::Index>(j * n),
              static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n)) = block;
    rhs.segment(static_cast<Eigen::Index>(j * n), static_cast<Eigen::Index>(n)) =
        g0.values().col(static_cast<Eigen::Index>(j));
  }

  const Eigen::VectorXcd sol = big.partialPivLu().solve(rhs);
  Eigen::MatrixXcd out(n, nf);
  for (std::size_t j = 0; j < nf; ++j)
    out.col(static_cast<Eigen::Index>(j)) =
        sol.segment(static_cast<Eigen::Index>(j * n), static_cast<Eigen::Index>(n));
  return FiberFunction(disc, std::move(out));
}

}  // namespace oracles
}  // namespace pie
