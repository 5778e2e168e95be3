#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "pie/fiber.hpp"
#include "test_helpers.hpp"

using namespace pie;
using namespace pie::testing;

namespace {

Eigen::MatrixXcd nystrom_matrix(const FiberOperator& op) {
  Eigen::MatrixXcd kw = op.samples;
  for (Eigen::Index j = 0; j < kw.cols(); ++j)
    kw.col(j) *= op.disc->space.weight(static_cast<std::size_t>(j));
  return kw;
}

}  // namespace

TEST_CASE("assembly of the constant kernel at two Gauss points") {
  const auto disc = disc01(2, 3);
  const FiberOperator op = assemble(KernelView(constant_kernel()), disc, 0);
  const Eigen::MatrixXcd kw = nystrom_matrix(op);
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j) CHECK(std::abs(kw(i, j) - 0.5) < 1e-14);
}

TEST_CASE("assembly of q = y vanishes at the alpha = 0 fiber") {
  const auto disc = disc01(4, 5, Rule::Trapezoid);  // trapezoid fiber grid starts at 0
  REQUIRE(disc->fiber.node(0)[0] == 0.0);
  const FiberOperator op = assemble(KernelView(y_kernel()), disc, 0);
  CHECK(op.samples.cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("assembly of a fully deflated view is the zero matrix") {
  const auto disc = disc01(4, 5, Rule::Trapezoid);
  const FiberFunction one = sampled_function(disc, [](double, double) { return 1.0; });
  const KernelView view = KernelView(constant_kernel()).deflated({{one, one}});
  const FiberOperator op = assemble(view, disc, 2);
  CHECK(op.samples.cwiseAbs().maxCoeff() < 1e-15);
}

TEST_CASE("fiber determinant values") {
  const auto disc = disc01(8, 5);
  const FiberOperator one = assemble(KernelView(constant_kernel()), disc, 0);
  CHECK(std::abs(fiber_determinant(one, 1.0)) < 1e-12);
  CHECK(fiber_determinant(one, 0.0) == Complex(1.0));
  const FiberOperator xs = assemble(KernelView(xs_kernel()), disc, 0);
  CHECK(std::abs(fiber_determinant(xs, 3.0)) < 1e-12);
}

TEST_CASE("fiber solve") {
  const auto disc = disc01(8, 5);
  const FiberOperator op = assemble(KernelView(constant_kernel()), disc, 0);
  const Eigen::VectorXcd rhs = Eigen::VectorXcd::Ones(8);

  SUBCASE("rank-1 resolvent at kappa = 1/2") {
    const Eigen::VectorXcd phi = fiber_solve(op, 0.5, rhs);
    CHECK((phi.array() - 2.0).abs().maxCoeff() < 1e-12);
  }
  SUBCASE("kappa = 0 returns the right-hand side") {
    CHECK((fiber_solve(op, 0.0, rhs) - rhs).cwiseAbs().maxCoeff() < 1e-14);
  }
  SUBCASE("singular fiber raises") {
    CHECK_THROWS_AS(fiber_solve(op, 1.0, rhs), SingularFiberError);
  }
  SUBCASE("residual contract") {
    const FiberOperator g = assemble(KernelView(gaussian_kernel()), disc, 2);
    Eigen::VectorXcd r(8);
    for (int i = 0; i < 8; ++i) r[i] = Complex(std::sin(3.0 * i), 0.3 * i);
    const Eigen::VectorXcd phi = fiber_solve(g, Complex(0.7, 0.2), r);
    const Eigen::VectorXcd back = phi - Complex(0.7, 0.2) * (nystrom_matrix(g) * phi);
    CHECK((back - r).norm() <= 1e-10 * (r.norm() + phi.norm()));
  }
}

TEST_CASE("fiber nullspace") {
  const auto disc = disc01(8, 5);
  const FiberOperator op = assemble(KernelView(constant_kernel()), disc, 0);

  SUBCASE("constant kernel at kappa = 1 has a one-dimensional nullspace") {
    const FiberNullspace ns = fiber_nullspace(op, 1.0, 1e-8);
    REQUIRE(ns.dim == 1);
    // basis vector is the constant function, up to phase
    const Complex ref = ns.basis(0, 0);
    CHECK(std::abs(ref) > 0.1);
    for (int i = 1; i < 8; ++i) CHECK(std::abs(ns.basis(i, 0) - ref) < 1e-10);
    // unit discrete L2 norm (weighted)
    double norm = 0.0;
    for (std::size_t i = 0; i < 8; ++i)
      norm += disc->space.weight(i) * std::norm(ns.basis(static_cast<Eigen::Index>(i), 0));
    CHECK(std::abs(norm - 1.0) < 1e-12);
  }
  SUBCASE("regular kappa has only the trivial solution") {
    CHECK(fiber_nullspace(op, 0.5, 1e-8).dim == 0);
  }
  SUBCASE("adjoint view at kappa = 1 also has nullity 1") {
    const FiberOperator adj = assemble(KernelView(constant_kernel()).adjoint(), disc, 0);
    CHECK(fiber_nullspace(adj, 1.0, 1e-8).dim == 1);
  }
}

TEST_CASE("resolvent kernel samples") {
  const auto disc = disc01(8, 5);
  const FiberOperator one = assemble(KernelView(constant_kernel()), disc, 0);

  SUBCASE("constant kernel at kappa = 1/2") {
    const Eigen::MatrixXcd r = resolvent_kernel(one, 0.5);
    CHECK((r.array() - 2.0).abs().maxCoeff() < 1e-12);
  }
  SUBCASE("kappa = 0 reduces to the kernel samples") {
    CHECK((resolvent_kernel(one, 0.0) - one.samples).cwiseAbs().maxCoeff() < 1e-14);
  }
  SUBCASE("q = x s at kappa = 3/2") {
    const FiberOperator xs = assemble(KernelView(xs_kernel()), disc, 0);
    const Eigen::MatrixXcd r = resolvent_kernel(xs, 1.5);
    for (std::size_t i = 0; i < 8; ++i)
      for (std::size_t j = 0; j < 8; ++j)
        CHECK(std::abs(r(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) -
                       2.0 * disc->space.node(i)[0] * disc->space.node(j)[0]) < 1e-12);
  }
  SUBCASE("singular fiber raises") {
    CHECK_THROWS_AS(resolvent_kernel(one, 1.0), SingularFiberError);
  }
}

TEST_CASE("resolvent solves the fiber equation") {
  const auto disc = disc01(12, 5);
  const FiberOperator op = assemble(KernelView(gaussian_kernel()), disc, 3);
  const Complex kappa(0.8, -0.3);
  Eigen::VectorXcd rhs(12);
  for (int i = 0; i < 12; ++i) rhs[i] = Complex(std::cos(i * 0.7), std::sin(i * 0.4));
  const Eigen::MatrixXcd r = resolvent_kernel(op, kappa);
  Eigen::VectorXcd wrhs = rhs;
  for (Eigen::Index i = 0; i < wrhs.size(); ++i)
    wrhs[i] *= disc->space.weight(static_cast<std::size_t>(i));
  const Eigen::VectorXcd via_resolvent = rhs + kappa * (r * wrhs);
  const Eigen::VectorXcd via_solve = fiber_solve(op, kappa, rhs);
  CHECK((via_resolvent - via_solve).cwiseAbs().maxCoeff() < 1e-10);
}

TEST_CASE("resolvent identity (I - kKW)(I + kRW) = I on regular fibers") {
  const auto disc = disc01(10, 7);
  for (const auto& kernel : {constant_kernel(), xs_kernel(), gaussian_kernel()}) {
    const FiberOperator op = assemble(KernelView(kernel), disc, 4);
    const Complex kappa(0.4, 0.1);
    const Eigen::MatrixXcd kw = nystrom_matrix(op);
    Eigen::MatrixXcd rw = resolvent_kernel(op, kappa);
    for (Eigen::Index j = 0; j < rw.cols(); ++j)
      rw.col(j) *= disc->space.weight(static_cast<std::size_t>(j));
    const Eigen::MatrixXcd lhs =
        (Eigen::MatrixXcd::Identity(10, 10) - kappa * kw) *
        (Eigen::MatrixXcd::Identity(10, 10) + kappa * rw);
    CHECK((lhs - Eigen::MatrixXcd::Identity(10, 10)).cwiseAbs().maxCoeff() < 1e-10);
  }
}

TEST_CASE("adjoint nullity matches the direct nullity on every fiber") {
  const auto disc = disc01(10, 9);
  const KernelView view(two_term_orthogonal_kernel());
  const KernelView adj = view.adjoint();
  for (std::size_t j = 0; j < disc->fiber.size(); ++j) {
    const FiberOperator d = assemble(view, disc, j);
    const FiberOperator a = assemble(adj, disc, j);
    for (const Complex kappa : {Complex(1.0), Complex(3.0), Complex(0.5)})
      CHECK(fiber_nullspace(d, kappa, 1e-8).dim ==
            fiber_nullspace(a, std::conj(kappa), 1e-8).dim);
  }
}

TEST_CASE("determinant and nullspace classifications agree") {
  const auto disc = disc01(10, 9);
  const KernelView view(two_term_orthogonal_kernel());
  for (std::size_t j = 0; j < disc->fiber.size(); ++j) {
    const FiberOperator op = assemble(view, disc, j);
    for (const Complex kappa : {Complex(1.0), Complex(3.0), Complex(0.5), Complex(2.0)}) {
      const FiberNullspace ns = fiber_nullspace(op, kappa, 1e-8);
      const bool singular = ns.dim > 0;
      CHECK(singular == (ns.sigma_min <= 1e-8 * ns.sigma_max));
    }
  }
}

TEST_CASE("fiber determinant is stable under grid refinement") {
  for (const auto& kernel : {gaussian_kernel(), two_term_orthogonal_kernel()}) {
    const auto coarse = disc01(16, 5);
    const auto fine = disc01(32, 5);
    for (const Complex kappa : {Complex(0.5), Complex(-2.0), Complex(0.0, 1.5)}) {
      const Complex dc = fiber_determinant(assemble(KernelView(kernel), coarse, 2), kappa);
      const Complex df = fiber_determinant(assemble(KernelView(kernel), fine, 2), kappa);
      CHECK(std::abs(dc - df) < 1e-8);
    }
  }
}
