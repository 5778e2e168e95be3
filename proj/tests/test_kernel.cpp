#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include "test_helpers.hpp"

using namespace pie;
using namespace pie::testing;

namespace {

const std::vector<double> kP1 = {0.25};
const std::vector<double> kP2 = {0.75};
const std::vector<double> kP3 = {0.5};

}  // namespace

TEST_CASE("plain evaluation of the constant kernel") {
  const auto disc = disc01(4, 5, Rule::Trapezoid);
  const KernelView view(constant_kernel());
  CHECK(view.eval_at(*disc, kP1, kP2, kP3) == Complex(1.0));
  CHECK(view.eval_indexed(*disc, 0, 3, 2) == Complex(1.0));
}

TEST_CASE("adjoint kernel conjugates and swaps x with s") {
  const auto disc = disc01(4, 5);
  const auto k = std::make_shared<Kernel>(
      Kernel::polynomial(1, 1, 0, Complex(0.0, 1.0)));  // q = i x s
  const KernelView adj = KernelView(k).adjoint();
  const Complex got = adj.eval_at(*disc, kP1, kP2, kP3);
  CHECK(std::abs(got - Complex(0.0, -1.0) * 0.25 * 0.75) < 1e-15);
}

TEST_CASE("deflation by the pair (1, 1) kills the constant kernel") {
  const auto disc = disc01(4, 5, Rule::Trapezoid);
  const FiberFunction one(disc,
                          Eigen::MatrixXcd::Ones(disc->space.size(), disc->fiber.size()));
  const KernelView view = KernelView(constant_kernel()).deflated({{one, one}});
  for (std::size_t i = 0; i < disc->space.size(); ++i)
    for (std::size_t j = 0; j < disc->fiber.size(); ++j)
      CHECK(std::abs(view.eval_indexed(*disc, i, 0, j)) < 1e-15);
}

TEST_CASE("adjoint involution is exact at every grid triple") {
  const auto disc = disc01(5, 4, Rule::Trapezoid);
  const KernelView plain(gaussian_kernel(3.0, 0.25));
  const KernelView twice = plain.adjoint().adjoint();
  for (std::size_t i = 0; i < disc->space.size(); ++i)
    for (std::size_t s = 0; s < disc->space.size(); ++s)
      for (std::size_t j = 0; j < disc->fiber.size(); ++j)
        CHECK(twice.eval_indexed(*disc, i, s, j) ==
              plain.eval_indexed(*disc, i, s, j));
}

TEST_CASE("deflation is linear in the pair list") {
  const auto disc = disc01(4, 5);
  std::mt19937 rng(7);
  const FiberFunction f1 = random_rhs(rng, disc), g1 = random_rhs(rng, disc);
  const FiberFunction f2 = random_rhs(rng, disc), g2 = random_rhs(rng, disc);
  const KernelView base(gaussian_kernel());
  const KernelView both = base.deflated({{f1, g1}, {f2, g2}});
  const KernelView first = base.deflated({{f1, g1}});
  for (std::size_t i = 0; i < disc->space.size(); ++i)
    for (std::size_t j = 0; j < disc->fiber.size(); ++j) {
      const Complex expect = first.eval_indexed(*disc, i, i, j) -
                             std::conj(f2.values()(i, j)) * g2.values()(i, j);
      CHECK(std::abs(both.eval_indexed(*disc, i, i, j) - expect) <= 1e-14);
    }
}

TEST_CASE("sampling a finite-rank kernel reproduces closed-form evaluation") {
  const auto disc = disc01(6, 7);
  const auto fr = two_term_orthogonal_kernel();
  const std::size_t n = disc->space.size(), nf = disc->fiber.size();
  std::vector<Complex> tensor(n * n * nf);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t s = 0; s < n; ++s)
      for (std::size_t j = 0; j < nf; ++j)
        tensor[(i * n + s) * nf + j] = fr->eval_indexed(*disc, i, s, j);
  const auto sampled =
      std::make_shared<Kernel>(Kernel::sampled(n, n, nf, std::move(tensor)));
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t s = 0; s < n; ++s)
      for (std::size_t j = 0; j < nf; ++j)
        CHECK(std::abs(sampled->eval_indexed(*disc, i, s, j) -
                       fr->eval_indexed(*disc, i, s, j)) <= 1e-14);
}

TEST_CASE("sampled kernels reject off-grid points, closed forms reject outside points") {
  const auto disc = disc01(4, 4, Rule::Trapezoid);
  const std::size_t n = disc->space.size(), nf = disc->fiber.size();
  const auto sampled = std::make_shared<Kernel>(
      Kernel::sampled(n, n, nf, std::vector<Complex>(n * n * nf, 1.0)));
  const KernelView view(sampled);
  const std::vector<double> node0 = {0.0};
  const std::vector<double> off = {0.123};
  CHECK_THROWS_AS(view.eval_at(*disc, off, node0, node0), std::invalid_argument);
  const KernelView cview(constant_kernel());
  const std::vector<double> outside = {2.0};
  CHECK_THROWS_AS(cview.eval_at(*disc, outside, node0, node0), std::domain_error);
}

TEST_CASE("bound_function profiles") {
  const auto disc = disc01(16, 33);

  SUBCASE("constant kernel") {
    const auto bf = bound_function(*constant_kernel(), disc);
    CHECK(std::abs(bf.sup - 1.0) < 1e-12);
    for (Eigen::Index j = 0; j < bf.values.values().size(); ++j)
      CHECK(std::abs(bf.values.values()[j] - 1.0) < 1e-12);
  }
  SUBCASE("q = y gives b(t) = t^2") {
    const auto bf = bound_function(*y_kernel(), disc);
    for (std::size_t j = 0; j < disc->fiber.size(); ++j) {
      const double t = disc->fiber.node(j)[0];
      CHECK(std::abs(bf.values.values()[static_cast<Eigen::Index>(j)] - t * t) < 1e-12);
    }
    CHECK(bf.sup <= 1.0 + 1e-12);
  }
  SUBCASE("q = x s gives b = 1/9") {
    const auto bf = bound_function(*xs_kernel(), disc);
    for (Eigen::Index j = 0; j < bf.values.values().size(); ++j)
      CHECK(std::abs(bf.values.values()[j] - 1.0 / 9.0) < 1e-13);
  }
}

TEST_CASE("basis function parsing") {
  CHECK(Basis1D::parse("legendre-3").degree == 3);
  CHECK(Basis1D::parse("t2").name() == "t2");
  CHECK_THROWS_AS(Basis1D::parse("cubic"), std::invalid_argument);
  // normalized Legendre basis has unit L2 norm on the domain
  const Domain dom(0, 1, 1);
  const auto g = build_grid(dom, Rule::GaussLegendre, 16);
  for (int k = 0; k <= 4; ++k) {
    const Basis1D b = Basis1D::parse("legendre-" + std::to_string(k));
    std::vector<double> sq(g.size());
    for (std::size_t i = 0; i < g.size(); ++i) {
      const double v = b.eval(g.node(i)[0], dom);
      sq[i] = v * v;
    }
    CHECK(std::abs(integrate(g, std::span<const double>(sq)) - 1.0) < 1e-12);
  }
}

TEST_CASE("finite-rank kernel requires at least one term") {
  CHECK_THROWS_AS(Kernel::finite_rank({}), std::invalid_argument);
}
