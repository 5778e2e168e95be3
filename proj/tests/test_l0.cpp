#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include "test_helpers.hpp"

using namespace pie;
using namespace pie::testing;

namespace {

L0Scalar random_l0(std::mt19937& rng, const DiscretizationPtr& disc, double lo = -1,
                   double hi = 1) {
  std::uniform_real_distribution<double> u(lo, hi);
  Eigen::VectorXcd v(disc->fiber.size());
  for (Eigen::Index j = 0; j < v.size(); ++j) v[j] = Complex(u(rng), u(rng));
  return L0Scalar(disc, std::move(v));
}

}  // namespace

TEST_CASE("inner product basics") {
  const auto disc = disc01();
  const FiberFunction one = sampled_function(disc, [](double, double) { return 1.0; });
  const FiberFunction s = sampled_function(disc, [](double x, double) { return x; });
  const FiberFunction y = sampled_function(disc, [](double, double t) { return t; });

  SUBCASE("constant against constant") {
    const L0Scalar c = inner(one, one);
    for (Eigen::Index j = 0; j < c.values().size(); ++j)
      CHECK(std::abs(c.values()[j] - 1.0) < 1e-14);
  }
  SUBCASE("f = s against 1") {
    const L0Scalar c = inner(s, one);
    for (Eigen::Index j = 0; j < c.values().size(); ++j)
      CHECK(std::abs(c.values()[j] - 0.5) < 1e-14);
  }
  SUBCASE("f = y against 1 returns the fiber coordinate") {
    const L0Scalar c = inner(y, one);
    for (std::size_t j = 0; j < disc->fiber.size(); ++j)
      CHECK(std::abs(c.values()[static_cast<Eigen::Index>(j)] -
                     disc->fiber.node(j)[0]) < 1e-14);
  }
}

TEST_CASE("scale acts along the fiber axis") {
  const auto disc = disc01(8, 9);
  std::mt19937 rng(3);
  const FiberFunction f = random_rhs(rng, disc);

  Eigen::VectorXcd ones = Eigen::VectorXcd::Ones(disc->fiber.size());
  CHECK((scale(L0Scalar(disc, ones), f).values() - f.values()).cwiseAbs().maxCoeff() ==
        0.0);
  Eigen::VectorXcd zeros = Eigen::VectorXcd::Zero(disc->fiber.size());
  CHECK(scale(L0Scalar(disc, zeros), f).norm() == 0.0);

  Eigen::VectorXcd yvals(disc->fiber.size());
  for (std::size_t j = 0; j < disc->fiber.size(); ++j)
    yvals[static_cast<Eigen::Index>(j)] = disc->fiber.node(j)[0];
  const FiberFunction one = sampled_function(disc, [](double, double) { return 1.0; });
  const FiberFunction yf = scale(L0Scalar(disc, yvals), one);
  for (std::size_t j = 0; j < disc->fiber.size(); ++j)
    CHECK(yf.values()(0, static_cast<Eigen::Index>(j)) ==
          Complex(disc->fiber.node(j)[0]));
}

TEST_CASE("module linearity: inner(scale(b,f), g) = b * inner(f,g)") {
  const auto disc = disc01(8, 9);
  std::mt19937 rng(11);
  for (int rep = 0; rep < 10; ++rep) {
    const L0Scalar b = random_l0(rng, disc);
    const FiberFunction f = random_rhs(rng, disc), g = random_rhs(rng, disc);
    const L0Scalar lhs = inner(scale(b, f), g);
    const L0Scalar base = inner(f, g);
    for (Eigen::Index j = 0; j < lhs.values().size(); ++j)
      CHECK(std::abs(lhs.values()[j] - b.values()[j] * base.values()[j]) < 1e-12);
  }
}

TEST_CASE("orthonormalization of {1, s}") {
  const auto disc = disc01();
  const std::vector<FiberFunction> fs = {
      sampled_function(disc, [](double, double) { return 1.0; }),
      sampled_function(disc, [](double x, double) { return x; })};
  const auto res = l0_orthonormalize(fs, 1e-8);
  REQUIRE(res.functions.size() == 2);
  CHECK(res.support[0].fraction() == 1.0);
  CHECK(res.support[1].fraction() == 1.0);
  // hand Gram-Schmidt on L2[0,1]: {1, sqrt(12) (s - 1/2)}
  const double r12 = std::sqrt(12.0);
  for (std::size_t j = 0; j < disc->fiber.size(); ++j)
    for (std::size_t i = 0; i < disc->space.size(); ++i) {
      const double x = disc->space.node(i)[0];
      CHECK(std::abs(res.functions[0].values()(static_cast<Eigen::Index>(i),
                                               static_cast<Eigen::Index>(j)) -
                     1.0) < 1e-12);
      CHECK(std::abs(res.functions[1].values()(static_cast<Eigen::Index>(i),
                                               static_cast<Eigen::Index>(j)) -
                     r12 * (x - 0.5)) < 1e-10);
    }
}

TEST_CASE("orthonormalization flags fiberwise dependence") {
  const auto disc = disc01(8, 9);
  const FiberFunction one = sampled_function(disc, [](double, double) { return 1.0; });
  const std::vector<FiberFunction> fs = {one, one};
  const auto res = l0_orthonormalize(fs, 1e-8);
  CHECK(res.support[0].fraction() == 1.0);
  CHECK(res.support[1].count() == 0);

  const std::vector<FiberFunction> single = {one};
  const auto r1 = l0_orthonormalize(single, 1e-8);
  CHECK(r1.support[0].fraction() == 1.0);
  CHECK((r1.functions[0].values().cwiseAbs().array() - 1.0).abs().maxCoeff() < 1e-12);
}

TEST_CASE("orthonormalization is idempotent on its own output") {
  const auto disc = disc01(8, 9);
  std::mt19937 rng(23);
  const std::vector<FiberFunction> fs = {random_rhs(rng, disc), random_rhs(rng, disc),
                                         random_rhs(rng, disc)};
  const auto once = l0_orthonormalize(fs, 1e-8);
  const auto twice = l0_orthonormalize(once.functions, 1e-8);
  for (std::size_t k = 0; k < once.functions.size(); ++k)
    CHECK((twice.functions[k].values() - once.functions[k].values())
              .cwiseAbs()
              .maxCoeff() < 1e-12);
}

TEST_CASE("nabla independence verdicts") {
  const auto disc = disc01();
  const FiberFunction one = sampled_function(disc, [](double, double) { return 1.0; });
  const FiberFunction s = sampled_function(disc, [](double x, double) { return x; });

  SUBCASE("{1, s} is independent on every fiber") {
    const std::vector<FiberFunction> fs = {one, s};
    const auto res = nabla_independent(fs, 1e-8);
    CHECK(res.independent);
    CHECK(res.witness.count() == 0);
  }
  SUBCASE("{1, b o 1} is dependent wherever defined") {
    std::mt19937 rng(5);
    Eigen::VectorXcd bv(disc->fiber.size());
    std::uniform_real_distribution<double> u(0.5, 2.0);
    for (Eigen::Index j = 0; j < bv.size(); ++j) bv[j] = u(rng);
    const std::vector<FiberFunction> fs = {one, scale(L0Scalar(disc, bv), one)};
    const auto res = nabla_independent(fs, 1e-8);
    CHECK_FALSE(res.independent);
    CHECK(res.witness.fraction() == 1.0);
  }
  SUBCASE("a single nonzero function is independent") {
    const std::vector<FiberFunction> fs = {s};
    CHECK(nabla_independent(fs, 1e-8).independent);
  }
  SUBCASE("verdict is invariant under scaling bounded away from zero") {
    std::mt19937 rng(17);
    Eigen::VectorXcd bv(disc->fiber.size());
    std::uniform_real_distribution<double> u(0.3, 3.0);
    for (Eigen::Index j = 0; j < bv.size(); ++j) bv[j] = u(rng);
    const std::vector<FiberFunction> fs = {one, s};
    const std::vector<FiberFunction> scaled = {scale(L0Scalar(disc, bv), one), s};
    CHECK(nabla_independent(fs, 1e-8).independent ==
          nabla_independent(scaled, 1e-8).independent);
  }
}

TEST_CASE("Bessel bound values") {
  const auto disc = disc01();
  CHECK(bessel_bound(*constant_kernel(), *disc, 1.0).m_max == 1);
  CHECK(bessel_bound(*constant_kernel(), *disc, 0.5).m_max == 4);
  CHECK(bessel_bound(*xs_kernel(), *disc, Complex(1.0 / 3.0)).m_max == 1);
  CHECK_THROWS_AS(bessel_bound(*constant_kernel(), *disc, 0.0), std::invalid_argument);
}

TEST_CASE("Bessel pointwise inequality for the constant kernel eigenfamily") {
  const auto disc = disc01();
  const std::vector<FiberFunction> family = {
      sampled_function(disc, [](double, double) { return 1.0; })};
  CHECK(bessel_pointwise_gap(*constant_kernel(), *disc, 1.0, family) <= 1e-8);
}

TEST_CASE("grid mismatch is rejected") {
  const auto a = disc01(8, 9);
  const auto b = disc01(8, 11);
  const FiberFunction fa = sampled_function(a, [](double, double) { return 1.0; });
  const FiberFunction fb = sampled_function(b, [](double, double) { return 1.0; });
  CHECK_THROWS_AS(inner(fa, fb), std::invalid_argument);
}
