#include "pie/grid.hpp"

#include <cmath>
#include <numbers>

namespace pie {

std::string rule_name(Rule r) {
  return r == Rule::Trapezoid ? "trapezoid" : "gauss";
}

Rule parse_rule(const std::string& s) {
  if (s == "trapezoid") return Rule::Trapezoid;
  if (s == "gauss" || s == "gauss-legendre") return Rule::GaussLegendre;
  throw std::invalid_argument("unknown quadrature rule: " + s);
}

namespace {

// Gauss-Legendre nodes/weights on [-1,1] by Newton iteration on P_n.
void gauss_legendre_reference(int n, std::vector<double>& x, std::vector<double>& w) {
  x.assign(n, 0.0);
  w.assign(n, 0.0);
  const int m = (n + 1) / 2;
  for (int i = 0; i < m; ++i) {
    double z = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
    double pp = 0.0;
    for (int it = 0; it < 100; ++it) {
      double p0 = 1.0, p1 = 0.0;
      for (int j = 0; j < n; ++j) {
        double p2 = p1;
        p1 = p0;
        p0 = ((2.0 * j + 1.0) * z * p1 - j * p2) / (j + 1.0);
      }
      pp = n * (z * p0 - p1) / (z * z - 1.0);
      double dz = p0 / pp;
      z -= dz;
      if (std::abs(dz) < 1e-15) break;
    }
    x[i] = -z;
    x[n - 1 - i] = z;
    w[i] = 2.0 / ((1.0 - z * z) * pp * pp);
    w[n - 1 - i] = w[i];
  }
}

}  // namespace

QuadratureGrid::QuadratureGrid(Domain domain, Rule rule, int n,
                               std::vector<double> axis_nodes,
                               std::vector<double> axis_weights)
    : domain_(domain),
      rule_(rule),
      n_(n),
      axis_nodes_(std::move(axis_nodes)),
      axis_weights_(std::move(axis_weights)) {
  const int nu = domain_.dim;
  std::size_t count = 1;
  for (int d = 0; d < nu; ++d) count *= static_cast<std::size_t>(n_);
  nodes_.resize(count * nu);
  weights_.resize(count);
  // Tensor product, first axis fastest.
  std::vector<int> idx(nu, 0);
  for (std::size_t i = 0; i < count; ++i) {
    double w = 1.0;
    for (int d = 0; d < nu; ++d) {
      nodes_[i * nu + d] = axis_nodes_[idx[d]];
      w *= axis_weights_[idx[d]];
    }
    weights_[i] = w;
    for (int d = 0; d < nu; ++d) {
      if (++idx[d] < n_) break;
      idx[d] = 0;
    }
  }
}

std::size_t QuadratureGrid::locate(std::span<const double> p, double eps) const {
  if (static_cast<int>(p.size()) != domain_.dim)
    throw std::invalid_argument("locate: point dimension mismatch");
  if (!domain_.contains(p)) throw std::domain_error("locate: point outside domain");
  const int nu = domain_.dim;
  std::size_t index = 0, stride = 1;
  for (int d = 0; d < nu; ++d) {
    int found = -1;
    for (int j = 0; j < n_; ++j) {
      if (std::abs(axis_nodes_[j] - p[d]) <= eps) {
        found = j;
        break;
      }
    }
    if (found < 0)
      throw std::invalid_argument("locate: point is not a grid node (interpolation unsupported)");
    index += stride * static_cast<std::size_t>(found);
    stride *= static_cast<std::size_t>(n_);
  }
  return index;
}

QuadratureGrid build_grid(const Domain& domain, Rule rule, int n) {
  if (n < 2) throw std::invalid_argument("build_grid: need n >= 2 points per axis");
  if (domain.dim > 3)
    throw std::invalid_argument("build_grid: dimensions above 3 are unsupported");
  std::vector<double> x(n), w(n);
  const double a = domain.lower, b = domain.upper, h = (b - a) / (n - 1);
  switch (rule) {
    case Rule::Trapezoid:
      for (int i = 0; i < n; ++i) {
        x[i] = a + h * i;
        w[i] = (i == 0 || i == n - 1) ? h / 2.0 : h;
      }
      break;
    case Rule::GaussLegendre: {
      std::vector<double> xr, wr;
      gauss_legendre_reference(n, xr, wr);
      for (int i = 0; i < n; ++i) {
        x[i] = a + (b - a) * 0.5 * (xr[i] + 1.0);
        w[i] = wr[i] * (b - a) * 0.5;
      }
      break;
    }
  }
  return QuadratureGrid(domain, rule, n, std::move(x), std::move(w));
}

Complex integrate(const QuadratureGrid& grid, std::span<const Complex> samples) {
  if (samples.size() != grid.size())
    throw std::invalid_argument("integrate: sample count does not match grid");
  Complex acc = 0.0;
  for (std::size_t i = 0; i < samples.size(); ++i) acc += grid.weight(i) * samples[i];
  return acc;
}

double integrate(const QuadratureGrid& grid, std::span<const double> samples) {
  if (samples.size() != grid.size())
    throw std::invalid_argument("integrate: sample count does not match grid");
  double acc = 0.0;
  for (std::size_t i = 0; i < samples.size(); ++i) acc += grid.weight(i) * samples[i];
  return acc;
}

DiscretizationPtr make_discretization(const Domain& domain, Rule rule, int n,
                                      int fiber_n) {
  if (fiber_n <= 0) fiber_n = n;
  return std::make_shared<Discretization>(
      Discretization{build_grid(domain, rule, n), build_grid(domain, rule, fiber_n)});
}

}  // namespace pie
