#ifndef PIE_GRID_HPP
#define PIE_GRID_HPP

#include <complex>
#include <memory>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace pie {

using Complex = std::complex<double>;

/// Box domain [lower, upper]^dim.
struct Domain {
  double lower;
  double upper;
  int dim;

  Domain(double lo, double hi, int nu) : lower(lo), upper(hi), dim(nu) {
    if (!(lo < hi)) throw std::invalid_argument("Domain: lower must be < upper");
    if (nu < 1) throw std::invalid_argument("Domain: dimension must be >= 1");
  }

  double length() const { return upper - lower; }
  double volume() const {
    double v = 1.0;
    for (int d = 0; d < dim; ++d) v *= length();
    return v;
  }
  bool contains(std::span<const double> p) const {
    if (static_cast<int>(p.size()) != dim) return false;
    for (double c : p)
      if (c < lower - 1e-12 || c > upper + 1e-12) return false;
    return true;
  }
};

enum class Rule { Trapezoid, GaussLegendre };

std::string rule_name(Rule r);
Rule parse_rule(const std::string& s);

/// Tensor-product quadrature over a box domain. Nodes are stored row-major,
/// dim doubles per node. Immutable after construction.
class QuadratureGrid {
 public:
  QuadratureGrid(Domain domain, Rule rule, int points_per_axis,
                 std::vector<double> axis_nodes, std::vector<double> axis_weights);

  const Domain& domain() const { return domain_; }
  Rule rule() const { return rule_; }
  int points_per_axis() const { return n_; }
  std::size_t size() const { return weights_.size(); }

  std::span<const double> node(std::size_t i) const {
    return {nodes_.data() + i * domain_.dim, static_cast<std::size_t>(domain_.dim)};
  }
  double weight(std::size_t i) const { return weights_[i]; }
  const std::vector<double>& weights() const { return weights_; }

  const std::vector<double>& axis_nodes() const { return axis_nodes_; }
  const std::vector<double>& axis_weights() const { return axis_weights_; }

  /// Index of the grid node equal to p (componentwise within eps), or throws.
  std::size_t locate(std::span<const double> p, double eps = 1e-12) const;

 private:
  Domain domain_;
  Rule rule_;
  int n_;
  std::vector<double> axis_nodes_;
  std::vector<double> axis_weights_;
  std::vector<double> nodes_;    // size() * dim, row-major
  std::vector<double> weights_;  // tensor-product weights
};

QuadratureGrid build_grid(const Domain& domain, Rule rule, int n);

Complex integrate(const QuadratureGrid& grid, std::span<const Complex> samples);
double integrate(const QuadratureGrid& grid, std::span<const double> samples);

/// The two grids every discretized object lives on: the x/s quadrature grid
/// and the fiber grid in y (same domain, possibly different resolution).
struct Discretization {
  QuadratureGrid space;
  QuadratureGrid fiber;
};

using DiscretizationPtr = std::shared_ptr<const Discretization>;

DiscretizationPtr make_discretization(const Domain& domain, Rule rule, int n,
                                      int fiber_n = 0);

}  // namespace pie

#endif
