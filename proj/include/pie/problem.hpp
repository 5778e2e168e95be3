#ifndef PIE_PROBLEM_HPP
#define PIE_PROBLEM_HPP

#include <nlohmann/json.hpp>
#include <optional>
#include <string>

#include "pie/kernel.hpp"
#include "pie/series.hpp"
#include "pie/solver.hpp"

namespace pie {

using json = nlohmann::ordered_json;

class ValidationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Right-hand side g0 given either as separable closed-form terms
/// g0(x,y) = sum coeff * fx(x) * fy(y), or as a sampled matrix file.
struct RhsSpec {
  struct Term {
    Basis1D fx, fy;
    Complex coeff = 1.0;
  };
  std::vector<Term> terms;
  std::optional<std::string> sampled_path;
};

struct ProblemFile {
  Domain domain{0.0, 1.0, 1};
  Rule rule = Rule::GaussLegendre;
  int n = 16;
  int fiber_n = 33;
  KernelPtr kernel;
  std::optional<RhsSpec> g0;
  std::optional<Complex> kappa;
  std::optional<SearchRegion> kappa_search;
  Thresholds thresholds;
  SeriesConfig series;
  json echo;  // normalized problem with all defaults filled

  DiscretizationPtr make_discretization() const;
  FiberFunction build_g0(const DiscretizationPtr& disc) const;
};

ProblemFile parse_problem(const std::string& path);
ProblemFile parse_problem_json(const json& doc, const std::string& base_dir = ".");

Complex parse_complex(const json& v, const std::string& field);
json complex_to_json(Complex z);

/// Sampled tensors: little-endian int64 header with the dimensions, then
/// float64 (Re, Im) pairs in row-major order.
std::vector<Complex> read_sampled_tensor(const std::string& path,
                                         std::vector<std::size_t>& dims,
                                         std::size_t rank);
void write_sampled_tensor(const std::string& path,
                          const std::vector<std::size_t>& dims,
                          std::span<const Complex> values);

}  // namespace pie

#endif
