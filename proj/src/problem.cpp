#include "pie/problem.hpp"

#include <cstdint>
#include <filesystem>
#include <fstream>

namespace pie {

namespace {

void check_known_fields(const json& obj, std::initializer_list<const char*> allowed,
                        const std::string& where) {
  for (const auto& [key, value] : obj.items()) {
    bool ok = false;
    for (const char* a : allowed)
      if (key == a) ok = true;
    if (!ok) throw ValidationError("unknown field \"" + key + "\" in " + where);
  }
}

std::string resolve(const std::string& base_dir, const std::string& path) {
  std::filesystem::path p(path);
  if (p.is_absolute()) return path;
  return (std::filesystem::path(base_dir) / p).string();
}

KernelPtr parse_kernel(const json& spec, const std::string& base_dir,
                       std::size_t n_nodes, std::size_t fiber_nodes) {
  if (!spec.is_object()) throw ValidationError("kernel spec must be an object");
  if (spec.contains("builtin")) {
    const std::string name = spec["builtin"].get<std::string>();
    if (name == "constant") {
      check_known_fields(spec, {"builtin", "value"}, "kernel");
      const Complex v = spec.contains("value") ? parse_complex(spec["value"], "kernel.value")
                                               : Complex(1.0);
      return std::make_shared<Kernel>(Kernel::constant(v));
    }
    if (name == "polynomial") {
      check_known_fields(spec, {"builtin", "p", "r", "t", "coeff"}, "kernel");
      const int p = spec.value("p", 0), r = spec.value("r", 0), t = spec.value("t", 0);
      const Complex c = spec.contains("coeff") ? parse_complex(spec["coeff"], "kernel.coeff")
                                               : Complex(1.0);
      return std::make_shared<Kernel>(Kernel::polynomial(p, r, t, c));
    }
    if (name == "gaussian") {
      check_known_fields(spec, {"builtin", "gamma", "center", "coeff"}, "kernel");
      const double gamma = spec.value("gamma", 1.0);
      const double center = spec.value("center", 0.5);
      const Complex c = spec.contains("coeff") ? parse_complex(spec["coeff"], "kernel.coeff")
                                               : Complex(1.0);
      return std::make_shared<Kernel>(Kernel::gaussian(gamma, center, c));
    }
    throw ValidationError("unknown builtin kernel \"" + name + "\"");
  }
  if (spec.contains("finite_rank")) {
    check_known_fields(spec, {"finite_rank"}, "kernel");
    if (!spec["finite_rank"].is_array() || spec["finite_rank"].empty())
      throw ValidationError("kernel.finite_rank must be a nonempty array of terms");
    std::vector<SeparableTerm> terms;
    for (const auto& t : spec["finite_rank"]) {
      check_known_fields(t, {"ax", "ay", "bs", "by", "coeff"}, "kernel.finite_rank term");
      SeparableTerm term;
      term.ax = Basis1D::parse(t.value("ax", "1"));
      term.ay = Basis1D::parse(t.value("ay", "1"));
      term.bs = Basis1D::parse(t.value("bs", "1"));
      term.by = Basis1D::parse(t.value("by", "1"));
      term.coeff = t.contains("coeff") ? parse_complex(t["coeff"], "term.coeff")
                                       : Complex(1.0);
      terms.push_back(term);
    }
    return std::make_shared<Kernel>(Kernel::finite_rank(std::move(terms)));
  }
  if (spec.contains("sampled")) {
    check_known_fields(spec, {"sampled"}, "kernel");
    std::vector<std::size_t> dims;
    auto values =
        read_sampled_tensor(resolve(base_dir, spec["sampled"].get<std::string>()), dims, 3);
    if (dims[0] != n_nodes || dims[1] != n_nodes || dims[2] != fiber_nodes)
      throw ValidationError("sampled kernel tensor shape (" + std::to_string(dims[0]) +
                            "," + std::to_string(dims[1]) + "," + std::to_string(dims[2]) +
                            ") does not match the grids");
    return std::make_shared<Kernel>(
        Kernel::sampled(dims[0], dims[1], dims[2], std::move(values)));
  }
  throw ValidationError("kernel spec needs \"builtin\", \"finite_rank\" or \"sampled\"");
}

RhsSpec parse_rhs(const json& spec, const std::string& base_dir) {
  RhsSpec rhs;
  if (!spec.is_object()) throw ValidationError("g0 spec must be an object");
  if (spec.contains("sampled")) {
    check_known_fields(spec, {"sampled"}, "g0");
    rhs.sampled_path = resolve(base_dir, spec["sampled"].get<std::string>());
    return rhs;
  }
  if (!spec.contains("terms"))
    throw ValidationError("g0 spec needs \"terms\" or \"sampled\"");
  check_known_fields(spec, {"terms"}, "g0");
  if (!spec["terms"].is_array() || spec["terms"].empty())
    throw ValidationError("g0.terms must be a nonempty array");
  for (const auto& t : spec["terms"]) {
    check_known_fields(t, {"fx", "fy", "coeff"}, "g0 term");
    RhsSpec::Term term;
    term.fx = Basis1D::parse(t.value("fx", "1"));
    term.fy = Basis1D::parse(t.value("fy", "1"));
    term.coeff = t.contains("coeff") ? parse_complex(t["coeff"], "g0 term.coeff")
                                     : Complex(1.0);
    rhs.terms.push_back(term);
  }
  return rhs;
}

}  // namespace

Complex parse_complex(const json& v, const std::string& field) {
  if (v.is_number()) return Complex(v.get<double>(), 0.0);
  if (v.is_array() && v.size() == 2 && v[0].is_number() && v[1].is_number())
    return Complex(v[0].get<double>(), v[1].get<double>());
  throw ValidationError("field \"" + field + "\" must be a number or [re, im]");
}

json complex_to_json(Complex z) {
  if (z.imag() == 0.0) return json(z.real());
  return json::array({z.real(), z.imag()});
}

std::vector<Complex> read_sampled_tensor(const std::string& path,
                                         std::vector<std::size_t>& dims,
                                         std::size_t rank) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ValidationError("cannot open sampled tensor file: " + path);
  dims.resize(rank);
  std::size_t total = 1;
  for (std::size_t d = 0; d < rank; ++d) {
    std::int64_t v = 0;
    in.read(reinterpret_cast<char*>(&v), sizeof(v));
    if (!in || v <= 0) throw ValidationError("bad tensor header in " + path);
    dims[d] = static_cast<std::size_t>(v);
    total *= dims[d];
  }
  std::vector<Complex> values(total);
  for (std::size_t i = 0; i < total; ++i) {
    double re = 0, im = 0;
    in.read(reinterpret_cast<char*>(&re), sizeof(re));
    in.read(reinterpret_cast<char*>(&im), sizeof(im));
    if (!in) throw ValidationError("truncated tensor data in " + path);
    values[i] = Complex(re, im);
  }
  return values;
}

void write_sampled_tensor(const std::string& path, const std::vector<std::size_t>& dims,
                          std::span<const Complex> values) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write tensor file: " + path);
  for (std::size_t d : dims) {
    const std::int64_t v = static_cast<std::int64_t>(d);
    out.write(reinterpret_cast<const char*>(&v), sizeof(v));
  }
  for (const Complex& z : values) {
    const double re = z.real(), im = z.imag();
    out.write(reinterpret_cast<const char*>(&re), sizeof(re));
    out.write(reinterpret_cast<const char*>(&im), sizeof(im));
  }
}

DiscretizationPtr ProblemFile::make_discretization() const {
  return pie::make_discretization(domain, rule, n, fiber_n);
}

FiberFunction ProblemFile::build_g0(const DiscretizationPtr& disc) const {
  if (!g0) throw ValidationError("this command requires a g0 specification");
  const std::size_t nn = disc->space.size(), nf = disc->fiber.size();
  Eigen::MatrixXcd vals = Eigen::MatrixXcd::Zero(nn, nf);
  if (g0->sampled_path) {
    std::vector<std::size_t> dims;
    auto data = read_sampled_tensor(*g0->sampled_path, dims, 2);
    if (dims[0] != nn || dims[1] != nf)
      throw ValidationError("sampled g0 shape does not match the grids");
    for (std::size_t i = 0; i < nn; ++i)
      for (std::size_t j = 0; j < nf; ++j)
        vals(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) =
            data[i * nf + j];
  } else {
    for (const auto& term : g0->terms)
      for (std::size_t i = 0; i < nn; ++i) {
        double fx = 1.0;
        for (double c : disc->space.node(i)) fx *= term.fx.eval(c, domain);
        for (std::size_t j = 0; j < nf; ++j) {
          double fy = 1.0;
          for (double c : disc->fiber.node(j)) fy *= term.fy.eval(c, domain);
          vals(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) +=
              term.coeff * fx * fy;
        }
      }
  }
  return FiberFunction(disc, std::move(vals));
}

ProblemFile parse_problem_json(const json& doc, const std::string& base_dir) {
  check_known_fields(doc,
                     {"domain", "nu", "grid", "kernel", "g0", "kappa", "kappa_search",
                      "tolerances", "series"},
                     "problem");
  ProblemFile pf;

  if (!doc.contains("domain") || !doc["domain"].is_array() || doc["domain"].size() != 2)
    throw ValidationError("problem needs \"domain\": [a, b]");
  const int nu = doc.value("nu", 1);
  pf.domain = Domain(doc["domain"][0].get<double>(), doc["domain"][1].get<double>(), nu);

  if (!doc.contains("grid")) throw ValidationError("problem needs a \"grid\" object");
  const json& grid = doc["grid"];
  check_known_fields(grid, {"rule", "n", "fiber_n"}, "grid");
  pf.rule = parse_rule(grid.value("rule", "gauss"));
  pf.n = grid.value("n", 16);
  pf.fiber_n = grid.value("fiber_n", 33);
  if (pf.n < 2 || pf.fiber_n < 2)
    throw ValidationError("grid.n and grid.fiber_n must be at least 2");

  std::size_t nn = 1, nf = 1;
  for (int d = 0; d < nu; ++d) {
    nn *= static_cast<std::size_t>(pf.n);
    nf *= static_cast<std::size_t>(pf.fiber_n);
  }
  if (!doc.contains("kernel")) throw ValidationError("problem needs a \"kernel\" spec");
  pf.kernel = parse_kernel(doc["kernel"], base_dir, nn, nf);

  if (doc.contains("g0")) pf.g0 = parse_rhs(doc["g0"], base_dir);

  if (doc.contains("kappa") && doc.contains("kappa_search"))
    throw ValidationError("\"kappa\" and \"kappa_search\" are mutually exclusive");
  if (doc.contains("kappa")) pf.kappa = parse_complex(doc["kappa"], "kappa");
  if (doc.contains("kappa_search")) {
    const json& ks = doc["kappa_search"];
    check_known_fields(ks, {"re", "im"}, "kappa_search");
    SearchRegion region;
    if (ks.contains("re")) {
      region.re_min = ks["re"][0].get<double>();
      region.re_max = ks["re"][1].get<double>();
    }
    if (ks.contains("im")) {
      region.im_min = ks["im"][0].get<double>();
      region.im_max = ks["im"][1].get<double>();
    }
    if (region.re_min > region.re_max || region.im_min > region.im_max)
      throw ValidationError("kappa_search bounds are inverted");
    pf.kappa_search = region;
  }

  if (doc.contains("tolerances")) {
    const json& tol = doc["tolerances"];
    check_known_fields(tol, {"solve", "cluster", "tau", "rank", "singular"},
                       "tolerances");
    pf.thresholds.solve_tol = tol.value("solve", pf.thresholds.solve_tol);
    pf.thresholds.cluster_tol = tol.value("cluster", pf.thresholds.cluster_tol);
    pf.thresholds.tau = tol.value("tau", pf.thresholds.tau);
    pf.thresholds.rank_tol = tol.value("rank", pf.thresholds.rank_tol);
    pf.thresholds.singular_rel_tol = tol.value("singular", pf.thresholds.singular_rel_tol);
    if (pf.thresholds.solve_tol <= 0 || pf.thresholds.cluster_tol <= 0 ||
        pf.thresholds.rank_tol <= 0 || pf.thresholds.singular_rel_tol <= 0 ||
        pf.thresholds.tau <= 0 || pf.thresholds.tau > 1)
      throw ValidationError("tolerances must be positive (and tau in (0, 1])");
  }
  if (doc.contains("series")) {
    const json& ser = doc["series"];
    check_known_fields(ser, {"max_order", "tail_tol", "method"}, "series");
    pf.series.max_order = ser.value("max_order", pf.series.max_order);
    pf.series.tail_tol = ser.value("tail_tol", pf.series.tail_tol);
    const std::string method = ser.value("method", "trace-recursion");
    if (method == "trace-recursion")
      pf.series.method = CoefficientMethod::TraceRecursion;
    else if (method == "tensor-quadrature")
      pf.series.method = CoefficientMethod::TensorQuadrature;
    else
      throw ValidationError("series.method must be trace-recursion or tensor-quadrature");
    pf.series.validate();
  }

  // Echo with all defaults filled in.
  json echo;
  echo["domain"] = {pf.domain.lower, pf.domain.upper};
  echo["nu"] = pf.domain.dim;
  echo["grid"] = {{"rule", rule_name(pf.rule)}, {"n", pf.n}, {"fiber_n", pf.fiber_n}};
  echo["kernel"] = doc["kernel"];
  if (doc.contains("g0")) echo["g0"] = doc["g0"];
  if (pf.kappa) echo["kappa"] = complex_to_json(*pf.kappa);
  if (pf.kappa_search)
    echo["kappa_search"] = {{"re", {pf.kappa_search->re_min, pf.kappa_search->re_max}},
                            {"im", {pf.kappa_search->im_min, pf.kappa_search->im_max}}};
  echo["tolerances"] = {{"solve", pf.thresholds.solve_tol},
                        {"cluster", pf.thresholds.cluster_tol},
                        {"tau", pf.thresholds.tau},
                        {"rank", pf.thresholds.rank_tol},
                        {"singular", pf.thresholds.singular_rel_tol}};
  echo["series"] = {{"max_order", pf.series.max_order},
                    {"tail_tol", pf.series.tail_tol},
                    {"method", pf.series.method == CoefficientMethod::TraceRecursion
                                   ? "trace-recursion"
                                   : "tensor-quadrature"}};
  pf.echo = std::move(echo);
  return pf;
}

ProblemFile parse_problem(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot open problem file: " + path);
  json doc;
  try {
    doc = json::parse(in);
  } catch (const nlohmann::json::parse_error& e) {
    throw ValidationError(std::string("problem file parse error: ") + e.what());
  }
  return parse_problem_json(doc, std::filesystem::path(path).parent_path().string());
}

}  // namespace pie
