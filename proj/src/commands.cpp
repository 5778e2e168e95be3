#include "pie/commands.hpp"

#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>

#include "pie/l0.hpp"

namespace pie {

namespace {

json json_l0(const L0Scalar& s) {
  json re = json::array(), im = json::array();
  for (Eigen::Index j = 0; j < s.values().size(); ++j) {
    re.push_back(s.values()[j].real());
    im.push_back(s.values()[j].imag());
  }
  return {{"re", std::move(re)}, {"im", std::move(im)}};
}

json json_classification(const Classification& cls) {
  json out;
  out["kind"] = kappa_kind_name(cls.kind);
  out["kappa"] = complex_to_json(cls.kappa);
  if (cls.kind == KappaKind::Characteristic) out["m"] = cls.m;
  out["deficient_fraction"] = cls.deficient_fraction;
  json deficient = json::array();
  for (std::size_t j = 0; j < cls.deficient.flags.size(); ++j)
    if (cls.deficient.flags[j]) deficient.push_back(j);
  out["deficient_fibers"] = std::move(deficient);
  out["min_abs_det"] = [&] {
    double m = std::numeric_limits<double>::infinity();
    for (Eigen::Index j = 0; j < cls.det_profile.values().size(); ++j)
      m = std::min(m, std::abs(cls.det_profile.values()[j]));
    return m;
  }();
  return out;
}

json json_solvability(const SolvabilityResult& s) {
  json out;
  out["verdict"] = s.solvable ? "solvable" : "obstructed";
  out["max_violation"] = s.max_violation;
  if (s.witness) out["witness"] = json_l0(*s.witness);
  return out;
}

void write_det_csv(const std::string& dir, const Discretization& disc,
                   const L0Scalar& profile) {
  std::filesystem::create_directories(dir);
  std::ofstream out(std::filesystem::path(dir) / "det_profile.csv");
  const int nu = disc.fiber.domain().dim;
  for (int d = 0; d < nu; ++d) out << "alpha_" << d << ",";
  out << "re_d1,im_d1\n";
  char buf[64];
  for (std::size_t j = 0; j < disc.fiber.size(); ++j) {
    for (double c : disc.fiber.node(j)) {
      std::snprintf(buf, sizeof buf, "%.17g,", c);
      out << buf;
    }
    const Complex d = profile.values()[static_cast<Eigen::Index>(j)];
    std::snprintf(buf, sizeof buf, "%.17g,%.17g\n", d.real(), d.imag());
    out << buf;
  }
}

void write_solution_csv(const std::string& dir, const FiberFunction& f) {
  std::filesystem::create_directories(dir);
  std::ofstream out(std::filesystem::path(dir) / "solution.csv");
  const auto& disc = *f.disc();
  const int nu = disc.space.domain().dim;
  for (int d = 0; d < nu; ++d) out << "x_" << d << ",";
  for (int d = 0; d < nu; ++d) out << "alpha_" << d << ",";
  out << "re_f,im_f\n";
  char buf[64];
  for (std::size_t j = 0; j < disc.fiber.size(); ++j)
    for (std::size_t i = 0; i < disc.space.size(); ++i) {
      for (double c : disc.space.node(i)) {
        std::snprintf(buf, sizeof buf, "%.17g,", c);
        out << buf;
      }
      for (double c : disc.fiber.node(j)) {
        std::snprintf(buf, sizeof buf, "%.17g,", c);
        out << buf;
      }
      const Complex v = f.values()(static_cast<Eigen::Index>(i),
                                   static_cast<Eigen::Index>(j));
      std::snprintf(buf, sizeof buf, "%.17g,%.17g\n", v.real(), v.imag());
      out << buf;
    }
}

Complex require_kappa(const ProblemFile& pf) {
  if (!pf.kappa)
    throw ValidationError("this command requires \"kappa\" in the problem file");
  return *pf.kappa;
}

}  // namespace

RunResult run_command(const std::string& command, const ProblemFile& pf,
                      const RunOptions& opts) {
  const auto t0 = std::chrono::steady_clock::now();
  const DiscretizationPtr disc = pf.make_discretization();
  pf.kernel->check_sampled_shape(*disc);
  const KernelView view(pf.kernel);
  const Thresholds& thr = pf.thresholds;

  RunResult rr;
  rr.report["command"] = command;
  rr.report["problem"] = pf.echo;

  if (command == "det" || command == "classify") {
    const Complex kappa = require_kappa(pf);
    const Classification cls = classify(view, disc, kappa, thr);
    rr.report["classification"] = json_classification(cls);
    rr.report["det_profile"] = json_l0(cls.det_profile);
    if (opts.csv_out) write_det_csv(*opts.csv_out, *disc, cls.det_profile);
  } else if (command == "nullspace") {
    const Complex kappa = require_kappa(pf);
    const Classification cls = classify(view, disc, kappa, thr);
    rr.report["classification"] = json_classification(cls);
    if (cls.kind == KappaKind::Characteristic) {
      const NullFamilies fams = null_families(view, disc, kappa, thr);
      const BesselBound bound = bessel_bound(*pf.kernel, *disc, 1.0 / kappa);
      rr.report["nullspace"] = {{"m", fams.direct.count},
                                {"n", fams.adjoint.count},
                                {"direct_residual", fams.direct.max_residual},
                                {"adjoint_residual", fams.adjoint.max_residual}};
      rr.report["bessel"] = {{"m_max", bound.m_max},
                             {"kernel_l2_sq", bound.kernel_l2_sq}};
    } else {
      rr.report["nullspace"] = {{"m", 0}, {"n", 0}};
    }
  } else if (command == "check-solvability") {
    const Complex kappa = require_kappa(pf);
    const FiberFunction g0 = pf.build_g0(disc);
    const Classification cls = classify(view, disc, kappa, thr);
    rr.report["classification"] = json_classification(cls);
    if (cls.kind == KappaKind::Characteristic) {
      const NullFamilies fams = null_families(view, disc, kappa, thr);
      const SolvabilityResult sr = check_solvability(g0, fams.adjoint, thr.solve_tol);
      rr.report["solvability"] = json_solvability(sr);
      if (!sr.solvable) rr.exit_code = 2;
    } else {
      rr.report["solvability"] = {{"verdict", "solvable"},
                                  {"note", "kappa is not characteristic"}};
    }
  } else if (command == "find-characteristic") {
    const SearchRegion region = pf.kappa_search.value_or(SearchRegion{});
    const auto found = find_characteristic_numbers(view, disc, region, thr);
    json list = json::array();
    for (const auto& c : found)
      list.push_back({{"kappa", complex_to_json(c.kappa)},
                      {"m", c.multiplicity},
                      {"fiber_fraction", c.fiber_fraction}});
    rr.report["characteristic_numbers"] = std::move(list);
  } else if (command == "solve") {
    const Complex kappa = require_kappa(pf);
    const FiberFunction g0 = pf.build_g0(disc);
    const SolveReport sr = solve(view, disc, kappa, g0, thr);
    rr.report["classification"] = json_classification(sr.classification);
    if (sr.classification.kind == KappaKind::Characteristic) {
      rr.report["solvability"] = json_solvability(sr.solvability);
      rr.report["nullspace"] = {{"m", sr.families->direct.count},
                                {"n", sr.families->adjoint.count}};
      rr.report["max_null_overlap"] = sr.max_null_overlap;
    }
    if (sr.solution) {
      rr.report["solution"] = {{"norm", sr.solution->norm()},
                               {"g0_norm", g0.norm()},
                               {"residual", sr.residual},
                               {"excluded_fibers", sr.excluded_fibers}};
      if (opts.csv_out) write_solution_csv(*opts.csv_out, *sr.solution);
    } else {
      rr.exit_code = 2;
    }
  } else {
    throw ValidationError("unknown command: " + command);
  }

  if (opts.with_timing) {
    const auto t1 = std::chrono::steady_clock::now();
    rr.report["timing"] = {
        {"seconds", std::chrono::duration<double>(t1 - t0).count()}};
  }
  return rr;
}

}  // namespace pie
