#include <CLI11.hpp>
#include <iostream>

#include "pie/commands.hpp"

int main(int argc, char** argv) {
  CLI::App app{"pie: fiberwise Fredholm solver for partial integral equations"};
  app.require_subcommand(1);

  std::string problem_path;
  std::string csv_out;
  int fibers = 0;
  double tol_solve = 0.0;
  double tau = 0.0;
  int workers = 1;

  const std::vector<std::string> commands = {"solve",
                                             "classify",
                                             "det",
                                             "nullspace",
                                             "check-solvability",
                                             "find-characteristic"};
  for (const auto& name : commands) {
    CLI::App* sub = app.add_subcommand(name);
    sub->add_option("--problem", problem_path, "problem file (JSON)")->required();
    sub->add_option("--csv-out", csv_out, "directory for CSV side outputs");
    sub->add_option("--fibers", fibers, "override fiber grid resolution");
    sub->add_option("--tol-solve", tol_solve, "override the solve/solvability tolerance");
    sub->add_option("--tau", tau, "override the positive-measure fiber fraction");
    sub->add_option("--workers", workers, "number of concurrent fiber workers");
  }

  CLI11_PARSE(app, argc, argv);

  try {
    pie::ProblemFile pf = pie::parse_problem(problem_path);
    if (fibers > 0) {
      pf.fiber_n = fibers;
      pf.echo["grid"]["fiber_n"] = fibers;
    }
    if (tol_solve > 0.0) {
      pf.thresholds.solve_tol = tol_solve;
      pf.echo["tolerances"]["solve"] = tol_solve;
    }
    if (tau > 0.0) {
      pf.thresholds.tau = tau;
      pf.echo["tolerances"]["tau"] = tau;
    }
    pf.thresholds.workers = workers;

    pie::RunOptions opts;
    if (!csv_out.empty()) opts.csv_out = csv_out;

    const std::string command = app.get_subcommands().front()->get_name();
    const pie::RunResult rr = pie::run_command(command, pf, opts);
    std::cout << rr.report.dump(2) << "\n";
    return rr.exit_code;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}
