// bqwave: traveling waves in a Boussinesq channel.

#include "bqwave/run.hpp"

#include <CLI11.hpp>

#include <iostream>

int main(int argc, char** argv) {
  bqwave::run::tune_allocator();

  CLI::App app{"Truncated traveling combustion waves with Boussinesq flow in a channel"};
  app.require_subcommand(1);
  app.set_version_flag("--version", bqwave::json_out::version());

  std::string config_path;
  auto* check = app.add_subcommand("check-condition", "evaluate the thinness condition");
  check->add_option("config", config_path, "run configuration")->required()->check(CLI::ExistingFile);

  auto* solve = app.add_subcommand("solve", "homotopy solve, audits and artifacts");
  solve->add_option("config", config_path, "run configuration")->required()->check(CLI::ExistingFile);

  std::string axis;
  std::vector<double> values;
  int threads = 0;
  auto* sweep = app.add_subcommand("sweep", "independent runs over one parameter");
  sweep->add_option("config", config_path, "base configuration")->required()->check(CLI::ExistingFile);
  sweep->add_option("--axis", axis, "a | nu | rho | k | lz")
      ->required()
      ->check(CLI::IsMember({"a", "nu", "rho", "k", "lz"}));
  sweep->add_option("--values", values, "parameter values")->required()->delimiter(',');
  sweep->add_option("--threads", threads, "worker threads (0: hardware count)");

  std::string state_path, out_dir;
  double slack = 0.05;
  auto* verify = app.add_subcommand("verify", "re-audit a BQFL state dump");
  verify->add_option("state", state_path, "state.bqfl")->required()->check(CLI::ExistingFile);
  verify->add_option("--out", out_dir, "directory for audit.json and profiles.csv");
  verify->add_option("--slack", slack, "relative slack on asserted inequalities")
      ->check(CLI::NonNegativeNumber);

  double a = 10.0, theta0 = 0.25;
  auto* planar = app.add_subcommand("planar", "tau = 0 closed form and its wave speed");
  planar->add_option("--a", a, "half length")->check(CLI::PositiveNumber);
  planar->add_option("--theta0", theta0, "ignition temperature")->check(CLI::Range(0.0, 1.0));

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : bqwave::run::config_error;
  }

  namespace run = bqwave::run;
  try {
    if (*check) return run::cmd_check_condition(config_path, std::cout, std::cerr);
    if (*solve) return run::cmd_solve(config_path, std::cout, std::cerr);
    if (*sweep) return run::cmd_sweep(config_path, axis, values, threads, std::cout, std::cerr);
    if (*verify) return run::cmd_verify(state_path, out_dir, slack, std::cout, std::cerr);
    if (*planar) return run::cmd_planar(a, theta0, std::cout, std::cerr);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return run::not_converged;
  }
  return 0;
}
