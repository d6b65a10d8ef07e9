#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "gradflow/cli.hpp"

namespace {

struct ExperimentFlags {
  std::string config;
  std::string out = ".";
  std::optional<long> seed;
  std::optional<double> step;
  std::optional<double> horizon;
};

void add_experiment_flags(CLI::App* cmd, ExperimentFlags& f) {
  cmd->add_option("--config", f.config, "Experiment config (JSON)")->required();
  cmd->add_option("--out", f.out, "Output directory")->capture_default_str();
  cmd->add_option("--seed", f.seed, "Accepted and ignored; every run is deterministic");
  cmd->add_option("--step", f.step, "Override sim.step");
  cmd->add_option("--horizon", f.horizon, "Override sim.horizon");
}

gradflow::cli::Overrides overrides_from(const ExperimentFlags& f) {
  gradflow::cli::Overrides o;
  o.step = f.step;
  o.horizon = f.horizon;
  o.out_dir = f.out;
  return o;
}

}  // namespace

int main(int argc, char** argv) {
  namespace cli = gradflow::cli;

  CLI::App app{"Finite- and fixed-time gradient flows, Mittag-Leffler tools and bounds"};
  app.require_subcommand(1);

  ExperimentFlags run_flags;
  auto* run = app.add_subcommand("run", "Integrate one experiment and write CSV + JSON report");
  add_experiment_flags(run, run_flags);

  ExperimentFlags sweep_flags;
  auto* sweep = app.add_subcommand("sweep", "Run every variation of an experiment");
  add_experiment_flags(sweep, sweep_flags);

  auto* ml = app.add_subcommand("ml", "Mittag-Leffler queries");
  ml->require_subcommand(1);
  double eval_alpha = 1.0, eval_beta = 1.0, eval_z = 0.0;
  auto* ml_eval = ml->add_subcommand("eval", "Evaluate E_{alpha,beta}(z)");
  ml_eval->add_option("--alpha", eval_alpha)->required();
  ml_eval->add_option("--beta", eval_beta)->required();
  ml_eval->add_option("--z", eval_z)->required();

  double zero_alpha = 1.5, zero_rho = 1.0;
  std::string zero_kind = "standard";
  auto* ml_zero = ml->add_subcommand("zero", "First positive zero of an ML form");
  ml_zero->add_option("--alpha", zero_alpha, "Order in (1, 2)")->required();
  ml_zero->add_option("--rho", zero_rho)->capture_default_str();
  ml_zero->add_option("--kind", zero_kind)
      ->check(CLI::IsMember({"standard", "kernel"}))
      ->capture_default_str();

  double table_rho = 1.0;
  auto* ml_table = ml->add_subcommand("table", "First zeros of E_{a,1}(-t^a) for the tabulated orders");
  ml_table->add_option("--rho", table_rho)->capture_default_str();

  cli::BoundsArgs bounds_args;
  auto* bounds = app.add_subcommand("bounds", "Evaluate convergence-time bounds");
  bounds->add_option("--L", bounds_args.lipschitz, "Lipschitz constant");
  bounds->add_option("--mu", bounds_args.strong_convexity, "Strong convexity constant");
  bounds->add_option("--rho", bounds_args.rho);
  bounds->add_option("--alpha", bounds_args.alpha);
  bounds->add_option("--lambda", bounds_args.lambda);
  bounds->add_option("--beta", bounds_args.beta);
  bounds->add_option("--d", bounds_args.distance, "Initial distance |x0 - x*|");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? cli::kExitOk : cli::kExitConfig;
  }

  if (*run) return cli::cmd_run(run_flags.config, overrides_from(run_flags), std::cout, std::cerr);
  if (*sweep)
    return cli::cmd_sweep(sweep_flags.config, overrides_from(sweep_flags), std::cout, std::cerr);
  if (*ml_eval) return cli::cmd_ml_eval(eval_alpha, eval_beta, eval_z, std::cout, std::cerr);
  if (*ml_zero) return cli::cmd_ml_zero(zero_alpha, zero_rho, zero_kind, std::cout, std::cerr);
  if (*ml_table) return cli::cmd_ml_table(table_rho, std::cout, std::cerr);
  if (*bounds) return cli::cmd_bounds(bounds_args, std::cout, std::cerr);
  return cli::kExitConfig;
}
