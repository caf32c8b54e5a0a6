#include <CLI11.hpp>

#include "pie/cli.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Penalized interaction estimation for quadratic regression"};
  app.require_subcommand(1);
  pie::RunConfig config;

  auto add_solver_flags = [&](CLI::App* cmd) {
    cmd->add_option("--rho", config.rho, "ADMM penalty weight")
        ->capture_default_str();
    cmd->add_option("--tol", config.tol, "relative stopping tolerance")
        ->capture_default_str();
    cmd->add_option("--max-iter", config.max_iter, "ADMM iteration cap")
        ->capture_default_str();
  };
  auto add_tuning_flags = [&](CLI::App* cmd, bool with_lambda) {
    CLI::Option* gp = cmd->add_option("--grid-points", config.grid_points,
                                      "lambda grid size")
                          ->capture_default_str();
    CLI::Option* gr = cmd->add_option("--grid-ratio", config.grid_ratio,
                                      "smallest lambda as a fraction of the largest")
                          ->capture_default_str();
    cmd->add_option("--folds", config.folds, "CV folds for the main-effects lasso")
        ->capture_default_str();
    cmd->parse_complete_callback([&, gp, gr] {
      config.grid_given = gp->count() > 0 || gr->count() > 0;
    });
    if (with_lambda) {
      cmd->add_option_function<double>(
          "--lambda", [&](double v) { config.lambda = v; },
          "fixed penalty instead of a BIC-tuned grid");
    }
    cmd->add_flag_function(
        "--refit-main,!--no-refit-main",
        [&](std::int64_t v) { config.refit_main = v > 0; },
        "include lasso-selected mains in the refit (default: off for piey, on "
        "for pier)");
  };
  auto add_output_flags = [&](CLI::App* cmd) {
    cmd->add_option("--out", config.out, "output path (default per command)");
    cmd->add_option("--format", config.format, "json or csv")
        ->check(CLI::IsMember({"json", "csv"}))
        ->capture_default_str();
  };

  CLI::App* fit = app.add_subcommand("fit", "fit one dataset from CSV");
  fit->add_option("--input", config.input, "CSV with a header row")->required();
  fit->add_option("--response", config.response, "response column name")->required();
  fit->add_option("--method", config.method, "piey, pier, or all_pairs")
      ->capture_default_str();
  add_solver_flags(fit);
  add_tuning_flags(fit, true);
  add_output_flags(fit);

  CLI::App* sim = app.add_subcommand("simulate", "replicate synthetic benchmarks");
  sim->add_option("--model", config.model, "m1, m2, m3, m4, or robustness")
      ->capture_default_str();
  sim->add_option("--n", config.n, "sample size")->capture_default_str();
  sim->add_option("--p", config.p, "covariate dimension")->capture_default_str();
  sim->add_option("--reps", config.reps, "replication count")->capture_default_str();
  sim->add_option("--law", config.law,
                  "gaussian_ar, gaussian_identity, factor_uniform, factor_t5, "
                  "factor_laplace")
      ->capture_default_str();
  sim->add_option("--seed", config.seed, "base seed")->capture_default_str();
  sim->add_option("--d", config.d, "main-effect count for the robustness model")
      ->capture_default_str();
  sim->add_option("--noise-sd", config.noise_sd, "noise standard deviation")
      ->capture_default_str();
  sim->add_option("--methods", config.methods, "comma list of methods to run")
      ->capture_default_str();
  add_solver_flags(sim);
  add_tuning_flags(sim, false);
  add_output_flags(sim);

  CLI::App* exp = app.add_subcommand("experiment",
                                     "noise-augmented subsampling study");
  exp->add_option("--input", config.input, "CSV with a header row")->required();
  exp->add_option("--response", config.response, "response column name")->required();
  exp->add_option("--experiment", config.experiment, "1 or 2")->capture_default_str();
  exp->add_option("--method", config.method, "piey or pier")->capture_default_str();
  exp->add_option("--reps", config.reps, "subsample count")->capture_default_str();
  exp->add_option("--subsample", config.subsample, "rows drawn per replication")
      ->capture_default_str();
  exp->add_option("--seed", config.seed, "base seed")->capture_default_str();
  add_solver_flags(exp);
  add_tuning_flags(exp, false);
  add_output_flags(exp);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? 0 : 2;  // help prints exit 0, parse failures exit 2
  }

  config.command = app.get_subcommands().front()->get_name();
  return pie::run_command(config);
}
