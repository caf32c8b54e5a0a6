#pragma once

#include <cstdint>
#include <optional>
#include <string>

#include "pie/types.hpp"

namespace pie {

// Parsed command line.  Exit codes: 0 success, 2 malformed input or flags,
// 3 chosen fit failed to converge (the report is still written, flagged).
struct RunConfig {
  std::string command;  // fit | simulate | experiment

  // fit / experiment inputs
  std::string input;
  std::string response;
  std::string method = "piey";

  // solver
  double rho = 1.0;
  double tol = 1e-4;
  int max_iter = 1000;

  // tuning
  std::optional<double> lambda;
  int grid_points = 50;
  double grid_ratio = 0.01;
  bool grid_given = false;  // --lambda and grid flags are mutually exclusive
  int folds = 10;
  std::optional<bool> refit_main;

  // simulate
  std::string model = "m1";
  Index n = 200;
  Index p = 100;
  int reps = 100;
  std::string law = "gaussian_ar";
  std::uint64_t seed = 1;
  int d = 3;
  double noise_sd = 1.0;
  std::string methods = "piey,pier,all_pairs,oracle";

  // experiment
  int experiment = 1;
  Index subsample = 400;

  // output
  std::string out;  // empty -> command default
  std::string format = "json";
};

int cmd_fit(const RunConfig& config);
int cmd_simulate(const RunConfig& config);
int cmd_experiment(const RunConfig& config);

// Dispatch on config.command.
int run_command(const RunConfig& config);

}  // namespace pie
