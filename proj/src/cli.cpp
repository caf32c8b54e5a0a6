#include "pie/cli.hpp"

#include <algorithm>
#include <cmath>
#include <iostream>
#include <numeric>
#include <sstream>

#include "pie/csv.hpp"
#include "pie/parallel.hpp"
#include "pie/report.hpp"
#include "pie/rng.hpp"

namespace pie {

namespace {

constexpr int kExitOk = 0;
constexpr int kExitInput = 2;
constexpr int kExitNoConverge = 3;

Dataset load_dataset(const std::string& path, const std::string& response) {
  if (response.empty()) throw InputError("--response is required");
  CsvTable table = read_csv(path);

  Index ycol = -1;
  for (size_t j = 0; j < table.headers.size(); ++j) {
    if (table.headers[j] == response) {
      if (ycol >= 0) throw InputError("response column '" + response + "' is ambiguous");
      ycol = static_cast<Index>(j);
    }
  }
  if (ycol < 0) {
    std::string names;
    for (const auto& h : table.headers) names += (names.empty() ? "" : ", ") + h;
    throw InputError("response column '" + response + "' not found; have: " + names);
  }
  if (table.values.cols() < 2) throw InputError("need at least one covariate column");

  Dataset data;
  data.y = table.values.col(ycol);
  data.X.resize(table.values.rows(), table.values.cols() - 1);
  Index c = 0;
  for (Index j = 0; j < table.values.cols(); ++j) {
    if (j != ycol) data.X.col(c++) = table.values.col(j);
  }
  data.validate();
  return data;
}

FitOptions fit_options(const RunConfig& config) {
  FitOptions opts;
  opts.solver.rho = config.rho;
  opts.solver.tol = config.tol;
  opts.solver.max_iter = config.max_iter;
  opts.grid_points = config.grid_points;
  opts.grid_ratio = config.grid_ratio;
  opts.refit_main = config.refit_main;
  opts.folds = config.folds;
  opts.seed = config.seed;
  return opts;
}

std::string default_out(const RunConfig& config) {
  if (!config.out.empty()) return config.out;
  std::string ext = config.format == "csv" ? ".csv" : ".json";
  if (config.command == "fit") return "pie_fit" + ext;
  if (config.command == "simulate") return "pie_simulation" + ext;
  return "pie_experiment.csv";  // sidecar JSON goes next to it
}

// Single-lambda fit: same stages as the tuned pipelines minus the grid.
std::pair<QuadraticModel, PathResult> fit_single_lambda(const Dataset& data,
                                                        const std::string& method,
                                                        double lambda,
                                                        const FitOptions& opts) {
  CenteredStats stats = center(data);
  SymmetricMatrix lam(data.p());
  std::vector<Index> mains;
  if (method == "pier") {
    MainEffectsFit me = select_lasso(stats, data.y, opts.folds, opts.seed);
    lam = lambda_r(stats, data.y, me.beta);
    if (opts.refit_main.value_or(true)) mains = me.support();
  } else {
    lam = lambda_y(stats, data.y);
    if (opts.refit_main.value_or(false)) {
      mains = select_lasso(stats, data.y, opts.folds, opts.seed).support();
    }
  }

  PathResult path;
  path.lambdas = {lambda};
  path.fits.push_back(solve_pie(stats, lam, lambda, opts.solver));
  auto support = path.fits[0].omega.lower_support();
  auto refit = refit_ls(data, support, mains);
  if (!refit) throw InputError("selected support is too large to refit; increase --lambda");
  path.refit_rss = {refit->rss};
  path.refit_df = {refit->df};
  path.admissible = {true};
  const double n = static_cast<double>(data.n());
  path.bic = {n * std::log(refit->rss / n) + std::log(n) * refit->df};
  path.chosen = 0;
  return {model_from_refit(data, *refit, support, mains), std::move(path)};
}

int finish_fit(const RunConfig& config, Index n, Index p,
               const QuadraticModel& model, const PathResult& path) {
  std::string body = config.format == "csv"
                         ? fit_report_csv(config.method, n, p, model, path)
                         : fit_report_json(config.method, n, p, model, path);
  write_text(default_out(config), body);
  if (!path.fits[path.chosen].converged) {
    std::cerr << "solver did not converge at the selected lambda; "
                 "report written to " << default_out(config) << "\n";
    return kExitNoConverge;
  }
  return kExitOk;
}

std::vector<Method> parse_methods_list(const std::string& csv) {
  std::vector<Method> out;
  std::stringstream ss(csv);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (item.empty()) continue;
    auto m = parse_method(item);
    if (!m) {
      throw InputError("unknown method '" + item +
                       "'; valid: piey, pier, all_pairs, oracle");
    }
    if (std::find(out.begin(), out.end(), *m) == out.end()) out.push_back(*m);
  }
  if (out.empty()) throw InputError("--methods selected nothing");
  return out;
}

}  // namespace

int cmd_fit(const RunConfig& config) {
  try {
    if (config.lambda && config.grid_given) {
      throw InputError("--lambda and --grid-points/--grid-ratio are mutually exclusive");
    }
    if (config.lambda && *config.lambda < 0.0) throw InputError("--lambda must be >= 0");
    Dataset data = load_dataset(config.input, config.response);
    FitOptions opts = fit_options(config);

    if (config.method == "all_pairs" || config.method == "all-pairs") {
      AllPairsFit fit = config.lambda
                            ? all_pairs_lasso(data, *config.lambda)
                            : all_pairs_bic(data, config.grid_points, config.grid_ratio);
      std::string body = config.format == "csv"
                             ? all_pairs_report_csv(data.n(), data.p(), fit)
                             : all_pairs_report_json(data.n(), data.p(), fit);
      write_text(default_out(config), body);
      if (!fit.converged) {
        std::cerr << "coordinate descent did not converge; report written\n";
        return kExitNoConverge;
      }
      return kExitOk;
    }
    if (config.method != "piey" && config.method != "pier") {
      throw InputError("unknown method '" + config.method +
                       "'; valid: piey, pier, all_pairs");
    }

    QuadraticModel model;
    PathResult path;
    if (config.lambda) {
      std::tie(model, path) = fit_single_lambda(data, config.method, *config.lambda, opts);
    } else if (config.method == "pier") {
      std::tie(model, path) = fit_pier(data, opts);
    } else {
      std::tie(model, path) = fit_piey(data, opts);
    }
    return finish_fit(config, data.n(), data.p(), model, path);
  } catch (const InputError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitInput;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitInput;
  }
}

int cmd_simulate(const RunConfig& config) {
  try {
    SimulationSpec spec;
    auto model = parse_model(config.model);
    if (!model) {
      throw InputError("unknown model '" + config.model +
                       "'; valid: m1, m2, m3, m4, robustness");
    }
    spec.model = *model;
    auto law = parse_law(config.law);
    if (!law) {
      throw InputError("unknown law '" + config.law +
                       "'; valid: gaussian_ar, gaussian_identity, factor_uniform, "
                       "factor_t5, factor_laplace");
    }
    spec.law.kind = *law;
    spec.n = config.n;
    spec.p = config.p;
    spec.replications = config.reps;
    spec.base_seed = config.seed;
    spec.d = config.d;
    spec.noise_sd = config.noise_sd;
    if (spec.n < 2 || spec.p < 1) throw InputError("--n and --p must be positive (n >= 2)");
    if (spec.noise_sd < 0.0) throw InputError("--noise-sd must be >= 0");

    ReplicationSummary summary =
        run_replications(spec, parse_methods_list(config.methods), fit_options(config));
    std::string body = config.format == "csv" ? simulate_report_csv(summary)
                                              : simulate_report_json(summary);
    write_text(default_out(config), body);
    return kExitOk;
  } catch (const InputError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitInput;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitInput;
  }
}

int cmd_experiment(const RunConfig& config) {
  try {
    if (config.experiment != 1 && config.experiment != 2) {
      throw InputError("--experiment must be 1 or 2");
    }
    if (config.method != "piey" && config.method != "pier") {
      throw InputError("experiment method must be piey or pier");
    }
    Dataset data = load_dataset(config.input, config.response);
    const Index n = data.n();
    if (config.subsample < 2 || config.subsample > n) {
      throw InputError("--subsample must be in [2, " + std::to_string(n) + "]");
    }

    // Standardize every variable to mean 0, variance 1 (divisor n).
    auto standardize = [&](Vector col, const char* what, Index idx) {
      double mean = col.mean();
      col.array() -= mean;
      double sd = std::sqrt(col.squaredNorm() / static_cast<double>(n));
      if (sd == 0.0) {
        throw InputError(std::string(what) + " " + std::to_string(idx + 1) +
                         " has zero variance, cannot standardize");
      }
      return Vector(col / sd);
    };
    for (Index j = 0; j < data.p(); ++j)
      data.X.col(j) = standardize(data.X.col(j), "column", j);
    data.y = standardize(data.y, "response", 0);

    FitOptions opts = fit_options(config);
    const Index p_aug = data.p() + 100;
    std::vector<SymmetricMatrix> omegas(config.reps);
    std::vector<std::string> failures(config.reps);
    std::vector<std::pair<Index, Index>> planted;

    parallel_for(config.reps, [&](int rep) {
      std::uint64_t rep_seed = config.seed + static_cast<std::uint64_t>(rep);
      Rng row_rng(mix_seed(rep_seed, 3));
      std::vector<Index> rows(n);
      std::iota(rows.begin(), rows.end(), Index{0});
      for (Index i = 0; i < config.subsample; ++i) {
        Index pick = i + static_cast<Index>(
                             row_rng.below(static_cast<std::uint64_t>(n - i)));
        std::swap(rows[i], rows[pick]);
      }
      Dataset sub;
      sub.X.resize(config.subsample, data.p());
      sub.y.resize(config.subsample);
      for (Index i = 0; i < config.subsample; ++i) {
        sub.X.row(i) = data.X.row(rows[i]);
        sub.y(i) = data.y(rows[i]);
      }
      AugmentedData aug = noise_augment(sub, mix_seed(rep_seed, 5), config.experiment);
      if (rep == 0) planted = aug.planted;
      FitOptions rep_opts = opts;
      rep_opts.seed = mix_seed(rep_seed, 43);
      try {
        auto [model, path] = config.method == "pier" ? fit_pier(aug.data, rep_opts)
                                                     : fit_piey(aug.data, rep_opts);
        omegas[rep] = model.omega;
      } catch (const std::exception& e) {
        failures[rep] = e.what();
        omegas[rep] = SymmetricMatrix(p_aug);
      }
    });

    Eigen::MatrixXi freq = frequency_matrix(omegas, p_aug);
    std::string out_path = default_out(config);
    write_text(out_path, frequency_csv(freq));

    std::vector<std::string> kept;
    for (const auto& f : failures)
      if (!f.empty()) kept.push_back(f);
    write_text(out_path + ".json",
               experiment_report_json(config.experiment, config.method,
                                      config.subsample, config.reps, config.seed,
                                      freq, planted, kept));
    return kExitOk;
  } catch (const InputError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitInput;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitInput;
  }
}

int run_command(const RunConfig& config) {
  if (config.command == "fit") return cmd_fit(config);
  if (config.command == "simulate") return cmd_simulate(config);
  if (config.command == "experiment") return cmd_experiment(config);
  std::cerr << "error: unknown command '" << config.command << "'\n";
  return kExitInput;
}

}  // namespace pie
