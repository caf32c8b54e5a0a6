#include "pie/simulation.hpp"

#include <Eigen/Cholesky>
#include <Eigen/Eigenvalues>
#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <numeric>
#include <stdexcept>

#include "pie/parallel.hpp"
#include "pie/rng.hpp"

namespace pie {

double CovariateLaw::kurtosis() const {
  switch (kind) {
    case LawKind::factor_uniform: return 1.8;
    case LawKind::factor_t5: return 9.0;
    case LawKind::factor_laplace: return 6.0;
    default: return 3.0;
  }
}

const char* law_name(LawKind kind) {
  switch (kind) {
    case LawKind::gaussian_ar: return "gaussian_ar";
    case LawKind::gaussian_identity: return "gaussian_identity";
    case LawKind::factor_uniform: return "factor_uniform";
    case LawKind::factor_t5: return "factor_t5";
    case LawKind::factor_laplace: return "factor_laplace";
  }
  return "?";
}

std::optional<LawKind> parse_law(const std::string& name) {
  for (LawKind k : {LawKind::gaussian_ar, LawKind::gaussian_identity,
                    LawKind::factor_uniform, LawKind::factor_t5,
                    LawKind::factor_laplace}) {
    if (name == law_name(k)) return k;
  }
  return std::nullopt;
}

const char* model_name(ModelKind kind) {
  switch (kind) {
    case ModelKind::m1: return "m1";
    case ModelKind::m2: return "m2";
    case ModelKind::m3: return "m3";
    case ModelKind::m4: return "m4";
    case ModelKind::robustness: return "robustness";
  }
  return "?";
}

std::optional<ModelKind> parse_model(const std::string& name) {
  for (ModelKind k : {ModelKind::m1, ModelKind::m2, ModelKind::m3,
                      ModelKind::m4, ModelKind::robustness}) {
    if (name == model_name(k)) return k;
  }
  return std::nullopt;
}

const char* method_name(Method m) {
  switch (m) {
    case Method::piey: return "piey";
    case Method::pier: return "pier";
    case Method::all_pairs: return "all_pairs";
    case Method::oracle: return "oracle";
  }
  return "?";
}

std::optional<Method> parse_method(const std::string& name) {
  if (name == "all-pairs") return Method::all_pairs;
  for (Method m : {Method::piey, Method::pier, Method::all_pairs, Method::oracle}) {
    if (name == method_name(m)) return m;
  }
  return std::nullopt;
}

namespace {

Matrix ar_matrix(Index p, double ar) {
  Matrix S(p, p);
  for (Index k = 0; k < p; ++k)
    for (Index l = 0; l < p; ++l) S(k, l) = std::pow(ar, std::abs(k - l));
  return S;
}

double draw(Rng& rng, LawKind kind) {
  switch (kind) {
    case LawKind::factor_uniform: return rng.uniform_unit_var();
    case LawKind::factor_t5: return rng.t5_unit_var();
    case LawKind::factor_laplace: return rng.laplace_unit_var();
    default: return rng.normal();
  }
}

}  // namespace

Matrix gen_covariates(const CovariateLaw& law, Index n, Index p,
                      std::uint64_t seed) {
  if (n < 1 || p < 1) throw std::invalid_argument("gen_covariates: n, p >= 1");
  Rng rng(seed);
  Matrix Z(n, p);
  for (Index i = 0; i < n; ++i)
    for (Index j = 0; j < p; ++j) Z(i, j) = draw(rng, law.kind);

  if (law.kind == LawKind::gaussian_identity) return Z;
  if (law.kind == LawKind::gaussian_ar) {
    // For Gaussian z, L z and Sigma^1/2 z have the same law; Cholesky is
    // much cheaper at large p.
    Matrix L = ar_matrix(p, law.ar).llt().matrixL();
    return Z * L.transpose();
  }
  Eigen::SelfAdjointEigenSolver<Matrix> eig(ar_matrix(p, law.ar));
  Matrix root = eig.operatorSqrt();
  return Z * root;  // root symmetric, so right-multiplying rows is exact
}

std::pair<Vector, ModelTruth> gen_response(ModelKind model, int d,
                                           const Matrix& X, double noise_sd,
                                           std::uint64_t seed) {
  const Index n = X.rows();
  const Index p = X.cols();
  if (p < 10) throw std::invalid_argument("gen_response: models need p >= 10");

  ModelTruth truth;
  truth.beta = Vector::Zero(p);
  truth.omega = SymmetricMatrix(p);
  // Shared quadratic part 2 X1 X6 + X6^2 + 2 X6 X10, columns 0/5/9 zero-based.
  truth.omega.set(0, 5, 1.0);
  truth.omega.set(5, 5, 1.0);
  truth.omega.set(5, 9, 1.0);

  switch (model) {
    case ModelKind::m1:
      truth.beta(0) = truth.beta(5) = truth.beta(9) = 1.0;
      break;
    case ModelKind::m2:
      truth.beta(5) = 1.0;
      break;
    case ModelKind::m3:
      truth.beta(0) = truth.beta(1) = 1.0;
      break;
    case ModelKind::m4:
      break;
    case ModelKind::robustness: {
      if (d < 3) throw std::invalid_argument("gen_response: robustness needs d >= 3");
      if (p - 10 < d - 3)
        throw std::invalid_argument("gen_response: p too small for d extra mains");
      double w = 1.0 / std::sqrt(static_cast<double>(d));
      truth.beta(0) = truth.beta(5) = truth.beta(9) = w;
      std::vector<Index> pool(p - 10);
      std::iota(pool.begin(), pool.end(), Index{10});
      Rng idx_rng(mix_seed(seed, 7));
      for (int j = 0; j < d - 3; ++j) {
        Index pick = j + static_cast<Index>(
                             idx_rng.below(static_cast<std::uint64_t>(pool.size() - j)));
        std::swap(pool[j], pool[pick]);
        truth.beta(pool[j]) = w;
      }
      break;
    }
  }
  for (Index j = 0; j < p; ++j)
    if (truth.beta(j) != 0.0) truth.main_support.push_back(j);

  Rng eps_rng(mix_seed(seed, 11));
  Vector y(n);
  for (Index i = 0; i < n; ++i) {
    double quad = 2.0 * X(i, 0) * X(i, 5) + X(i, 5) * X(i, 5) +
                  2.0 * X(i, 5) * X(i, 9);
    y(i) = X.row(i).dot(truth.beta) + quad + noise_sd * eps_rng.normal();
  }
  return {std::move(y), std::move(truth)};
}

Instance make_instance(const SimulationSpec& spec, int rep) {
  std::uint64_t rep_seed = spec.base_seed + static_cast<std::uint64_t>(rep);
  Instance inst;
  inst.data.X = gen_covariates(spec.law, spec.n, spec.p, mix_seed(rep_seed, 17));
  auto [y, truth] = gen_response(spec.model, spec.d, inst.data.X, spec.noise_sd,
                                 mix_seed(rep_seed, 29));
  inst.data.y = std::move(y);
  inst.truth = std::move(truth);
  return inst;
}

namespace {

MetricReport score(const SymmetricMatrix& est, const ModelTruth& truth,
                   double seconds) {
  MetricReport r;
  r.rate = support_rate(est, truth.omega);
  r.loss = frobenius_loss(est, truth.omega);
  r.size = support_size(est);
  r.time_seconds = seconds;
  return r;
}

// Worst kkt over the path's converged fits, relative to the certificate
// gate 1e-3 max(lambda_i, ||Lambda||_inf); lambdas[0] is ||Lambda||_inf by
// grid construction.
double path_kkt_ratio(const PathResult& path) {
  if (path.lambdas.empty()) return 0.0;
  const double top = path.lambdas.front();
  double worst = 0.0;
  for (size_t i = 0; i < path.fits.size(); ++i) {
    if (!path.fits[i].converged) continue;
    double gate = 1e-3 * std::max(path.lambdas[i], top);
    double ratio = gate > 0.0 ? path.fits[i].kkt / gate
                              : (path.fits[i].kkt == 0.0 ? 0.0 : HUGE_VAL);
    worst = std::max(worst, ratio);
  }
  return worst;
}

MetricReport run_method(Method method, const Instance& inst,
                        const FitOptions& opts, double& kkt_ratio) {
  auto start = std::chrono::steady_clock::now();
  auto elapsed = [&] {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start)
        .count();
  };
  switch (method) {
    case Method::piey: {
      auto [model, path] = fit_piey(inst.data, opts);
      kkt_ratio = path_kkt_ratio(path);
      return score(model.omega, inst.truth, elapsed());
    }
    case Method::pier: {
      auto [model, path] = fit_pier(inst.data, opts);
      kkt_ratio = path_kkt_ratio(path);
      return score(model.omega, inst.truth, elapsed());
    }
    case Method::all_pairs: {
      AllPairsFit fit = all_pairs_bic(inst.data, opts.grid_points, opts.grid_ratio);
      return score(fit.B, inst.truth, elapsed());
    }
    case Method::oracle: {
      OracleFit fit = oracle_fit(inst.data, inst.truth.omega,
                                 inst.truth.main_support);
      MetricReport r = fit.metrics;
      r.time_seconds = elapsed();
      return r;
    }
  }
  throw std::logic_error("run_method: unknown method");
}

void aggregate(MethodRun& run) {
  std::vector<double> rate, loss, size, time;
  for (const auto& r : run.reps) {
    if (!r) continue;
    rate.push_back(r->rate);
    loss.push_back(r->loss);
    size.push_back(static_cast<double>(r->size));
    time.push_back(r->time_seconds);
  }
  auto mean_sd = [](const std::vector<double>& v) -> std::pair<double, double> {
    if (v.empty()) return {0.0, 0.0};
    double mean = std::accumulate(v.begin(), v.end(), 0.0) / v.size();
    if (v.size() < 2) return {mean, 0.0};
    double ss = 0.0;
    for (double x : v) ss += (x - mean) * (x - mean);
    return {mean, std::sqrt(ss / (v.size() - 1))};
  };
  std::tie(run.stats.mean_rate, run.stats.sd_rate) = mean_sd(rate);
  std::tie(run.stats.mean_loss, run.stats.sd_loss) = mean_sd(loss);
  std::tie(run.stats.mean_size, run.stats.sd_size) = mean_sd(size);
  std::tie(run.stats.mean_time, run.stats.sd_time) = mean_sd(time);
  run.stats.completed = static_cast<int>(rate.size());
}

}  // namespace

ReplicationSummary run_replications(const SimulationSpec& spec,
                                    const std::vector<Method>& methods,
                                    const FitOptions& base_opts) {
  if (spec.replications < 1)
    throw std::invalid_argument("run_replications: need >= 1 replication");

  ReplicationSummary summary;
  summary.spec = spec;
  summary.runs.resize(methods.size());
  for (size_t mi = 0; mi < methods.size(); ++mi) {
    summary.runs[mi].method = methods[mi];
    summary.runs[mi].reps.resize(spec.replications);
    summary.runs[mi].failures.resize(spec.replications);
  }

  std::vector<std::vector<double>> kkt_ratios(
      methods.size(), std::vector<double>(spec.replications, 0.0));

  parallel_for(spec.replications, [&](int rep) {
    Instance inst = make_instance(spec, rep);
    FitOptions opts = base_opts;
    opts.seed = mix_seed(spec.base_seed + static_cast<std::uint64_t>(rep), 43);
    for (size_t mi = 0; mi < methods.size(); ++mi) {
      try {
        summary.runs[mi].reps[rep] =
            run_method(methods[mi], inst, opts, kkt_ratios[mi][rep]);
      } catch (const std::exception& e) {
        summary.runs[mi].failures[rep] = e.what();
      }
    }
  });

  for (size_t mi = 0; mi < summary.runs.size(); ++mi) {
    MethodRun& run = summary.runs[mi];
    std::vector<std::string> kept;
    for (const auto& msg : run.failures)
      if (!msg.empty()) kept.push_back(msg);
    run.failures = std::move(kept);
    for (double r : kkt_ratios[mi])
      run.max_kkt_ratio = std::max(run.max_kkt_ratio, r);
    aggregate(run);
  }
  return summary;
}

AugmentedData noise_augment(const Dataset& data, std::uint64_t seed,
                            int experiment) {
  if (experiment != 1 && experiment != 2)
    throw std::invalid_argument("noise_augment: experiment must be 1 or 2");

  const Index n = data.n();
  const Index p = data.p();
  AugmentedData out;
  out.data.X.resize(n, p + 100);
  out.data.X.leftCols(p) = data.X;
  out.data.y = data.y;

  Rng rng(seed);
  for (Index j = 0; j < 100; ++j) {
    for (Index i = 0; i < n; ++i) {
      out.data.X(i, p + j) = j < 50 ? rng.normal() : rng.uniform_unit_var();
    }
  }

  if (experiment == 2) {
    // 0.5 X_{p+1} X_{p+2} + 0.5 X_{p+50} X_{p+51}, 1-based.
    for (Index i = 0; i < n; ++i) {
      out.data.y(i) += 0.5 * out.data.X(i, p) * out.data.X(i, p + 1) +
                       0.5 * out.data.X(i, p + 49) * out.data.X(i, p + 50);
    }
    out.planted = {{p + 1, p}, {p + 50, p + 49}};
  }
  return out;
}

Eigen::MatrixXi frequency_matrix(const std::vector<SymmetricMatrix>& omegas,
                                 Index p) {
  Eigen::MatrixXi freq = Eigen::MatrixXi::Zero(p, p);
  for (const auto& omega : omegas) {
    if (omega.dim() != p)
      throw std::invalid_argument("frequency_matrix: dimension mismatch");
    for (auto [k, l] : omega.lower_support()) {
      freq(k, l) += 1;
      if (k != l) freq(l, k) += 1;
    }
  }
  return freq;
}

}  // namespace pie
