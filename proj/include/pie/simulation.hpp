#pragma once

#include <cstdint>
#include <optional>
#include <string>

#include "pie/evaluation.hpp"
#include "pie/types.hpp"

namespace pie {

enum class LawKind {
  gaussian_ar,       // N(0, Sigma), Sigma_kl = ar^|k-l|
  gaussian_identity, // N(0, I)
  factor_uniform,    // Sigma^1/2 z, z_k iid uniform[-sqrt3, sqrt3]
  factor_t5,         // Sigma^1/2 z, z_k iid t(5) sqrt(3/5)
  factor_laplace,    // Sigma^1/2 z, z_k iid Laplace(0,1)/sqrt2
};

struct CovariateLaw {
  LawKind kind = LawKind::gaussian_ar;
  double ar = 0.5;  // AR coefficient of Sigma; identity law ignores it

  // Kurtosis of one innovation (the Delta constant of the law).
  double kurtosis() const;
};

const char* law_name(LawKind kind);
std::optional<LawKind> parse_law(const std::string& name);

enum class ModelKind { m1, m2, m3, m4, robustness };

const char* model_name(ModelKind kind);
std::optional<ModelKind> parse_model(const std::string& name);

struct SimulationSpec {
  ModelKind model = ModelKind::m1;
  Index n = 200;
  Index p = 100;
  CovariateLaw law{};
  int replications = 100;
  std::uint64_t base_seed = 1;
  int d = 3;             // main-effect count for the robustness model
  double noise_sd = 1.0;
};

// n x p covariate draws; row i uses draws i*p .. i*p + p - 1 of the stream,
// so the matrix for a given (law, n, p, seed) is platform independent.
Matrix gen_covariates(const CovariateLaw& law, Index n, Index p,
                      std::uint64_t seed);

struct ModelTruth {
  Vector beta;
  SymmetricMatrix omega;
  std::vector<Index> main_support;
};

// Response for the chosen model.  All models share the quadratic part
// 2 X1 X6 + X6^2 + 2 X6 X10; the robustness model puts weight d^-1/2 on
// X1, X6, X10 plus d - 3 extra mains drawn without replacement from
// {X11, ..., Xp}.  d is ignored by m1..m4.
std::pair<Vector, ModelTruth> gen_response(ModelKind model, int d,
                                           const Matrix& X, double noise_sd,
                                           std::uint64_t seed);

struct Instance {
  Dataset data;
  ModelTruth truth;
};
Instance make_instance(const SimulationSpec& spec, int rep);

enum class Method { piey, pier, all_pairs, oracle };

const char* method_name(Method m);
std::optional<Method> parse_method(const std::string& name);

struct MethodStats {
  double mean_rate = 0.0, sd_rate = 0.0;
  double mean_loss = 0.0, sd_loss = 0.0;
  double mean_size = 0.0, sd_size = 0.0;
  double mean_time = 0.0, sd_time = 0.0;
  int completed = 0;
};

struct MethodRun {
  Method method{};
  std::vector<std::optional<MetricReport>> reps;  // nullopt where failed
  std::vector<std::string> failures;
  MethodStats stats;
  // Worst kkt / (1e-3 max(lambda, ||Lambda||_inf)) over every converged
  // solver fit on every path; <= 1 certifies the whole run's stationarity.
  double max_kkt_ratio = 0.0;
};

struct ReplicationSummary {
  SimulationSpec spec;
  std::vector<MethodRun> runs;
};

// Runs every (replication, method) cell and aggregates.  Replications run in
// parallel under the PIE_THREADS budget; results land in per-index slots, so
// the summary is identical for any thread count.
ReplicationSummary run_replications(const SimulationSpec& spec,
                                    const std::vector<Method>& methods,
                                    const FitOptions& base_opts = {});

// Appends 100 standardized noise columns (50 standard normal, then 50
// uniform[-sqrt3, sqrt3]).  experiment = 2 also adds
// 0.5 X_{p+1} X_{p+2} + 0.5 X_{p+50} X_{p+51} to the response (1-based) and
// reports those pairs as planted.
struct AugmentedData {
  Dataset data;
  std::vector<std::pair<Index, Index>> planted;  // lower-triangle pairs
};
AugmentedData noise_augment(const Dataset& data, std::uint64_t seed,
                            int experiment);

// Cell (k, l) counts fits whose omega has a nonzero at (k, l); symmetric.
Eigen::MatrixXi frequency_matrix(const std::vector<SymmetricMatrix>& omegas,
                                 Index p);

}  // namespace pie
