#pragma once

#include <cstdint>
#include <optional>

#include "pie/admm.hpp"
#include "pie/main_effects.hpp"
#include "pie/types.hpp"

namespace pie {

// Fitted quadratic model in the centered parameterization
//   Y = alpha + (x - mu)^T beta + (x - mu)^T Omega (x - mu) + eps,
// with mu the column means of the training data.
struct QuadraticModel {
  double alpha = 0.0;
  Vector beta;
  SymmetricMatrix omega;
  Vector mu;

  double predict(const Vector& x) const {
    Vector xc = x - mu;
    return alpha + xc.dot(beta) + xc.dot(omega.mat() * xc);
  }
};

struct PathResult {
  std::vector<double> lambdas;  // descending
  std::vector<InteractionFit> fits;
  std::vector<double> bic;        // NaN where inadmissible
  std::vector<double> refit_rss;  // NaN where inadmissible
  std::vector<int> refit_df;      // 0 where inadmissible
  std::vector<bool> admissible;   // refit full rank and df <= n/2
  int chosen = -1;  // index of the BIC winner
};

struct FitOptions {
  SolverOptions solver{};
  int grid_points = 50;
  double grid_ratio = 0.01;
  // Mains entering the refit: PIEy defaults to none, PIEr to the
  // lasso-selected set; set to override either default.
  std::optional<bool> refit_main{};
  int folds = 10;           // CV folds for the PIEr main-effects stage
  std::uint64_t seed = 0;   // CV fold shuffling
  bool zero_beta = false;   // PIEr: skip the lasso and use beta = 0
};

// Log-spaced grid from ||Lambda||_inf down to ratio * ||Lambda||_inf;
// n_points >= 2.  A zero Lambda yields {0} and a warning on stderr.
std::vector<double> lambda_grid(const SymmetricMatrix& lambda_hat,
                                int n_points = 50, double ratio = 0.01);

// Least squares of y on [1, selected centered mains, selected centered
// products]; df = column count.  nullopt when df >= n or the design is
// rank deficient.
struct RefitResult {
  double alpha = 0.0;      // intercept in raw coordinates
  Vector main_coef;        // aligned with main_support
  Vector pair_coef;        // aligned with support
  double rss = 0.0;
  int df = 0;
};
std::optional<RefitResult> refit_ls(
    const Dataset& data, const std::vector<std::pair<Index, Index>>& support,
    const std::vector<Index>& main_support);

// BIC = n log(rss / n) + log(n) df over admissible path entries; ties go to
// the larger lambda.  Returns -1 when nothing is admissible.
int bic_select(const PathResult& path, Index n);

// Refit coefficients folded into the centered model form: the product column
// for k != l carries (x-mu)_k (x-mu)_l twice in the quadratic form, so
// Omega_kl = Omega_lk = coef / 2; diagonal coefficients map one to one; the
// product columns' subtracted means fold into alpha.
QuadraticModel model_from_refit(const Dataset& data, const RefitResult& refit,
                                const std::vector<std::pair<Index, Index>>& support,
                                const std::vector<Index>& main_support);

// Full PIE pipelines: moment, solver path, BIC, refit.
std::pair<QuadraticModel, PathResult> fit_piey(const Dataset& data,
                                               const FitOptions& opts = {});
std::pair<QuadraticModel, PathResult> fit_pier(const Dataset& data,
                                               const FitOptions& opts = {});

}  // namespace pie
