#pragma once

#include <cstdint>

#include "pie/moments.hpp"
#include "pie/types.hpp"

namespace pie {

struct MainEffectsFit {
  Vector beta;        // length p, exact zeros off the support
  double intercept = 0.0;  // raw-space: ybar - xbar . beta
  double lambda = 0.0;
  double kkt = 0.0;   // gradient residual, see fit_lasso
  int sweeps = 0;
  bool converged = false;

  std::vector<Index> support() const {
    std::vector<Index> s;
    for (Index j = 0; j < beta.size(); ++j)
      if (beta(j) != 0.0) s.push_back(j);
    return s;
  }
};

// Smallest penalty with an all-zero solution: ||n^-1 Xc^T yc||_inf.
double lasso_lambda_max(const CenteredStats& stats, const Vector& y);

// Minimizes (2n)^-1 ||yc - Xc b||^2 + lambda ||b||_1 by cyclic coordinate
// descent.  Postcondition: kkt <= 1e-6 * max(lambda, 1); zero-variance
// columns keep coefficient exactly 0.
MainEffectsFit fit_lasso(const CenteredStats& stats, const Vector& y,
                         double lambda, const Vector* warm = nullptr);

struct CvCurve {
  std::vector<double> lambdas;   // descending
  std::vector<double> cv_error;  // mean held-out squared error per lambda
  int chosen = 0;                // smallest error; ties -> larger lambda
};

// K-fold cross validation over a 50-point log grid from lambda_max down to
// 0.01 lambda_max, warm started, folds formed by a seeded shuffle of rows.
// Requires 2 <= folds <= n.  Returns the full-data refit at the selected
// lambda plus the curve.
std::pair<MainEffectsFit, CvCurve> select_lasso_cv(const CenteredStats& stats,
                                                   const Vector& y, int folds,
                                                   std::uint64_t seed);

MainEffectsFit select_lasso(const CenteredStats& stats, const Vector& y,
                            int folds = 10, std::uint64_t seed = 0);

namespace detail {

// Cyclic coordinate descent for (2n)^-1 ||yc - F b||^2 + lambda ||b||_1 on an
// already-centered design; residual form, active-set sweeps.  Used by the
// main-effects path and the all-pairs baseline.
struct CdOptions {
  double kkt_tol = 1e-9;  // absolute target, scaled by max(lambda, 1)
  int max_sweeps = 100000;
};

struct CdResult {
  Vector coef;
  double kkt = 0.0;
  int sweeps = 0;
  bool converged = false;
};

CdResult cd_lasso(const Matrix& Fc, const Vector& yc, double lambda,
                  const Vector* warm = nullptr, const CdOptions& opts = {});

}  // namespace detail

}  // namespace pie
