#pragma once

#include "pie/tuning.hpp"
#include "pie/types.hpp"

namespace pie {

struct MetricReport {
  double rate = 0.0;   // percentage of true lower-triangle support recovered
  double loss = 0.0;   // Frobenius distance to the true Omega
  int size = 0;        // nonzero lower-triangle entries of the estimate
  double time_seconds = 0.0;
};

// 100 * |est support ∩ truth support| / |truth support| over l <= k;
// rejects an all-zero truth.
double support_rate(const SymmetricMatrix& est, const SymmetricMatrix& truth);

double frobenius_loss(const SymmetricMatrix& est, const SymmetricMatrix& truth);

int support_size(const SymmetricMatrix& est);

// Least squares on the true support, the estimator with oracle knowledge.
// Requires the truth to identify which pairs and mains enter the model.
struct OracleFit {
  QuadraticModel model;
  MetricReport metrics;
};
OracleFit oracle_fit(const Dataset& data, const SymmetricMatrix& truth_omega,
                     const std::vector<Index>& true_main_support);

// Lasso on [mains, all pairwise products], both centered: the one-stage
// baseline.  Coefficients stay penalized (no refit); the product column for
// k != l folds into B_kl = B_lk = coef / 2.  Guarded to p <= 300.
struct AllPairsFit {
  Vector beta;
  SymmetricMatrix B;
  double lambda = 0.0;
  int sweeps = 0;
  bool converged = false;
};
AllPairsFit all_pairs_lasso(const Dataset& data, double lambda);

// BIC-tuned baseline over the same grid shape as the PIE path; lambda is
// selected by refitting each support, the reported fit keeps the penalized
// coefficients.
AllPairsFit all_pairs_bic(const Dataset& data, int grid_points = 50,
                          double grid_ratio = 0.01);

// Proximal-gradient reference solver for
//   min_B tr(B^T Sigma B Sigma) - tr(B Lambda) + lambda ||B||_1
// run to tight tolerance.  Guarded to p <= 6; used as an oracle in tests.
SymmetricMatrix brute_force_pie(const SymmetricMatrix& sigma_hat,
                                const SymmetricMatrix& lambda_hat,
                                double lambda);

// Objective value, shared by the solver tests.
double pie_objective(const Matrix& sigma, const SymmetricMatrix& b,
                     const SymmetricMatrix& lambda_hat, double lambda);

}  // namespace pie
