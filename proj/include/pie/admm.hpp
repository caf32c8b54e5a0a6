#pragma once

#include "pie/moments.hpp"
#include "pie/types.hpp"

namespace pie {

struct SolverOptions {
  double rho = 1.0;      // augmented Lagrangian weight, > 0
  double tol = 1e-4;     // relative stopping tolerance; 0 runs to max_iter
  int max_iter = 1000;
};

struct InteractionFit {
  SymmetricMatrix omega;  // Psi iterate: exactly sparse
  double lambda = 0.0;
  int iterations = 0;
  bool converged = false;
  double kkt = 0.0;                     // stationarity residual, see kkt_residual
  std::vector<double> primal_history;  // ||B^k - Psi^k||_F
  std::vector<double> dual_history;    // rho ||Psi^k - Psi^{k-1}||_F
};

// Entrywise soft threshold sign(a) max(|a| - t, 0); t >= 0.
SymmetricMatrix soft_threshold(const SymmetricMatrix& a, double t);

// Minimizer of tr(B^T Sigma B Sigma) + (rho/2)||B||_F^2 - tr(B Lambda_k):
//   B = rho^-1 Lambda_k - rho^-1 U ( D o (U^T Lambda_k U) ) U^T,
//   D_kl = 2 d_k d_l / (2 d_k d_l + rho),
// using the m x m spectral data in stats.  O(min(n,p) p^2) per call.
SymmetricMatrix b_step(const SymmetricMatrix& lambda_k,
                       const CenteredStats& stats, double rho);

// Subgradient residual of 0.5 tr(B^T 2 Sigma B Sigma) - tr(B Lambda) + lambda||B||_1
// at B: with G = 2 Sigma B Sigma - Lambda, the max over entries of
// |G + lambda sign(B)| on the support and max(0, |G| - lambda) off it.
double kkt_residual(const SymmetricMatrix& b, const CenteredStats& stats,
                    const SymmetricMatrix& lambda_hat, double lambda);

// Iterates carried across solves for warm starts along a lambda path.
struct AdmmState {
  Matrix B, Psi, L;
  bool init = false;
};

// ADMM for the penalized interaction objective.  Stops when
// max(primal, dual) <= tol * max(1, ||Psi^k||_F) or at max_iter; the
// returned omega is the Psi iterate.
InteractionFit solve_pie(const CenteredStats& stats,
                         const SymmetricMatrix& lambda_hat, double lambda,
                         const SolverOptions& opts = {});

// Warm-started variant; state is updated in place for the next call.
InteractionFit solve_pie(const CenteredStats& stats,
                         const SymmetricMatrix& lambda_hat, double lambda,
                         const SolverOptions& opts, AdmmState& state);

}  // namespace pie
