#include "pie/admm.hpp"

#include <cassert>
#include <cmath>
#include <stdexcept>

namespace pie {

namespace {

inline double soft(double a, double t) {
  double m = std::abs(a) - t;
  return m <= 0.0 ? 0.0 : (a < 0.0 ? -m : m);
}

// D_kl = 2 d_k d_l / (2 d_k d_l + rho); zero eigenvalues give zero entries.
Matrix shrink_factors(const Vector& d, double rho) {
  const Index m = d.size();
  Matrix D(m, m);
  for (Index k = 0; k < m; ++k)
    for (Index l = 0; l < m; ++l) {
      double q = 2.0 * d(k) * d(l);
      D(k, l) = q / (q + rho);
    }
  return D;
}

// Unsymmetrized B-step on plain matrices; D comes from shrink_factors.
void b_step_impl(const Matrix& lambda_k, const CenteredStats& stats,
                 const Matrix& D, double rho, Matrix& out) {
  Matrix C = stats.U.transpose() * lambda_k * stats.U;  // m x m
  C.array() *= D.array();
  out = (lambda_k - stats.U * C * stats.U.transpose()) / rho;
}

}  // namespace

SymmetricMatrix soft_threshold(const SymmetricMatrix& a, double t) {
  if (t < 0.0) throw std::invalid_argument("soft_threshold: negative threshold");
  const Index p = a.dim();
  SymmetricMatrix out(p);
  for (Index k = 0; k < p; ++k)
    for (Index l = 0; l <= k; ++l) out.set(k, l, soft(a(k, l), t));
  return out;
}

SymmetricMatrix b_step(const SymmetricMatrix& lambda_k,
                       const CenteredStats& stats, double rho) {
  if (rho <= 0.0) throw std::invalid_argument("b_step: rho must be positive");
  Matrix D = shrink_factors(stats.d, rho);
  Matrix out;
  b_step_impl(lambda_k.mat(), stats, D, rho, out);
  return SymmetricMatrix::symmetrized(out);
}

double kkt_residual(const SymmetricMatrix& b, const CenteredStats& stats,
                    const SymmetricMatrix& lambda_hat, double lambda) {
  Matrix G = 2.0 * stats.sigma_product(stats.sigma_product(b.mat()).transpose());
  G -= lambda_hat.mat();
  double worst = 0.0;
  for (Index k = 0; k < b.dim(); ++k)
    for (Index l = 0; l <= k; ++l) {
      double g = 0.5 * (G(k, l) + G(l, k));
      double r = b(k, l) != 0.0
                     ? std::abs(g + lambda * (b(k, l) > 0.0 ? 1.0 : -1.0))
                     : std::max(0.0, std::abs(g) - lambda);
      worst = std::max(worst, r);
    }
  return worst;
}

InteractionFit solve_pie(const CenteredStats& stats,
                         const SymmetricMatrix& lambda_hat, double lambda,
                         const SolverOptions& opts) {
  AdmmState state;
  return solve_pie(stats, lambda_hat, lambda, opts, state);
}

InteractionFit solve_pie(const CenteredStats& stats,
                         const SymmetricMatrix& lambda_hat, double lambda,
                         const SolverOptions& opts, AdmmState& state) {
  if (opts.rho <= 0.0) throw std::invalid_argument("solve_pie: rho must be positive");
  if (opts.tol < 0.0) throw std::invalid_argument("solve_pie: tol must be >= 0");
  if (opts.max_iter < 1) throw std::invalid_argument("solve_pie: max_iter must be >= 1");
  if (lambda < 0.0) throw std::invalid_argument("solve_pie: lambda must be >= 0");
  const Index p = stats.p();
  if (lambda_hat.dim() != p) {
    throw std::invalid_argument("solve_pie: Lambda dimension mismatch");
  }

  // lambda >= ||Lambda||_inf makes the origin exactly optimal (KKT holds
  // with the zero subgradient); iterating instead can leave the boundary
  // coordinate a hair above the threshold at any finite tolerance.
  if (lambda >= lambda_hat.max_abs()) {
    InteractionFit fit;
    fit.lambda = lambda;
    fit.omega = SymmetricMatrix(p);
    fit.converged = true;
    fit.kkt = kkt_residual(fit.omega, stats, lambda_hat, lambda);
    state.B = Matrix::Zero(p, p);
    state.Psi = Matrix::Zero(p, p);
    state.L = lambda_hat.mat();  // the multiplier at that fixed point
    state.init = true;
    return fit;
  }

  if (!state.init) {
    state.B = Matrix::Zero(p, p);
    state.Psi = Matrix::Zero(p, p);
    state.L = Matrix::Zero(p, p);
    state.init = true;
  }
  Matrix& B = state.B;
  Matrix& Psi = state.Psi;
  Matrix& L = state.L;

  const double rho = opts.rho;
  const Matrix D = shrink_factors(stats.d, rho);
  const double thresh = lambda / rho;

  InteractionFit fit;
  fit.lambda = lambda;
  fit.primal_history.reserve(opts.max_iter);
  fit.dual_history.reserve(opts.max_iter);

  // Converged fits must certify stationarity, not just iterate agreement.
  const double kkt_gate = 1e-3 * std::max(lambda, lambda_hat.max_abs());

  Matrix lambda_k(p, p), Bnew(p, p);
  for (int it = 1; it <= opts.max_iter; ++it) {
    lambda_k = lambda_hat.mat() - L + rho * Psi;
    b_step_impl(lambda_k, stats, D, rho, Bnew);
    // One exact symmetrization per iteration keeps Psi and L symmetric
    // through the elementwise updates below.
    B = 0.5 * (Bnew + Bnew.transpose());

    double dual_sq = 0.0, primal_sq = 0.0, psi_sq = 0.0;
    for (Index k = 0; k < p; ++k)
      for (Index l = 0; l < p; ++l) {
        double psi_new = soft(B(k, l) + L(k, l) / rho, thresh);
        double dpsi = psi_new - Psi(k, l);
        dual_sq += dpsi * dpsi;
        Psi(k, l) = psi_new;
        double gap = B(k, l) - psi_new;
        L(k, l) += rho * gap;
        primal_sq += gap * gap;
        psi_sq += psi_new * psi_new;
      }

    double primal = std::sqrt(primal_sq);
    double dual = rho * std::sqrt(dual_sq);
    fit.primal_history.push_back(primal);
    fit.dual_history.push_back(dual);
    fit.iterations = it;

    double scale = std::max(1.0, std::sqrt(psi_sq));
    double worst = std::max(primal, dual);
    if ((opts.tol > 0.0 && worst <= opts.tol * scale) || worst == 0.0) {
      fit.kkt = kkt_residual(SymmetricMatrix::from_symmetric(Psi), stats,
                             lambda_hat, lambda);
      if (fit.kkt <= kkt_gate || worst == 0.0) {
        fit.converged = true;
        break;
      }
    }
  }

  fit.omega = SymmetricMatrix::from_symmetric(Psi);
  if (!fit.converged) {
    fit.kkt = kkt_residual(fit.omega, stats, lambda_hat, lambda);
  }
  return fit;
}

}  // namespace pie
