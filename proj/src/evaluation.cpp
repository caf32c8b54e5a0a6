#include "pie/evaluation.hpp"

#include <Eigen/Eigenvalues>
#include <chrono>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "pie/design.hpp"

namespace pie {

double support_rate(const SymmetricMatrix& est, const SymmetricMatrix& truth) {
  if (est.dim() != truth.dim())
    throw std::invalid_argument("support_rate: dimension mismatch");
  auto truth_support = truth.lower_support();
  if (truth_support.empty())
    throw std::invalid_argument("support_rate: truth has empty support");
  int hit = 0;
  for (auto [k, l] : truth_support)
    if (est(k, l) != 0.0) ++hit;
  return 100.0 * hit / static_cast<double>(truth_support.size());
}

double frobenius_loss(const SymmetricMatrix& est, const SymmetricMatrix& truth) {
  if (est.dim() != truth.dim())
    throw std::invalid_argument("frobenius_loss: dimension mismatch");
  return (est.mat() - truth.mat()).norm();
}

int support_size(const SymmetricMatrix& est) {
  return static_cast<int>(est.lower_support().size());
}

OracleFit oracle_fit(const Dataset& data, const SymmetricMatrix& truth_omega,
                     const std::vector<Index>& true_main_support) {
  auto start = std::chrono::steady_clock::now();
  auto support = truth_omega.lower_support();
  auto refit = refit_ls(data, support, true_main_support);
  if (!refit) throw std::runtime_error("oracle_fit: refit failed on the true support");

  OracleFit out;
  out.model = model_from_refit(data, *refit, support, true_main_support);
  out.metrics.rate = support_rate(out.model.omega, truth_omega);
  out.metrics.loss = frobenius_loss(out.model.omega, truth_omega);
  out.metrics.size = support_size(out.model.omega);
  out.metrics.time_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return out;
}

namespace {

struct ExpandedDesign {
  Matrix F;   // n x (p + p(p+1)/2), mains then pair_index layout
  Vector yc;
};

ExpandedDesign expand(const Dataset& data) {
  Vector xbar = data.X.colwise().mean();
  Matrix Xc = data.X.rowwise() - xbar.transpose();
  ExpandedDesign out;
  out.F.resize(data.n(), data.p() + data.p() * (data.p() + 1) / 2);
  out.F.leftCols(data.p()) = Xc;
  out.F.rightCols(out.F.cols() - data.p()) = product_block(Xc);
  out.yc = data.y.array() - data.y.mean();
  return out;
}

AllPairsFit fold_coefficients(const Vector& coef, Index p, double lambda,
                              const detail::CdResult& res) {
  AllPairsFit fit;
  fit.beta = coef.head(p);
  fit.B = SymmetricMatrix(p);
  for (Index k = 0; k < p; ++k)
    for (Index l = 0; l <= k; ++l) {
      double c = coef(p + pair_index(k, l));
      fit.B.set(k, l, k == l ? c : c / 2.0);
    }
  fit.lambda = lambda;
  fit.sweeps = res.sweeps;
  fit.converged = res.converged;
  return fit;
}

void check_all_pairs_size(Index p) {
  if (p > 300) {
    throw std::invalid_argument(
        "all_pairs_lasso: p > 300 would expand to " +
        std::to_string(p * (p + 1) / 2) + " product columns");
  }
}

}  // namespace

AllPairsFit all_pairs_lasso(const Dataset& data, double lambda) {
  check_all_pairs_size(data.p());
  ExpandedDesign d = expand(data);
  auto res = detail::cd_lasso(d.F, d.yc, lambda);
  return fold_coefficients(res.coef, data.p(), lambda, res);
}

AllPairsFit all_pairs_bic(const Dataset& data, int grid_points,
                          double grid_ratio) {
  check_all_pairs_size(data.p());
  ExpandedDesign d = expand(data);
  const Index n = data.n();
  const Index p = data.p();
  const double inv_n = 1.0 / static_cast<double>(n);

  double top = (d.F.transpose() * d.yc * inv_n).cwiseAbs().maxCoeff();
  SymmetricMatrix proxy(1);
  proxy.set(0, 0, top);
  std::vector<double> grid = lambda_grid(proxy, grid_points, grid_ratio);

  const double log_n = std::log(static_cast<double>(n));
  double best_bic = std::numeric_limits<double>::infinity();
  int best = -1;
  std::vector<detail::CdResult> results(grid.size());

  Vector warm = Vector::Zero(d.F.cols());
  for (size_t i = 0; i < grid.size(); ++i) {
    results[i] = detail::cd_lasso(d.F, d.yc, grid[i], &warm);
    warm = results[i].coef;

    std::vector<Index> mains;
    std::vector<std::pair<Index, Index>> pairs;
    for (Index j = 0; j < warm.size(); ++j) {
      if (warm(j) == 0.0) continue;
      if (j < p) {
        mains.push_back(j);
      } else {
        pairs.push_back(pair_from_index(j - p));
      }
    }
    auto refit = refit_ls(data, pairs, mains);
    // Same df <= n/2 candidate cap as the PIE path selection.
    if (!refit || 2 * refit->df > n) continue;
    double bic = n * std::log(refit->rss / n) + log_n * refit->df;
    if (bic < best_bic) {
      best_bic = bic;
      best = static_cast<int>(i);
    }
  }
  if (best < 0) throw std::runtime_error("all_pairs_bic: no admissible model");
  return fold_coefficients(results[best].coef, p, grid[best], results[best]);
}

double pie_objective(const Matrix& sigma, const SymmetricMatrix& b,
                     const SymmetricMatrix& lambda_hat, double lambda) {
  Matrix M = b.mat() * sigma;
  double quad = (M * M).trace();
  double lin = b.mat().cwiseProduct(lambda_hat.mat()).sum();
  return quad - lin + lambda * b.mat().cwiseAbs().sum();
}

SymmetricMatrix brute_force_pie(const SymmetricMatrix& sigma_hat,
                                const SymmetricMatrix& lambda_hat,
                                double lambda) {
  const Index p = sigma_hat.dim();
  if (p > 6) throw std::invalid_argument("brute_force_pie: guarded to p <= 6");
  if (lambda < 0.0) throw std::invalid_argument("brute_force_pie: lambda < 0");

  const Matrix& S = sigma_hat.mat();
  Eigen::SelfAdjointEigenSolver<Matrix> eig(S);
  double smax = eig.eigenvalues().cwiseAbs().maxCoeff();
  double lip = std::max(2.0 * smax * smax, 1e-12);
  double t = 1.0 / lip;

  auto grad = [&](const Matrix& B) -> Matrix {
    Matrix G = 2.0 * S * B * S - lambda_hat.mat();
    return 0.5 * (G + G.transpose());
  };
  auto prox = [&](const Matrix& A) -> Matrix {
    Matrix out(p, p);
    for (Index k = 0; k < p; ++k)
      for (Index l = 0; l < p; ++l) {
        double m = std::abs(A(k, l)) - t * lambda;
        out(k, l) = m <= 0.0 ? 0.0 : (A(k, l) < 0.0 ? -m : m);
      }
    return out;
  };

  // FISTA with momentum restart when the update turns against the step.
  Matrix B = Matrix::Zero(p, p), Y = B;
  double theta = 1.0;
  double tol = 1e-13 * std::max(1.0, lambda_hat.max_abs());

  for (int it = 0; it < 2000000; ++it) {
    Matrix Bnew = prox(Y - t * grad(Y));
    if ((Y - Bnew).cwiseProduct(Bnew - B).sum() > 0.0) {
      theta = 1.0;
      Y = B;
      continue;
    }
    double fp = (Bnew - prox(Bnew - t * grad(Bnew))).cwiseAbs().maxCoeff();
    double theta_new = 0.5 * (1.0 + std::sqrt(1.0 + 4.0 * theta * theta));
    Y = Bnew + ((theta - 1.0) / theta_new) * (Bnew - B);
    B = Bnew;
    theta = theta_new;
    if (fp <= tol) break;
  }
  return SymmetricMatrix::symmetrized(prox(B - t * grad(B)));
}

}  // namespace pie
