#include "pie/tuning.hpp"

#include <cmath>
#include <iostream>
#include <limits>
#include <stdexcept>

#include "pie/design.hpp"

namespace pie {

std::vector<double> lambda_grid(const SymmetricMatrix& lambda_hat,
                                int n_points, double ratio) {
  if (n_points < 2) throw std::invalid_argument("lambda_grid: need >= 2 points");
  if (ratio <= 0.0 || ratio >= 1.0)
    throw std::invalid_argument("lambda_grid: ratio must be in (0, 1)");

  double top = lambda_hat.max_abs();
  if (top == 0.0) {
    std::cerr << "warning: zero moment matrix, lambda grid collapses to {0}\n";
    return {0.0};
  }
  std::vector<double> grid;
  grid.reserve(n_points);
  double step = std::log(ratio) / (n_points - 1);
  for (int i = 0; i < n_points; ++i) grid.push_back(top * std::exp(step * i));
  return grid;
}

std::optional<RefitResult> refit_ls(
    const Dataset& data, const std::vector<std::pair<Index, Index>>& support,
    const std::vector<Index>& main_support) {
  const Index n = data.n();
  const Index df = 1 + static_cast<Index>(main_support.size()) +
                   static_cast<Index>(support.size());
  if (df >= n) return std::nullopt;

  Vector xbar = data.X.colwise().mean();
  Matrix Xc = data.X.rowwise() - xbar.transpose();

  Matrix A(n, df);
  A.col(0).setOnes();
  Index c = 1;
  for (Index j : main_support) A.col(c++) = Xc.col(j);
  for (auto [k, l] : support) A.col(c++) = product_column(Xc, k, l);

  Eigen::ColPivHouseholderQR<Matrix> qr(A);
  if (qr.rank() < df) return std::nullopt;

  Vector coef = qr.solve(data.y);
  RefitResult out;
  out.alpha = coef(0);
  out.main_coef = coef.segment(1, main_support.size());
  out.pair_coef = coef.tail(support.size());
  out.rss = (data.y - A * coef).squaredNorm();
  out.df = static_cast<int>(df);
  return out;
}

int bic_select(const PathResult& path, Index n) {
  int best = -1;
  double best_bic = std::numeric_limits<double>::infinity();
  for (size_t i = 0; i < path.lambdas.size(); ++i) {
    if (!path.admissible[i]) continue;
    if (path.bic[i] < best_bic) {  // strict: ties keep the larger lambda
      best_bic = path.bic[i];
      best = static_cast<int>(i);
    }
  }
  return best;
}

QuadraticModel model_from_refit(
    const Dataset& data, const RefitResult& refit,
    const std::vector<std::pair<Index, Index>>& support,
    const std::vector<Index>& main_support) {
  const Index p = data.p();
  Vector xbar = data.X.colwise().mean();
  Matrix Xc = data.X.rowwise() - xbar.transpose();

  QuadraticModel model;
  model.mu = xbar;
  model.beta = Vector::Zero(p);
  model.omega = SymmetricMatrix(p);
  model.alpha = refit.alpha;

  for (size_t i = 0; i < main_support.size(); ++i) {
    model.beta(main_support[i]) = refit.main_coef(i);
  }

  // A refit pair column is (x-mu)_k (x-mu)_l - qbar_kl, so coefficient c
  // contributes c to the centered quadratic form and -c qbar_kl to alpha.
  for (size_t i = 0; i < support.size(); ++i) {
    auto [k, l] = support[i];
    double coef = refit.pair_coef(i);
    double qbar = Xc.col(k).cwiseProduct(Xc.col(l)).mean();
    model.alpha -= coef * qbar;
    model.omega.set(k, l, k == l ? coef : coef / 2.0);
  }
  return model;
}

namespace {

struct PipelineResult {
  QuadraticModel model;
  PathResult path;
};

PipelineResult run_pipeline(const Dataset& data, const CenteredStats& stats,
                            const SymmetricMatrix& lambda_hat,
                            const std::vector<Index>& refit_mains,
                            const FitOptions& opts) {
  PathResult path;
  path.lambdas = lambda_grid(lambda_hat, opts.grid_points, opts.grid_ratio);

  const size_t m = path.lambdas.size();
  path.fits.reserve(m);
  path.bic.assign(m, std::numeric_limits<double>::quiet_NaN());
  path.refit_rss.assign(m, std::numeric_limits<double>::quiet_NaN());
  path.refit_df.assign(m, 0);
  path.admissible.assign(m, false);

  std::vector<std::optional<RefitResult>> refits(m);
  AdmmState state;
  const Index n = data.n();
  const double log_n = std::log(static_cast<double>(n));

  for (size_t i = 0; i < m; ++i) {
    path.fits.push_back(
        solve_pie(stats, lambda_hat, path.lambdas[i], opts.solver, state));
    auto support = path.fits[i].omega.lower_support();
    refits[i] = refit_ls(data, support, refit_mains);
    // BIC's variance proxy rss/n collapses as df -> n, letting a
    // near-saturated refit dominate; candidates are capped at df <= n/2.
    if (refits[i] && 2 * refits[i]->df <= n) {
      path.admissible[i] = true;
      path.refit_rss[i] = refits[i]->rss;
      path.refit_df[i] = refits[i]->df;
      path.bic[i] = n * std::log(refits[i]->rss / n) + log_n * refits[i]->df;
    }
  }

  path.chosen = bic_select(path, n);
  if (path.chosen < 0) {
    throw std::runtime_error(
        "tuning: no admissible model on the path; rerun with a denser grid "
        "(more points or a smaller ratio)");
  }

  PipelineResult out;
  out.model = model_from_refit(data, *refits[path.chosen],
                               path.fits[path.chosen].omega.lower_support(),
                               refit_mains);
  out.path = std::move(path);
  return out;
}

}  // namespace

std::pair<QuadraticModel, PathResult> fit_piey(const Dataset& data,
                                               const FitOptions& opts) {
  CenteredStats stats = center(data);
  SymmetricMatrix lam = lambda_y(stats, data.y);

  std::vector<Index> mains;
  if (opts.refit_main.value_or(false)) {
    mains = select_lasso(stats, data.y, opts.folds, opts.seed).support();
  }
  auto res = run_pipeline(data, stats, lam, mains, opts);
  return {std::move(res.model), std::move(res.path)};
}

std::pair<QuadraticModel, PathResult> fit_pier(const Dataset& data,
                                               const FitOptions& opts) {
  CenteredStats stats = center(data);
  Vector beta = Vector::Zero(data.p());
  if (!opts.zero_beta) beta = select_lasso(stats, data.y, opts.folds, opts.seed).beta;
  SymmetricMatrix lam = lambda_r(stats, data.y, beta);

  std::vector<Index> mains;
  if (opts.refit_main.value_or(true)) {
    for (Index j = 0; j < beta.size(); ++j)
      if (beta(j) != 0.0) mains.push_back(j);
  }
  auto res = run_pipeline(data, stats, lam, mains, opts);
  return {std::move(res.model), std::move(res.path)};
}

}  // namespace pie
