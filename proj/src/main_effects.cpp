#include "pie/main_effects.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include "pie/rng.hpp"

namespace pie {

namespace {

inline double soft(double a, double t) {
  double m = std::abs(a) - t;
  return m <= 0.0 ? 0.0 : (a < 0.0 ? -m : m);
}

// Covariance-form coordinate descent: G = Fc^T Fc / n and c = Fc^T yc / n are
// precomputed once, gb = G b is maintained incrementally, so the full KKT
// check costs O(p) per sweep.  Reused across a warm-started lambda path.
struct CovWork {
  Matrix G;
  Vector c;
};

detail::CdResult cd_lasso_cov(const CovWork& w, double lambda, Vector b,
                              const detail::CdOptions& opts) {
  const Index q = w.c.size();
  const double target = opts.kkt_tol * std::max(lambda, 1.0);

  Vector gb = Vector::Zero(q);
  if (b.size() != q) b = Vector::Zero(q);
  for (Index j = 0; j < q; ++j) {
    if (w.G(j, j) == 0.0) b(j) = 0.0;  // zero-variance column stays out
    if (b(j) != 0.0) gb += w.G.col(j) * b(j);
  }

  auto kkt = [&] {
    double worst = 0.0;
    for (Index j = 0; j < q; ++j) {
      double g = gb(j) - w.c(j);
      double r = b(j) != 0.0 ? std::abs(g + lambda * (b(j) > 0.0 ? 1.0 : -1.0))
                             : std::max(0.0, std::abs(g) - lambda);
      worst = std::max(worst, r);
    }
    return worst;
  };

  auto sweep = [&](bool active_only) {
    for (Index j = 0; j < q; ++j) {
      if (w.G(j, j) == 0.0) continue;
      if (active_only && b(j) == 0.0) continue;
      double z = w.c(j) - gb(j) + w.G(j, j) * b(j);
      double bn = soft(z, lambda) / w.G(j, j);
      double delta = bn - b(j);
      if (delta != 0.0) {
        gb += w.G.col(j) * delta;
        b(j) = bn;
      }
    }
  };

  detail::CdResult res;
  while (res.sweeps < opts.max_sweeps) {
    sweep(false);
    ++res.sweeps;
    for (int inner = 0; inner < 20 && res.sweeps < opts.max_sweeps; ++inner) {
      Vector prev = b;
      sweep(true);
      ++res.sweeps;
      if ((b - prev).cwiseAbs().maxCoeff() <= 1e-15 * std::max(1.0, b.cwiseAbs().maxCoeff()))
        break;
    }
    res.kkt = kkt();
    if (res.kkt <= target) {
      res.converged = true;
      break;
    }
  }
  res.coef = std::move(b);
  return res;
}

}  // namespace

namespace detail {

CdResult cd_lasso(const Matrix& Fc, const Vector& yc, double lambda,
                  const Vector* warm, const CdOptions& opts) {
  const Index n = Fc.rows();
  const Index q = Fc.cols();
  const double target = opts.kkt_tol * std::max(lambda, 1.0);
  const double inv_n = 1.0 / static_cast<double>(n);

  Vector ss(q);
  for (Index j = 0; j < q; ++j) ss(j) = Fc.col(j).squaredNorm() * inv_n;

  Vector b = warm && warm->size() == q ? *warm : Vector::Zero(q);
  for (Index j = 0; j < q; ++j)
    if (ss(j) == 0.0) b(j) = 0.0;
  Vector r = yc - Fc * b;

  auto sweep = [&](bool active_only, bool refresh) {
    if (refresh) r = yc - Fc * b;  // undo incremental drift
    for (Index j = 0; j < q; ++j) {
      if (ss(j) == 0.0) continue;
      if (active_only && b(j) == 0.0) continue;
      double z = Fc.col(j).dot(r) * inv_n + ss(j) * b(j);
      double bn = soft(z, lambda) / ss(j);
      double delta = bn - b(j);
      if (delta != 0.0) {
        r -= Fc.col(j) * delta;
        b(j) = bn;
      }
    }
  };

  auto kkt = [&] {
    double worst = 0.0;
    for (Index j = 0; j < q; ++j) {
      double g = -Fc.col(j).dot(r) * inv_n;
      double res = b(j) != 0.0
                       ? std::abs(g + lambda * (b(j) > 0.0 ? 1.0 : -1.0))
                       : std::max(0.0, std::abs(g) - lambda);
      worst = std::max(worst, res);
    }
    return worst;
  };

  CdResult res;
  while (res.sweeps < opts.max_sweeps) {
    sweep(false, res.sweeps % 64 == 0);
    ++res.sweeps;
    for (int inner = 0; inner < 20 && res.sweeps < opts.max_sweeps; ++inner) {
      Vector prev = b;
      sweep(true, false);
      ++res.sweeps;
      if ((b - prev).cwiseAbs().maxCoeff() <=
          1e-15 * std::max(1.0, b.cwiseAbs().maxCoeff()))
        break;
    }
    res.kkt = kkt();
    if (res.kkt <= target) {
      res.converged = true;
      break;
    }
  }
  res.coef = std::move(b);
  return res;
}

}  // namespace detail

double lasso_lambda_max(const CenteredStats& stats, const Vector& y) {
  Vector yc = y.array() - y.mean();
  return (stats.Xc.transpose() * yc / static_cast<double>(stats.n()))
      .cwiseAbs()
      .maxCoeff();
}

MainEffectsFit fit_lasso(const CenteredStats& stats, const Vector& y,
                         double lambda, const Vector* warm) {
  if (lambda < 0.0) throw std::invalid_argument("fit_lasso: lambda must be >= 0");
  if (y.size() != stats.n()) throw InputError("fit_lasso: response length mismatch");

  Vector yc = y.array() - y.mean();
  const double n = static_cast<double>(stats.n());

  detail::CdResult res;
  if (stats.p() < 5000) {
    CovWork w{stats.Xc.transpose() * stats.Xc / n, stats.Xc.transpose() * yc / n};
    res = cd_lasso_cov(w, lambda, warm ? *warm : Vector(), {});
  } else {
    res = detail::cd_lasso(stats.Xc, yc, lambda, warm, {});
  }

  MainEffectsFit fit;
  fit.beta = std::move(res.coef);
  fit.intercept = y.mean() - stats.xbar.dot(fit.beta);
  fit.lambda = lambda;
  fit.kkt = res.kkt;
  fit.sweeps = res.sweeps;
  fit.converged = res.kkt <= 1e-6 * std::max(lambda, 1.0);
  return fit;
}

namespace {

std::vector<double> log_grid(double top, int points, double ratio) {
  std::vector<double> out;
  out.reserve(points);
  if (top <= 0.0 || points < 2) {
    out.push_back(std::max(top, 0.0));
    return out;
  }
  double step = std::log(ratio) / (points - 1);
  for (int i = 0; i < points; ++i) out.push_back(top * std::exp(step * i));
  return out;
}

}  // namespace

std::pair<MainEffectsFit, CvCurve> select_lasso_cv(const CenteredStats& stats,
                                                   const Vector& y, int folds,
                                                   std::uint64_t seed) {
  const Index n = stats.n();
  const Index p = stats.p();
  if (folds < 2) throw InputError("select_lasso_cv: need >= 2 folds");
  if (folds > n) throw InputError("select_lasso_cv: folds exceed sample size");
  if (y.size() != n) throw InputError("select_lasso_cv: response length mismatch");

  double top = lasso_lambda_max(stats, y);
  CvCurve curve;
  curve.lambdas = log_grid(top, 50, 0.01);

  if (top == 0.0) {
    curve.cv_error.assign(curve.lambdas.size(), 0.0);
    MainEffectsFit fit;
    fit.beta = Vector::Zero(p);
    fit.intercept = y.mean();
    fit.converged = true;
    return {fit, curve};
  }

  std::vector<Index> order(n);
  std::iota(order.begin(), order.end(), Index{0});
  Rng rng(mix_seed(seed, 0xF01D));
  for (Index i = n - 1; i > 0; --i) {
    Index j = static_cast<Index>(rng.below(static_cast<std::uint64_t>(i) + 1));
    std::swap(order[i], order[j]);
  }

  curve.cv_error.assign(curve.lambdas.size(), 0.0);
  const double n_inv = 1.0 / static_cast<double>(n);

  for (int f = 0; f < folds; ++f) {
    std::vector<Index> val, train;
    for (Index i = 0; i < n; ++i) {
      (static_cast<int>(i % folds) == f ? val : train).push_back(order[i]);
    }

    // Rebuild raw rows from Xc + xbar, then re-center within the fold.
    Matrix Xt(train.size(), p);
    Vector yt(train.size());
    for (size_t i = 0; i < train.size(); ++i) {
      Xt.row(i) = stats.Xc.row(train[i]) + stats.xbar.transpose();
      yt(i) = y(train[i]);
    }
    Vector xbar_t = Xt.colwise().mean();
    double ybar_t = yt.mean();
    Matrix Ft = Xt.rowwise() - xbar_t.transpose();
    Vector yct = yt.array() - ybar_t;
    double nt = static_cast<double>(train.size());
    CovWork w{Ft.transpose() * Ft / nt, Ft.transpose() * yct / nt};

    Vector warm = Vector::Zero(p);
    for (size_t li = 0; li < curve.lambdas.size(); ++li) {
      auto res = cd_lasso_cov(w, curve.lambdas[li], warm, {});
      warm = res.coef;
      for (Index i : val) {
        double pred = ybar_t +
                      (stats.Xc.row(i).transpose() + stats.xbar - xbar_t).dot(res.coef);
        double e = y(i) - pred;
        curve.cv_error[li] += e * e * n_inv;
      }
    }
  }

  curve.chosen = 0;
  for (size_t li = 1; li < curve.lambdas.size(); ++li) {
    if (curve.cv_error[li] < curve.cv_error[curve.chosen]) {
      curve.chosen = static_cast<int>(li);
    }
  }

  MainEffectsFit fit;
  Vector warm = Vector::Zero(p);
  for (int li = 0; li <= curve.chosen; ++li) {
    fit = fit_lasso(stats, y, curve.lambdas[li], &warm);
    warm = fit.beta;
  }
  return {fit, curve};
}

MainEffectsFit select_lasso(const CenteredStats& stats, const Vector& y,
                            int folds, std::uint64_t seed) {
  return select_lasso_cv(stats, y, folds, seed).first;
}

}  // namespace pie
