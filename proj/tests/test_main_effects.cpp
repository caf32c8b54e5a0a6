#include <cmath>
#include <limits>

#include "doctest.h"
#include "helpers.hpp"
#include "pie/main_effects.hpp"
#include "pie/moments.hpp"

using namespace pie;

namespace {

double lasso_objective(const CenteredStats& stats, const Vector& y,
                       const Vector& b, double lambda) {
  Vector yc = y.array() - y.mean();
  double n = static_cast<double>(stats.n());
  return (yc - stats.Xc * b).squaredNorm() / (2.0 * n) +
         lambda * b.cwiseAbs().sum();
}

// Exhaustive 2-d minimization: coarse grid, then repeated shrink-around-
// argmin refinement.  Independent of any solver code path.
Vector grid_oracle_2d(const CenteredStats& stats, const Vector& y,
                      double lambda) {
  double c1 = 0.0, c2 = 0.0, half = 4.0;
  const int pts = 41;
  Vector best(2);
  for (int round = 0; round < 10; ++round) {
    double best_val = std::numeric_limits<double>::infinity();
    for (int i = 0; i < pts; ++i)
      for (int j = 0; j < pts; ++j) {
        Vector b(2);
        b << c1 - half + 2.0 * half * i / (pts - 1),
            c2 - half + 2.0 * half * j / (pts - 1);
        double v = lasso_objective(stats, y, b, lambda);
        if (v < best_val) {
          best_val = v;
          best = b;
        }
      }
    c1 = best(0);
    c2 = best(1);
    half *= 0.12;
  }
  return best;
}

}  // namespace

TEST_SUITE("main_effects") {

TEST_CASE("penalties at or above lambda_max give the zero fit") {
  Dataset data = test::random_dataset(30, 4, 7);
  CenteredStats stats = center(data);
  double top = lasso_lambda_max(stats, data.y);
  CHECK(top > 0.0);
  for (double lam : {top, 1.5 * top}) {
    MainEffectsFit fit = fit_lasso(stats, data.y, lam);
    CHECK(fit.beta.cwiseAbs().maxCoeff() == 0.0);
    CHECK(fit.converged);
    CHECK(fit.support().empty());
    CHECK(fit.intercept == doctest::Approx(data.y.mean()));
  }
  // Just below, at least one coordinate enters.
  MainEffectsFit below = fit_lasso(stats, data.y, 0.95 * top);
  CHECK(!below.support().empty());
}

TEST_CASE("unpenalized fit equals least squares") {
  Dataset data = test::random_dataset(40, 3, 13);
  CenteredStats stats = center(data);
  MainEffectsFit fit = fit_lasso(stats, data.y, 0.0);
  Vector yc = data.y.array() - data.y.mean();
  Vector ols = (stats.Xc.transpose() * stats.Xc)
                   .ldlt()
                   .solve(stats.Xc.transpose() * yc);
  CHECK((fit.beta - ols).cwiseAbs().maxCoeff() <= 1e-8);
}

TEST_CASE("two-dimensional fit matches the grid-refined oracle") {
  Dataset data = test::random_dataset(25, 2, 19);
  CenteredStats stats = center(data);
  double top = lasso_lambda_max(stats, data.y);
  for (double frac : {0.6, 0.25, 0.05}) {
    double lam = frac * top;
    MainEffectsFit fit = fit_lasso(stats, data.y, lam);
    Vector oracle = grid_oracle_2d(stats, data.y, lam);
    CHECK((fit.beta - oracle).cwiseAbs().maxCoeff() <= 1e-5);
  }
}

TEST_CASE("kkt certificate and exact zeros") {
  Dataset data = test::random_dataset(60, 8, 23);
  CenteredStats stats = center(data);
  double top = lasso_lambda_max(stats, data.y);
  MainEffectsFit fit = fit_lasso(stats, data.y, 0.3 * top);
  CHECK(fit.converged);
  CHECK(fit.kkt <= 1e-6 * std::max(0.3 * top, 1.0));
  int exact_zero = 0;
  for (Index j = 0; j < 8; ++j)
    if (fit.beta(j) == 0.0) ++exact_zero;
  CHECK(exact_zero > 0);  // this penalty level must drop something
  CHECK(static_cast<Index>(fit.support().size()) + exact_zero == 8);
}

TEST_CASE("zero-variance columns keep a zero coefficient") {
  Dataset data = test::random_dataset(30, 4, 31);
  data.X.col(2).setConstant(1.0);
  CenteredStats stats = center(data);
  MainEffectsFit fit = fit_lasso(stats, data.y, 1e-4);
  CHECK(fit.beta(2) == 0.0);
}

TEST_CASE("warm and cold starts land on the same objective") {
  Dataset data = test::random_dataset(50, 6, 37);
  CenteredStats stats = center(data);
  double top = lasso_lambda_max(stats, data.y);
  Vector warm = Vector::Zero(6);
  for (double frac : {0.8, 0.3, 0.05}) {
    double lam = frac * top;
    MainEffectsFit hot = fit_lasso(stats, data.y, lam, &warm);
    warm = hot.beta;
    MainEffectsFit cold = fit_lasso(stats, data.y, lam);
    double oh = lasso_objective(stats, data.y, hot.beta, lam);
    double oc = lasso_objective(stats, data.y, cold.beta, lam);
    CHECK(std::abs(oh - oc) <= 1e-8 * std::max(1.0, std::abs(oc)));
  }
}

TEST_CASE("covariance-form and residual-form solvers agree") {
  Dataset data = test::random_dataset(35, 5, 43);
  CenteredStats stats = center(data);
  double lam = 0.2 * lasso_lambda_max(stats, data.y);
  MainEffectsFit cov_form = fit_lasso(stats, data.y, lam);  // p < 5000 path
  Vector yc = data.y.array() - data.y.mean();
  detail::CdResult res = detail::cd_lasso(stats.Xc, yc, lam);
  CHECK((cov_form.beta - res.coef).cwiseAbs().maxCoeff() <= 1e-9);
}

TEST_CASE("select_lasso finds a strong single signal") {
  Matrix X = test::gaussian_matrix(100, 12, 47);
  Rng rng(48);
  Vector y(100);
  for (Index i = 0; i < 100; ++i) y(i) = 4.0 * X(i, 0) + 0.2 * rng.normal();
  CenteredStats stats = center(Dataset{X, y});
  MainEffectsFit fit = select_lasso(stats, y, 10, 1);
  auto sup = fit.support();
  CHECK(std::find(sup.begin(), sup.end(), Index{0}) != sup.end());
}

TEST_CASE("select_lasso on pure noise keeps the support small") {
  // Monte-Carlo calibration: 20 fixed seeds, support <= 10 of 50 in at
  // least 90% of them.
  int ok = 0;
  for (std::uint64_t seed = 1; seed <= 20; ++seed) {
    Matrix X = test::gaussian_matrix(200, 50, 5000 + seed);
    Vector y = test::gaussian_vector(200, 9000 + seed);
    CenteredStats stats = center(Dataset{X, y});
    MainEffectsFit fit = select_lasso(stats, y, 10, seed);
    if (fit.support().size() <= 10) ++ok;
  }
  CHECK(ok >= 18);
}

TEST_CASE("leave-one-out errors match a direct oracle") {
  Dataset data = test::random_dataset(10, 2, 53);
  CenteredStats stats = center(data);
  auto [fit, curve] = select_lasso_cv(stats, data.y, 10, 3);

  for (size_t li = 0; li < curve.lambdas.size(); li += 7) {
    double lam = curve.lambdas[li];
    double err = 0.0;
    for (Index hold = 0; hold < 10; ++hold) {
      Matrix Xt(9, 2);
      Vector yt(9);
      Index r = 0;
      for (Index i = 0; i < 10; ++i) {
        if (i == hold) continue;
        Xt.row(r) = data.X.row(i);
        yt(r) = data.y(i);
        ++r;
      }
      CenteredStats st = center(Dataset{Xt, yt});
      MainEffectsFit f = fit_lasso(st, yt, lam);
      double pred = yt.mean() +
                    (data.X.row(hold).transpose() - st.xbar).dot(f.beta);
      err += (data.y(hold) - pred) * (data.y(hold) - pred) / 10.0;
    }
    CHECK(curve.cv_error[li] ==
          doctest::Approx(err).epsilon(1e-7));
  }
  CHECK(fit.lambda == curve.lambdas[curve.chosen]);
}

TEST_CASE("fold counts outside [2, n] are rejected") {
  Dataset data = test::random_dataset(12, 3, 59);
  CenteredStats stats = center(data);
  CHECK_THROWS_AS(select_lasso_cv(stats, data.y, 1, 0), InputError);
  CHECK_THROWS_AS(select_lasso_cv(stats, data.y, 13, 0), InputError);
  CHECK_NOTHROW(select_lasso_cv(stats, data.y, 12, 0));
  CHECK_NOTHROW(select_lasso_cv(stats, data.y, 2, 0));
}

TEST_CASE("select_lasso is deterministic in the seed") {
  Dataset data = test::random_dataset(40, 6, 61);
  CenteredStats stats = center(data);
  auto [f1, c1] = select_lasso_cv(stats, data.y, 5, 77);
  auto [f2, c2] = select_lasso_cv(stats, data.y, 5, 77);
  CHECK(f1.lambda == f2.lambda);
  CHECK((f1.beta - f2.beta).cwiseAbs().maxCoeff() == 0.0);
  CHECK(c1.chosen == c2.chosen);
  for (size_t i = 0; i < c1.cv_error.size(); ++i)
    CHECK(c1.cv_error[i] == c2.cv_error[i]);
}

TEST_CASE("cv curve ties break toward the larger lambda") {
  // A constant response makes every lambda solve to beta = 0 with equal
  // error, so the first (largest) grid point must win.
  Matrix X = test::gaussian_matrix(20, 3, 67);
  Vector y = Vector::Constant(20, 1.25);
  CenteredStats stats = center(Dataset{X, y});
  auto [fit, curve] = select_lasso_cv(stats, y, 4, 5);
  CHECK(curve.chosen == 0);
  CHECK(fit.beta.cwiseAbs().maxCoeff() == 0.0);
}

}  // TEST_SUITE
