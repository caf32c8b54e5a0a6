#include <cmath>
#include <cstdlib>
#include <stdexcept>
#include <string>
#include <vector>

#include "doctest.h"
#include "helpers.hpp"
#include "pie/simulation.hpp"

using namespace pie;

namespace {

CovariateLaw law_of(LawKind kind, double ar = 0.5) {
  CovariateLaw law;
  law.kind = kind;
  law.ar = ar;
  return law;
}

Matrix sample_covariance(const Matrix& X) {
  Matrix Xc = X.rowwise() - X.colwise().mean();
  return Xc.transpose() * Xc / static_cast<double>(X.rows());
}

double sample_kurtosis(const Vector& v) {
  double m = v.mean();
  double m2 = (v.array() - m).square().mean();
  double m4 = (v.array() - m).pow(4).mean();
  return m4 / (m2 * m2);
}

// Column of raw innovations: with p = 1 the mixing matrix is the scalar 1.
Vector innovations(LawKind kind, Index n, std::uint64_t seed) {
  return gen_covariates(law_of(kind), n, 1, seed).col(0);
}

const std::vector<std::pair<Index, Index>> kSharedPairs = {
    {5, 0}, {5, 5}, {9, 5}};

struct ScopedEnv {
  std::string name;
  std::string old;
  bool had = false;
  ScopedEnv(const char* n, const char* value) : name(n) {
    if (const char* cur = std::getenv(n)) {
      had = true;
      old = cur;
    }
    setenv(n, value, 1);
  }
  ~ScopedEnv() {
    if (had)
      setenv(name.c_str(), old.c_str(), 1);
    else
      unsetenv(name.c_str());
  }
};

}  // namespace

TEST_SUITE("simulation") {

TEST_CASE("law kurtosis constants") {
  CHECK(law_of(LawKind::gaussian_ar).kurtosis() == 3.0);
  CHECK(law_of(LawKind::gaussian_identity).kurtosis() == 3.0);
  CHECK(law_of(LawKind::factor_uniform).kurtosis() == 1.8);
  CHECK(law_of(LawKind::factor_t5).kurtosis() == 9.0);
  CHECK(law_of(LawKind::factor_laplace).kurtosis() == 6.0);
}

TEST_CASE("name/parse round trips") {
  for (LawKind k : {LawKind::gaussian_ar, LawKind::gaussian_identity,
                    LawKind::factor_uniform, LawKind::factor_t5,
                    LawKind::factor_laplace}) {
    auto parsed = parse_law(law_name(k));
    REQUIRE(parsed.has_value());
    CHECK(*parsed == k);
  }
  CHECK(!parse_law("cauchy").has_value());

  for (ModelKind k : {ModelKind::m1, ModelKind::m2, ModelKind::m3,
                      ModelKind::m4, ModelKind::robustness}) {
    auto parsed = parse_model(model_name(k));
    REQUIRE(parsed.has_value());
    CHECK(*parsed == k);
  }
  CHECK(!parse_model("m5").has_value());

  for (Method m : {Method::piey, Method::pier, Method::all_pairs,
                   Method::oracle}) {
    auto parsed = parse_method(method_name(m));
    REQUIRE(parsed.has_value());
    CHECK(*parsed == m);
  }
  CHECK(parse_method("all-pairs") == Method::all_pairs);
  CHECK(!parse_method("ridge").has_value());
}

TEST_CASE("gen_covariates guards") {
  CHECK_THROWS_AS(gen_covariates(law_of(LawKind::gaussian_ar), 0, 3, 1),
                  std::invalid_argument);
  CHECK_THROWS_AS(gen_covariates(law_of(LawKind::gaussian_ar), 3, 0, 1),
                  std::invalid_argument);
}

TEST_CASE("ar = 0 gives uncorrelated columns") {
  Matrix X = gen_covariates(law_of(LawKind::gaussian_ar, 0.0), 10000, 2, 501);
  Matrix S = sample_covariance(X);
  double rho = S(0, 1) / std::sqrt(S(0, 0) * S(1, 1));
  CHECK(std::abs(rho) <= 0.1);
}

TEST_CASE("innovations have unit variance under every law") {
  const Index n = 100000;
  std::uint64_t seed = 503;
  for (LawKind kind : {LawKind::gaussian_identity, LawKind::factor_uniform,
                       LawKind::factor_t5, LawKind::factor_laplace}) {
    Vector z = innovations(kind, n, seed++);
    double var = (z.array() - z.mean()).square().mean();
    CHECK_MESSAGE(std::abs(var - 1.0) <= 0.03, law_name(kind));
  }
}

TEST_CASE("innovation tails match the law") {
  const Index n = 1000000;
  double uni = sample_kurtosis(innovations(LawKind::factor_uniform, n, 521));
  CHECK(uni == doctest::Approx(1.8).epsilon(0.03));

  double lap = sample_kurtosis(innovations(LawKind::factor_laplace, n, 523));
  CHECK(lap == doctest::Approx(6.0).epsilon(0.05));

  // t(5) kurtosis is 9 but the estimate has heavy tails of its ownamplitude;
  // only bracket it.
  double t5 = sample_kurtosis(innovations(LawKind::factor_t5, n, 527));
  CHECK(t5 >= 6.0);
  CHECK(t5 <= 20.0);

  double gauss = sample_kurtosis(innovations(LawKind::gaussian_identity, n, 529));
  CHECK(gauss == doctest::Approx(3.0).epsilon(0.03));
}

TEST_CASE("mixing reproduces the AR covariance") {
  const double ar = 0.5;
  auto target = [&](Index p) {
    Matrix S(p, p);
    for (Index k = 0; k < p; ++k)
      for (Index l = 0; l < p; ++l) S(k, l) = std::pow(ar, std::abs(k - l));
    return S;
  };

  Matrix Xg = gen_covariates(law_of(LawKind::gaussian_ar, ar), 100000, 20, 541);
  CHECK((sample_covariance(Xg) - target(20)).cwiseAbs().maxCoeff() <= 0.03);

  // Factor laws share the covariance; only the innovation law differs.
  Matrix Xu = gen_covariates(law_of(LawKind::factor_uniform, ar), 100000, 10, 543);
  CHECK((sample_covariance(Xu) - target(10)).cwiseAbs().maxCoeff() <= 0.03);

  Matrix Xl = gen_covariates(law_of(LawKind::factor_laplace, ar), 100000, 10, 547);
  CHECK((sample_covariance(Xl) - target(10)).cwiseAbs().maxCoeff() <= 0.03);

  Matrix Xi = gen_covariates(law_of(LawKind::gaussian_identity, ar), 100000, 10, 549);
  CHECK((sample_covariance(Xi) - Matrix::Identity(10, 10)).cwiseAbs().maxCoeff() <=
        0.03);
}

TEST_CASE("gen_response plug-in values, noiseless") {
  Matrix X = Matrix::Zero(3, 12);
  X(0, 0) = 1.0;
  X(0, 5) = 2.0;
  X(0, 9) = 3.0;
  // Shared quadratic at row 0: 2*1*2 + 2^2 + 2*2*3 = 20.
  auto y4 = gen_response(ModelKind::m4, 3, X, 0.0, 1).first;
  CHECK(y4(0) == 20.0);
  CHECK(y4(1) == 0.0);
  CHECK(y4(2) == 0.0);

  auto y1 = gen_response(ModelKind::m1, 3, X, 0.0, 1).first;
  CHECK(y1(0) == 26.0);  // mains 1 + 2 + 3 on X1, X6, X10

  auto y2 = gen_response(ModelKind::m2, 3, X, 0.0, 1).first;
  CHECK(y2(0) == 22.0);  // main on X6 only

  auto y3 = gen_response(ModelKind::m3, 3, X, 0.0, 1).first;
  CHECK(y3(0) == 21.0);  // mains on X1, X2; X2 is zero here
}

TEST_CASE("model truths") {
  Matrix X = pie::test::gaussian_matrix(5, 40, 557);

  auto check_shared_omega = [&](const ModelTruth& t) {
    CHECK(t.omega.lower_support() == kSharedPairs);
    for (auto [k, l] : kSharedPairs) CHECK(t.omega(k, l) == 1.0);
  };

  auto t1 = gen_response(ModelKind::m1, 3, X, 1.0, 2).second;
  check_shared_omega(t1);
  CHECK(t1.main_support == std::vector<Index>{0, 5, 9});
  for (Index j : t1.main_support) CHECK(t1.beta(j) == 1.0);

  auto t2 = gen_response(ModelKind::m2, 3, X, 1.0, 2).second;
  check_shared_omega(t2);
  CHECK(t2.main_support == std::vector<Index>{5});

  auto t3 = gen_response(ModelKind::m3, 3, X, 1.0, 2).second;
  CHECK(t3.main_support == std::vector<Index>{0, 1});

  auto t4 = gen_response(ModelKind::m4, 3, X, 1.0, 2).second;
  check_shared_omega(t4);
  CHECK(t4.main_support.empty());
  CHECK(t4.beta.cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("robustness model weights and extra mains") {
  Matrix X = pie::test::gaussian_matrix(5, 40, 559);
  const int d = 5;
  auto truth = gen_response(ModelKind::robustness, d, X, 1.0, 3).second;

  CHECK(truth.omega.lower_support() == kSharedPairs);
  REQUIRE(truth.main_support.size() == static_cast<size_t>(d));
  double w = 1.0 / std::sqrt(static_cast<double>(d));
  int extras = 0;
  for (Index j : truth.main_support) {
    CHECK(truth.beta(j) == w);
    if (j != 0 && j != 5 && j != 9) {
      CHECK(j >= 10);
      ++extras;
    }
  }
  CHECK(extras == d - 3);

  // d = 3 needs no extras and reduces to the base columns.
  auto base = gen_response(ModelKind::robustness, 3, X, 1.0, 3).second;
  CHECK(base.main_support == std::vector<Index>{0, 5, 9});

  CHECK_THROWS_AS(gen_response(ModelKind::robustness, 2, X, 1.0, 3),
                  std::invalid_argument);
  Matrix narrow = pie::test::gaussian_matrix(5, 11, 561);
  CHECK_THROWS_AS(gen_response(ModelKind::robustness, 5, narrow, 1.0, 3),
                  std::invalid_argument);
  CHECK_THROWS_AS(gen_response(ModelKind::m1, 3, Matrix::Zero(4, 9), 1.0, 3),
                  std::invalid_argument);
}

TEST_CASE("make_instance is deterministic and X ignores d") {
  SimulationSpec spec;
  spec.model = ModelKind::robustness;
  spec.n = 30;
  spec.p = 40;
  spec.d = 3;
  spec.base_seed = 7;

  Instance a = make_instance(spec, 2);
  Instance b = make_instance(spec, 2);
  CHECK(a.data.X == b.data.X);
  CHECK(a.data.y == b.data.y);

  SimulationSpec wide = spec;
  wide.d = 24;
  Instance c = make_instance(wide, 2);
  CHECK(a.data.X == c.data.X);  // covariate stream does not depend on d
  CHECK(a.truth.main_support.size() == 3);
  CHECK(c.truth.main_support.size() == 24);

  Instance other = make_instance(spec, 3);
  CHECK(a.data.X != other.data.X);
}

TEST_CASE("run_replications: noiseless oracle is exact") {
  SimulationSpec spec;
  // m1's mains cover the columns Omega touches, so the centered refit can
  // represent the raw-coordinate response exactly.
  spec.model = ModelKind::m1;
  spec.n = 80;
  spec.p = 12;
  spec.replications = 1;
  spec.noise_sd = 0.0;
  spec.base_seed = 11;

  auto summary = run_replications(spec, {Method::oracle});
  REQUIRE(summary.runs.size() == 1);
  const MethodRun& run = summary.runs[0];
  CHECK(run.stats.completed == 1);
  CHECK(run.stats.mean_rate == 100.0);
  CHECK(run.stats.mean_loss <= 1e-6);
  CHECK(run.stats.mean_size == 3.0);
  CHECK(run.failures.empty());
}

TEST_CASE("run_replications is deterministic and thread-count invariant") {
  SimulationSpec spec;
  spec.model = ModelKind::m4;
  spec.n = 60;
  spec.p = 10;
  spec.replications = 3;
  spec.noise_sd = 0.5;
  spec.base_seed = 13;

  auto serial = [&] {
    ScopedEnv env("PIE_THREADS", "1");
    return run_replications(spec, {Method::piey, Method::oracle});
  }();
  auto threaded = [&] {
    ScopedEnv env("PIE_THREADS", "2");
    return run_replications(spec, {Method::piey, Method::oracle});
  }();
  auto again = [&] {
    ScopedEnv env("PIE_THREADS", "1");
    return run_replications(spec, {Method::piey, Method::oracle});
  }();

  for (const auto& other : {threaded, again}) {
    REQUIRE(other.runs.size() == serial.runs.size());
    for (size_t mi = 0; mi < serial.runs.size(); ++mi) {
      const MethodRun& a = serial.runs[mi];
      const MethodRun& b = other.runs[mi];
      CHECK(a.stats.mean_rate == b.stats.mean_rate);
      CHECK(a.stats.mean_loss == b.stats.mean_loss);
      CHECK(a.stats.mean_size == b.stats.mean_size);
      CHECK(a.max_kkt_ratio == b.max_kkt_ratio);
      REQUIRE(a.reps.size() == b.reps.size());
      for (size_t r = 0; r < a.reps.size(); ++r) {
        REQUIRE(a.reps[r].has_value() == b.reps[r].has_value());
        if (!a.reps[r]) continue;
        CHECK(a.reps[r]->rate == b.reps[r]->rate);
        CHECK(a.reps[r]->loss == b.reps[r]->loss);
        CHECK(a.reps[r]->size == b.reps[r]->size);
      }
    }
  }

  // Converged path fits all sit inside the stationarity gate.
  CHECK(serial.runs[0].max_kkt_ratio <= 1.0);
  CHECK(serial.runs[0].max_kkt_ratio > 0.0);

  CHECK_THROWS_AS(run_replications(SimulationSpec{.replications = 0}, {Method::piey}),
                  std::invalid_argument);
}

TEST_CASE("run_replications records per-replication failures") {
  SimulationSpec spec;
  spec.model = ModelKind::m4;
  spec.n = 20;
  spec.p = 301;  // beyond the all-pairs guard
  spec.replications = 2;
  spec.base_seed = 17;

  auto summary = run_replications(spec, {Method::all_pairs});
  const MethodRun& run = summary.runs[0];
  CHECK(run.stats.completed == 0);
  CHECK(run.failures.size() == 2);
  for (const auto& r : run.reps) CHECK(!r.has_value());
  for (const auto& msg : run.failures)
    CHECK(msg.find("all_pairs") != std::string::npos);
}

TEST_CASE("noise_augment widens the design") {
  SimulationSpec spec;
  spec.model = ModelKind::m4;
  spec.n = 50;
  spec.p = 12;
  spec.base_seed = 19;
  Dataset base = make_instance(spec, 0).data;

  AugmentedData exp1 = noise_augment(base, 23, 1);
  CHECK(exp1.data.p() == base.p() + 100);
  CHECK(exp1.data.X.leftCols(base.p()) == base.X);
  CHECK(exp1.data.y == base.y);
  CHECK(exp1.planted.empty());

  // First 50 noise columns are normal draws, last 50 bounded uniforms.
  Matrix noise = exp1.data.X.rightCols(100);
  CHECK(noise.rightCols(50).cwiseAbs().maxCoeff() <= std::sqrt(3.0));
  CHECK(noise.leftCols(50).cwiseAbs().maxCoeff() > std::sqrt(3.0));

  AugmentedData exp2 = noise_augment(base, 23, 2);
  CHECK(exp2.data.X == exp1.data.X);  // same noise stream, same seed
  const Index p = base.p();
  REQUIRE(exp2.planted ==
          std::vector<std::pair<Index, Index>>{{p + 1, p}, {p + 50, p + 49}});
  Vector shift = exp2.data.y - base.y;
  Vector expected =
      0.5 * exp2.data.X.col(p).cwiseProduct(exp2.data.X.col(p + 1)) +
      0.5 * exp2.data.X.col(p + 49).cwiseProduct(exp2.data.X.col(p + 50));
  // (y + s) - y only recovers s up to rounding in y's ulp.
  CHECK((shift - expected).cwiseAbs().maxCoeff() <= 1e-12);

  CHECK_THROWS_AS(noise_augment(base, 23, 3), std::invalid_argument);
  CHECK_THROWS_AS(noise_augment(base, 23, 0), std::invalid_argument);
}

TEST_CASE("frequency_matrix counts support hits symmetrically") {
  SymmetricMatrix a(4), b(4), c(4);
  a.set(1, 0, 0.5);
  a.set(2, 2, -1.0);
  b.set(1, 0, -2.0);

  Eigen::MatrixXi freq = frequency_matrix({a, b, c}, 4);
  CHECK(freq(1, 0) == 2);
  CHECK(freq(0, 1) == 2);
  CHECK(freq(2, 2) == 1);
  CHECK(freq.sum() == 5);  // mirrored pair twice, diagonal once
  CHECK(freq == freq.transpose().eval());

  CHECK_THROWS_AS(frequency_matrix({SymmetricMatrix(3)}, 4),
                  std::invalid_argument);
}

}  // TEST_SUITE
