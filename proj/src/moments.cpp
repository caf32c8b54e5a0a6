#include "pie/moments.hpp"

#include <Eigen/SVD>
#include <cmath>
#include <iostream>

namespace pie {

void Dataset::validate() const {
  if (y.size() != X.rows()) {
    throw InputError("response length " + std::to_string(y.size()) +
                     " does not match row count " + std::to_string(X.rows()));
  }
  for (Index i = 0; i < X.rows(); ++i) {
    for (Index j = 0; j < X.cols(); ++j) {
      if (!std::isfinite(X(i, j))) {
        throw InputError("non-finite covariate at row " + std::to_string(i + 1) +
                         ", column " + std::to_string(j + 1));
      }
    }
    if (!std::isfinite(y(i))) {
      throw InputError("non-finite response at row " + std::to_string(i + 1));
    }
  }
}

SymmetricMatrix SymmetricMatrix::symmetrized(const Matrix& a) {
  SymmetricMatrix s(a.rows());
  for (Index k = 0; k < a.rows(); ++k) {
    s.m_(k, k) = a(k, k);
    for (Index l = 0; l < k; ++l) {
      double v = 0.5 * (a(k, l) + a(l, k));
      s.m_(k, l) = v;
      s.m_(l, k) = v;
    }
  }
  return s;
}

SymmetricMatrix SymmetricMatrix::from_symmetric(Matrix a) {
#ifndef NDEBUG
  for (Index k = 0; k < a.rows(); ++k)
    for (Index l = 0; l < k; ++l)
      if (a(k, l) != a(l, k)) std::abort();
#endif
  SymmetricMatrix s;
  s.m_ = std::move(a);
  return s;
}

std::vector<std::pair<Index, Index>> SymmetricMatrix::lower_support() const {
  std::vector<std::pair<Index, Index>> out;
  for (Index k = 0; k < dim(); ++k)
    for (Index l = 0; l <= k; ++l)
      if (m_(k, l) != 0.0) out.emplace_back(k, l);
  return out;
}

CenteredStats center(const Dataset& data) {
  data.validate();
  const Index n = data.n();
  if (n < 2) throw InputError("need at least 2 rows, got " + std::to_string(n));

  CenteredStats s;
  s.xbar = data.X.colwise().mean();
  s.ybar = data.y.mean();
  s.Xc = data.X.rowwise() - s.xbar.transpose();

  for (Index j = 0; j < s.Xc.cols(); ++j) {
    if (s.Xc.col(j).cwiseAbs().maxCoeff() == 0.0) {
      std::cerr << "warning: column " << j + 1 << " has zero variance\n";
    }
  }

  Eigen::BDCSVD<Matrix> svd(s.Xc, Eigen::ComputeThinV);
  s.U = svd.matrixV();
  s.d = svd.singularValues().array().square() / static_cast<double>(n);
  return s;
}

namespace {

// n^-1 Xc^T diag(w) Xc, symmetrized.  Shared by lambda_y and lambda_r so
// w = yc and w = residuals(beta = 0) produce identical bits.
SymmetricMatrix weighted_moment(const CenteredStats& stats, const Vector& w) {
  Matrix raw = stats.Xc.transpose() * (w.asDiagonal() * stats.Xc) /
               static_cast<double>(stats.n());
  return SymmetricMatrix::symmetrized(raw);
}

}  // namespace

SymmetricMatrix lambda_y(const CenteredStats& stats, const Vector& y) {
  if (y.size() != stats.n()) {
    throw InputError("response length " + std::to_string(y.size()) +
                     " does not match centered design rows " +
                     std::to_string(stats.n()));
  }
  Vector yc = y.array() - y.mean();
  return weighted_moment(stats, yc);
}

Vector residuals(const CenteredStats& stats, const Vector& y,
                 const Vector& beta) {
  if (y.size() != stats.n()) {
    throw InputError("response length does not match centered design rows");
  }
  if (beta.size() != stats.p()) {
    throw InputError("beta length " + std::to_string(beta.size()) +
                     " does not match column count " + std::to_string(stats.p()));
  }
  return (y.array() - y.mean()).matrix() - stats.Xc * beta;
}

SymmetricMatrix lambda_r(const CenteredStats& stats, const Vector& y,
                         const Vector& beta) {
  return weighted_moment(stats, residuals(stats, y, beta));
}

}  // namespace pie
