#pragma once

#include "pie/types.hpp"

namespace pie {

// Centered design plus the spectral pieces the solver reuses.  With
// Xc = W S V^T (thin SVD), Sigma = Xc^T Xc / n = U diag(d) U^T where
// U = V and d_k = s_k^2 / n.
struct CenteredStats {
  Vector xbar;
  double ybar = 0.0;
  Matrix Xc;  // n x p
  Matrix U;   // p x m, orthonormal columns
  Vector d;   // m eigenvalues of Sigma, descending, >= 0

  Index n() const { return Xc.rows(); }
  Index p() const { return Xc.cols(); }
  Index m() const { return d.size(); }

  // Sigma * A without forming Sigma: U diag(d) U^T A.
  Matrix sigma_product(const Matrix& a) const {
    return U * (d.asDiagonal() * (U.transpose() * a));
  }

  // Dense Sigma; fine for small p, avoid in solver loops.
  Matrix sigma() const { return U * d.asDiagonal() * U.transpose(); }
};

// Centers X and y and factors Xc.  Requires n >= 2; zero-variance columns
// are allowed but reported on stderr.
CenteredStats center(const Dataset& data);

// Lambda_y = n^-1 sum_i (Y_i - Ybar) (x_i - xbar)(x_i - xbar)^T,
// symmetrized exactly.  y must have length stats.n().
SymmetricMatrix lambda_y(const CenteredStats& stats, const Vector& y);

// r_i = (Y_i - Ybar) - (x_i - xbar)^T beta.
Vector residuals(const CenteredStats& stats, const Vector& y,
                 const Vector& beta);

// Lambda_r: lambda_y with residuals in place of centered responses.
// beta = 0 reproduces lambda_y bit for bit.
SymmetricMatrix lambda_r(const CenteredStats& stats, const Vector& y,
                         const Vector& beta);

}  // namespace pie
