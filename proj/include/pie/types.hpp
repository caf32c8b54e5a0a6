#pragma once

#include <Eigen/Dense>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace pie {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;
using Index = Eigen::Index;

// Raised for malformed user input (bad CSV cells, non-finite values,
// inconsistent shapes).  CLI maps this to exit code 2.
struct InputError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Covariate rows paired with a response.  X is n x p, y has length n.
struct Dataset {
  Matrix X;
  Vector y;

  Index n() const { return X.rows(); }
  Index p() const { return X.cols(); }

  // Throws InputError naming the first offending entry (1-based) when a
  // value is non-finite or when y.size() != X.rows().
  void validate() const;
};

// Dense symmetric matrix with exact (k,l) == (l,k) equality.  Off-diagonal
// writes go through set(), which mirrors the entry; symmetrized() averages
// an almost-symmetric input once so last-ulp BLAS drift cannot leak in.
class SymmetricMatrix {
 public:
  SymmetricMatrix() = default;
  explicit SymmetricMatrix(Index p) : m_(Matrix::Zero(p, p)) {}

  // (a + a^T) / 2, entry by entry, so the result is exactly symmetric.
  static SymmetricMatrix symmetrized(const Matrix& a);

  // Adopts a matrix that is already exactly symmetric (checked in debug).
  static SymmetricMatrix from_symmetric(Matrix a);

  Index dim() const { return m_.rows(); }
  double operator()(Index k, Index l) const { return m_(k, l); }

  void set(Index k, Index l, double v) {
    m_(k, l) = v;
    m_(l, k) = v;
  }

  const Matrix& mat() const { return m_; }

  double max_abs() const { return dim() == 0 ? 0.0 : m_.cwiseAbs().maxCoeff(); }

  // Nonzero positions in the lower triangle, l <= k, row-major order.
  std::vector<std::pair<Index, Index>> lower_support() const;

 private:
  Matrix m_;
};

}  // namespace pie
