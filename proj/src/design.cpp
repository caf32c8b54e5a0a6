#include "pie/design.hpp"

#include <cmath>

namespace pie {

std::pair<Index, Index> pair_from_index(Index idx) {
  Index k = static_cast<Index>((std::sqrt(8.0 * static_cast<double>(idx) + 1.0) - 1.0) / 2.0);
  while (pair_index(k + 1, 0) <= idx) ++k;
  while (pair_index(k, 0) > idx) --k;
  return {k, idx - pair_index(k, 0)};
}

Vector product_column(const Matrix& Xc, Index k, Index l) {
  Vector v = Xc.col(k).cwiseProduct(Xc.col(l));
  return v.array() - v.mean();
}

Matrix product_block(const Matrix& Xc) {
  const Index p = Xc.cols();
  Matrix out(Xc.rows(), p * (p + 1) / 2);
  for (Index k = 0; k < p; ++k)
    for (Index l = 0; l <= k; ++l)
      out.col(pair_index(k, l)) = product_column(Xc, k, l);
  return out;
}

}  // namespace pie
