#pragma once

#include "pie/types.hpp"

namespace pie {

// Pairwise product columns of a centered design, one per unordered pair
// l <= k (diagonal included), centered again so they can enter least-squares
// and lasso fits alongside the main-effect columns.

// Index of pair (k, l), l <= k, within the row-major lower triangle.
inline Index pair_index(Index k, Index l) { return k * (k + 1) / 2 + l; }

// Inverse of pair_index.
std::pair<Index, Index> pair_from_index(Index idx);

// Centered product column (Xc_k o Xc_l) - mean.
Vector product_column(const Matrix& Xc, Index k, Index l);

// n x p(p+1)/2 block of all centered product columns, pair_index layout.
Matrix product_block(const Matrix& Xc);

}  // namespace pie
