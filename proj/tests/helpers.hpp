#pragma once

#include <cstdint>
#include <utility>

#include "pie/moments.hpp"
#include "pie/rng.hpp"
#include "pie/types.hpp"

namespace pie::test {

// Row-major standard-normal draws for a fixed seed.
inline Matrix gaussian_matrix(Index n, Index p, std::uint64_t seed) {
  Rng rng(seed);
  Matrix X(n, p);
  for (Index i = 0; i < n; ++i)
    for (Index j = 0; j < p; ++j) X(i, j) = rng.normal();
  return X;
}

inline Vector gaussian_vector(Index n, std::uint64_t seed) {
  Rng rng(seed);
  Vector v(n);
  for (Index i = 0; i < n; ++i) v(i) = rng.normal();
  return v;
}

// Dataset with gaussian X and y = quadratic signal + noise; generic inputs
// for solver and moment tests that do not need a specific model shape.
inline Dataset random_dataset(Index n, Index p, std::uint64_t seed) {
  Dataset data;
  data.X = gaussian_matrix(n, p, seed);
  Rng rng(seed ^ 0x5bd1e995u);
  data.y.resize(n);
  for (Index i = 0; i < n; ++i) {
    double q = data.X(i, 0) * data.X(i, p > 1 ? 1 : 0);
    data.y(i) = q + 0.5 * data.X(i, p - 1) + 0.3 * rng.normal();
  }
  return data;
}

// Dataset whose Sigma is exactly the identity: orthogonal +/-1 design
// columns with zero means, n = 4, p = 2.
inline Dataset identity_sigma_dataset() {
  Dataset data;
  data.X.resize(4, 2);
  data.X << 1, 1, 1, -1, -1, 1, -1, -1;
  data.y = Vector::Zero(4);
  return data;
}

}  // namespace pie::test
