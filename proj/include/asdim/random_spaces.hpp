#pragma once

// Seeded random metric spaces: a random symmetric table of positive weights
// closed under shortest paths. Only raw engine output is used (no standard
// distributions), so streams are identical across standard libraries.

#include <algorithm>
#include <numeric>
#include <random>
#include <vector>

#include "asdim/metric_space.hpp"

namespace asdim {

using Rng = std::mt19937_64;

inline std::uint64_t uniform_below(Rng& rng, std::uint64_t bound) { return rng() % bound; }

/// Random metric on `size` points with edge weights drawn from [1, max_weight]
/// before the shortest-path closure.
inline FiniteMetricSpace random_metric_space(Rng& rng, std::size_t size, std::int64_t max_weight) {
  std::vector<std::vector<std::int64_t>> d(size, std::vector<std::int64_t>(size, 0));
  for (std::size_t i = 0; i < size; ++i)
    for (std::size_t j = i + 1; j < size; ++j)
      d[i][j] = d[j][i] = 1 + static_cast<std::int64_t>(uniform_below(rng, static_cast<std::uint64_t>(max_weight)));
  for (std::size_t k = 0; k < size; ++k)
    for (std::size_t i = 0; i < size; ++i)
      for (std::size_t j = 0; j < size; ++j) d[i][j] = std::min(d[i][j], d[i][k] + d[k][j]);
  return from_matrix(d, "random");
}

/// Uniform random permutation of 0..n-1 (Fisher-Yates on raw engine output).
inline std::vector<PointIndex> random_permutation(Rng& rng, std::size_t n) {
  std::vector<PointIndex> perm(n);
  std::iota(perm.begin(), perm.end(), PointIndex{0});
  for (std::size_t i = n; i > 1; --i) std::swap(perm[i - 1], perm[uniform_below(rng, i)]);
  return perm;
}

/// The space with point i relabelled as perm[i].
inline FiniteMetricSpace relabel(const FiniteMetricSpace& space, const std::vector<PointIndex>& perm) {
  const std::size_t n = space.size();
  std::vector<std::vector<std::int64_t>> d(n, std::vector<std::int64_t>(n, 0));
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j)
      d[perm[i]][perm[j]] = static_cast<std::int64_t>(space.distance(i, j));
  return from_matrix(d, "relabel(" + space.label() + ")");
}

}  // namespace asdim
