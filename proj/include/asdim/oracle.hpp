#pragma once

// Brute-force reference for di_(lambda,D) on spaces of at most 10 points.
// Enumerates every set partition into at most n+1 labelled-by-first-use
// classes, builds clusters by flood fill inside each class and asks
// validate_cover. Shares no feasibility logic with the solver.

#include <cstddef>
#include <vector>

#include "asdim/cover.hpp"
#include "asdim/metric_space.hpp"

namespace asdim {

inline constexpr std::size_t kBruteforceLimit = 10;

namespace detail {

inline Family flood_fill_clusters(const FiniteMetricSpace& space, const std::vector<PointIndex>& cls,
                                  Distance lambda) {
  Family family;
  std::vector<char> seen(cls.size(), 0);
  for (std::size_t s = 0; s < cls.size(); ++s) {
    if (seen[s]) continue;
    Cluster cluster;
    std::vector<std::size_t> stack{s};
    seen[s] = 1;
    while (!stack.empty()) {
      const std::size_t a = stack.back();
      stack.pop_back();
      cluster.push_back(cls[a]);
      for (std::size_t b = 0; b < cls.size(); ++b)
        if (!seen[b] && space.distance(cls[a], cls[b]) <= lambda) {
          seen[b] = 1;
          stack.push_back(b);
        }
    }
    family.push_back(std::move(cluster));
  }
  return family;
}

inline bool some_partition_validates(const FiniteMetricSpace& space, ScalePair scale,
                                     std::size_t classes) {
  const std::size_t n = space.size();
  // Restricted growth string: label[0] = 0, label[i] <= 1 + max(label[0..i-1]).
  std::vector<std::size_t> label(n, 0);
  std::vector<std::size_t> prefix_max(n, 0);
  while (true) {
    std::vector<std::vector<PointIndex>> members(classes);
    for (PointIndex x = 0; x < n; ++x) members[label[x]].push_back(x);
    ScaledCover cover{scale, {}};
    for (const auto& cls : members) cover.families.push_back(flood_fill_clusters(space, cls, scale.lambda));
    if (validate_cover(space, cover).ok()) return true;

    // Next restricted growth string with values < classes.
    std::size_t i = n;
    while (i > 1) {
      --i;
      const std::size_t cap = std::min(classes - 1, prefix_max[i - 1] + 1);
      if (label[i] < cap) {
        ++label[i];
        prefix_max[i] = std::max(prefix_max[i - 1], label[i]);
        for (std::size_t j = i + 1; j < n; ++j) {
          label[j] = 0;
          prefix_max[j] = prefix_max[i];
        }
        break;
      }
      if (i == 1) return false;
    }
    if (n <= 1) return false;
  }
}

}  // namespace detail

/// Least n admitting a valid cover by n+1 families. Throws MetricError for
/// spaces with more than kBruteforceLimit points.
inline std::size_t dim_at_scale_bruteforce(const FiniteMetricSpace& space, ScalePair scale) {
  if (space.size() > kBruteforceLimit)
    throw MetricError("dim_at_scale_bruteforce: at most " + std::to_string(kBruteforceLimit) +
                      " points supported");
  if (space.size() <= 1) return 0;
  for (std::size_t n = 0;; ++n)
    if (detail::some_partition_validates(space, scale, n + 1)) return n;
}

}  // namespace asdim
