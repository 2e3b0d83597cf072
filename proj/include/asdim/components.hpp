#pragma once

// Lambda-components: classes of the relation "joined by a chain of steps of
// length <= lambda". Inside one lambda-disjoint family any two points at
// distance <= lambda share a cluster, so a point set can form a single
// family exactly when each of its lambda-components has diameter <= D.

#include <algorithm>
#include <numeric>
#include <span>
#include <vector>

#include "asdim/metric_space.hpp"

namespace asdim {

struct ComponentPartition {
  /// Blocks sorted by smallest member; members ascending.
  std::vector<std::vector<PointIndex>> blocks;
  std::vector<Distance> diameters;

  Distance max_diameter() const {
    return diameters.empty() ? 0 : *std::max_element(diameters.begin(), diameters.end());
  }
};

namespace detail {

class DisjointSets {
 public:
  explicit DisjointSets(std::size_t n) : parent_(n), rank_(n, 0) {
    std::iota(parent_.begin(), parent_.end(), std::size_t{0});
  }

  std::size_t find(std::size_t x) {
    while (parent_[x] != x) {
      parent_[x] = parent_[parent_[x]];
      x = parent_[x];
    }
    return x;
  }

  void unite(std::size_t a, std::size_t b) {
    a = find(a);
    b = find(b);
    if (a == b) return;
    if (rank_[a] < rank_[b]) std::swap(a, b);
    parent_[b] = a;
    if (rank_[a] == rank_[b]) ++rank_[a];
  }

 private:
  std::vector<std::size_t> parent_;
  std::vector<unsigned char> rank_;
};

}  // namespace detail

inline ComponentPartition lambda_components(const FiniteMetricSpace& space,
                                            std::span<const PointIndex> subset, Distance lambda) {
  std::vector<PointIndex> points(subset.begin(), subset.end());
  std::sort(points.begin(), points.end());
  points.erase(std::unique(points.begin(), points.end()), points.end());
  if (!points.empty() && points.back() >= space.size())
    throw MetricError("lambda_components: point index out of range");

  const std::size_t k = points.size();
  detail::DisjointSets sets(k);
  // Pairwise scan for small subsets; neighbor enumeration otherwise.
  if (k * k <= space.size() * 64 || space.size() <= kMemoizeLimit) {
    for (std::size_t a = 0; a < k; ++a)
      for (std::size_t b = a + 1; b < k; ++b)
        if (space.distance(points[a], points[b]) <= lambda) sets.unite(a, b);
  } else {
    std::vector<std::size_t> slot(space.size(), k);
    for (std::size_t a = 0; a < k; ++a) slot[points[a]] = a;
    for (std::size_t a = 0; a < k; ++a)
      for (PointIndex y : space.neighbors_within(points[a], lambda))
        if (slot[y] != k) sets.unite(a, slot[y]);
  }

  std::vector<std::size_t> block_of(k, k);
  ComponentPartition out;
  for (std::size_t a = 0; a < k; ++a) {
    const std::size_t root = sets.find(a);
    if (block_of[root] == k) {
      block_of[root] = out.blocks.size();
      out.blocks.emplace_back();
    }
    out.blocks[block_of[root]].push_back(points[a]);
  }
  out.diameters.reserve(out.blocks.size());
  for (const auto& block : out.blocks) {
    Distance d = 0;
    for (std::size_t i = 0; i < block.size(); ++i)
      for (std::size_t j = i + 1; j < block.size(); ++j) d = std::max(d, space.distance(block[i], block[j]));
    out.diameters.push_back(d);
  }
  return out;
}

inline ComponentPartition lambda_components(const FiniteMetricSpace& space, Distance lambda) {
  std::vector<PointIndex> all(space.size());
  std::iota(all.begin(), all.end(), PointIndex{0});
  return lambda_components(space, all, lambda);
}

/// True iff every lambda-component of subset has diameter <= control.
inline bool is_valid_color_class(const FiniteMetricSpace& space, std::span<const PointIndex> subset,
                                 Distance lambda, Distance control) {
  return lambda_components(space, subset, lambda).max_diameter() <= control;
}

}  // namespace asdim
