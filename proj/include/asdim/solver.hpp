#pragma once

// Exact computation of the dimension at scale di_(lambda,D).
//
// di_(lambda,D)(X) <= n iff the points can be split into n+1 color classes
// whose lambda-components all have diameter <= D; the clusters of a family
// are then the lambda-components of its class. dim_le() searches for such a
// coloring by backtracking with incrementally maintained components, so an
// infeasible answer is an exhausted search and a feasible one comes with a
// certificate cover.

#include <algorithm>
#include <cstdint>
#include <cstdlib>
#include <numeric>
#include <optional>
#include <string>
#include <vector>

#include "asdim/components.hpp"
#include "asdim/cover.hpp"
#include "asdim/metric_space.hpp"

namespace asdim {

inline constexpr std::uint64_t kDefaultNodeBudget = 100'000'000;

struct SolverOptions {
  std::uint64_t node_budget = kDefaultNodeBudget;
};

/// Reads ASDIM_NODE_BUDGET if set, otherwise the default budget.
inline SolverOptions solver_options_from_env() {
  SolverOptions options;
  if (const char* env = std::getenv("ASDIM_NODE_BUDGET")) {
    char* end = nullptr;
    const unsigned long long v = std::strtoull(env, &end, 10);
    if (end != env && *end == '\0' && v > 0) options.node_budget = v;
  }
  return options;
}

enum class Outcome { feasible, infeasible, unknown };

inline const char* to_string(Outcome o) {
  switch (o) {
    case Outcome::feasible: return "feasible";
    case Outcome::infeasible: return "infeasible";
    case Outcome::unknown: return "unknown";
  }
  return "?";
}

struct Decision {
  Outcome outcome = Outcome::unknown;
  std::optional<ScaledCover> certificate;
  std::uint64_t nodes = 0;
};

namespace detail {

/// Single-family cover by lambda-components; valid iff it validates.
inline ScaledCover component_cover(const ComponentPartition& parts, ScalePair scale) {
  ScaledCover cover{scale, {Family(parts.blocks.begin(), parts.blocks.end())}};
  return cover;
}

class ClusteredColoringSearch {
 public:
  ClusteredColoringSearch(const FiniteMetricSpace& space, ScalePair scale, std::size_t colors,
                          std::uint64_t budget)
      : space_(space), scale_(scale), colors_(colors), budget_(budget), n_(space.size()) {
    close_.resize(n_);
    for (PointIndex v = 0; v < n_; ++v) close_[v] = space_.neighbors_within(v, scale_.lambda);
    order_.resize(n_);
    std::iota(order_.begin(), order_.end(), PointIndex{0});
    std::stable_sort(order_.begin(), order_.end(), [&](PointIndex a, PointIndex b) {
      return close_[a].size() > close_[b].size();
    });
    color_of_.assign(n_, -1);
    comp_of_.assign(n_, -1);
  }

  Outcome run() {
    if (n_ == 0) return Outcome::feasible;
    const auto result = descend(0, 0);
    if (result == Step::found) return Outcome::feasible;
    if (result == Step::budget) return Outcome::unknown;
    return Outcome::infeasible;
  }

  std::uint64_t nodes() const { return nodes_; }

  /// Valid after run() returned feasible.
  ScaledCover certificate() const {
    ScaledCover cover{scale_, std::vector<Family>(colors_)};
    for (const auto& comp : comps_) {
      if (!comp.alive) continue;
      Cluster c = comp.members;
      std::sort(c.begin(), c.end());
      cover.families[static_cast<std::size_t>(comp.color)].push_back(std::move(c));
    }
    for (auto& family : cover.families)
      std::sort(family.begin(), family.end(),
                [](const Cluster& a, const Cluster& b) { return a.front() < b.front(); });
    return cover;
  }

 private:
  enum class Step { found, exhausted, budget };

  struct Component {
    std::vector<PointIndex> members;
    Distance diameter = 0;
    int color = 0;
    bool alive = true;
  };

  struct Undo {
    PointIndex point;
    std::vector<int> merged;
  };

  Step descend(std::size_t depth, std::size_t used) {
    if (depth == n_) return Step::found;
    const PointIndex v = order_[depth];
    // Color symmetry: a fresh color is only ever the lowest unused one.
    const std::size_t limit = std::min(colors_, used + 1);
    for (std::size_t c = 0; c < limit; ++c) {
      if (++nodes_ > budget_) return Step::budget;
      if (!place(v, static_cast<int>(c))) continue;
      const Step s = descend(depth + 1, std::max(used, c + 1));
      if (s != Step::exhausted) return s;
      unplace();
    }
    return Step::exhausted;
  }

  bool place(PointIndex v, int color) {
    std::vector<int> merged;
    for (PointIndex u : close_[v]) {
      if (color_of_[u] != color) continue;
      const int id = comp_of_[u];
      if (std::find(merged.begin(), merged.end(), id) == merged.end()) merged.push_back(id);
    }
    const Distance bound = scale_.control;
    Distance diam = 0;
    for (std::size_t a = 0; a < merged.size(); ++a) {
      const Component& ca = comps_[static_cast<std::size_t>(merged[a])];
      diam = std::max(diam, ca.diameter);
      if (diam > bound) return false;
      for (PointIndex x : ca.members) {
        diam = std::max(diam, space_.distance(v, x));
        if (diam > bound) return false;
        for (std::size_t b = a + 1; b < merged.size(); ++b)
          for (PointIndex y : comps_[static_cast<std::size_t>(merged[b])].members) {
            diam = std::max(diam, space_.distance(x, y));
            if (diam > bound) return false;
          }
      }
    }
    Component fresh;
    fresh.color = color;
    fresh.diameter = diam;
    fresh.members.push_back(v);
    for (int id : merged) {
      Component& old = comps_[static_cast<std::size_t>(id)];
      old.alive = false;
      fresh.members.insert(fresh.members.end(), old.members.begin(), old.members.end());
    }
    const int fresh_id = static_cast<int>(comps_.size());
    for (PointIndex x : fresh.members) comp_of_[x] = fresh_id;
    comps_.push_back(std::move(fresh));
    color_of_[v] = color;
    undo_.push_back({v, std::move(merged)});
    return true;
  }

  void unplace() {
    Undo u = std::move(undo_.back());
    undo_.pop_back();
    comps_.pop_back();
    for (int id : u.merged) {
      Component& old = comps_[static_cast<std::size_t>(id)];
      old.alive = true;
      for (PointIndex x : old.members) comp_of_[x] = id;
    }
    color_of_[u.point] = -1;
    comp_of_[u.point] = -1;
  }

  const FiniteMetricSpace& space_;
  ScalePair scale_;
  std::size_t colors_;
  std::uint64_t budget_;
  std::size_t n_;
  std::uint64_t nodes_ = 0;
  std::vector<std::vector<PointIndex>> close_;
  std::vector<PointIndex> order_;
  std::vector<int> color_of_;
  std::vector<int> comp_of_;
  std::vector<Component> comps_;
  std::vector<Undo> undo_;
};

}  // namespace detail

/// Decides di_(lambda,D)(space) <= n. n = 0 is answered directly from the
/// lambda-components; larger n by exhaustive search within the node budget.
inline Decision dim_le(const FiniteMetricSpace& space, ScalePair scale, std::size_t n,
                       const SolverOptions& options = {}) {
  if (n == 0) {
    const auto parts = lambda_components(space, scale.lambda);
    if (parts.max_diameter() <= scale.control)
      return {Outcome::feasible, detail::component_cover(parts, scale), 0};
    return {Outcome::infeasible, std::nullopt, 0};
  }
  detail::ClusteredColoringSearch search(space, scale, n + 1, options.node_budget);
  const Outcome outcome = search.run();
  Decision d{outcome, std::nullopt, search.nodes()};
  if (outcome == Outcome::feasible) d.certificate = search.certificate();
  return d;
}

/// How the bound value - 1 was excluded.
struct LowerBoundEvidence {
  std::string method;  // "trivial", "component-diameter" or "exhaustive-search"
  std::uint64_t nodes = 0;
  /// For component-diameter: a lambda-component whose diameter exceeds D.
  std::vector<PointIndex> witness;
  Distance witness_diameter = 0;
};

struct DimResult {
  /// Exact value, or nullopt when the node budget ran out ("exceeds-cap").
  std::optional<std::size_t> value;
  std::size_t lower_bound = 0;
  std::size_t upper_bound = 0;
  /// Witnesses upper_bound, with exactly upper_bound + 1 families.
  ScaledCover certificate;
  LowerBoundEvidence evidence;
  std::uint64_t nodes = 0;

  bool exact() const noexcept { return value.has_value(); }
};

inline ScaledCover singleton_cover(const FiniteMetricSpace& space, ScalePair scale) {
  ScaledCover cover{scale, {}};
  for (PointIndex x = 0; x < space.size(); ++x) cover.families.push_back({{x}});
  if (cover.families.empty()) cover.families.emplace_back();
  return cover;
}

/// Exact di_(lambda,D)(space): the least n with dim_le feasible.
inline DimResult dim_at_scale(const FiniteMetricSpace& space, ScalePair scale,
                              const SolverOptions& options = {}) {
  DimResult result;
  result.evidence.method = "trivial";
  if (space.size() <= 1) {
    result.value = 0;
    result.certificate = singleton_cover(space, scale);
    return result;
  }
  result.upper_bound = space.size() - 1;
  result.certificate = singleton_cover(space, scale);

  const auto parts = lambda_components(space, scale.lambda);
  if (parts.max_diameter() <= scale.control) {
    result.value = 0;
    result.upper_bound = 0;
    result.certificate = detail::component_cover(parts, scale);
    return result;
  }
  const auto worst = std::max_element(parts.diameters.begin(), parts.diameters.end());
  result.lower_bound = 1;
  result.evidence = {"component-diameter", 0,
                     parts.blocks[static_cast<std::size_t>(worst - parts.diameters.begin())], *worst};

  std::uint64_t spent = 0;
  for (std::size_t n = 1; n < space.size(); ++n) {
    SolverOptions remaining{options.node_budget > spent ? options.node_budget - spent : 0};
    const Decision d = dim_le(space, scale, n, remaining);
    spent += d.nodes;
    result.nodes = spent;
    if (d.outcome == Outcome::unknown) return result;
    if (d.outcome == Outcome::feasible) {
      result.value = n;
      result.upper_bound = n;
      result.certificate = *d.certificate;
      return result;
    }
    result.lower_bound = n + 1;
    result.evidence = {"exhaustive-search", d.nodes, {}, 0};
  }
  // Unreachable in practice: n = size - 1 always admits singleton classes.
  result.value = space.size() - 1;
  return result;
}

// ---------------------------------------------------------------------------
// Product lifting

class HypothesisError : public std::invalid_argument {
 public:
  HypothesisError(const std::string& what, std::size_t factor)
      : std::invalid_argument(what), factor_(factor) {}
  std::size_t factor() const noexcept { return factor_; }

 private:
  std::size_t factor_;
};

/// Lifts a cover of factor `factor` (0-based) of an l1 sum to the whole sum:
/// each cluster U becomes (full product of earlier factors) x U x (tail) for
/// every tuple over the later factors. Requires the cover to validate on the
/// factor at (lambda, D0) and every later factor to have all distinct points
/// more than lambda apart. The result is stated at (lambda, D + D0) with D
/// the diameter of the product of the earlier factors, in the point order
/// of l1_sum(spaces).
inline ScaledCover lift_product_cover(std::span<const FiniteMetricSpace> spaces, std::size_t factor,
                                      const ScaledCover& factor_cover, Distance lambda,
                                      std::size_t size_cap = kDefaultSizeCap) {
  if (factor >= spaces.size())
    throw HypothesisError("lift_product_cover: factor index out of range", factor);
  const ScalePair factor_scale{lambda, factor_cover.scale.control};
  const auto report = validate_cover(spaces[factor], ScaledCover{factor_scale, factor_cover.families});
  if (!report.ok())
    throw HypothesisError("lift_product_cover: cover of factor " + std::to_string(factor) +
                              " does not validate (" + describe(report.violations.front()) + ")",
                          factor);
  for (std::size_t j = factor + 1; j < spaces.size(); ++j) {
    if (spaces[j].size() >= 2 && min_positive_distance(spaces[j]) <= lambda)
      throw HypothesisError("lift_product_cover: factor " + std::to_string(j) +
                                " has distinct points within distance " + std::to_string(lambda) +
                                " (min distance " + std::to_string(min_positive_distance(spaces[j])) +
                                ")",
                            j);
  }
  const FiniteMetricSpace sum = l1_sum(spaces, size_cap);  // also checks basepoints and the cap

  Distance prefix_diameter = 0;
  std::size_t prefix_size = 1;
  for (std::size_t i = 0; i < factor; ++i) {
    prefix_diameter = detail::checked_add(prefix_diameter, diameter(spaces[i]));
    prefix_size *= spaces[i].size();
  }
  const std::size_t tail_size = sum.size() / (prefix_size * spaces[factor].size());
  const std::size_t tail_stride = prefix_size * spaces[factor].size();

  ScaledCover out{{lambda, detail::checked_add(prefix_diameter, factor_cover.scale.control)}, {}};
  for (const Family& family : factor_cover.families) {
    Family lifted;
    for (std::size_t tail = 0; tail < tail_size; ++tail)
      for (const Cluster& u : family) {
        Cluster c;
        c.reserve(prefix_size * u.size());
        for (PointIndex x : u)
          for (std::size_t prefix = 0; prefix < prefix_size; ++prefix)
            c.push_back(prefix + x * prefix_size + tail * tail_stride);
        std::sort(c.begin(), c.end());
        lifted.push_back(std::move(c));
      }
    std::sort(lifted.begin(), lifted.end(),
              [](const Cluster& a, const Cluster& b) { return a.front() < b.front(); });
    out.families.push_back(std::move(lifted));
  }
  return out;
}

}  // namespace asdim
