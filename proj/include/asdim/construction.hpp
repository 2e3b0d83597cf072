#pragma once

// Finite truncations of the wedge-of-circles and direct-sum-of-cyclic-groups
// counterexamples, their weight schedules, the four structural conditions,
// and sampled scale profiles f_c(lambda) = di_(lambda, c*lambda).

#include <algorithm>
#include <future>
#include <optional>
#include <ostream>
#include <span>
#include <sstream>
#include <string>
#include <vector>

#include "asdim/components.hpp"
#include "asdim/cover.hpp"
#include "asdim/metric_space.hpp"
#include "asdim/solver.hpp"

namespace asdim {

enum class ScheduleMode {
  group,           // prefix = l1 sum of the circles Z_{p^i}
  wedge,           // prefix = wedge of the circles Z_{p^i}
  interval_wedge,  // prefix = wedge of rays I_{a_i}(i+2) based at an end
};

inline const char* to_string(ScheduleMode mode) {
  switch (mode) {
    case ScheduleMode::group: return "group";
    case ScheduleMode::wedge: return "wedge";
    case ScheduleMode::interval_wedge: return "interval-wedge";
  }
  return "?";
}

inline std::optional<ScheduleMode> parse_schedule_mode(const std::string& text) {
  if (text == "group") return ScheduleMode::group;
  if (text == "wedge") return ScheduleMode::wedge;
  if (text == "interval-wedge") return ScheduleMode::interval_wedge;
  return std::nullopt;
}

struct WeightSchedule {
  std::uint64_t p = 3;
  std::vector<Distance> weights;  // weights[n-1] = a_n
  ScheduleMode mode = ScheduleMode::group;
  /// Levels n with p^n < 2(n+1); the circle Z_{p^n} is then too short for
  /// the no-dimension-zero condition to be guaranteed at control n*a_n.
  std::vector<std::size_t> short_levels;

  std::size_t levels() const noexcept { return weights.size(); }
  Distance weight(std::size_t n) const { return weights.at(n - 1); }
};

inline bool is_prime(std::uint64_t p) {
  if (p < 2) return false;
  for (std::uint64_t d = 2; d * d <= p; ++d)
    if (p % d == 0) return false;
  return true;
}

namespace detail {

inline std::size_t checked_pow(std::uint64_t p, std::size_t n) {
  std::size_t out = 1;
  for (std::size_t i = 0; i < n; ++i) {
    if (out > std::numeric_limits<std::size_t>::max() / p) throw MetricError("p^n overflows");
    out *= p;
  }
  return out;
}

}  // namespace detail

/// Minimal recursive weights: a_1 = 1 and a_n = diam(prefix over levels
/// 1..n-1) + 1, with the prefix measured as the mode dictates.
inline WeightSchedule weight_schedule(std::uint64_t p, std::size_t levels, ScheduleMode mode) {
  if (!is_prime(p)) throw MetricError("weight_schedule: p = " + std::to_string(p) + " is not prime");
  if (levels < 1) throw MetricError("weight_schedule: need at least one level");
  WeightSchedule s{p, {}, mode, {}};
  std::vector<Distance> eccentricity;  // of level i's factor about its basepoint
  Distance sum_diameters = 0;
  for (std::size_t n = 1; n <= levels; ++n) {
    Distance a = 1;
    if (n >= 2) {
      if (mode == ScheduleMode::group) {
        a = detail::checked_add(sum_diameters, 1);
      } else {
        std::vector<Distance> ecc = eccentricity;
        std::sort(ecc.rbegin(), ecc.rend());
        a = detail::checked_add(ecc.size() >= 2 ? detail::checked_add(ecc[0], ecc[1]) : ecc[0], 1);
      }
    }
    s.weights.push_back(a);
    if (mode == ScheduleMode::interval_wedge) {
      eccentricity.push_back(detail::checked_mul(a, n + 2));
    } else {
      const std::size_t order = detail::checked_pow(p, n);
      const Distance ecc = detail::checked_mul(a, order / 2);
      eccentricity.push_back(ecc);
      sum_diameters = detail::checked_add(sum_diameters, ecc);
      if (order < 2 * (n + 1)) s.short_levels.push_back(n);
    }
  }
  return s;
}

/// Factor of level n (1-based): Z_{p^n} with weight a_n, or for the
/// interval-wedge mode the ray I_{a_n}(n+2) based at its end.
inline FiniteMetricSpace level_factor(const WeightSchedule& s, std::size_t n) {
  if (n < 1 || n > s.levels()) throw MetricError("level_factor: level out of range");
  if (s.mode == ScheduleMode::interval_wedge) return interval(n + 2, s.weight(n));
  return cyclic_group(detail::checked_pow(s.p, n), s.weight(n));
}

inline std::vector<FiniteMetricSpace> level_factors(const WeightSchedule& s) {
  std::vector<FiniteMetricSpace> out;
  for (std::size_t n = 1; n <= s.levels(); ++n) out.push_back(level_factor(s, n));
  return out;
}

/// G_N: the l1 sum of (Z_{p^i}, a_i) for i = 1..N under the group schedule.
inline FiniteMetricSpace group_truncation(std::uint64_t p, std::size_t levels,
                                          std::size_t size_cap = kDefaultSizeCap) {
  const auto factors = level_factors(weight_schedule(p, levels, ScheduleMode::group));
  return l1_sum(factors, size_cap)
      .with_label("group(" + std::to_string(p) + "," + std::to_string(levels) + ")");
}

/// The wedge of (Z_{p^n}, a_n) for n = 1..N under the wedge schedule.
inline FiniteMetricSpace wedge_truncation(std::uint64_t p, std::size_t levels) {
  const auto factors = level_factors(weight_schedule(p, levels, ScheduleMode::wedge));
  return wedge(factors).with_label("wedgegroup(" + std::to_string(p) + "," + std::to_string(levels) + ")");
}

inline FiniteMetricSpace interval_wedge_truncation(std::size_t levels) {
  const auto factors = level_factors(weight_schedule(2, levels, ScheduleMode::interval_wedge));
  return wedge(factors);
}

/// Points of a wedge of `factor_sizes` that belong to factor f (0-based),
/// optionally including the shared wedge point 0.
inline std::vector<PointIndex> wedge_factor_points(std::span<const std::size_t> factor_sizes,
                                                   std::size_t f, bool include_wedge_point) {
  std::vector<PointIndex> out;
  if (include_wedge_point) out.push_back(0);
  PointIndex offset = 1;
  for (std::size_t g = 0; g < f; ++g) offset += factor_sizes[g] - 1;
  for (std::size_t i = 0; i + 1 < factor_sizes[f]; ++i) out.push_back(offset + i);
  return out;
}

/// Points of an l1 sum that are at the basepoint in every coordinate except
/// factor f (0-based), where they range over the whole factor.
inline std::vector<PointIndex> coordinate_factor_points(std::span<const FiniteMetricSpace> factors,
                                                        std::size_t f) {
  PointIndex base = 0, stride = 1, f_stride = 1;
  for (std::size_t g = 0; g < factors.size(); ++g) {
    if (g == f) f_stride = stride;
    else base += *factors[g].basepoint() * stride;
    stride *= factors[g].size();
  }
  std::vector<PointIndex> out;
  for (PointIndex x = 0; x < factors[f].size(); ++x) out.push_back(base + x * f_stride);
  return out;
}

/// The n-th coordinate circle of G_N (n 1-based).
inline std::vector<PointIndex> group_coordinate_circle(std::uint64_t p, std::size_t levels, std::size_t n) {
  const auto factors = level_factors(weight_schedule(p, levels, ScheduleMode::group));
  return coordinate_factor_points(factors, n - 1);
}

/// The n-th circle of the wedge truncation, wedge point included.
inline std::vector<PointIndex> wedge_level_points(const WeightSchedule& s, std::size_t n) {
  std::vector<std::size_t> sizes;
  for (const auto& f : level_factors(s)) sizes.push_back(f.size());
  return wedge_factor_points(sizes, n - 1, true);
}

// ---------------------------------------------------------------------------
// Conditions I-IV

struct ConditionCheck {
  bool holds = true;
  /// False where the condition is not expected to hold (level 1 prefixes,
  /// or a circle shorter than 2(n+1) for the no-dimension-zero condition).
  bool required = true;
  std::string witness;
};

struct ConditionRow {
  std::size_t n = 0;
  Distance weight = 0;
  ConditionCheck discrete;          // I:   X_n is a_n-discrete
  ConditionCheck no_dim_zero;       // II:  di_(a_n, c a_n) X_n >= 1 for c = 1..n
  ConditionCheck prefix_bounded;    // III: diam(Y_{n-1}) < a_n
  ConditionCheck separated;         // IV:  d(Y_{n-1}, X_n) >= a_n
};

struct ConditionsReport {
  std::vector<ConditionRow> rows;

  bool ok() const {
    for (const auto& r : rows)
      for (const ConditionCheck* c : {&r.discrete, &r.no_dim_zero, &r.prefix_bounded, &r.separated})
        if (c->required && !c->holds) return false;
    return true;
  }
};

/// Checks conditions I-IV on the wedge of `factors`, where Y_n is the union
/// of the first n factors and X_n = Y_n \ Y_{n-1}.
inline ConditionsReport check_conditions(const WeightSchedule& schedule,
                                         std::span<const FiniteMetricSpace> factors) {
  if (factors.size() != schedule.levels())
    throw MetricError("check_conditions: schedule has " + std::to_string(schedule.levels()) +
                      " levels but " + std::to_string(factors.size()) + " factors were given");
  const FiniteMetricSpace whole = wedge(factors);
  std::vector<std::size_t> sizes;
  for (const auto& f : factors) sizes.push_back(f.size());

  ConditionsReport report;
  std::vector<PointIndex> prefix;  // Y_{n-1}
  for (std::size_t n = 1; n <= factors.size(); ++n) {
    const Distance a = schedule.weight(n);
    ConditionRow row;
    row.n = n;
    row.weight = a;
    const auto level = wedge_factor_points(sizes, n - 1, n == 1);  // X_n
    const FiniteMetricSpace xn = subspace(whole, level);

    if (xn.size() >= 2) {
      const Distance m = min_positive_distance(xn);
      row.discrete.holds = m >= a;
      if (!row.discrete.holds) row.discrete.witness = "min distance " + std::to_string(m);
    }

    const bool short_circle = std::find(schedule.short_levels.begin(), schedule.short_levels.end(),
                                        n) != schedule.short_levels.end();
    row.no_dim_zero.required = !short_circle;
    for (Distance c = 1; c <= n; ++c) {
      const auto d = dim_le(xn, {a, c * a}, 0);
      if (d.outcome == Outcome::feasible) {
        row.no_dim_zero.holds = false;
        row.no_dim_zero.witness = "dimension 0 at c = " + std::to_string(c);
        break;
      }
    }

    if (n >= 2) {
      const Distance diam = diameter(subspace(whole, prefix));
      row.prefix_bounded.holds = diam < a;
      if (!row.prefix_bounded.holds) row.prefix_bounded.witness = "prefix diameter " + std::to_string(diam);

      Distance gap = std::numeric_limits<Distance>::max();
      for (PointIndex y : prefix)
        for (PointIndex x : level) gap = std::min(gap, whole.distance(y, x));
      row.separated.holds = gap >= a;
      if (!row.separated.holds) row.separated.witness = "prefix distance " + std::to_string(gap);
    } else {
      row.prefix_bounded.required = row.separated.required = false;
    }

    prefix.insert(prefix.end(), level.begin(), level.end());
    std::sort(prefix.begin(), prefix.end());
    report.rows.push_back(std::move(row));
  }
  return report;
}

inline ConditionsReport check_conditions(const WeightSchedule& schedule) {
  const auto factors = level_factors(schedule);
  return check_conditions(schedule, factors);
}

// ---------------------------------------------------------------------------
// Scales and witnesses

/// lambda_n = a_n - 1: the scales at which a single-family cover exists.
inline std::vector<Distance> dip_scales(const WeightSchedule& s) {
  std::vector<Distance> out;
  for (Distance a : s.weights) out.push_back(a - 1);
  return out;
}

/// a_n: the scales at which the n-th circle alone forces dimension >= 1.
inline std::vector<Distance> rise_scales(const WeightSchedule& s) { return s.weights; }

/// The single-family cover by lambda-components, stated at (lambda, control).
/// If `prefix` is nonempty it must lie inside one cluster.
inline ScaledCover dim_zero_witness(const FiniteMetricSpace& space, Distance lambda, Distance control,
                                    std::span<const PointIndex> prefix = {}) {
  const auto parts = lambda_components(space, lambda);
  for (std::size_t b = 0; b < parts.blocks.size(); ++b)
    if (parts.diameters[b] > control)
      throw CoverError("dim_zero_witness: component containing point " +
                       std::to_string(parts.blocks[b].front()) + " has diameter " +
                       std::to_string(parts.diameters[b]) + " > " + std::to_string(control));
  if (!prefix.empty()) {
    const bool inside = std::any_of(parts.blocks.begin(), parts.blocks.end(), [&](const auto& block) {
      return std::all_of(prefix.begin(), prefix.end(), [&](PointIndex x) {
        return std::binary_search(block.begin(), block.end(), x);
      });
    });
    if (!inside) throw CoverError("dim_zero_witness: prefix is split across clusters");
  }
  return ScaledCover{{lambda, control}, {Family(parts.blocks.begin(), parts.blocks.end())}};
}

// ---------------------------------------------------------------------------
// Profiles

enum class ProfileStatus { exact, lower_bound, unknown };

inline const char* to_string(ProfileStatus s) {
  switch (s) {
    case ProfileStatus::exact: return "exact";
    case ProfileStatus::lower_bound: return "lower-bound";
    case ProfileStatus::unknown: return "unknown";
  }
  return "?";
}

struct ProfileSample {
  Distance lambda = 0;
  Distance control = 0;
  std::optional<std::size_t> dim;  // exact value or proven lower bound
  ProfileStatus status = ProfileStatus::unknown;
  std::string evidence;
};

struct Profile {
  Distance c = 1;
  std::vector<ProfileSample> samples;
};

struct ProfileOptions {
  SolverOptions solver;
  /// Spaces larger than this only get the dimension-zero test; a failed test
  /// is reported as the lower bound 1.
  std::size_t full_search_limit = 64;
  /// When false, samples the solver cannot settle are "unknown" rather than
  /// resolved to their proven lower bound.
  bool resolve_lower_bounds = true;
  /// Designated subsets checked first when a lower bound must be justified.
  std::vector<std::vector<PointIndex>> witness_subsets;
  unsigned threads = 1;
};

namespace detail {

inline ProfileSample profile_sample(const FiniteMetricSpace& space, Distance c, Distance lambda,
                                    const ProfileOptions& options) {
  ProfileSample s;
  s.lambda = lambda;
  s.control = checked_mul(c, lambda);
  const ScalePair scale{lambda, s.control};

  if (space.size() <= options.full_search_limit) {
    const DimResult r = dim_at_scale(space, scale, options.solver);
    if (r.exact()) {
      s.dim = r.value;
      s.status = ProfileStatus::exact;
      s.evidence = r.evidence.method;
      return s;
    }
    if (options.resolve_lower_bounds) {
      s.dim = r.lower_bound;
      s.status = ProfileStatus::lower_bound;
    }
    s.evidence = "node budget exhausted; " + r.evidence.method;
    return s;
  }

  const auto parts = lambda_components(space, lambda);
  if (parts.max_diameter() <= s.control) {
    s.dim = 0;
    s.status = ProfileStatus::exact;
    s.evidence = "component-diameter";
    return s;
  }
  if (!options.resolve_lower_bounds) {
    s.status = ProfileStatus::unknown;
    return s;
  }
  s.dim = 1;
  s.status = ProfileStatus::lower_bound;
  for (std::size_t w = 0; w < options.witness_subsets.size(); ++w) {
    const FiniteMetricSpace sub = subspace(space, options.witness_subsets[w]);
    if (dim_le(sub, scale, 0).outcome == Outcome::infeasible) {
      s.evidence = "witness subspace " + std::to_string(w);
      return s;
    }
  }
  const auto worst = std::max_element(parts.diameters.begin(), parts.diameters.end());
  const auto& block = parts.blocks[static_cast<std::size_t>(worst - parts.diameters.begin())];
  s.evidence = "component at point " + std::to_string(block.front()) + " of diameter " +
               std::to_string(*worst);
  return s;
}

}  // namespace detail

/// Samples f_c(lambda) = di_(lambda, c*lambda) at the given strictly
/// increasing positive scales.
inline Profile profile(const FiniteMetricSpace& space, Distance c, std::span<const Distance> lambdas,
                       const ProfileOptions& options = {}) {
  if (c < 1) throw MetricError("profile: c must be >= 1");
  for (std::size_t i = 0; i < lambdas.size(); ++i) {
    if (lambdas[i] < 1) throw MetricError("profile: scales must be positive");
    if (i && lambdas[i] <= lambdas[i - 1]) throw MetricError("profile: scales must be strictly increasing");
  }
  Profile out{c, {}};
  if (options.threads <= 1) {
    for (Distance lambda : lambdas) out.samples.push_back(detail::profile_sample(space, c, lambda, options));
    return out;
  }
  std::vector<std::future<ProfileSample>> pending;
  for (Distance lambda : lambdas)
    pending.push_back(std::async(std::launch::async, [&space, c, lambda, &options] {
      return detail::profile_sample(space, c, lambda, options);
    }));
  for (auto& f : pending) out.samples.push_back(f.get());
  return out;
}

inline Profile profile(const FiniteMetricSpace& space, Distance c, std::initializer_list<Distance> lambdas,
                       const ProfileOptions& options = {}) {
  return profile(space, c, std::span<const Distance>(lambdas.begin(), lambdas.size()), options);
}

inline void write_profile_csv(std::ostream& out, const Profile& p) {
  out << "c,lambda,control,dim,status\n";
  for (const auto& s : p.samples) {
    out << p.c << ',' << s.lambda << ',' << s.control << ',';
    if (s.dim) out << *s.dim;
    out << ',' << to_string(s.status) << '\n';
  }
}

inline void write_schedule_csv(std::ostream& out, const WeightSchedule& s) {
  out << "n,a_n\n";
  for (std::size_t n = 1; n <= s.levels(); ++n) out << n << ',' << s.weight(n) << '\n';
}

}  // namespace asdim
