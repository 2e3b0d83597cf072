#pragma once

// Finite metric spaces with exact integer distances.
//
// A FiniteMetricSpace is an immutable handle to a distance oracle over the
// points 0..size()-1. Constructors cover discrete intervals, weighted cyclic
// groups, wedge sums, l1 sums, induced subspaces and rescalings; ad-hoc
// spaces come in through from_matrix().

#include <algorithm>
#include <array>
#include <cstddef>
#include <cstdint>
#include <istream>
#include <limits>
#include <memory>
#include <mutex>
#include <optional>
#include <random>
#include <span>
#include <sstream>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace asdim {

using Distance = std::uint64_t;
using PointIndex = std::size_t;

class MetricError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// A scale lambda together with a diameter bound (the control D).
struct ScalePair {
  Distance lambda = 0;
  Distance control = 0;

  friend bool operator==(const ScalePair&, const ScalePair&) = default;
};

/// Spaces at or below this size memoize a full distance table on first use.
inline constexpr std::size_t kMemoizeLimit = 2000;
/// Default cap on the number of points of an l1 sum.
inline constexpr std::size_t kDefaultSizeCap = 1'000'000;

namespace detail {

inline Distance checked_mul(Distance a, Distance b) {
  if (b != 0 && a > std::numeric_limits<Distance>::max() / b)
    throw MetricError("distance overflow");
  return a * b;
}

inline Distance checked_add(Distance a, Distance b) {
  if (a > std::numeric_limits<Distance>::max() - b)
    throw MetricError("distance overflow");
  return a + b;
}

class MetricImpl {
 public:
  virtual ~MetricImpl() = default;

  virtual std::size_t size() const = 0;
  virtual Distance distance(PointIndex i, PointIndex j) const = 0;

  /// Appends every j != i with distance(i, j) <= radius.
  virtual void neighbors_within(PointIndex i, Distance radius,
                                std::vector<PointIndex>& out) const {
    const std::size_t n = size();
    for (PointIndex j = 0; j < n; ++j)
      if (j != i && distance(i, j) <= radius) out.push_back(j);
  }

  /// Exact diameter when the construction determines it in closed form.
  virtual std::optional<Distance> known_diameter() const { return std::nullopt; }
};

}  // namespace detail

class FiniteMetricSpace {
 public:
  FiniteMetricSpace(std::shared_ptr<const detail::MetricImpl> impl,
                    std::optional<PointIndex> basepoint, std::string label)
      : impl_(std::move(impl)),
        basepoint_(basepoint),
        label_(std::move(label)),
        cache_(std::make_shared<Cache>()) {
    if (basepoint_ && *basepoint_ >= impl_->size())
      throw MetricError("basepoint out of range");
  }

  std::size_t size() const noexcept { return impl_->size(); }
  const std::optional<PointIndex>& basepoint() const noexcept { return basepoint_; }
  const std::string& label() const noexcept { return label_; }

  Distance distance(PointIndex i, PointIndex j) const {
    const std::size_t n = size();
    if (n <= kMemoizeLimit) {
      std::call_once(cache_->once, [&] {
        cache_->table.resize(n * n);
        for (PointIndex a = 0; a < n; ++a)
          for (PointIndex b = 0; b < n; ++b) cache_->table[a * n + b] = impl_->distance(a, b);
      });
      return cache_->table[i * n + j];
    }
    return impl_->distance(i, j);
  }

  /// Every point other than i within distance radius of i, ascending.
  std::vector<PointIndex> neighbors_within(PointIndex i, Distance radius) const {
    std::vector<PointIndex> out;
    if (size() <= kMemoizeLimit) {
      for (PointIndex j = 0; j < size(); ++j)
        if (j != i && distance(i, j) <= radius) out.push_back(j);
      return out;
    }
    impl_->neighbors_within(i, radius, out);
    std::sort(out.begin(), out.end());
    return out;
  }

  std::optional<Distance> known_diameter() const { return impl_->known_diameter(); }

  FiniteMetricSpace with_label(std::string label) const {
    FiniteMetricSpace copy = *this;
    copy.label_ = std::move(label);
    return copy;
  }

  FiniteMetricSpace with_basepoint(std::optional<PointIndex> basepoint) const {
    return FiniteMetricSpace(impl_, basepoint, label_);
  }

 private:
  struct Cache {
    std::once_flag once;
    std::vector<Distance> table;
  };

  std::shared_ptr<const detail::MetricImpl> impl_;
  std::optional<PointIndex> basepoint_;
  std::string label_;
  std::shared_ptr<Cache> cache_;
};

// ---------------------------------------------------------------------------
// Axiom checking

struct MetricViolation {
  std::string axiom;
  std::array<PointIndex, 3> witness{};
  std::string message;
};

struct MetricCheckOptions {
  std::size_t exhaustive_limit = 200;
  std::size_t samples = 200'000;
  std::uint64_t seed = 0;
};

namespace detail {

template <class Dist>
std::optional<MetricViolation> check_axioms(std::size_t n, Dist&& d,
                                            const MetricCheckOptions& options) {
  auto fail = [](std::string axiom, PointIndex a, PointIndex b, PointIndex c,
                 std::string message) {
    return MetricViolation{std::move(axiom), {a, b, c}, std::move(message)};
  };
  for (PointIndex i = 0; i < n; ++i) {
    if (d(i, i) != 0) {
      std::ostringstream os;
      os << "nonzero diagonal at (" << i << "," << i << "): d=" << d(i, i);
      return fail("identity", i, i, i, os.str());
    }
  }
  for (PointIndex i = 0; i < n; ++i) {
    for (PointIndex j = i + 1; j < n; ++j) {
      if (d(i, j) != d(j, i)) {
        std::ostringstream os;
        os << "asymmetric at (" << i << "," << j << "): d(" << i << "," << j << ")=" << d(i, j)
           << " but d(" << j << "," << i << ")=" << d(j, i);
        return fail("symmetry", i, j, i, os.str());
      }
      if (d(i, j) == 0) {
        std::ostringstream os;
        os << "zero distance between distinct points (" << i << "," << j << ")";
        return fail("positivity", i, j, j, os.str());
      }
    }
  }
  auto triangle = [&](PointIndex i, PointIndex j, PointIndex k) -> std::optional<MetricViolation> {
    // endpoints i, k; via j
    const Distance direct = d(i, k);
    const Distance via = d(i, j) + d(j, k);
    if (direct > via) {
      std::ostringstream os;
      os << "triangle inequality violated at (" << i << "," << k << "," << j << "): d(" << i
         << "," << k << ")=" << direct << " > d(" << i << "," << j << ")+d(" << j << "," << k
         << ")=" << via;
      return fail("triangle", i, k, j, os.str());
    }
    return std::nullopt;
  };
  if (n <= options.exhaustive_limit) {
    for (PointIndex i = 0; i < n; ++i)
      for (PointIndex k = i + 1; k < n; ++k)
        for (PointIndex j = 0; j < n; ++j)
          if (auto v = triangle(i, j, k)) return v;
  } else {
    std::mt19937_64 rng(options.seed);
    for (std::size_t s = 0; s < options.samples; ++s) {
      const PointIndex i = rng() % n, j = rng() % n, k = rng() % n;
      if (auto v = triangle(i, j, k)) return v;
    }
  }
  return std::nullopt;
}

}  // namespace detail

/// Checks identity, symmetry, positivity and the triangle inequality.
/// Exhaustive up to options.exhaustive_limit points, sampled above.
inline std::optional<MetricViolation> check_metric_axioms(const FiniteMetricSpace& space,
                                                          const MetricCheckOptions& options = {}) {
  return detail::check_axioms(
      space.size(), [&](PointIndex i, PointIndex j) { return space.distance(i, j); }, options);
}

// ---------------------------------------------------------------------------
// Implementations

namespace detail {

class MatrixMetric final : public MetricImpl {
 public:
  MatrixMetric(std::size_t n, std::vector<Distance> table) : n_(n), table_(std::move(table)) {}
  std::size_t size() const override { return n_; }
  Distance distance(PointIndex i, PointIndex j) const override { return table_[i * n_ + j]; }

 private:
  std::size_t n_;
  std::vector<Distance> table_;
};

class IntervalMetric final : public MetricImpl {
 public:
  IntervalMetric(std::size_t length, Distance weight) : length_(length), weight_(weight) {}
  std::size_t size() const override { return length_ + 1; }
  Distance distance(PointIndex i, PointIndex j) const override {
    return weight_ * static_cast<Distance>(i > j ? i - j : j - i);
  }
  void neighbors_within(PointIndex i, Distance radius, std::vector<PointIndex>& out) const override {
    const Distance steps = radius / weight_;
    const PointIndex lo = i > steps ? i - static_cast<PointIndex>(steps) : 0;
    const PointIndex hi = std::min<Distance>(length_, i + steps);
    for (PointIndex j = lo; j <= hi; ++j)
      if (j != i) out.push_back(j);
  }
  std::optional<Distance> known_diameter() const override {
    return weight_ * static_cast<Distance>(length_);
  }

 private:
  std::size_t length_;
  Distance weight_;
};

class CyclicMetric final : public MetricImpl {
 public:
  CyclicMetric(std::size_t order, Distance weight) : order_(order), weight_(weight) {}
  std::size_t size() const override { return order_; }
  Distance distance(PointIndex i, PointIndex j) const override {
    const std::size_t diff = i > j ? i - j : j - i;
    return weight_ * static_cast<Distance>(std::min(diff, order_ - diff));
  }
  std::optional<Distance> known_diameter() const override {
    return weight_ * static_cast<Distance>(order_ / 2);
  }

 private:
  std::size_t order_;
  Distance weight_;
};

class ScaledMetric final : public MetricImpl {
 public:
  ScaledMetric(FiniteMetricSpace base, Distance factor) : base_(std::move(base)), factor_(factor) {}
  std::size_t size() const override { return base_.size(); }
  Distance distance(PointIndex i, PointIndex j) const override {
    return factor_ * base_.distance(i, j);
  }
  void neighbors_within(PointIndex i, Distance radius, std::vector<PointIndex>& out) const override {
    auto near = base_.neighbors_within(i, radius / factor_);
    out.insert(out.end(), near.begin(), near.end());
  }
  std::optional<Distance> known_diameter() const override {
    if (auto d = base_.known_diameter()) return checked_mul(*d, factor_);
    return std::nullopt;
  }

 private:
  FiniteMetricSpace base_;
  Distance factor_;
};

class SubspaceMetric final : public MetricImpl {
 public:
  SubspaceMetric(FiniteMetricSpace parent, std::vector<PointIndex> points)
      : parent_(std::move(parent)), points_(std::move(points)) {}
  std::size_t size() const override { return points_.size(); }
  Distance distance(PointIndex i, PointIndex j) const override {
    return parent_.distance(points_[i], points_[j]);
  }

 private:
  FiniteMetricSpace parent_;
  std::vector<PointIndex> points_;
};

class WedgeMetric final : public MetricImpl {
 public:
  explicit WedgeMetric(std::vector<FiniteMetricSpace> factors) : factors_(std::move(factors)) {
    owner_.push_back({0, 0});
    to_base_.push_back(0);
    for (std::size_t f = 0; f < factors_.size(); ++f) {
      const auto& space = factors_[f];
      const PointIndex base = *space.basepoint();
      Distance ecc = 0;
      for (PointIndex x = 0; x < space.size(); ++x) {
        if (x == base) continue;
        owner_.push_back({f, x});
        to_base_.push_back(space.distance(x, base));
        ecc = std::max(ecc, to_base_.back());
      }
      eccentricity_.push_back(ecc);
    }
  }

  std::size_t size() const override { return owner_.size(); }

  Distance distance(PointIndex i, PointIndex j) const override {
    if (i == j) return 0;
    if (i == 0) return to_base_[j];
    if (j == 0) return to_base_[i];
    const auto [fi, li] = owner_[i];
    const auto [fj, lj] = owner_[j];
    if (fi == fj) return factors_[fi].distance(li, lj);
    return to_base_[i] + to_base_[j];
  }

  std::optional<Distance> known_diameter() const override {
    Distance best = 0;
    for (const auto& f : factors_) {
      auto d = f.known_diameter();
      if (!d) return std::nullopt;
      best = std::max(best, *d);
    }
    std::vector<Distance> ecc = eccentricity_;
    std::sort(ecc.rbegin(), ecc.rend());
    if (ecc.size() >= 2) best = std::max(best, checked_add(ecc[0], ecc[1]));
    return best;
  }

  /// Factor index and local index of a wedge point; the wedge point itself
  /// reports factor 0 and local index 0 (it is every factor's basepoint).
  std::pair<std::size_t, PointIndex> owner(PointIndex i) const { return owner_[i]; }

 private:
  std::vector<FiniteMetricSpace> factors_;
  std::vector<std::pair<std::size_t, PointIndex>> owner_;
  std::vector<Distance> to_base_;
  std::vector<Distance> eccentricity_;
};

class L1SumMetric final : public MetricImpl {
 public:
  L1SumMetric(std::vector<FiniteMetricSpace> factors, std::size_t total)
      : factors_(std::move(factors)), total_(total) {}

  std::size_t size() const override { return total_; }

  Distance distance(PointIndex i, PointIndex j) const override {
    Distance sum = 0;
    for (const auto& f : factors_) {
      const std::size_t m = f.size();
      sum += f.distance(i % m, j % m);
      i /= m;
      j /= m;
    }
    return sum;
  }

  void neighbors_within(PointIndex i, Distance radius, std::vector<PointIndex>& out) const override {
    std::call_once(sorted_once_, [this] { build_sorted(); });
    std::vector<PointIndex> coords(factors_.size());
    PointIndex rest = i;
    for (std::size_t f = 0; f < factors_.size(); ++f) {
      coords[f] = rest % factors_[f].size();
      rest /= factors_[f].size();
    }
    enumerate(coords, 0, 0, 1, radius, i, out);
  }

  std::optional<Distance> known_diameter() const override {
    Distance sum = 0;
    for (const auto& f : factors_) {
      auto d = f.known_diameter();
      if (!d) return std::nullopt;
      sum = checked_add(sum, *d);
    }
    return sum;
  }

 private:
  void build_sorted() const {
    sorted_.resize(factors_.size());
    for (std::size_t f = 0; f < factors_.size(); ++f) {
      const auto& space = factors_[f];
      sorted_[f].resize(space.size());
      for (PointIndex x = 0; x < space.size(); ++x) {
        auto& row = sorted_[f][x];
        for (PointIndex y = 0; y < space.size(); ++y) row.emplace_back(space.distance(x, y), y);
        std::sort(row.begin(), row.end());
      }
    }
  }

  void enumerate(const std::vector<PointIndex>& coords, std::size_t f, PointIndex partial,
                 std::size_t stride, Distance remaining, PointIndex self,
                 std::vector<PointIndex>& out) const {
    if (f == factors_.size()) {
      if (partial != self) out.push_back(partial);
      return;
    }
    for (const auto& [d, y] : sorted_[f][coords[f]]) {
      if (d > remaining) break;
      enumerate(coords, f + 1, partial + y * stride, stride * factors_[f].size(), remaining - d,
                self, out);
    }
  }

  std::vector<FiniteMetricSpace> factors_;
  std::size_t total_;
  mutable std::once_flag sorted_once_;
  mutable std::vector<std::vector<std::vector<std::pair<Distance, PointIndex>>>> sorted_;
};

inline std::string join_labels(const char* head, std::span<const FiniteMetricSpace> spaces) {
  std::string out = head;
  out += '(';
  for (std::size_t i = 0; i < spaces.size(); ++i) {
    if (i) out += ',';
    out += spaces[i].label();
  }
  out += ')';
  return out;
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Constructors

/// Builds a space from a square table, rejecting anything that is not a
/// metric with positive off-diagonal entries.
inline FiniteMetricSpace from_matrix(const std::vector<std::vector<std::int64_t>>& matrix,
                                     std::string label = "matrix") {
  const std::size_t n = matrix.size();
  if (n == 0) throw MetricError("empty matrix");
  for (std::size_t i = 0; i < n; ++i) {
    if (matrix[i].size() != n) {
      std::ostringstream os;
      os << "matrix is not square: row " << i << " has " << matrix[i].size() << " entries, expected "
         << n;
      throw MetricError(os.str());
    }
    for (std::size_t j = 0; j < n; ++j) {
      if (matrix[i][j] < 0) {
        std::ostringstream os;
        os << "negative distance at (" << i << "," << j << "): " << matrix[i][j];
        throw MetricError(os.str());
      }
    }
  }
  std::vector<Distance> table(n * n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) table[i * n + j] = static_cast<Distance>(matrix[i][j]);
  auto violation = detail::check_axioms(
      n, [&](PointIndex i, PointIndex j) { return table[i * n + j]; }, MetricCheckOptions{});
  if (violation) throw MetricError(violation->axiom + ": " + violation->message);
  return FiniteMetricSpace(std::make_shared<detail::MatrixMetric>(n, std::move(table)),
                           std::nullopt, std::move(label));
}

/// Reads "m" followed by m rows of m integers.
inline FiniteMetricSpace read_matrix(std::istream& in, std::string label = "matrix") {
  long long m = 0;
  if (!(in >> m) || m <= 0) throw MetricError("matrix input: expected a positive size on the first line");
  std::vector<std::vector<std::int64_t>> rows(static_cast<std::size_t>(m),
                                              std::vector<std::int64_t>(static_cast<std::size_t>(m)));
  for (auto& row : rows)
    for (auto& x : row)
      if (!(in >> x)) throw MetricError("matrix input: expected " + std::to_string(m * m) + " entries");
  return from_matrix(rows, std::move(label));
}

/// The discrete interval I_a(k): points 0..k with dist(i,j) = a|i-j|.
inline FiniteMetricSpace interval(std::size_t length, Distance weight) {
  if (length < 1) throw MetricError("interval: length must be >= 1");
  if (weight < 1) throw MetricError("interval: weight must be >= 1");
  detail::checked_mul(weight, length);
  return FiniteMetricSpace(std::make_shared<detail::IntervalMetric>(length, weight), 0,
                           "interval(" + std::to_string(length) + "," + std::to_string(weight) + ")");
}

/// Z_m with the a-weighted word metric a|x-y|_m.
inline FiniteMetricSpace cyclic_group(std::size_t order, Distance weight) {
  if (order < 3) throw MetricError("circle: order must be >= 3");
  if (weight < 1) throw MetricError("circle: weight must be >= 1");
  detail::checked_mul(weight, order);
  return FiniteMetricSpace(std::make_shared<detail::CyclicMetric>(order, weight), 0,
                           "circle(" + std::to_string(order) + "," + std::to_string(weight) + ")");
}

/// Glues the spaces at their basepoints. Point 0 is the wedge point; the
/// non-base points of each factor follow in factor order.
inline FiniteMetricSpace wedge(std::span<const FiniteMetricSpace> spaces) {
  if (spaces.empty()) throw MetricError("wedge: needs at least one space");
  for (std::size_t f = 0; f < spaces.size(); ++f)
    if (!spaces[f].basepoint())
      throw MetricError("wedge: factor " + std::to_string(f) + " (" + spaces[f].label() +
                        ") has no basepoint");
  std::vector<FiniteMetricSpace> factors(spaces.begin(), spaces.end());
  return FiniteMetricSpace(std::make_shared<detail::WedgeMetric>(std::move(factors)), 0,
                           detail::join_labels("wedge", spaces));
}

/// Cartesian product with the l1 (coordinate sum) metric. Points are in
/// mixed-radix order with the first factor varying fastest.
inline FiniteMetricSpace l1_sum(std::span<const FiniteMetricSpace> spaces,
                                std::size_t size_cap = kDefaultSizeCap) {
  if (spaces.empty()) throw MetricError("sum: needs at least one space");
  std::size_t total = 1;
  PointIndex base = 0;
  std::size_t stride = 1;
  for (std::size_t f = 0; f < spaces.size(); ++f) {
    if (!spaces[f].basepoint())
      throw MetricError("sum: factor " + std::to_string(f) + " (" + spaces[f].label() +
                        ") has no basepoint");
    const std::size_t m = spaces[f].size();
    if (total > size_cap / m)
      throw MetricError("sum: product size exceeds cap of " + std::to_string(size_cap) + " points");
    total *= m;
    base += *spaces[f].basepoint() * stride;
    stride *= m;
  }
  std::vector<FiniteMetricSpace> factors(spaces.begin(), spaces.end());
  return FiniteMetricSpace(std::make_shared<detail::L1SumMetric>(std::move(factors), total), base,
                           detail::join_labels("sum", spaces));
}

inline FiniteMetricSpace l1_sum(std::initializer_list<FiniteMetricSpace> spaces,
                                std::size_t size_cap = kDefaultSizeCap) {
  return l1_sum(std::span<const FiniteMetricSpace>(spaces.begin(), spaces.size()), size_cap);
}

inline FiniteMetricSpace wedge(std::initializer_list<FiniteMetricSpace> spaces) {
  return wedge(std::span<const FiniteMetricSpace>(spaces.begin(), spaces.size()));
}

/// Induced metric on a subset. Indices are deduplicated and sorted; point i
/// of the result is the i-th smallest selected index.
inline FiniteMetricSpace subspace(const FiniteMetricSpace& space, std::vector<PointIndex> subset) {
  if (subset.empty()) throw MetricError("subspace: subset must be nonempty");
  std::sort(subset.begin(), subset.end());
  subset.erase(std::unique(subset.begin(), subset.end()), subset.end());
  if (subset.back() >= space.size())
    throw MetricError("subspace: index " + std::to_string(subset.back()) + " out of range");
  std::optional<PointIndex> base;
  if (space.basepoint()) {
    auto it = std::lower_bound(subset.begin(), subset.end(), *space.basepoint());
    if (it != subset.end() && *it == *space.basepoint())
      base = static_cast<PointIndex>(it - subset.begin());
  }
  std::string label = "sub(" + space.label() + ",[";
  for (std::size_t i = 0; i < subset.size(); ++i) {
    if (i) label += ',';
    label += std::to_string(subset[i]);
  }
  label += "])";
  return FiniteMetricSpace(std::make_shared<detail::SubspaceMetric>(space, std::move(subset)), base,
                           std::move(label));
}

/// Multiplies every distance by factor.
inline FiniteMetricSpace scaled(const FiniteMetricSpace& space, Distance factor) {
  if (factor < 1) throw MetricError("scale: factor must be >= 1");
  return FiniteMetricSpace(std::make_shared<detail::ScaledMetric>(space, factor), space.basepoint(),
                           "scale(" + space.label() + "," + std::to_string(factor) + ")");
}

// ---------------------------------------------------------------------------
// Queries

inline Distance diameter_by_scan(const FiniteMetricSpace& space) {
  Distance best = 0;
  for (PointIndex i = 0; i < space.size(); ++i)
    for (PointIndex j = i + 1; j < space.size(); ++j) best = std::max(best, space.distance(i, j));
  return best;
}

inline Distance diameter(const FiniteMetricSpace& space) {
  if (auto d = space.known_diameter()) return *d;
  return diameter_by_scan(space);
}

inline Distance min_positive_distance(const FiniteMetricSpace& space) {
  if (space.size() < 2) throw MetricError("min_positive_distance: space has fewer than two points");
  Distance best = std::numeric_limits<Distance>::max();
  for (PointIndex i = 0; i < space.size(); ++i)
    for (PointIndex j = i + 1; j < space.size(); ++j) best = std::min(best, space.distance(i, j));
  return best;
}

/// True iff all distinct points are at distance >= lambda. A one-point space
/// is lambda-discrete for every lambda.
inline bool is_lambda_discrete(const FiniteMetricSpace& space, Distance lambda) {
  if (space.size() < 2) return true;
  return min_positive_distance(space) >= lambda;
}

}  // namespace asdim
