#pragma once

// Covers by families of clusters, their validation, and the certificate
// text format.
//
// Certificate format (line oriented, '#' starts a comment line):
//
//   asdim-certificate 1
//   label <space label>
//   size <number of points>
//   lambda <scale>
//   control <diameter bound>
//   families <count>
//   family 0: 0 1 2 | 5 6
//   family 1: 3 4
//   end
//
// Clusters within a family are separated by '|' and list point indices in
// ascending order. An empty family is written as "family i:".

#include <algorithm>
#include <istream>
#include <map>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <tuple>
#include <vector>

#include "asdim/metric_space.hpp"

namespace asdim {

using Cluster = std::vector<PointIndex>;
using Family = std::vector<Cluster>;

struct ScaledCover {
  ScalePair scale;
  std::vector<Family> families;

  friend bool operator==(const ScaledCover&, const ScaledCover&) = default;
};

class CoverError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

enum class ViolationKind { uncovered_point, disjointness, diameter };

inline const char* to_string(ViolationKind kind) {
  switch (kind) {
    case ViolationKind::uncovered_point: return "uncovered-point";
    case ViolationKind::disjointness: return "disjointness";
    case ViolationKind::diameter: return "diameter";
  }
  return "?";
}

/// One failed condition. For uncovered-point the witness is the point; for
/// disjointness it is the closest pair across the two clusters; for diameter
/// the farthest pair inside the cluster.
struct Violation {
  ViolationKind kind;
  std::vector<PointIndex> witness;
  Distance measured = 0;
  std::size_t family = 0;
};

struct ValidationReport {
  std::vector<Violation> violations;

  bool ok() const noexcept { return violations.empty(); }
};

inline std::string describe(const Violation& v) {
  std::ostringstream os;
  os << to_string(v.kind);
  switch (v.kind) {
    case ViolationKind::uncovered_point:
      os << ": point " << v.witness.at(0) << " is not covered";
      break;
    case ViolationKind::disjointness:
      os << ": family " << v.family << " has clusters at distance " << v.measured << " via points ("
         << v.witness.at(0) << "," << v.witness.at(1) << ")";
      break;
    case ViolationKind::diameter:
      os << ": family " << v.family << " has a cluster of diameter " << v.measured
         << " via points (" << v.witness.at(0) << "," << v.witness.at(1) << ")";
      break;
  }
  return os.str();
}

namespace detail {

// Disjointness through neighbor enumeration: only pairs of clusters with
// points within lambda are visited. Reports the same pairs, in the same
// order, as the all-pairs scan.
inline void report_close_clusters(const FiniteMetricSpace& space, const Family& family, Distance lambda,
                                  std::size_t f, ValidationReport& report) {
  struct Closest {
    Distance d;
    PointIndex a, b;
  };
  std::vector<std::vector<std::size_t>> owners(space.size());
  for (std::size_t u = 0; u < family.size(); ++u)
    for (PointIndex x : family[u])
      if (owners[x].empty() || owners[x].back() != u) owners[x].push_back(u);

  std::map<std::pair<std::size_t, std::size_t>, Closest> close;
  auto offer = [&](std::size_t u, PointIndex a, std::size_t v, PointIndex b, Distance d) {
    if (u == v) return;
    if (u > v) {
      std::swap(u, v);
      std::swap(a, b);
    }
    const Closest c{d, a, b};
    auto [it, fresh] = close.try_emplace({u, v}, c);
    if (!fresh && std::tie(d, a, b) < std::tie(it->second.d, it->second.a, it->second.b)) it->second = c;
  };
  for (PointIndex x = 0; x < space.size(); ++x) {
    if (owners[x].empty()) continue;
    for (std::size_t i = 0; i < owners[x].size(); ++i)
      for (std::size_t j = i + 1; j < owners[x].size(); ++j) offer(owners[x][i], x, owners[x][j], x, 0);
    for (PointIndex y : space.neighbors_within(x, lambda)) {
      if (y < x) continue;
      const Distance d = space.distance(x, y);
      for (std::size_t u : owners[x])
        for (std::size_t v : owners[y]) offer(u, x, v, y, d);
    }
  }
  for (const auto& [key, c] : close)
    report.violations.push_back({ViolationKind::disjointness, {c.a, c.b}, c.d, f});
}

}  // namespace detail

/// Checks covering, strict lambda-disjointness within each family and the
/// diameter bound on every cluster, reporting every violation found.
/// Throws CoverError on an out-of-range index or an empty cluster.
inline ValidationReport validate_cover(const FiniteMetricSpace& space, const ScaledCover& cover) {
  const std::size_t n = space.size();
  const auto [lambda, control] = cover.scale;
  ValidationReport report;
  std::vector<char> covered(n, 0);

  for (std::size_t f = 0; f < cover.families.size(); ++f) {
    const Family& family = cover.families[f];
    for (const Cluster& cluster : family) {
      if (cluster.empty()) throw CoverError("family " + std::to_string(f) + " has an empty cluster");
      for (PointIndex x : cluster) {
        if (x >= n)
          throw CoverError("point index " + std::to_string(x) + " out of range for a space of " +
                           std::to_string(n) + " points");
        covered[x] = 1;
      }
    }

    for (const Cluster& cluster : family) {
      Distance worst = 0;
      PointIndex wa = cluster.front(), wb = cluster.front();
      for (std::size_t i = 0; i < cluster.size(); ++i)
        for (std::size_t j = i + 1; j < cluster.size(); ++j) {
          const Distance d = space.distance(cluster[i], cluster[j]);
          if (d > worst) {
            worst = d;
            wa = cluster[i];
            wb = cluster[j];
          }
        }
      if (worst > control) report.violations.push_back({ViolationKind::diameter, {wa, wb}, worst, f});
    }

    if (n > kMemoizeLimit && family.size() > 64) {
      detail::report_close_clusters(space, family, lambda, f, report);
      continue;
    }
    for (std::size_t u = 0; u < family.size(); ++u)
      for (std::size_t v = u + 1; v < family.size(); ++v) {
        Distance closest = std::numeric_limits<Distance>::max();
        PointIndex ca = 0, cb = 0;
        for (PointIndex a : family[u])
          for (PointIndex b : family[v]) {
            const Distance d = space.distance(a, b);
            if (d < closest) {
              closest = d;
              ca = a;
              cb = b;
            }
          }
        if (closest <= lambda)
          report.violations.push_back({ViolationKind::disjointness, {ca, cb}, closest, f});
      }
  }

  for (PointIndex x = 0; x < n; ++x)
    if (!covered[x]) report.violations.push_back({ViolationKind::uncovered_point, {x}, 0, 0});
  return report;
}

/// Keeps every point only in the first (family, cluster) that contains it
/// and drops clusters left empty. The family count is unchanged.
inline ScaledCover shrink_to_partition(const FiniteMetricSpace& space, const ScaledCover& cover) {
  const auto report = validate_cover(space, cover);
  if (!report.ok())
    throw CoverError("shrink_to_partition: input cover is invalid (" + describe(report.violations.front()) + ")");
  std::vector<char> taken(space.size(), 0);
  ScaledCover out{cover.scale, {}};
  out.families.reserve(cover.families.size());
  for (const Family& family : cover.families) {
    Family kept;
    for (const Cluster& cluster : family) {
      Cluster c;
      for (PointIndex x : cluster)
        if (!taken[x]) {
          taken[x] = 1;
          c.push_back(x);
        }
      std::sort(c.begin(), c.end());
      c.erase(std::unique(c.begin(), c.end()), c.end());
      if (!c.empty()) kept.push_back(std::move(c));
    }
    out.families.push_back(std::move(kept));
  }
  return out;
}

/// Number of clusters containing each point is exactly one.
inline bool is_partition(const FiniteMetricSpace& space, const ScaledCover& cover) {
  std::vector<int> count(space.size(), 0);
  for (const auto& family : cover.families)
    for (const auto& cluster : family)
      for (PointIndex x : cluster) {
        if (x >= space.size()) return false;
        ++count[x];
      }
  return std::all_of(count.begin(), count.end(), [](int c) { return c == 1; });
}

// ---------------------------------------------------------------------------
// Certificates

struct Certificate {
  std::string label;
  std::size_t size = 0;
  ScaledCover cover;
};

inline void write_certificate(std::ostream& out, const Certificate& cert) {
  out << "asdim-certificate 1\n";
  out << "label " << cert.label << "\n";
  out << "size " << cert.size << "\n";
  out << "lambda " << cert.cover.scale.lambda << "\n";
  out << "control " << cert.cover.scale.control << "\n";
  out << "families " << cert.cover.families.size() << "\n";
  for (std::size_t f = 0; f < cert.cover.families.size(); ++f) {
    out << "family " << f << ":";
    const auto& family = cert.cover.families[f];
    for (std::size_t c = 0; c < family.size(); ++c) {
      if (c) out << " |";
      Cluster sorted = family[c];
      std::sort(sorted.begin(), sorted.end());
      for (PointIndex x : sorted) out << ' ' << x;
    }
    out << "\n";
  }
  out << "end\n";
}

inline void write_certificate(std::ostream& out, const FiniteMetricSpace& space,
                              const ScaledCover& cover) {
  write_certificate(out, Certificate{space.label(), space.size(), cover});
}

namespace detail {

inline std::string expect_key(std::istream& in, const std::string& key, std::size_t& line_no) {
  std::string line;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty() || line[0] == '#') continue;
    if (line.rfind(key, 0) != 0 || (line.size() > key.size() && line[key.size()] != ' '))
      throw CoverError("certificate line " + std::to_string(line_no) + ": expected '" + key + "'");
    return line.size() > key.size() ? line.substr(key.size() + 1) : std::string{};
  }
  throw CoverError("certificate: unexpected end of input, expected '" + key + "'");
}

inline std::uint64_t parse_count(const std::string& text, std::size_t line_no) {
  std::size_t pos = 0;
  unsigned long long v = 0;
  try {
    v = std::stoull(text, &pos);
  } catch (const std::exception&) {
    pos = 0;
  }
  if (pos == 0 || pos != text.size() || text[0] == '-')
    throw CoverError("certificate line " + std::to_string(line_no) + ": expected a nonnegative integer, got '" + text + "'");
  return v;
}

}  // namespace detail

inline Certificate read_certificate(std::istream& in) {
  std::size_t line_no = 0;
  Certificate cert;
  if (detail::expect_key(in, "asdim-certificate", line_no) != "1")
    throw CoverError("certificate: unsupported version");
  cert.label = detail::expect_key(in, "label", line_no);
  cert.size = detail::parse_count(detail::expect_key(in, "size", line_no), line_no);
  cert.cover.scale.lambda = detail::parse_count(detail::expect_key(in, "lambda", line_no), line_no);
  cert.cover.scale.control = detail::parse_count(detail::expect_key(in, "control", line_no), line_no);
  const auto families = detail::parse_count(detail::expect_key(in, "families", line_no), line_no);
  for (std::uint64_t f = 0; f < families; ++f) {
    const std::string body = detail::expect_key(in, "family", line_no);
    const auto colon = body.find(':');
    if (colon == std::string::npos)
      throw CoverError("certificate line " + std::to_string(line_no) + ": missing ':'");
    if (detail::parse_count(body.substr(0, colon), line_no) != f)
      throw CoverError("certificate line " + std::to_string(line_no) + ": families out of order");
    Family family;
    std::istringstream rest(body.substr(colon + 1));
    std::string token;
    Cluster current;
    while (rest >> token) {
      if (token == "|") {
        if (current.empty())
          throw CoverError("certificate line " + std::to_string(line_no) + ": empty cluster");
        family.push_back(std::move(current));
        current.clear();
      } else {
        current.push_back(detail::parse_count(token, line_no));
      }
    }
    if (!current.empty()) family.push_back(std::move(current));
    else if (!family.empty())
      throw CoverError("certificate line " + std::to_string(line_no) + ": trailing '|'");
    cert.cover.families.push_back(std::move(family));
  }
  detail::expect_key(in, "end", line_no);
  return cert;
}

}  // namespace asdim
