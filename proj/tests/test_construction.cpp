#include <doctest.h>

#include <sstream>

#include "asdim/construction.hpp"
#include "asdim/oracle.hpp"

using namespace asdim;

TEST_CASE("weight_schedule") {
  const auto g = weight_schedule(3, 4, ScheduleMode::group);
  CHECK(g.weights == std::vector<Distance>{1, 2, 10, 140});
  CHECK(g.short_levels == std::vector<std::size_t>{1});

  CHECK(weight_schedule(3, 1, ScheduleMode::group).weights == std::vector<Distance>{1});
  CHECK(weight_schedule(3, 1, ScheduleMode::wedge).weights == std::vector<Distance>{1});
  CHECK(weight_schedule(3, 3, ScheduleMode::wedge).weights == std::vector<Distance>{1, 2, 10});

  // Z_2 and Z_4 are shorter than 2(n+1); Z_8 is not.
  CHECK(weight_schedule(2, 4, ScheduleMode::group).short_levels == std::vector<std::size_t>{1, 2});
  CHECK(weight_schedule(5, 3, ScheduleMode::group).short_levels.empty());

  CHECK_THROWS_AS(weight_schedule(4, 3, ScheduleMode::group), MetricError);
  CHECK_THROWS_AS(weight_schedule(3, 0, ScheduleMode::group), MetricError);
}

TEST_CASE("schedules match diameters of the prefixes they are built from") {
  for (std::uint64_t p : {3u, 5u}) {
    const auto g = weight_schedule(p, 4, ScheduleMode::group);
    for (std::size_t n = 2; n <= 4; ++n) {
      const auto prefix = group_truncation(p, n - 1);
      if (prefix.size() <= 800) CHECK(g.weight(n) == 1 + diameter_by_scan(prefix));
      CHECK(g.weight(n) == 1 + diameter(prefix));
      CHECK(g.weight(n) > g.weight(n - 1));
    }
    for (auto mode : {ScheduleMode::wedge, ScheduleMode::interval_wedge}) {
      const auto w = weight_schedule(p, 4, mode);
      const auto factors = level_factors(w);
      for (std::size_t n = 2; n <= 4; ++n) {
        const auto prefix = wedge(std::span<const FiniteMetricSpace>(factors.data(), n - 1));
        CHECK(w.weight(n) == 1 + diameter_by_scan(prefix));
      }
    }
  }
}

TEST_CASE("group_truncation") {
  const auto g1 = group_truncation(3, 1);
  CHECK(g1.size() == 3);
  CHECK(diameter(g1) == 1);
  CHECK(g1.label() == "group(3,1)");

  const auto g2 = group_truncation(3, 2);
  CHECK(g2.size() == 27);
  CHECK(diameter_by_scan(g2) == 9);

  const auto g3 = group_truncation(3, 3);
  CHECK(g3.size() == 729);
  CHECK(diameter_by_scan(g3) == 139);

  CHECK_THROWS_AS(group_truncation(3, 5), MetricError);  // 3^15 points
}

TEST_CASE("wedge_truncation") {
  const auto w1 = wedge_truncation(3, 1);
  CHECK(w1.size() == 3);
  CHECK(diameter(w1) == 1);
  const auto w2 = wedge_truncation(3, 2);
  CHECK(w2.size() == 11);
  CHECK(diameter_by_scan(w2) == 9);
  CHECK(wedge_truncation(3, 3).size() == 37);
}

TEST_CASE("dip_scales") {
  CHECK(dip_scales(weight_schedule(3, 4, ScheduleMode::group)) == std::vector<Distance>{0, 1, 9, 139});
  CHECK(dip_scales(weight_schedule(3, 1, ScheduleMode::group)) == std::vector<Distance>{0});
  CHECK(dip_scales(weight_schedule(3, 3, ScheduleMode::wedge)) == std::vector<Distance>{0, 1, 9});
}

TEST_CASE("coordinate circles are isometric to the level factors") {
  const auto g3 = group_truncation(3, 3);
  const auto s = weight_schedule(3, 3, ScheduleMode::group);
  for (std::size_t n = 1; n <= 3; ++n) {
    const auto circle = subspace(g3, group_coordinate_circle(3, 3, n));
    const auto factor = level_factor(s, n);
    REQUIRE(circle.size() == factor.size());
    for (PointIndex i = 0; i < factor.size(); ++i)
      for (PointIndex j = 0; j < factor.size(); ++j) REQUIRE(circle.distance(i, j) == factor.distance(i, j));
  }
  const auto w = weight_schedule(3, 3, ScheduleMode::wedge);
  const auto w3 = wedge_truncation(3, 3);
  for (std::size_t n = 1; n <= 3; ++n) {
    const auto circle = subspace(w3, wedge_level_points(w, n));
    CHECK(diameter_by_scan(circle) == diameter(level_factor(w, n)));
    CHECK(circle.size() == level_factor(w, n).size());
  }
}

TEST_CASE("check_conditions on wedge truncations") {
  for (std::size_t levels = 1; levels <= 4; ++levels) {
    const auto w = weight_schedule(3, levels, ScheduleMode::wedge);
    const auto report = check_conditions(w);
    CAPTURE(levels);
    CHECK(report.ok());
    for (const auto& row : report.rows) {
      CHECK(row.discrete.holds);
      CHECK(row.prefix_bounded.holds);
      CHECK(row.separated.holds);
      if (row.n >= 2) CHECK(row.no_dim_zero.holds);
    }
    // Z_3 at control a_1 is a single cluster; p^1 < 2(1+1) marks the level
    // as not required.
    CHECK_FALSE(report.rows[0].no_dim_zero.holds);
    CHECK_FALSE(report.rows[0].no_dim_zero.required);
  }
  CHECK(dim_le(cyclic_group(9, 2), {2, 4}, 0).outcome == Outcome::infeasible);
}

TEST_CASE("check_conditions on the interval-wedge construction holds at every level") {
  const auto s = weight_schedule(2, 4, ScheduleMode::interval_wedge);
  const auto report = check_conditions(s);
  CHECK(report.ok());
  for (const auto& row : report.rows) CHECK(row.no_dim_zero.holds);
}

TEST_CASE("check_conditions reports the constant-weight negative control") {
  WeightSchedule flat{3, {1, 1, 1}, ScheduleMode::wedge, {1}};
  const auto report = check_conditions(flat);
  CHECK_FALSE(report.ok());
  CHECK_FALSE(report.rows[1].prefix_bounded.holds);
  CHECK(report.rows[1].prefix_bounded.witness == "prefix diameter 1");
  CHECK_FALSE(report.rows[2].prefix_bounded.holds);

  const auto factors = level_factors(weight_schedule(3, 3, ScheduleMode::wedge));
  CHECK_THROWS_AS(check_conditions(flat, std::span<const FiniteMetricSpace>(factors.data(), 2)), MetricError);
}

TEST_CASE("dim_zero_witness") {
  SUBCASE("wedge truncation at lambda 1") {
    const auto w2 = wedge_truncation(3, 2);
    const auto s = weight_schedule(3, 2, ScheduleMode::wedge);
    const auto prefix = wedge_level_points(s, 1);
    const auto cover = dim_zero_witness(w2, 1, 1, prefix);
    REQUIRE(cover.families.size() == 1);
    CHECK(cover.families[0].front() == Cluster{0, 1, 2});
    CHECK(cover.families[0].size() == 9);
    CHECK(validate_cover(w2, cover).ok());
  }
  SUBCASE("G_2 at lambda 1 gives the nine Z_3 cosets") {
    const auto g2 = group_truncation(3, 2);
    const auto cover = dim_zero_witness(g2, 1, 2);
    CHECK(cover.families[0].size() == 9);
    CHECK(validate_cover(g2, cover).ok());
  }
  SUBCASE("one point") {
    const auto cover = dim_zero_witness(from_matrix({{0}}), 5, 0);
    CHECK(cover.families == std::vector<Family>{{{0}}});
  }
  SUBCASE("a component too wide for the control is an error") {
    CHECK_THROWS_WITH_AS(dim_zero_witness(interval(3, 1), 1, 2), doctest::Contains("diameter 3"), CoverError);
    const auto w2 = wedge_truncation(3, 2);
    const std::vector<PointIndex> split{1, 3};
    CHECK_THROWS_AS(dim_zero_witness(w2, 1, 1, split), CoverError);
  }
}

TEST_CASE("profile on group truncations") {
  const auto g2 = group_truncation(3, 2);
  const auto p2 = profile(g2, 2, {1});
  REQUIRE(p2.samples.size() == 1);
  CHECK(p2.samples[0].dim == std::optional<std::size_t>{0});
  CHECK(p2.samples[0].status == ProfileStatus::exact);

  const auto g3 = group_truncation(3, 3);
  ProfileOptions options;
  options.witness_subsets = {group_coordinate_circle(3, 3, 3)};
  const auto p3 = profile(g3, 2, {9, 10}, options);
  CHECK(p3.samples[0].dim == std::optional<std::size_t>{0});
  CHECK(p3.samples[0].status == ProfileStatus::exact);
  CHECK(p3.samples[0].control == 18);
  CHECK(p3.samples[1].dim == std::optional<std::size_t>{1});
  CHECK(p3.samples[1].status == ProfileStatus::lower_bound);
  CHECK(p3.samples[1].evidence == "witness subspace 0");
  // The circle S_10(27) alone rules out dimension 0 at (10, 20).
  CHECK(dim_le(subspace(g3, group_coordinate_circle(3, 3, 3)), {10, 20}, 0).outcome == Outcome::infeasible);

  ProfileOptions strict = options;
  strict.resolve_lower_bounds = false;
  const auto p3u = profile(g3, 2, {10}, strict);
  CHECK(p3u.samples[0].status == ProfileStatus::unknown);
  CHECK_FALSE(p3u.samples[0].dim);

  std::ostringstream csv;
  write_profile_csv(csv, p3);
  CHECK(csv.str() == "c,lambda,control,dim,status\n2,9,18,0,exact\n2,10,20,1,lower-bound\n");

  CHECK_THROWS_AS(profile(g2, 2, {2, 1}), MetricError);
  CHECK_THROWS_AS(profile(g2, 2, {0}), MetricError);
}

TEST_CASE("profile dips to zero at every lambda_n and rises at every a_n") {
  const auto s = weight_schedule(3, 3, ScheduleMode::group);
  const auto g3 = group_truncation(3, 3);
  for (std::size_t n = 2; n <= 3; ++n) {
    const Distance dip = s.weight(n) - 1;
    CHECK(profile(g3, 2, {dip}).samples[0].dim == std::optional<std::size_t>{0});
    CHECK(validate_cover(g3, dim_zero_witness(g3, dip, 2 * dip)).ok());
    const auto circle = subspace(g3, group_coordinate_circle(3, 3, n));
    for (Distance c = 1; c <= n; ++c) {
      CHECK(dim_le(circle, {s.weight(n), c * s.weight(n)}, 0).outcome == Outcome::infeasible);
      const auto rise = profile(g3, c, {s.weight(n)}).samples[0];
      CHECK(rise.dim >= std::optional<std::size_t>{1});
    }
  }
}

TEST_CASE("profile on a small space runs the exact solver, in parallel if asked") {
  const auto w3 = wedge_truncation(3, 3);
  ProfileOptions options;
  options.threads = 4;
  const std::vector<Distance> lambdas{1, 2, 9, 10};
  const auto par = profile(w3, 2, lambdas, options);
  const auto seq = profile(w3, 2, lambdas);
  REQUIRE(par.samples.size() == 4);
  for (std::size_t i = 0; i < 4; ++i) {
    CHECK(par.samples[i].dim == seq.samples[i].dim);
    CHECK(par.samples[i].status == ProfileStatus::exact);
  }
  CHECK(par.samples[0].dim == std::optional<std::size_t>{0});
  CHECK(par.samples[1].dim == std::optional<std::size_t>{1});
  CHECK(par.samples[2].dim == std::optional<std::size_t>{0});
  CHECK(par.samples[3].dim == std::optional<std::size_t>{1});
}

TEST_CASE("schedule CSV") {
  std::ostringstream out;
  write_schedule_csv(out, weight_schedule(3, 4, ScheduleMode::group));
  CHECK(out.str() == "n,a_n\n1,1\n2,2\n3,10\n4,140\n");
}
