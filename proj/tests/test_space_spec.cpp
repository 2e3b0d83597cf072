#include <doctest.h>

#include <cstdio>
#include <filesystem>
#include <fstream>

#include "asdim/space_spec.hpp"

using namespace asdim;

namespace {

ParseError parse_error(std::string_view text) {
  try {
    parse_spec(text);
  } catch (const ParseError& e) {
    return e;
  }
  FAIL("no parse error for " << text);
  return ParseError(0, 0, "");
}

}  // namespace

TEST_CASE("parse_spec builds the expression tree") {
  const auto s = parse_spec("wedge(circle(3,1), circle(9,2))");
  CHECK(s.kind == SpecKind::wedge);
  REQUIRE(s.children.size() == 2);
  CHECK(s.children[0].kind == SpecKind::circle);
  CHECK(s.children[1].numbers == std::vector<std::uint64_t>{9, 2});

  const auto sub = parse_spec(" sub( group(3,2) , [0, 1,2] ) ");
  CHECK(sub.kind == SpecKind::sub);
  CHECK(sub.indices == std::vector<PointIndex>{0, 1, 2});
  CHECK(sub.children[0].numbers == std::vector<std::uint64_t>{3, 2});

  CHECK(parse_spec("matrix(\"a b.txt\")").path == "a b.txt");
  CHECK(parse_spec("matrix(data/m.txt)").path == "data/m.txt");
}

TEST_CASE("parse errors carry line, column and what was expected") {
  SUBCASE("arity is reported at the constructor") {
    const auto e = parse_error("circle(5)");
    CHECK(e.line() == 1);
    CHECK(e.column() == 1);
    CHECK(std::string(e.what()).find("circle expects 2 arguments") != std::string::npos);
  }
  SUBCASE("nested arity errors point at the inner constructor") {
    const auto e = parse_error("wedge(circle(3,1),\n  interval(2))");
    CHECK(e.line() == 2);
    CHECK(e.column() == 3);
  }
  SUBCASE("unknown constructor lists the known ones") {
    const auto e = parse_error("torus(3,3)");
    CHECK(e.column() == 1);
    CHECK(std::find(e.expected().begin(), e.expected().end(), "circle") != e.expected().end());
    CHECK(std::string(e.what()).find("expected one of:") != std::string::npos);
  }
  SUBCASE("non-integer arguments") {
    CHECK(parse_error("circle(5,1.5)").column() == 11);
    CHECK(parse_error("circle(x5,1)").column() == 8);
    CHECK(parse_error("circle(-5,1)").column() == 8);
  }
  SUBCASE("ranges") {
    CHECK_THROWS_AS(parse_spec("circle(2,1)"), ParseError);
    CHECK_THROWS_AS(parse_spec("interval(0,1)"), ParseError);
    CHECK_THROWS_AS(parse_spec("interval(3,0)"), ParseError);
    CHECK_THROWS_AS(parse_spec("group(4,2)"), ParseError);
    CHECK_THROWS_AS(parse_spec("group(3,0)"), ParseError);
    CHECK_THROWS_AS(parse_spec("sub(circle(5,1),[])"), ParseError);
    CHECK_THROWS_AS(parse_spec("wedge()"), ParseError);
  }
  SUBCASE("structure") {
    CHECK_THROWS_AS(parse_spec("circle(5,1) x"), ParseError);
    CHECK_THROWS_AS(parse_spec("circle(5,1"), ParseError);
    CHECK_THROWS_AS(parse_spec(""), ParseError);
    CHECK_THROWS_AS(parse_spec("scale(3,circle(5,1))"), ParseError);
    CHECK_THROWS_AS(parse_spec("circle(99999999999999999999999,1)"), ParseError);
  }
}

TEST_CASE("canonical text round trips") {
  for (const char* text : {"interval(3,1)", "circle(9,2)", "group(3,3)", "wedgegroup(3,2)",
                           "wedge(circle(3,1),circle(9,2))", "sum(interval(1,1),circle(5,2),interval(2,3))",
                           "scale(circle(5,1),4)", "sub(group(3,2),[0,1,2,26])", "matrix(m.txt)",
                           "matrix(\"a b\\\"c\")"}) {
    CAPTURE(text);
    const auto spec = parse_spec(text);
    CHECK(to_string(spec) == text);
    CHECK(parse_spec(to_string(spec)) == spec);
  }
  CHECK(to_string(parse_spec(" sum ( interval(1, 1) ,interval(1,1) )")) == "sum(interval(1,1),interval(1,1))");
}

TEST_CASE("build_space") {
  const auto w = build_space("wedge(circle(3,1),circle(9,2))");
  CHECK(w.size() == 11);
  CHECK(w.label() == "wedge(circle(3,1),circle(9,2))");
  CHECK(diameter(w) == 9);

  CHECK(build_space("sum(interval(1,1),interval(1,1))").size() == 4);
  CHECK(diameter(build_space("scale(circle(5,1),4)")) == 8);
  CHECK(build_space("sub(group(3,2),[5,0,5])").size() == 2);
  CHECK(build_space("group(3,2)").size() == 27);
  CHECK(build_space("wedgegroup(3,2)").size() == 11);

  BuildOptions tight;
  tight.size_cap = 100;
  CHECK_THROWS_AS(build_space("group(3,3)", tight), MetricError);
  CHECK_THROWS_AS(build_space("sub(circle(5,1),[5])"), MetricError);

  const auto path = std::filesystem::temp_directory_path() / "asdim_spec_matrix.txt";
  {
    std::ofstream out(path);
    out << "3\n0 1 2\n1 0 1\n2 1 0\n";
  }
  const auto m = build_space("matrix(\"" + path.string() + "\")");
  CHECK(m.size() == 3);
  CHECK(m.distance(0, 2) == 2);
  std::filesystem::remove(path);
  CHECK_THROWS_AS(build_space("matrix(/nonexistent/asdim.txt)"), MetricError);
}
