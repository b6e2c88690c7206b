#include <doctest.h>

#include <regex>

#include "relcheck/frontend.hpp"

using namespace relcheck;

namespace {
Vec4 v(long a, long b, long c, long d) { return Vec4(Scalar(a), Scalar(b), Scalar(c), Scalar(d)); }

std::size_t count(const std::string& s, const std::string& needle) {
  std::size_t n = 0;
  for (auto p = s.find(needle); p != std::string::npos; p = s.find(needle, p + 1)) ++n;
  return n;
}

Scenario diamond() {
  Scenario s;
  s.observers["left"] = make_observer(ModelKind::StlOnly, v(0, -1, 0, 0), v(1, 0, 0, 0));
  s.observers["right"] = make_observer(ModelKind::StlOnly, v(0, 1, 0, 0), v(1, 0, 0, 0));
  s.signals["s1"] = make_signal(v(0, 0, 0, 0), v(1, 1, 0, 0));
  s.signals["s2"] = make_signal(v(1, 1, 0, 0), v(2, 0, 0, 0));
  s.signals["s3"] = make_signal(v(0, 0, 0, 0), v(1, -1, 0, 0));
  s.signals["s4"] = make_signal(v(1, -1, 0, 0), v(2, 0, 0, 0));
  return s;
}
}  // namespace

TEST_CASE("plane names") {
  CHECK(parse_plane("t-x1") == 1);
  CHECK(parse_plane("t-x3") == 3);
  CHECK_THROWS_AS(parse_plane("x-y"), std::invalid_argument);
}

TEST_CASE("diamond diagram") {
  const std::string svg = render_diagram(diamond(), 1);
  CHECK(svg == render_diagram(diamond(), 1));
  CHECK(count(svg, "class=\"signal\"") == 4);
  CHECK(count(svg, "stroke-dasharray") == 4);
  CHECK(count(svg, "class=\"observer\"") == 2);
  CHECK(svg.find(">s3</text>") != std::string::npos);

  // In the frame the diamond spans x1 in [-2,2] and t in [-1,3], 360 px wide;
  // s1 runs from (0,0) to (1,1), so both its screen offsets are 90 px.
  std::smatch m;
  std::regex line("<line class=\"signal\" x1=\"([0-9.]+)\" y1=\"([0-9.]+)\" x2=\"([0-9.]+)\" y2=\"([0-9.]+)\"");
  REQUIRE(std::regex_search(svg, m, line));
  const double dx = std::stod(m[3]) - std::stod(m[1]), dy = std::stod(m[4]) - std::stod(m[2]);
  CHECK(dx == doctest::Approx(90.0));
  CHECK(dy == doctest::Approx(-90.0));
}

TEST_CASE("empty scenario draws only axes") {
  const std::string svg = render_diagram(Scenario{}, 2);
  CHECK(count(svg, "class=\"axis\"") == 2);
  CHECK(count(svg, "<line") == 2);
  CHECK(count(svg, "<circle") == 0);
  CHECK(svg.find(">x2</text>") != std::string::npos);
}

TEST_CASE("faster-than-light worldline is flatter than light") {
  Scenario s;
  s.kind = ModelKind::Ftl;
  s.observers["f"] = make_observer(ModelKind::Ftl, v(0, 0, 0, 0), v(1, 2, 0, 0));
  const std::string svg = render_diagram(s, 1);
  std::smatch m;
  std::regex line("<line class=\"observer\" x1=\"([0-9.]+)\" y1=\"([0-9.]+)\" x2=\"([0-9.]+)\" y2=\"([0-9.]+)\"");
  REQUIRE(std::regex_search(svg, m, line));
  const double dx = std::stod(m[3]) - std::stod(m[1]), dy = std::stod(m[4]) - std::stod(m[2]);
  CHECK(std::abs(dy) < std::abs(dx));
  CHECK(dy / dx == doctest::Approx(-0.5));
}
