#include <doctest.h>

#include <sstream>

#include "lud/error.h"
#include "lud/formation.h"
#include "lud/io.h"
#include "oracles.h"

using namespace lud;
using lud::testing::thrown_code;

TEST_CASE("formation round trip is bit stable") {
  const Formation f = corrupt_directions(
      exact_directions(random_locations(25, 3, 11), generate_erdos_renyi(25, 0.4, 11)),
      {0.2, 0.05, 11});
  std::stringstream first;
  write_formation(first, f);
  const Formation g = read_formation(first);
  CHECK(g.graph().edges() == f.graph().edges());
  CHECK(g.directions() == f.directions());

  std::stringstream second;
  write_formation(second, g);
  std::stringstream again;
  write_formation(again, f);
  CHECK(second.str() == again.str());
}

TEST_CASE("location round trip is bit stable") {
  const LocationSet t = random_locations(40, 2, 6);
  std::stringstream s;
  write_locations(s, t);
  CHECK(read_locations(s).points() == t.points());
}

TEST_CASE("comments and blank lines are skipped") {
  std::istringstream in(
      "# a formation\n"
      "\n"
      "2 3 2\n"
      "0 1 1 0\n"
      "# middle\n"
      "1 2 0 -1\n");
  const Formation f = read_formation(in);
  CHECK(f.num_edges() == 2);
  CHECK(f.direction(2, 1)[1] == 1.0);
}

TEST_CASE("slightly non-unit directions are normalized") {
  std::istringstream in("2 2 1\n0 1 0.6 0.8000001\n");
  const Formation f = read_formation(in);
  CHECK(std::abs(f.direction(0).norm() - 1.0) <= 1e-15);
}

TEST_CASE("malformed files are parse errors") {
  const char* bad[] = {
      "",
      "2 3\n",
      "2 3 2\n0 1 1 0\n",
      "2 3 1\n0 1 1\n",
      "2 3 1\n0 1 1 0 extra\n",
      "2 3 1\n0 1 1 0\n1 2 0 1\n",
      "2 3 1\n0 1 x 0\n",
      "2 3 1\n0 5 1 0\n",
      "2 3 1\n1 0 1 0\n",
      "2 3 1\n0 1 0 0\n",
  };
  for (const char* text : bad) {
    CAPTURE(text);
    std::istringstream in(text);
    const auto code = thrown_code([&] { read_formation(in); });
    CHECK(code == ErrorCode::kParse);
  }
  std::istringstream locs("2 3\n0 0\n1 1\n");
  CHECK(thrown_code([&] { read_locations(locs); }) == ErrorCode::kParse);
  CHECK(thrown_code([] { load_formation("/nonexistent/formation.txt"); }) == ErrorCode::kParse);
}

TEST_CASE("format_double keeps 17 significant digits") {
  CHECK(format_double(0.1) == "0.10000000000000001");
  CHECK(std::stod(format_double(1.0 / 3.0)) == 1.0 / 3.0);
}
