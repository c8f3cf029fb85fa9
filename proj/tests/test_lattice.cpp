#include <doctest.h>

#include <map>
#include <set>

#include "bhmf/errors.hpp"
#include "bhmf/lattice.hpp"

using namespace bhmf;

namespace {

std::map<std::pair<int, int>, int> pair_multiplicity(const Lattice& lat) {
  std::map<std::pair<int, int>, int> mult;
  for (const Bond& b : lat.bonds())
    ++mult[{std::min(b.source, b.target), std::max(b.source, b.target)}];
  return mult;
}

}  // namespace

TEST_CASE("two-site ring: the single pair carries multiplicity 2") {
  Lattice lat(2, 1);
  CHECK(lat.num_sites() == 2);
  REQUIRE(lat.bonds().size() == 2);
  CHECK(lat.bonds()[0].source == 0);
  CHECK(lat.bonds()[0].target == 1);
  CHECK(lat.bonds()[1].source == 1);
  CHECK(lat.bonds()[1].target == 0);
  auto mult = pair_multiplicity(lat);
  CHECK(mult.size() == 1);
  CHECK(mult.at({0, 1}) == 2);
}

TEST_CASE("three-site ring: each unordered pair exactly once") {
  Lattice lat(3, 1);
  CHECK(lat.num_sites() == 3);
  REQUIRE(lat.bonds().size() == 3);
  auto mult = pair_multiplicity(lat);
  CHECK(mult.size() == 3);
  for (const auto& [pair, count] : mult) CHECK(count == 1);
}

TEST_CASE("cube at L = 2, d = 3: 8 sites, 24 bonds, coordination 6") {
  Lattice lat(2, 3);
  CHECK(lat.num_sites() == 8);
  CHECK(lat.bonds().size() == 24);
  std::vector<int> touch(8, 0);
  for (const Bond& b : lat.bonds()) {
    ++touch[b.source];
    ++touch[b.target];
  }
  for (int t : touch) CHECK(t == 6);
}

TEST_CASE("bond counting and multiplicity across the (L, d) grid") {
  for (int L : {2, 3, 4}) {
    for (int d : {1, 2, 3}) {
      CAPTURE(L);
      CAPTURE(d);
      Lattice lat(L, d);
      long sites = 1;
      for (int i = 0; i < d; ++i) sites *= L;
      CHECK(lat.num_sites() == sites);
      CHECK(static_cast<long>(lat.bonds().size()) == d * sites);

      std::vector<int> as_source(lat.num_sites(), 0), as_target(lat.num_sites(), 0);
      for (const Bond& b : lat.bonds()) {
        ++as_source[b.source];
        ++as_target[b.target];
      }
      for (int s : as_source) CHECK(s == d);
      for (int t : as_target) CHECK(t == d);

      for (const auto& [pair, count] : pair_multiplicity(lat))
        CHECK(count == (L == 2 ? 2 : 1));
    }
  }
}

TEST_CASE("coordinates reduce mod L and the rank is lexicographic") {
  Lattice lat(3, 2);
  CHECK(lat.site_index({0, 0}) == 0);
  CHECK(lat.site_index({0, 1}) == 1);
  CHECK(lat.site_index({1, 0}) == 3);  // axis 0 is most significant
  CHECK(lat.site_index({4, -1}) == lat.site_index({1, 2}));
  for (int i = 0; i < lat.num_sites(); ++i)
    CHECK(lat.site_index(lat.site_coords(i)) == i);
}

TEST_CASE("bond targets shift exactly one coordinate by +1 mod L") {
  Lattice lat(4, 3);
  for (const Bond& b : lat.bonds()) {
    auto src = lat.site_coords(b.source);
    auto dst = lat.site_coords(b.target);
    for (int axis = 0; axis < 3; ++axis) {
      int expected = (axis == b.direction) ? (src[axis] + 1) % 4 : src[axis];
      CHECK(dst[axis] == expected);
    }
  }
}

TEST_CASE("degenerate shapes are rejected") {
  CHECK_THROWS_AS(Lattice(1, 1), ConfigError);
  CHECK_THROWS_AS(Lattice(0, 2), ConfigError);
  CHECK_THROWS_AS(Lattice(2, 0), ConfigError);
}
