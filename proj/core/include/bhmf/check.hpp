#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace bhmf {

struct CheckItem {
  std::string name;
  bool pass = false;
  double margin = 0.0;  // distance to the failure boundary, sign-positive when passing
  std::string detail;
};

struct CheckReport {
  std::vector<CheckItem> items;
  bool all_pass = false;
};

/// Runs the full invariant/property suite on seeded random data: ladder
/// algebra, lattice counting, trace-norm sandwich, iterated Cauchy-Schwarz,
/// energy identity, conservation laws (exact and mean-field), order-parameter
/// onset, stationarity, gauge invariance, reduction consistency, moment
/// bounds. Needs nothing from a run configuration beyond the seed.
CheckReport run_check_suite(std::uint64_t seed, int threads = 1);

}  // namespace bhmf
