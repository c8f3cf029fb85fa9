#pragma once

#include <vector>

namespace bhmf {

/// Directed bond (x, x+e_i mod L): one entry per site per coordinate
/// direction, d*L^d in total. At L=2 each unordered neighbor pair therefore
/// appears twice, which is exactly the multiplicity that makes the
/// coordination number 2d and the hopping normalization consistent.
struct Bond {
  int source;
  int target;
  int direction;  // 0-based coordinate axis
};

/// Periodic grid (Z/LZ)^d with lexicographically ranked sites
/// (coordinate 0 most significant).
class Lattice {
 public:
  Lattice(int side, int dim);  // throws ConfigError for side < 2 or dim < 1

  int side() const { return side_; }
  int dim() const { return dim_; }
  int num_sites() const { return num_sites_; }
  const std::vector<Bond>& bonds() const { return bonds_; }

  std::vector<int> site_coords(int index) const;
  int site_index(const std::vector<int>& coords) const;  // coords reduced mod L

 private:
  int side_;
  int dim_;
  int num_sites_;
  std::vector<Bond> bonds_;
};

}  // namespace bhmf
