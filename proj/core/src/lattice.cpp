#include "bhmf/lattice.hpp"

#include <string>

#include "bhmf/errors.hpp"

namespace bhmf {

Lattice::Lattice(int side, int dim) : side_(side), dim_(dim) {
  if (side < 2) throw ConfigError("lattice.L must be >= 2, got " + std::to_string(side));
  if (dim < 1) throw ConfigError("lattice.d must be >= 1, got " + std::to_string(dim));

  num_sites_ = 1;
  for (int i = 0; i < dim; ++i) {
    if (num_sites_ > (1 << 28) / side)
      throw ConfigError("lattice has too many sites for indexing");
    num_sites_ *= side;
  }

  // stride of axis i in the lexicographic rank (axis 0 most significant)
  std::vector<int> strides(dim);
  strides[dim - 1] = 1;
  for (int i = dim - 2; i >= 0; --i) strides[i] = strides[i + 1] * side;

  bonds_.reserve(static_cast<std::size_t>(dim) * num_sites_);
  for (int site = 0; site < num_sites_; ++site) {
    for (int axis = 0; axis < dim; ++axis) {
      int coord = (site / strides[axis]) % side;
      int next = (coord + 1) % side;
      int target = site + (next - coord) * strides[axis];
      bonds_.push_back({site, target, axis});
    }
  }
}

std::vector<int> Lattice::site_coords(int index) const {
  std::vector<int> coords(dim_);
  for (int axis = dim_ - 1; axis >= 0; --axis) {
    coords[axis] = index % side_;
    index /= side_;
  }
  return coords;
}

int Lattice::site_index(const std::vector<int>& coords) const {
  int index = 0;
  for (int axis = 0; axis < dim_; ++axis) {
    int c = coords[axis] % side_;
    if (c < 0) c += side_;
    index = index * side_ + c;
  }
  return index;
}

}  // namespace bhmf
