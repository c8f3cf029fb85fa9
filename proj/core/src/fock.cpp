#include "bhmf/fock.hpp"

#include <cmath>

namespace bhmf {

LadderOperators build_ladder(FockCutoff cutoff) {
  const int dim = cutoff.dim();
  Eigen::MatrixXcd a = Eigen::MatrixXcd::Zero(dim, dim);
  for (int n = 1; n <= cutoff.max_occupation; ++n) {
    a(n - 1, n) = std::sqrt(static_cast<double>(n));
  }
  Eigen::MatrixXcd adag = a.adjoint();
  Eigen::MatrixXcd num = Eigen::MatrixXcd::Zero(dim, dim);
  for (int n = 0; n < dim; ++n) num(n, n) = static_cast<double>(n);
  return {{a, cutoff}, {adag, cutoff}, {num, cutoff}};
}

Eigen::MatrixXcd number_power(FockCutoff cutoff, double k) {
  const int dim = cutoff.dim();
  Eigen::MatrixXcd out = Eigen::MatrixXcd::Zero(dim, dim);
  for (int n = 0; n < dim; ++n) {
    out(n, n) = (n == 0 && k == 0.0) ? 1.0 : std::pow(static_cast<double>(n), k);
  }
  return out;
}

}  // namespace bhmf
