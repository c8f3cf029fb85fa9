#pragma once

#include <Eigen/Dense>

namespace bhmf {

/// Occupation cutoff of the single-site Fock space: levels |0>..|M> are kept.
struct FockCutoff {
  int max_occupation = 0;

  int dim() const { return max_occupation + 1; }
};

/// Dense operator on one truncated Fock site.
struct SiteOperator {
  Eigen::MatrixXcd mat;
  FockCutoff cutoff;
};

struct LadderOperators {
  SiteOperator annihilator;  // a[n-1, n] = sqrt(n)
  SiteOperator creation;     // adjoint of annihilator
  SiteOperator number;       // diag(0, 1, ..., M)
};

/// Ladder matrices on the truncated site. The cutoff itself realizes the
/// truncated operators: entries that would raise the occupation above M are
/// absent by construction.
LadderOperators build_ladder(FockCutoff cutoff);

/// diag(n^k) for real k >= 0 (half-integer powers are fine, the operator is
/// diagonal). By convention 0^0 = 1.
Eigen::MatrixXcd number_power(FockCutoff cutoff, double k);

}  // namespace bhmf
