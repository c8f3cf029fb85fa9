#pragma once

#include <complex>
#include <cstdint>
#include <vector>

#include <Eigen/Dense>

#include "bhmf/fock.hpp"
#include "bhmf/lattice.hpp"

namespace bhmf {

struct ModelParams {
  double hopping = 0.0;    // J
  double chemical = 0.0;   // mu
  double coupling = 0.0;   // U
};

/// Mixed-radix index map for the occupation basis: site 0 varies fastest,
/// index = sum_x n_x (M+1)^x.
class FockBasis {
 public:
  FockBasis(FockCutoff cutoff, int num_sites);

  std::int64_t dimension() const { return dimension_; }
  int num_sites() const { return num_sites_; }
  int site_dim() const { return site_dim_; }
  std::int64_t stride(int site) const { return strides_[site]; }

  int occupation(std::int64_t index, int site) const {
    return static_cast<int>((index / strides_[site]) % site_dim_);
  }

 private:
  int site_dim_;
  int num_sites_;
  std::int64_t dimension_;
  std::vector<std::int64_t> strides_;
};

/// Amplitude vector over the tensor-product occupation basis.
struct ManyBodyState {
  Eigen::VectorXcd amplitudes;
  FockCutoff cutoff;
  int num_sites = 0;

  FockBasis basis() const { return FockBasis(cutoff, num_sites); }
  double norm() const { return amplitudes.norm(); }
};

/// Gutzwiller product of one normalized site wave function over all sites.
ManyBodyState product_state(const Eigen::VectorXcd& site_wavefunction,
                            const Lattice& lattice, FockCutoff cutoff);

/// Product state with the first `num_perturbed_sites` sites in `perp` and the
/// rest in `phi`.
ManyBodyState perturbed_product_state(const Eigen::VectorXcd& phi,
                                      const Eigen::VectorXcd& perp,
                                      int num_perturbed_sites,
                                      const Lattice& lattice, FockCutoff cutoff);

ManyBodyState fock_basis_state(const std::vector<int>& occupations,
                               const Lattice& lattice, FockCutoff cutoff);

/// Bose-Hubbard Hamiltonian in compressed sparse row form. All entries are
/// real in the occupation basis, and the matrix is symmetric by assembly
/// (each directed bond contributes a^*_x a_y + a^*_y a_x once, with
/// coefficient -J/(2d); the on-site part is diagonal).
class SparseHamiltonian {
 public:
  std::int64_t dimension() const { return dim_; }
  const std::vector<std::int64_t>& row_ptr() const { return row_ptr_; }
  const std::vector<std::int64_t>& col() const { return col_; }
  const std::vector<double>& val() const { return val_; }

  const ModelParams& params() const { return params_; }
  const Lattice& lattice() const { return lattice_; }
  FockCutoff cutoff() const { return cutoff_; }

  /// y = H x. Rows are processed independently (optionally split over
  /// threads), each row accumulated in column order, so the result is
  /// bitwise identical for any thread count.
  void apply(const Eigen::VectorXcd& x, Eigen::VectorXcd& y, int threads = 1) const;

  Eigen::MatrixXcd dense() const;

  friend SparseHamiltonian build_hamiltonian(const ModelParams&, const Lattice&,
                                             FockCutoff, std::uint64_t);

 private:
  SparseHamiltonian(const Lattice& lattice, FockCutoff cutoff)
      : lattice_(lattice), cutoff_(cutoff) {}

  std::int64_t dim_ = 0;
  std::vector<std::int64_t> row_ptr_;
  std::vector<std::int64_t> col_;
  std::vector<double> val_;
  ModelParams params_;
  Lattice lattice_;
  FockCutoff cutoff_;
};

/// Bytes needed to assemble H and run the Krylov propagator. Documented
/// formula (upper bound, used for the resource gate):
///   dim * 16 * (krylov_dim + 4)            state vectors and workspace
/// + dim * (1 + 2 d L^d) * (8 + 8)          CSR values and column indices
/// + (dim + 1) * 8                          CSR row pointers.
double estimate_run_bytes(const Lattice& lattice, FockCutoff cutoff, int krylov_dim);

/// Assembles the Hamiltonian; throws ResourceError when the CSR bound alone
/// exceeds `memory_cap_bytes` (0 = no cap).
SparseHamiltonian build_hamiltonian(const ModelParams& params, const Lattice& lattice,
                                    FockCutoff cutoff, std::uint64_t memory_cap_bytes = 0);

struct EvolveOptions {
  double tol = 1e-10;   // local error per Krylov substep, in [1e-14, 1e-6]
  int krylov_dim = 30;
  int threads = 1;
};

/// exp(-i H t) psi0 sampled on a strictly increasing time grid, via
/// short-iterate Lanczos with adaptive substepping. Happy breakdown
/// (invariant subspace) terminates the step exactly and is not an error.
std::vector<ManyBodyState> evolve_exact(const SparseHamiltonian& h,
                                        const ManyBodyState& psi0,
                                        const std::vector<double>& t_grid,
                                        const EvolveOptions& opts = {});

/// Dense-diagonalization propagation, the oracle route for dimensions
/// up to a few hundred.
std::vector<ManyBodyState> evolve_dense(const SparseHamiltonian& h,
                                        const ManyBodyState& psi0,
                                        const std::vector<double>& t_grid);

// --- expectation values, computed without materializing dense operators ---

/// A_x psi for a one-site operator A at site x (streamed over amplitudes).
Eigen::VectorXcd apply_one_site(const ManyBodyState& psi, const Eigen::MatrixXcd& op,
                                int site);

/// <psi, A_x psi> for a one-site operator A at site x.
std::complex<double> expectation_one_site(const ManyBodyState& psi,
                                          const Eigen::MatrixXcd& op, int site);

/// <psi, A_x B_y psi> for x != y.
std::complex<double> expectation_pair(const ManyBodyState& psi,
                                      const Eigen::MatrixXcd& op_x, int site_x,
                                      const Eigen::MatrixXcd& op_y, int site_y);

/// <psi, N_F psi> where N_F is the total number operator.
double expectation_total_number(const ManyBodyState& psi);

/// <psi, H psi>; imaginary part is asserted small (H is Hermitian).
double expectation_energy(const ManyBodyState& psi, const SparseHamiltonian& h,
                          int threads = 1);

/// a_x psi (streamed).
Eigen::VectorXcd apply_site_annihilator(const ManyBodyState& psi, int site);

}  // namespace bhmf
