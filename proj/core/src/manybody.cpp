#include "bhmf/manybody.hpp"

#include <algorithm>
#include <cmath>
#include <string>
#include <thread>

#include "bhmf/errors.hpp"
#include "bhmf/io.hpp"

namespace bhmf {

namespace {

double pow_double(double b, int e) {
  double r = 1.0;
  for (int i = 0; i < e; ++i) r *= b;
  return r;
}

}  // namespace

FockBasis::FockBasis(FockCutoff cutoff, int num_sites)
    : site_dim_(cutoff.dim()), num_sites_(num_sites) {
  strides_.resize(num_sites_);
  std::int64_t s = 1;
  for (int x = 0; x < num_sites_; ++x) {
    strides_[x] = s;
    if (s > (std::int64_t{1} << 56) / site_dim_) {
      double required = pow_double(site_dim_, num_sites_) * 16.0;
      throw ResourceError(required, 0.0,
                          "basis dimension (M+1)^(L^d) overflows the index range");
    }
    s *= site_dim_;
  }
  dimension_ = s;
}

ManyBodyState product_state(const Eigen::VectorXcd& site_wavefunction,
                            const Lattice& lattice, FockCutoff cutoff) {
  return perturbed_product_state(site_wavefunction, site_wavefunction, 0, lattice,
                                 cutoff);
}

ManyBodyState perturbed_product_state(const Eigen::VectorXcd& phi,
                                      const Eigen::VectorXcd& perp,
                                      int num_perturbed_sites,
                                      const Lattice& lattice, FockCutoff cutoff) {
  const int s = cutoff.dim();
  if (phi.size() != s || perp.size() != s)
    throw ConfigError("site wave function length does not match cutoff dimension " +
                      std::to_string(s));
  if (std::abs(phi.norm() - 1.0) > 1e-12 || std::abs(perp.norm() - 1.0) > 1e-12)
    throw ConfigError("site wave function is not normalized");
  if (num_perturbed_sites < 0 || num_perturbed_sites > lattice.num_sites())
    throw ConfigError("num_perturbed_sites out of range");

  FockBasis basis(cutoff, lattice.num_sites());
  ManyBodyState psi;
  psi.cutoff = cutoff;
  psi.num_sites = lattice.num_sites();
  psi.amplitudes.resize(basis.dimension());

  // first num_perturbed_sites sites carry `perp`, the rest carry `phi`
  const std::int64_t dim = basis.dimension();
  for (std::int64_t index = 0; index < dim; ++index) {
    std::complex<double> amp = 1.0;
    std::int64_t rest = index;
    for (int x = 0; x < psi.num_sites; ++x) {
      int n = static_cast<int>(rest % s);
      rest /= s;
      amp *= (x < num_perturbed_sites) ? perp[n] : phi[n];
    }
    psi.amplitudes[index] = amp;
  }
  return psi;
}

ManyBodyState fock_basis_state(const std::vector<int>& occupations,
                               const Lattice& lattice, FockCutoff cutoff) {
  if (static_cast<int>(occupations.size()) != lattice.num_sites())
    throw ConfigError("occupation list length must equal the number of sites");
  FockBasis basis(cutoff, lattice.num_sites());
  std::int64_t index = 0;
  for (int x = 0; x < lattice.num_sites(); ++x) {
    int n = occupations[x];
    if (n < 0 || n > cutoff.max_occupation)
      throw ConfigError("occupation " + std::to_string(n) + " outside [0, M]");
    index += n * basis.stride(x);
  }
  ManyBodyState psi;
  psi.cutoff = cutoff;
  psi.num_sites = lattice.num_sites();
  psi.amplitudes = Eigen::VectorXcd::Zero(basis.dimension());
  psi.amplitudes[index] = 1.0;
  return psi;
}

double estimate_run_bytes(const Lattice& lattice, FockCutoff cutoff, int krylov_dim) {
  double dim = pow_double(cutoff.dim(), lattice.num_sites());
  double bonds = static_cast<double>(lattice.bonds().size());
  double states = dim * 16.0 * (krylov_dim + 4);
  double csr = dim * (1.0 + 2.0 * bonds) * 16.0 + (dim + 1.0) * 8.0;
  return states + csr;
}

SparseHamiltonian build_hamiltonian(const ModelParams& params, const Lattice& lattice,
                                    FockCutoff cutoff, std::uint64_t memory_cap_bytes) {
  const double dim_d = pow_double(cutoff.dim(), lattice.num_sites());
  const double bonds_d = static_cast<double>(lattice.bonds().size());
  const double csr_bytes = dim_d * (1.0 + 2.0 * bonds_d) * 16.0 + (dim_d + 1.0) * 8.0;
  if (memory_cap_bytes != 0 && csr_bytes > static_cast<double>(memory_cap_bytes)) {
    throw ResourceError(csr_bytes, static_cast<double>(memory_cap_bytes),
                        "Hamiltonian assembly needs " + format_double(csr_bytes) +
                            " bytes, cap is " +
                            format_double(static_cast<double>(memory_cap_bytes)));
  }

  FockBasis basis(cutoff, lattice.num_sites());
  const std::int64_t dim = basis.dimension();
  const int max_occ = cutoff.max_occupation;
  const auto& bonds = lattice.bonds();
  const double hop = -params.hopping / (2.0 * lattice.dim());
  const double onsite = params.hopping - params.chemical;
  const double half_u = 0.5 * params.coupling;

  SparseHamiltonian h(lattice, cutoff);
  h.params_ = params;
  h.dim_ = dim;
  h.row_ptr_.resize(dim + 1);
  h.row_ptr_[0] = 0;
  h.col_.reserve(static_cast<std::size_t>(dim));
  h.val_.reserve(static_cast<std::size_t>(dim));

  std::vector<int> occ(lattice.num_sites());
  std::vector<std::pair<std::int64_t, double>> entries;
  entries.reserve(1 + 2 * bonds.size());

  for (std::int64_t row = 0; row < dim; ++row) {
    std::int64_t rest = row;
    double diag = 0.0;
    for (int x = 0; x < lattice.num_sites(); ++x) {
      int n = static_cast<int>(rest % basis.site_dim());
      rest /= basis.site_dim();
      occ[x] = n;
      diag += onsite * n + half_u * n * (n - 1);
    }
    entries.clear();
    entries.emplace_back(row, diag);
    for (const Bond& b : bonds) {
      const int nx = occ[b.source];
      const int ny = occ[b.target];
      // <row| a*_x a_y |col>, col = row - stride_x + stride_y
      if (nx >= 1 && ny < max_occ) {
        std::int64_t col = row - basis.stride(b.source) + basis.stride(b.target);
        entries.emplace_back(col, hop * std::sqrt(static_cast<double>(nx) * (ny + 1)));
      }
      // <row| a*_y a_x |col>, col = row - stride_y + stride_x
      if (ny >= 1 && nx < max_occ) {
        std::int64_t col = row - basis.stride(b.target) + basis.stride(b.source);
        entries.emplace_back(col, hop * std::sqrt(static_cast<double>(ny) * (nx + 1)));
      }
    }
    std::sort(entries.begin(), entries.end(),
              [](const auto& a, const auto& b) { return a.first < b.first; });
    for (std::size_t i = 0; i < entries.size();) {
      std::int64_t col = entries[i].first;
      double v = 0.0;
      while (i < entries.size() && entries[i].first == col) {
        v += entries[i].second;
        ++i;
      }
      if (v != 0.0 || col == row) {
        h.col_.push_back(col);
        h.val_.push_back(v);
      }
    }
    h.row_ptr_[row + 1] = static_cast<std::int64_t>(h.col_.size());
  }
  return h;
}

void SparseHamiltonian::apply(const Eigen::VectorXcd& x, Eigen::VectorXcd& y,
                              int threads) const {
  if (x.size() != dim_) throw ConfigError("matvec dimension mismatch");
  y.resize(dim_);
  auto body = [&](std::int64_t r0, std::int64_t r1) {
    for (std::int64_t r = r0; r < r1; ++r) {
      std::complex<double> acc = 0.0;
      for (std::int64_t k = row_ptr_[r]; k < row_ptr_[r + 1]; ++k) {
        acc += val_[k] * x[col_[k]];
      }
      y[r] = acc;
    }
  };
  const int nthreads = std::max(1, std::min<int>(threads, static_cast<int>(dim_)));
  if (nthreads == 1) {
    body(0, dim_);
    return;
  }
  // contiguous row blocks; each row is accumulated sequentially, so the
  // result does not depend on the thread count
  std::vector<std::thread> pool;
  pool.reserve(nthreads);
  std::int64_t chunk = (dim_ + nthreads - 1) / nthreads;
  for (int i = 0; i < nthreads; ++i) {
    std::int64_t r0 = i * chunk;
    std::int64_t r1 = std::min<std::int64_t>(dim_, r0 + chunk);
    if (r0 >= r1) break;
    pool.emplace_back(body, r0, r1);
  }
  for (auto& t : pool) t.join();
}

Eigen::MatrixXcd SparseHamiltonian::dense() const {
  if (dim_ > 4096) throw ResourceError(static_cast<double>(dim_) * dim_ * 16.0, 0.0,
                                       "dense Hamiltonian requested above 4096");
  Eigen::MatrixXcd m = Eigen::MatrixXcd::Zero(dim_, dim_);
  for (std::int64_t r = 0; r < dim_; ++r) {
    for (std::int64_t k = row_ptr_[r]; k < row_ptr_[r + 1]; ++k) {
      m(r, col_[k]) = val_[k];
    }
  }
  return m;
}

Eigen::VectorXcd apply_one_site(const ManyBodyState& psi, const Eigen::MatrixXcd& op,
                                int site) {
  FockBasis basis = psi.basis();
  const int s = basis.site_dim();
  if (op.rows() != s || op.cols() != s)
    throw ConfigError("one-site operator dimension does not match cutoff");
  const std::int64_t stride = basis.stride(site);
  Eigen::VectorXcd out = Eigen::VectorXcd::Zero(psi.amplitudes.size());
  const std::int64_t dim = basis.dimension();
  for (std::int64_t index = 0; index < dim; ++index) {
    int n = basis.occupation(index, site);
    std::complex<double> a = psi.amplitudes[index];
    if (a == 0.0) continue;
    const std::int64_t base = index - static_cast<std::int64_t>(n) * stride;
    for (int m = 0; m < s; ++m) {
      std::complex<double> v = op(m, n);
      if (v != 0.0) out[base + m * stride] += v * a;
    }
  }
  return out;
}

std::complex<double> expectation_one_site(const ManyBodyState& psi,
                                          const Eigen::MatrixXcd& op, int site) {
  Eigen::VectorXcd w = apply_one_site(psi, op, site);
  return psi.amplitudes.dot(w);
}

std::complex<double> expectation_pair(const ManyBodyState& psi,
                                      const Eigen::MatrixXcd& op_x, int site_x,
                                      const Eigen::MatrixXcd& op_y, int site_y) {
  if (site_x == site_y) throw ConfigError("pair expectation needs two distinct sites");
  Eigen::VectorXcd w = apply_one_site(psi, op_y, site_y);
  ManyBodyState tmp{std::move(w), psi.cutoff, psi.num_sites};
  Eigen::VectorXcd v = apply_one_site(tmp, op_x, site_x);
  return psi.amplitudes.dot(v);
}

double expectation_total_number(const ManyBodyState& psi) {
  FockBasis basis = psi.basis();
  const std::int64_t dim = basis.dimension();
  const int s = basis.site_dim();
  double acc = 0.0;
  for (std::int64_t index = 0; index < dim; ++index) {
    double p = std::norm(psi.amplitudes[index]);
    if (p == 0.0) continue;
    std::int64_t rest = index;
    int total = 0;
    while (rest != 0) {
      total += static_cast<int>(rest % s);
      rest /= s;
    }
    acc += p * total;
  }
  return acc;
}

double expectation_energy(const ManyBodyState& psi, const SparseHamiltonian& h,
                          int threads) {
  Eigen::VectorXcd w;
  h.apply(psi.amplitudes, w, threads);
  std::complex<double> e = psi.amplitudes.dot(w);
  if (std::abs(e.imag()) > 1e-10 * std::max(1.0, std::abs(e.real())))
    throw NumericalError("Hermitian expectation has imaginary part " +
                         format_double(e.imag()));
  return e.real();
}

Eigen::VectorXcd apply_site_annihilator(const ManyBodyState& psi, int site) {
  FockBasis basis = psi.basis();
  const std::int64_t stride = basis.stride(site);
  const int max_occ = psi.cutoff.max_occupation;
  const std::int64_t dim = basis.dimension();
  Eigen::VectorXcd out = Eigen::VectorXcd::Zero(dim);
  for (std::int64_t index = 0; index < dim; ++index) {
    int n = basis.occupation(index, site);
    if (n < max_occ)
      out[index] = std::sqrt(static_cast<double>(n + 1)) * psi.amplitudes[index + stride];
  }
  return out;
}

}  // namespace bhmf
