#pragma once

// Bosons on an Lx x Ly torus in a uniform synthetic field (Landau gauge, flux
// alpha per plaquette), with Gaussian-decaying long-range hopping, twisted
// boundaries and on-site two- and three-body interactions.

#include <Eigen/Dense>
#include <cmath>
#include <complex>
#include <limits>
#include <string>
#include <utility>
#include <vector>

#include "threebody/fock_basis.hpp"

namespace threebody {

using cplx = std::complex<double>;

enum class HoppingScheme { nearest, next_nearest, long_range };

std::string to_string(HoppingScheme scheme);
/// Accepts NN, NNN, LR (also "long-range"), case-sensitive.
HoppingScheme parse_scheme(const std::string& name);

struct LatticeSpec {
  int Lx = 4;
  int Ly = 4;
  double alpha = 0.25;
  int N = 4;
  int n_max = 2;
  double U2 = 0.0;
  double U3 = std::numeric_limits<double>::infinity();  // infinite: hard core
  HoppingScheme scheme = HoppingScheme::nearest;
  int range = 0;  // long-range cutoff R, 0 selects min(Lx, Ly) / 2
  double theta_x = 0.0;
  double theta_y = 0.0;

  bool hard_core() const { return std::isinf(U3); }
  int sites() const { return Lx * Ly; }
  double flux_quanta() const { return alpha * Lx * Ly; }
  double filling() const { return N / flux_quanta(); }
  int effective_range() const;

  /// Throws ParameterError; requires an integer number of flux quanta.
  void validate() const;
};

/// Coefficient of a^+_{x+dx, y+dy} a_{x, y}, normalized so that the (1, 0)
/// hop equals -exp(-i 2 pi alpha y):
/// (-1)^(dx+dy+dx dy) exp(-pi/2 (1-alpha)(dx^2+dy^2-1)) exp(-i 2 pi alpha (y dx + dx dy / 2)).
cplx hop_amplitude(int dx, int dy, double y, double alpha);

/// Displacements summed for the scheme. Long-range uses the full box
/// max(|dx|, |dy|) <= R, so on small tori distinct images of the same
/// neighbour each contribute.
std::vector<std::pair<int, int>> displacements(const LatticeSpec& spec);

struct HoppingTerm {
  int src = 0;
  int dst = 0;
  cplx amp;  // coefficient of a^+_dst a_src
};

/// One term per ordered site pair (images merged), including twist and
/// magnetic boundary phases. src == dst terms are number operators.
std::vector<HoppingTerm> hopping_terms(const LatticeSpec& spec);

/// Compressed-row Hermitian matrix.
class SparseHam {
 public:
  SparseHam() = default;
  SparseHam(std::size_t dim, std::vector<std::size_t> row_ptr, std::vector<std::size_t> cols,
            std::vector<cplx> vals);

  std::size_t dim() const { return dim_; }
  std::size_t nonzeros() const { return vals_.size(); }
  const std::vector<std::size_t>& row_ptr() const { return row_ptr_; }
  const std::vector<std::size_t>& cols() const { return cols_; }
  const std::vector<cplx>& vals() const { return vals_; }

  /// y = H x, rows split across threads; each row sums in a fixed order.
  void apply(const cplx* x, cplx* y, int threads = 1) const;
  Eigen::VectorXcd apply(const Eigen::VectorXcd& x, int threads = 1) const;

  /// Largest |H_ij - conj(H_ji)|, with a missing partner counting as zero.
  double hermiticity_error() const;
  /// Max absolute row sum, an upper bound on the spectral norm.
  double norm_bound() const;
  Eigen::MatrixXcd to_dense() const;

 private:
  std::size_t dim_ = 0;
  std::vector<std::size_t> row_ptr_{0};
  std::vector<std::size_t> cols_;
  std::vector<cplx> vals_;
};

/// Rows are built independently (parallel over rows) from the hopping terms;
/// hops into a site already at n_max are absent. Throws if the result is not
/// Hermitian to 1e-12.
SparseHam build_hamiltonian(const LatticeSpec& spec, const FockBasis& basis, int threads = 1);
SparseHam build_hamiltonian(const LatticeSpec& spec, const FockBasis& basis,
                            const std::vector<HoppingTerm>& terms, int threads = 1);

FockBasis enumerate_basis(const LatticeSpec& spec,
                          std::size_t dimension_limit = FockBasis::kDefaultDimensionLimit);

}  // namespace threebody
