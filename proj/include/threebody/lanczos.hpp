#pragma once

#include <Eigen/Dense>
#include <complex>
#include <cstdint>
#include <functional>

#include "threebody/errors.hpp"
#include "threebody/lattice_hamiltonian.hpp"

namespace threebody {

struct LanczosOptions {
  int k = 13;
  double tol = 1e-10;  // residual norm relative to the operator norm bound
  std::uint64_t seed = 20130717;
  int block_size = 0;  // 0 selects k, which resolves any multiplicity among the k wanted
  int max_basis = 0;   // 0 selects min(dim, max(k + 6 * block, 60))
  int max_expansions = 5000;
  int threads = 1;
  bool want_vectors = true;
};

struct EigenPairs {
  Eigen::VectorXd values;     // ascending
  Eigen::MatrixXcd vectors;   // columns, empty unless requested
  Eigen::VectorXd residuals;  // ||H v - e v||
  int matvecs = 0;
  int restarts = 0;
};

class LanczosError : public ConvergenceError {
 public:
  LanczosError(const std::string& what, Eigen::VectorXd best_residuals)
      : ConvergenceError(what), residuals(std::move(best_residuals)) {}
  Eigen::VectorXd residuals;
};

/// y = H x for a Hermitian H of the given dimension.
using LinearMap = std::function<void(const cplx* x, cplx* y)>;

/// Block Lanczos with full reorthogonalization and thick restart. The start
/// block is drawn from a seeded generator, so results are reproducible. When
/// the Krylov space would cover the whole space the problem is solved densely.
EigenPairs lanczos_lowest(const LinearMap& op, std::size_t dim, double norm_bound,
                          const LanczosOptions& options);
EigenPairs lanczos_lowest(const SparseHam& h, const LanczosOptions& options);

/// Reference path: full dense diagonalization, lowest k pairs.
EigenPairs dense_lowest(const Eigen::MatrixXcd& h, int k, bool want_vectors = true);

}  // namespace threebody
