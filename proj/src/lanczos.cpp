#include "threebody/lanczos.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <sstream>

namespace threebody {

EigenPairs dense_lowest(const Eigen::MatrixXcd& h, int k, bool want_vectors) {
  const Eigen::MatrixXcd sym = 0.5 * (h + h.adjoint());
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> eig(
      sym, want_vectors ? Eigen::ComputeEigenvectors : Eigen::EigenvaluesOnly);
  if (eig.info() != Eigen::Success) throw ConvergenceError("dense eigensolver failed");
  k = std::min<int>(k, static_cast<int>(h.rows()));
  EigenPairs out;
  out.values = eig.eigenvalues().head(k);
  out.residuals = Eigen::VectorXd::Zero(k);
  if (want_vectors) {
    out.vectors = eig.eigenvectors().leftCols(k);
    out.residuals = (sym * out.vectors - out.vectors * out.values.asDiagonal()).colwise().norm();
  }
  return out;
}

namespace {

class Orthonormalizer {
 public:
  explicit Orthonormalizer(std::uint64_t seed) : rng_(seed) {}

  Eigen::VectorXcd random(Eigen::Index n) {
    std::normal_distribution<double> g(0.0, 1.0);
    Eigen::VectorXcd v(n);
    for (Eigen::Index i = 0; i < n; ++i) v(i) = {g(rng_), g(rng_)};
    return v;
  }

  // Orthonormalizes block against basis.leftCols(m) and itself. Columns that
  // vanish (the Krylov space became invariant) are replaced by fresh random
  // directions so that the search keeps growing.
  void run(const Eigen::MatrixXcd& basis, Eigen::Index m, Eigen::MatrixXcd& block) {
    const Eigen::Index n = block.rows();
    const Eigen::VectorXd before = block.colwise().norm();
    if (m > 0) {
      for (int pass = 0; pass < 2; ++pass)
        block -= basis.leftCols(m) * (basis.leftCols(m).adjoint() * block);
    }
    for (Eigen::Index c = 0; c < block.cols(); ++c) {
      Eigen::VectorXcd v = block.col(c);
      double reference = before(c);
      for (int attempt = 0;; ++attempt) {
        for (int pass = 0; pass < 2; ++pass) {
          if (attempt > 0 && m > 0) v -= basis.leftCols(m) * (basis.leftCols(m).adjoint() * v);
          if (c > 0) v -= block.leftCols(c) * (block.leftCols(c).adjoint() * v);
        }
        const double after = v.norm();
        if (after > 1e-8 * reference && after > 1e-300) {
          block.col(c) = v / after;
          break;
        }
        if (attempt > 8) throw ConvergenceError("could not extend the Krylov basis");
        v = random(n);
        reference = v.norm();
      }
    }
  }

 private:
  std::mt19937_64 rng_;
};

}  // namespace

EigenPairs lanczos_lowest(const LinearMap& op, std::size_t dim_u, double norm_bound,
                          const LanczosOptions& opt) {
  const Eigen::Index n = static_cast<Eigen::Index>(dim_u);
  if (n == 0) throw ParameterError("empty operator");
  if (opt.k < 1) throw ParameterError("k must be positive");
  const Eigen::Index k = std::min<Eigen::Index>(opt.k, n);
  const Eigen::Index b = std::min<Eigen::Index>(opt.block_size > 0 ? opt.block_size : k, n);
  Eigen::Index max_basis = opt.max_basis > 0 ? opt.max_basis : std::max<Eigen::Index>(k + 6 * b, 60);
  max_basis = std::min(max_basis, n);
  const double scale = std::max(norm_bound, 1.0);

  EigenPairs out;
  auto apply_block = [&](const Eigen::MatrixXcd& x, Eigen::MatrixXcd& y) {
    y.resize(n, x.cols());
    for (Eigen::Index c = 0; c < x.cols(); ++c) op(x.col(c).data(), y.col(c).data());
    out.matvecs += static_cast<int>(x.cols());
  };

  if (max_basis >= n || max_basis < k + 2 * b) {
    if (max_basis < n && max_basis < k + 2 * b) {
      throw ParameterError("max_basis must hold at least k + 2 * block_size vectors");
    }
    // The Krylov space would be the whole space: solve densely.
    Eigen::MatrixXcd h;
    apply_block(Eigen::MatrixXcd::Identity(n, n), h);
    EigenPairs dense = dense_lowest(h, static_cast<int>(k), opt.want_vectors);
    dense.matvecs = out.matvecs;
    return dense;
  }

  Orthonormalizer ortho(opt.seed);
  Eigen::MatrixXcd V(n, max_basis);
  Eigen::MatrixXcd T = Eigen::MatrixXcd::Zero(max_basis, max_basis);
  Eigen::MatrixXcd pending(n, b);
  for (Eigen::Index c = 0; c < b; ++c) pending.col(c) = ortho.random(n);
  Eigen::Index m = 0;

  Eigen::VectorXd theta;
  Eigen::MatrixXcd S;
  Eigen::VectorXd res = Eigen::VectorXd::Constant(k, std::numeric_limits<double>::infinity());
  Eigen::MatrixXcd Hq;
  const double target = opt.tol * scale;

  for (int expansion = 0; expansion < opt.max_expansions; ++expansion) {
    ortho.run(V, m, pending);
    V.middleCols(m, b) = pending;
    apply_block(pending, Hq);
    const Eigen::MatrixXcd C = V.leftCols(m + b).adjoint() * Hq;
    T.block(0, m, m + b, b) = C;
    T.block(m, 0, b, m + b) = C.adjoint();
    m += b;
    // H V = V T + F E^T: the part of H V outside the basis sits in the last block.
    const Eigen::MatrixXcd F = Hq - V.leftCols(m) * C;

    const Eigen::MatrixXcd Tm = 0.5 * (T.topLeftCorner(m, m) + T.topLeftCorner(m, m).adjoint());
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> eig(Tm);
    if (eig.info() != Eigen::Success) throw ConvergenceError("projected eigensolver failed");
    theta = eig.eigenvalues();
    S = eig.eigenvectors();

    const Eigen::VectorXd estimate = (F * S.block(m - b, 0, b, k)).colwise().norm();
    if (estimate.maxCoeff() <= target) {
      const Eigen::MatrixXcd Y = V.leftCols(m) * S.leftCols(k);
      Eigen::MatrixXcd HY;
      apply_block(Y, HY);
      res = (HY - Y * theta.head(k).asDiagonal()).colwise().norm();
      if (res.maxCoeff() <= target) {
        out.values = theta.head(k);
        out.residuals = res;
        if (opt.want_vectors) out.vectors = Y;
        return out;
      }
    } else {
      res = estimate;
    }

    if (m + b > max_basis) {
      // Thick restart on the lowest Ritz vectors. Their residuals all lie in
      // span(F), so F continues the Krylov sequence.
      const Eigen::Index keep =
          std::min<Eigen::Index>(m - b, std::max<Eigen::Index>(k + b, max_basis / 2));
      const Eigen::MatrixXcd Vp = V.leftCols(m) * S.leftCols(keep);
      V.leftCols(keep) = Vp;
      T.setZero();
      T.topLeftCorner(keep, keep) = theta.head(keep).cast<cplx>().asDiagonal();
      m = keep;
      ++out.restarts;
    }
    pending = F;
  }
  std::ostringstream msg;
  msg << "Lanczos did not converge after " << opt.max_expansions
      << " block expansions; worst residual " << res.maxCoeff();
  throw LanczosError(msg.str(), res);
}

EigenPairs lanczos_lowest(const SparseHam& h, const LanczosOptions& opt) {
  const int threads = opt.threads;
  return lanczos_lowest([&h, threads](const cplx* x, cplx* y) { h.apply(x, y, threads); },
                        h.dim(), h.norm_bound(), opt);
}

}  // namespace threebody
