#include "threebody/ed.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "threebody/errors.hpp"

namespace threebody {

DegeneracyReport detect_degeneracy(std::span<const double> e, int expected, double ratio) {
  if (expected < 1) throw ParameterError("expected manifold must be positive");
  if (e.size() < static_cast<std::size_t>(expected) + 1) {
    throw ParameterError("need at least " + std::to_string(expected + 1) + " eigenvalues, got " +
                         std::to_string(e.size()));
  }
  constexpr double eps = 1e-12;
  DegeneracyReport r;
  r.expected = expected;
  r.cluster_size = static_cast<int>(e.size());
  for (std::size_t m = 1; m < e.size(); ++m) {
    const double jump = e[m] - e[m - 1];
    const double width = e[m - 1] - e[0] + eps;
    if (jump / width > ratio) {
      r.cluster_size = static_cast<int>(m);
      break;
    }
  }
  r.spread = e[expected - 1] - e[0];
  r.gap = e[expected] - e[expected - 1];
  r.lambda = r.spread > 0.0 ? std::min(r.gap / r.spread, kLambdaCap) : kLambdaCap;
  r.consistent = r.cluster_size == expected;
  return r;
}

EDResult solve_lattice(const LatticeSpec& spec, const FockBasis& basis, const SolveOptions& opt) {
  const SparseHam h = build_hamiltonian(spec, basis, opt.lanczos.threads);
  EigenPairs pairs = lanczos_lowest(h, opt.lanczos);

  EDResult r;
  r.spec = spec;
  r.dimension = h.dim();
  r.norm_bound = h.norm_bound();
  r.eigenvalues = pairs.values;
  r.residuals = pairs.residuals;
  r.eigenvectors = std::move(pairs.vectors);
  const double gate = opt.residual_gate * std::max(r.norm_bound, 1.0);
  if (r.residuals.size() > 0 && r.residuals.maxCoeff() > gate) {
    std::ostringstream msg;
    msg << "eigenpair residual " << r.residuals.maxCoeff() << " exceeds " << gate;
    throw ConvergenceError(msg.str());
  }
  if (r.eigenvalues.size() > opt.manifold) {
    r.degeneracy = detect_degeneracy(
        std::span<const double>(r.eigenvalues.data(), r.eigenvalues.size()), opt.manifold);
  }
  return r;
}

EDResult solve_lattice(const LatticeSpec& spec, const SolveOptions& opt) {
  const FockBasis basis = enumerate_basis(spec, opt.dimension_limit);
  return solve_lattice(spec, basis, opt);
}

SiteCorrelations pair_pfaffian_diagnostics(const EDResult& result, const FockBasis& basis,
                                           int manifold) {
  if (result.eigenvectors.cols() == 0) throw ParameterError("diagnostics need eigenvectors");
  if (manifold < 1 || manifold > result.eigenvectors.cols()) {
    throw ParameterError("manifold exceeds the stored eigenvectors");
  }
  if (static_cast<std::size_t>(result.eigenvectors.rows()) != basis.size()) {
    throw ParameterError("eigenvectors do not match the basis");
  }
  const int sites = basis.sites();
  SiteCorrelations c;
  c.density.assign(sites, 0.0);
  c.states = manifold;
  double pair = 0.0, triple = 0.0;
  for (int s = 0; s < manifold; ++s) {
    for (std::size_t i = 0; i < basis.size(); ++i) {
      const double w = std::norm(result.eigenvectors(static_cast<Eigen::Index>(i), s));
      if (w == 0.0) continue;
      const auto occ = basis.state(i);
      for (int r = 0; r < sites; ++r) {
        const double n = occ[r];
        c.density[r] += w * n;
        pair += w * n * (n - 1.0);
        triple += w * n * (n - 1.0) * (n - 2.0);
      }
    }
  }
  for (double& d : c.density) d /= manifold;
  c.mean_density = static_cast<double>(basis.particles()) / sites;
  c.pair = pair / (manifold * sites);
  c.triple = triple / (manifold * sites);
  if (c.mean_density > 0.0) {
    c.g2 = c.pair / (c.mean_density * c.mean_density);
    c.g3 = c.triple / std::pow(c.mean_density, 3);
  }
  return c;
}

}  // namespace threebody
