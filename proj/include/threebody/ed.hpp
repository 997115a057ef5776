#pragma once

#include <Eigen/Dense>
#include <span>
#include <vector>

#include "threebody/lanczos.hpp"
#include "threebody/lattice_hamiltonian.hpp"

namespace threebody {

/// Reported in place of gap / spread when the ground manifold is exactly degenerate.
inline constexpr double kLambdaCap = 1e12;

struct DegeneracyReport {
  int cluster_size = 0;  // from the ratio rule
  int expected = 0;
  double spread = 0.0;   // E_m - E_1 with m = expected (1-based)
  double gap = 0.0;      // E_{m+1} - E_m
  double lambda = 0.0;   // gap / spread, capped at kLambdaCap
  bool consistent = false;
};

/// Ground cluster: the first m with (E_{m+1} - E_m) / (E_m - E_1 + 1e-12) > ratio.
/// Spread, gap and lambda always use expected_manifold.
DegeneracyReport detect_degeneracy(std::span<const double> eigenvalues, int expected_manifold = 3,
                                   double ratio = 5.0);

struct EDResult {
  LatticeSpec spec;
  std::size_t dimension = 0;
  Eigen::VectorXd eigenvalues;
  Eigen::MatrixXcd eigenvectors;  // empty unless requested
  Eigen::VectorXd residuals;
  double norm_bound = 0.0;
  DegeneracyReport degeneracy;
};

struct SolveOptions {
  LanczosOptions lanczos;
  int manifold = 3;
  std::size_t dimension_limit = FockBasis::kDefaultDimensionLimit;
  /// Residual gate relative to norm_bound checked on the returned pairs.
  double residual_gate = 1e-8;
};

EDResult solve_lattice(const LatticeSpec& spec, const FockBasis& basis, const SolveOptions& options);
EDResult solve_lattice(const LatticeSpec& spec, const SolveOptions& options);

struct SiteCorrelations {
  std::vector<double> density;  // manifold-averaged <n_r>
  double mean_density = 0.0;
  double pair = 0.0;            // site-averaged <a^+2 a^2> = <n(n-1)>
  double triple = 0.0;          // site-averaged <a^+3 a^3> = <n(n-1)(n-2)>
  double g2 = 0.0;              // pair / mean_density^2
  double g3 = 0.0;              // triple / mean_density^3
  int states = 0;
};

/// Local density and on-site correlators averaged over the lowest `manifold`
/// eigenvectors. Throws ParameterError when the result carries no vectors.
SiteCorrelations pair_pfaffian_diagnostics(const EDResult& result, const FockBasis& basis,
                                           int manifold);

}  // namespace threebody
