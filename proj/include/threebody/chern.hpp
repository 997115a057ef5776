#pragma once

#include <optional>
#include <vector>

#include "threebody/lanczos.hpp"
#include "threebody/lattice_hamiltonian.hpp"

namespace threebody {

struct ChernOptions {
  int grid = 8;       // twist points per direction
  int manifold = 3;   // dimension of the ground subspace
  double min_gap = 1e-6;
  LanczosOptions lanczos;  // k and block size are set from the manifold
  int threads = 1;         // over twist points
};

struct ChernResult {
  int grid = 0;
  int manifold = 0;
  int total = 0;
  double raw_total = 0.0;             // sum of plaquette phases / 2 pi before rounding
  std::vector<double> curvature;      // plaquette phases, [iy * grid + ix]
  double min_gap = 0.0;               // smallest E_{m+1} - E_m over the grid
  double min_gap_theta_x = 0.0;
  double min_gap_theta_y = 0.0;
  double max_spread = 0.0;            // largest E_m - E_1 over the grid
  std::vector<std::optional<int>> per_state;  // abelian Chern of each level when isolated everywhere
};

/// Chern number of the lowest `manifold` states over the twist torus
/// [0, 2 pi)^2, from gauge-invariant determinant links on a grid x grid mesh.
/// Links that wrap the torus carry the large gauge transformation relating
/// theta and theta + 2 pi. Throws GapClosedError when the manifold touches the
/// next level at some grid point, and ConvergenceError if the plaquette sum is
/// not an integer to 1e-6.
ChernResult chern_number(const LatticeSpec& spec, const ChernOptions& options);

}  // namespace threebody
