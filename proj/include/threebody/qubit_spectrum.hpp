#pragma once

// Single fluxonium-type qubit: H = 4 Ec n^2 + EL phi^2 / 2 - EJ cos(phi + phi_x),
// diagonalized in the oscillator basis of its quadratic part. All energies are
// in units of EJ unless EJ is explicitly changed (EJ = 0 gives the oscillator).

#include <Eigen/Dense>
#include <array>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace threebody {

struct QubitParams {
  double Ec = 0.05;
  double EL = 1.4;
  double EJ = 1.0;
  double phi_x = 2.68;  // radians
  int basis_size = 80;

  /// Throws ParameterError on Ec <= 0, EL <= 0, EJ < 0 or basis_size < 20.
  void validate() const;
};

struct QubitSpectrum {
  Eigen::VectorXd energies;       // ascending, absolute (not shifted)
  Eigen::MatrixXd phi_elements;   // <i|phi|j> in the eigenbasis
};

/// Bosonic single-site model: E_n - E_0 = omega0 n + U2 n(n-1)/2 + U3 n(n-1)(n-2)/6.
struct EffectiveModel {
  double omega0 = 0.0;
  double U2 = 0.0;
  double U3 = 0.0;
};

/// Oscillator length of the quadratic part: phi = phi_zpf (a + a^dagger).
double phi_zero_point(const QubitParams& params);

Eigen::MatrixXd build_qubit_hamiltonian(const QubitParams& params);

/// Lowest m eigenpairs. Requires m <= basis_size / 4.
QubitSpectrum diagonalize_qubit(const QubitParams& params, int m);

/// Largest change of the lowest `levels` eigenvalues when the basis is doubled.
double convergence_error(const QubitParams& params, int levels = 4);

/// Throws ConvergenceError when convergence_error exceeds tol.
void check_convergence(const QubitParams& params, int levels = 4, double tol = 1e-9);

EffectiveModel extract_effective_model(std::span<const double> energies);
EffectiveModel extract_effective_model(const QubitSpectrum& spectrum);

/// Inverse of extract_effective_model: E_0..E_3 given E_0.
std::array<double, 4> model_levels(const EffectiveModel& model, double e0 = 0.0);

EffectiveModel effective_model_at(const QubitParams& params);

enum class RootStatus { found, flat, no_root };

struct ZeroU2Result {
  RootStatus status = RootStatus::no_root;
  double phi_x = 0.0;
  EffectiveModel model;
  std::string message;
};

struct ZeroU2Options {
  double phi_lo = 2.0;
  double phi_hi = 3.2;
  double scan_step = 0.01;
  double EJ = 1.0;
  int basis_size = 80;
  double flat_threshold = 1e-12;  // |U2| below this everywhere means no structure
};

/// First sign change of U2(phi_x) in the window, refined by bracketed root
/// finding. Not finding a root is reported in the status, not thrown.
ZeroU2Result find_zero_U2(double Ec, double EL, const ZeroU2Options& options = {});

struct QubitSweepCell {
  double EL = 0.0;
  double phi_x = 0.0;
  EffectiveModel model;
  std::optional<std::string> error;
};

/// Dense (EL, phi_x) map, row-major in EL. Cells are independent.
std::vector<QubitSweepCell> sweep_U2_U3(double Ec, std::span<const double> EL_grid,
                                         std::span<const double> phi_grid,
                                         int basis_size = 80, int threads = 1);

struct ContourPoint {
  double EL = 0.0;
  ZeroU2Result root;
};

/// U2 = 0 contour sampled along EL.
std::vector<ContourPoint> zero_U2_contour(double Ec, std::span<const double> EL_grid,
                                          const ZeroU2Options& options = {}, int threads = 1);

struct ContourMaximum {
  double EL = 0.0;
  double phi_x = 0.0;
  EffectiveModel model;
};

/// Maximizes EL -> U3(EL, phi_x*(EL)) over [EL_lo, EL_hi] with a bracketing
/// minimizer; EL tolerance 1e-3. Throws ParameterError if the contour leaves
/// the phi window inside the interval.
ContourMaximum max_U3_on_zero_contour(double Ec, double EL_lo, double EL_hi,
                                      const ZeroU2Options& options = {});

/// Relative deviation of the ladder matrix elements from sqrt(n):
/// max over n = 2, 3 of | |<n-1|phi|n>| / (sqrt(n) |<0|phi|1>|) - 1 |.
double enhancement_deviation(const QubitSpectrum& spectrum);

}  // namespace threebody
