#pragma once

#include <map>
#include <span>
#include <string>
#include <vector>

#include "threebody/ed.hpp"
#include "threebody/qubit_spectrum.hpp"

namespace threebody {

enum class SweepTarget { fig2_map, fig4a_schemes, fig4b_order, feasibility };

std::string to_string(SweepTarget target);
SweepTarget parse_target(const std::string& name);

struct SweepPlan {
  SweepTarget target = SweepTarget::fig4b_order;
  std::map<std::string, std::vector<double>> axes;
  std::map<std::string, std::string> fixed;
  std::string output;

  /// Every axis the target needs is present and non-empty, every fixed
  /// parameter is present. Throws ParameterError naming the first gap.
  void validate() const;
};

struct SchemeRun {
  HoppingScheme scheme;
  EDResult result;
};

/// The same basis, seed and solver settings for NN, NNN and LR, so the three
/// spectra differ only through the hopping.
std::vector<SchemeRun> run_fig4a(const LatticeSpec& base, const SolveOptions& options);

struct OrderCell {
  double U2 = 0.0;
  double U3 = 0.0;
  double lambda = 0.0;
  double gap = 0.0;
  double spread = 0.0;
  Eigen::VectorXd eigenvalues;
};

/// lambda(U2, U3) over the product grid, cells ordered U2-major. The base
/// spec must allow triple occupancy (n_max = 3) so that U3 is a finite penalty.
std::vector<OrderCell> run_fig4b(std::span<const double> U2_grid, std::span<const double> U3_grid,
                                 const LatticeSpec& base, const SolveOptions& options,
                                 int threads = 1);

/// Recomputes one cell from its coordinates, independent of any grid.
OrderCell order_cell(double U2, double U3, const LatticeSpec& base, const SolveOptions& options);

/// lambda along U2 at the U3 value closest to `U3` (ordered by U2).
std::vector<double> lambda_along_U2(const std::vector<OrderCell>& cells, double U3);
/// lambda along U3 at the U2 value closest to `U2` (ordered by U3).
std::vector<double> lambda_along_U3(const std::vector<OrderCell>& cells, double U2);

bool non_increasing(std::span<const double> values);
bool non_decreasing(std::span<const double> values);

/// Default axes: U2/J in [0, 10] (11 points) and U3/J log-spaced in [1, 100] (13 points).
std::vector<double> default_fig4b_U2_grid();
std::vector<double> default_fig4b_U3_grid();

/// gapped when lambda >= this.
inline constexpr double kGappedLambda = 5.0;

struct FeasibilityRow {
  double EJ_GHz = 0.0;
  double U3_MHz = 0.0;
  double J_MHz = 0.0;
  double ratio = 0.0;            // U3 / J, +inf for J = 0
  bool meets_ratio = false;      // ratio >= required_ratio
  bool meets_coherence = false;  // J >= min_J_MHz
  bool few_hundred_MHz = false;  // 100 <= U3 < 1000 MHz
};

struct FeasibilityOptions {
  double required_ratio = 60.0;
  double min_J_MHz = 10.0;  // tunnelling rate J / 2 pi
};

/// Converts the qubit's U3 (in units of EJ) to MHz for each EJ (GHz, as
/// frequency) and compares against the hopping J (MHz, as frequency).
std::vector<FeasibilityRow> feasibility_report(const EffectiveModel& qubit,
                                               std::span<const double> EJ_GHz, double J_MHz,
                                               const FeasibilityOptions& options = {});

}  // namespace threebody
