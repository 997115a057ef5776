#pragma once

// Two qubits coupled through M phi_1 phi_2, evolved exactly in the product of
// their lowest eigenlevels, and the two-mode Bose-Hubbard reference it should
// reproduce.

#include <Eigen/Dense>
#include <map>
#include <optional>
#include <utility>
#include <vector>

#include "threebody/qubit_spectrum.hpp"

namespace threebody {

using Label = std::pair<int, int>;  // (level of qubit 1, level of qubit 2)

struct CoupledSpec {
  QubitParams left;
  QubitParams right;
  double M = 2e-6;
  int levels_per_qubit = 6;
  double t_max = 0.0;  // 0 selects 20 / J_eff
  int n_steps = 2000;

  void validate() const;
};

struct CoupledSystem {
  int levels = 0;
  QubitSpectrum left;
  QubitSpectrum right;
  Eigen::MatrixXd hamiltonian;  // index n1 * levels + n2, energies relative to each E_0
  double J_eff = 0.0;           // M |<0|phi|1>_1| |<0|phi|1>_2|
  double U2 = 0.0;              // mean of the two qubits' U2
  double U3 = 0.0;
  double leakage = 0.0;         // largest coupling to cut levels, relative to M
  bool truncation_warning = false;

  int index(Label l) const { return l.first * levels + l.second; }
};

struct PopulationTrace {
  std::vector<double> times;
  std::vector<Label> labels;
  std::vector<std::vector<double>> populations;  // [time][label]
  std::vector<double> energy;                    // <H>(t), empty when not tracked

  std::optional<std::size_t> label_index(Label l) const;
  double total(std::size_t t) const;
};

CoupledSystem build_coupled_hamiltonian(const CoupledSpec& spec);

/// Sample times 0 .. t_max inclusive.
std::vector<double> time_grid(double t_max, int n_steps);

/// Exact evolution from the product eigenstate `initial` through the full
/// eigendecomposition of the coupled Hamiltonian.
PopulationTrace evolve(const CoupledSystem& system, Label initial,
                       const std::vector<double>& times);
PopulationTrace evolve(const CoupledSpec& spec, Label initial);

/// Two-mode reference H = -J (a1^+ a2 + a2^+ a1) + U2/2 sum n(n-1) [+ U3/6 sum n(n-1)(n-2)].
/// Without U3 the modes are hard-core at two excitations, otherwise capped at three.
PopulationTrace bosonic_reference(double J, double U2, std::optional<double> U3, Label initial,
                                  const std::vector<double>& times);

struct TraceComparison {
  std::map<Label, double> max_deviation;
  std::map<Label, double> rms_deviation;
  double overall_max = 0.0;
};

/// Labels missing from one trace count as zero population there.
TraceComparison compare_traces(const PopulationTrace& a, const PopulationTrace& b);

/// Largest total population over the given labels across the trace.
double max_population(const PopulationTrace& trace, const std::vector<Label>& labels);

}  // namespace threebody
