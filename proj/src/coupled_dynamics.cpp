#include "threebody/coupled_dynamics.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <set>

#include "threebody/errors.hpp"

namespace threebody {

void CoupledSpec::validate() const {
  left.validate();
  right.validate();
  if (!std::isfinite(M)) throw ParameterError("M must be finite");
  if (levels_per_qubit < 4) throw ParameterError("levels_per_qubit must be at least 4");
  if (t_max < 0.0) throw ParameterError("t_max must be non-negative");
  if (n_steps < 2) throw ParameterError("n_steps must be at least 2");
}

std::optional<std::size_t> PopulationTrace::label_index(Label l) const {
  auto it = std::find(labels.begin(), labels.end(), l);
  if (it == labels.end()) return std::nullopt;
  return static_cast<std::size_t>(it - labels.begin());
}

double PopulationTrace::total(std::size_t t) const {
  double s = 0.0;
  for (double p : populations[t]) s += p;
  return s;
}

CoupledSystem build_coupled_hamiltonian(const CoupledSpec& spec) {
  spec.validate();
  const int L = spec.levels_per_qubit;
  // Extra levels only serve the truncation estimate.
  const int probe = L + 4;
  CoupledSystem sys;
  sys.levels = L;
  const QubitSpectrum left_full = diagonalize_qubit(spec.left, probe);
  const QubitSpectrum right_full = diagonalize_qubit(spec.right, probe);
  auto truncate = [L](const QubitSpectrum& s) {
    QubitSpectrum t;
    t.energies = s.energies.head(L).array() - s.energies(0);
    t.phi_elements = s.phi_elements.topLeftCorner(L, L);
    return t;
  };
  sys.left = truncate(left_full);
  sys.right = truncate(right_full);

  const Eigen::MatrixXd id = Eigen::MatrixXd::Identity(L, L);
  Eigen::MatrixXd h = Eigen::MatrixXd::Zero(L * L, L * L);
  for (int a = 0; a < L; ++a) {
    for (int b = 0; b < L; ++b) h(a * L + b, a * L + b) = sys.left.energies(a) + sys.right.energies(b);
  }
  // Kronecker product phi_1 (x) phi_2 in the n1 * L + n2 ordering.
  for (int a = 0; a < L; ++a)
    for (int c = 0; c < L; ++c)
      for (int b = 0; b < L; ++b)
        for (int d = 0; d < L; ++d)
          h(a * L + b, c * L + d) += spec.M * sys.left.phi_elements(a, c) * sys.right.phi_elements(b, d);
  sys.hamiltonian = 0.5 * (h + h.transpose());

  sys.J_eff = std::abs(spec.M) * std::abs(sys.left.phi_elements(0, 1)) *
              std::abs(sys.right.phi_elements(0, 1));
  const EffectiveModel ml = extract_effective_model(sys.left);
  const EffectiveModel mr = extract_effective_model(sys.right);
  sys.U2 = 0.5 * (ml.U2 + mr.U2);
  sys.U3 = 0.5 * (ml.U3 + mr.U3);

  // Coupling from the populated levels (n <= 3) into levels beyond the cut.
  const int active = std::min(L, 4);
  auto cut_strength = [&](const QubitSpectrum& s) {
    double w = 0.0;
    for (int n = 0; n < active; ++n)
      for (int m = L; m < probe; ++m) w = std::max(w, std::abs(s.phi_elements(n, m)));
    return w;
  };
  auto kept_strength = [&](const QubitSpectrum& s) {
    double w = 0.0;
    for (int n = 0; n < active; ++n)
      for (int m = 0; m < probe; ++m) w = std::max(w, std::abs(s.phi_elements(n, m)));
    return w;
  };
  sys.leakage = std::max(cut_strength(left_full) * kept_strength(right_full),
                         cut_strength(right_full) * kept_strength(left_full));
  sys.truncation_warning = sys.leakage > 1e-3;
  return sys;
}

std::vector<double> time_grid(double t_max, int n_steps) {
  if (n_steps < 2) throw ParameterError("n_steps must be at least 2");
  std::vector<double> t(n_steps);
  for (int i = 0; i < n_steps; ++i) t[i] = t_max * i / (n_steps - 1);
  return t;
}

namespace {

// |psi(t)> = sum_k exp(-i E_k t) |k><k|psi(0)>, populations in the input basis.
std::vector<std::vector<double>> propagate(const Eigen::MatrixXd& h, int initial,
                                           const std::vector<double>& times,
                                           std::vector<double>* energy) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(h);
  if (eig.info() != Eigen::Success) throw ConvergenceError("dynamics eigensolver failed");
  const Eigen::MatrixXd& u = eig.eigenvectors();
  const Eigen::VectorXd& w = eig.eigenvalues();
  const Eigen::VectorXd c0 = u.row(initial).transpose();

  std::vector<std::vector<double>> pops(times.size(), std::vector<double>(h.rows()));
  Eigen::VectorXcd c(w.size());
  for (std::size_t ti = 0; ti < times.size(); ++ti) {
    for (Eigen::Index k = 0; k < w.size(); ++k) c(k) = c0(k) * std::polar(1.0, -w(k) * times[ti]);
    const Eigen::VectorXcd psi = u * c;
    for (Eigen::Index j = 0; j < psi.size(); ++j) pops[ti][j] = std::norm(psi(j));
    if (energy) energy->push_back(std::real(psi.dot(h * psi)));
  }
  return pops;
}

}  // namespace

PopulationTrace evolve(const CoupledSystem& sys, Label initial, const std::vector<double>& times) {
  const int L = sys.levels;
  if (initial.first < 0 || initial.second < 0 || initial.first >= L || initial.second >= L) {
    throw ParameterError("initial state outside the kept levels");
  }
  PopulationTrace tr;
  tr.times = times;
  for (int a = 0; a < L; ++a)
    for (int b = 0; b < L; ++b) tr.labels.emplace_back(a, b);
  tr.populations = propagate(sys.hamiltonian, sys.index(initial), times, &tr.energy);
  return tr;
}

PopulationTrace evolve(const CoupledSpec& spec, Label initial) {
  const CoupledSystem sys = build_coupled_hamiltonian(spec);
  const double t_max = spec.t_max > 0.0 ? spec.t_max : 20.0 / sys.J_eff;
  return evolve(sys, initial, time_grid(t_max, spec.n_steps));
}

PopulationTrace bosonic_reference(double J, double U2, std::optional<double> U3, Label initial,
                                  const std::vector<double>& times) {
  const int cap = U3 ? 3 : 2;
  const int total = initial.first + initial.second;
  if (initial.first < 0 || initial.second < 0 || initial.first > cap || initial.second > cap) {
    throw ParameterError("initial state violates the occupancy cap");
  }
  std::vector<Label> labels;
  for (int a = cap; a >= 0; --a) {
    const int b = total - a;
    if (b >= 0 && b <= cap) labels.emplace_back(a, b);
  }
  const int n = static_cast<int>(labels.size());
  Eigen::MatrixXd h = Eigen::MatrixXd::Zero(n, n);
  auto onsite = [&](int k) {
    double e = 0.5 * U2 * k * (k - 1);
    if (U3) e += *U3 * k * (k - 1) * (k - 2) / 6.0;
    return e;
  };
  for (int i = 0; i < n; ++i) {
    const auto [a, b] = labels[i];
    h(i, i) = onsite(a) + onsite(b);
    // a1^+ a2 moves one boson from mode 2 to mode 1: <a+1, b-1| = sqrt(b (a+1)).
    for (int j = 0; j < n; ++j) {
      const auto [c, d] = labels[j];
      if (c == a + 1 && d == b - 1) {
        const double amp = -J * std::sqrt(double(b) * (a + 1));
        h(j, i) += amp;
        h(i, j) += amp;
      }
    }
  }
  PopulationTrace tr;
  tr.times = times;
  tr.labels = labels;
  const int start = static_cast<int>(
      std::find(labels.begin(), labels.end(), initial) - labels.begin());
  tr.populations = propagate(h, start, times, &tr.energy);
  return tr;
}

TraceComparison compare_traces(const PopulationTrace& a, const PopulationTrace& b) {
  if (a.times.size() != b.times.size()) throw ParameterError("traces have different time grids");
  for (std::size_t i = 0; i < a.times.size(); ++i) {
    const double scale = std::max({1.0, std::abs(a.times[i]), std::abs(b.times[i])});
    if (std::abs(a.times[i] - b.times[i]) > 1e-12 * scale) {
      throw ParameterError("traces have different time grids");
    }
  }
  std::set<Label> labels(a.labels.begin(), a.labels.end());
  labels.insert(b.labels.begin(), b.labels.end());

  TraceComparison out;
  for (const Label& l : labels) {
    const auto ia = a.label_index(l);
    const auto ib = b.label_index(l);
    double worst = 0.0, sq = 0.0;
    for (std::size_t t = 0; t < a.times.size(); ++t) {
      const double pa = ia ? a.populations[t][*ia] : 0.0;
      const double pb = ib ? b.populations[t][*ib] : 0.0;
      worst = std::max(worst, std::abs(pa - pb));
      sq += (pa - pb) * (pa - pb);
    }
    out.max_deviation[l] = worst;
    out.rms_deviation[l] = a.times.empty() ? 0.0 : std::sqrt(sq / a.times.size());
    out.overall_max = std::max(out.overall_max, worst);
  }
  return out;
}

double max_population(const PopulationTrace& trace, const std::vector<Label>& labels) {
  std::vector<std::size_t> idx;
  for (const Label& l : labels) {
    if (auto i = trace.label_index(l)) idx.push_back(*i);
  }
  double worst = 0.0;
  for (const auto& slice : trace.populations) {
    double s = 0.0;
    for (std::size_t i : idx) s += slice[i];
    worst = std::max(worst, s);
  }
  return worst;
}

}  // namespace threebody
