#include <doctest.h>

#include <cmath>

#include "threebody/coupled_dynamics.hpp"
#include "threebody/errors.hpp"

using namespace threebody;

namespace {

CoupledSpec operating_pair() {
  static const double phi = find_zero_U2(0.05, 1.4).phi_x;
  CoupledSpec s;
  s.left.phi_x = phi;
  s.right.phi_x = phi;
  s.levels_per_qubit = 8;
  s.n_steps = 600;
  return s;
}

double pop(const PopulationTrace& tr, std::size_t t, Label l) {
  auto i = tr.label_index(l);
  return i ? tr.populations[t][*i] : 0.0;
}

}  // namespace

TEST_SUITE("coupled_dynamics") {

TEST_CASE("spec validation") {
  CoupledSpec s;
  s.levels_per_qubit = 3;
  CHECK_THROWS_AS(s.validate(), ParameterError);
  s = CoupledSpec{};
  CHECK_THROWS_AS(evolve(s, {6, 0}), ParameterError);
  CHECK_THROWS_AS(time_grid(1.0, 1), ParameterError);
}

TEST_CASE("M = 0: product spectrum and frozen populations") {
  CoupledSpec s = operating_pair();
  s.M = 0.0;
  s.t_max = 1e5;
  const CoupledSystem sys = build_coupled_hamiltonian(s);
  const Eigen::MatrixXd offdiag = sys.hamiltonian - Eigen::MatrixXd(sys.hamiltonian.diagonal().asDiagonal());
  CHECK(offdiag.cwiseAbs().maxCoeff() == 0.0);
  const auto tr = evolve(s, {1, 2});
  for (std::size_t t = 0; t < tr.times.size(); ++t) CHECK(std::abs(pop(tr, t, {1, 2}) - 1.0) < 1e-12);
}

TEST_CASE("ground state is stationary") {
  const auto tr = evolve(operating_pair(), {0, 0});
  for (std::size_t t = 0; t < tr.times.size(); t += 50) CHECK(pop(tr, t, {0, 0}) > 1 - 1e-8);
}

TEST_CASE("one excitation: full-contrast Rabi at 2 J_eff") {
  const CoupledSpec s = operating_pair();
  const CoupledSystem sys = build_coupled_hamiltonian(s);
  const double J = sys.J_eff;
  CHECK(J == doctest::Approx(s.M * std::pow(std::abs(sys.left.phi_elements(0, 1)), 2)));
  const auto times = time_grid(M_PI / (2 * J), 3);  // 0, quarter, half period
  const auto tr = evolve(sys, {1, 0}, times);
  CHECK(pop(tr, 2, {0, 1}) > 0.999);
  CHECK(pop(tr, 1, {1, 0}) == doctest::Approx(0.5).epsilon(1e-3));
}

TEST_CASE("unitarity, energy conservation, mirror symmetry") {
  const CoupledSpec s = operating_pair();
  const CoupledSystem sys = build_coupled_hamiltonian(s);
  const auto times = time_grid(20 / sys.J_eff, 400);
  const auto a = evolve(sys, {1, 2}, times);
  const auto b = evolve(sys, {2, 1}, times);
  REQUIRE(a.energy.size() == times.size());
  for (std::size_t t = 0; t < times.size(); ++t) {
    CHECK(std::abs(a.total(t) - 1.0) < 1e-8);
    CHECK(std::abs(a.energy[t] - a.energy[0]) <= 1e-10 * std::abs(a.energy[0]));
    CHECK(std::abs(pop(a, t, {1, 2}) - pop(b, t, {2, 1})) < 1e-9);
    CHECK(std::abs(pop(a, t, {0, 3}) - pop(b, t, {3, 0})) < 1e-9);
  }
}

TEST_CASE("blockade: triple occupancy below 1e-7") {
  const CoupledSpec s = operating_pair();
  const CoupledSystem sys = build_coupled_hamiltonian(s);
  const auto times = time_grid(12 * M_PI / sys.J_eff, 2000);
  const auto tr = evolve(sys, {1, 2}, times);
  CHECK(max_population(tr, {{3, 0}, {0, 3}}) < 1e-7);
}

TEST_CASE("bosonic reference: one excitation is cos^2") {
  const double J = 0.3;
  const auto times = time_grid(10.0, 101);
  const auto tr = bosonic_reference(J, 0.0, std::nullopt, {1, 0}, times);
  for (std::size_t t = 0; t < times.size(); ++t)
    CHECK(pop(tr, t, {1, 0}) == doctest::Approx(std::pow(std::cos(J * times[t]), 2)).epsilon(1e-12));
}

TEST_CASE("bosonic reference: two free bosons rotate as spin 1") {
  const double J = 0.2;
  const auto times = time_grid(15.0, 61);
  // U3 large but finite keeps the n = 2 states reachable and n = 3 irrelevant.
  const auto tr = bosonic_reference(J, 0.0, 1e9, {1, 1}, times);
  for (std::size_t t = 0; t < times.size(); ++t) {
    const double c = std::cos(2 * J * times[t]);
    CHECK(pop(tr, t, {1, 1}) == doctest::Approx(c * c).epsilon(1e-9));
    CHECK(pop(tr, t, {2, 0}) + pop(tr, t, {0, 2}) + pop(tr, t, {1, 1}) == doctest::Approx(1.0));
  }
}

TEST_CASE("bosonic reference: hard core blocks three on one site") {
  const auto times = time_grid(50.0, 101);
  const auto tr = bosonic_reference(0.1, 0.0, std::nullopt, {1, 2}, times);
  CHECK_FALSE(tr.label_index({3, 0}).has_value());
  for (std::size_t t = 0; t < times.size(); ++t) CHECK(tr.total(t) == doctest::Approx(1.0));
}

TEST_CASE("compare_traces") {
  const auto times = time_grid(5.0, 11);
  const auto a = bosonic_reference(0.3, 0.0, std::nullopt, {1, 0}, times);
  auto cmp = compare_traces(a, a);
  CHECK(cmp.overall_max == 0.0);
  auto b = a;
  b.populations[4][0] += 1e-3;
  cmp = compare_traces(a, b);
  CHECK(cmp.overall_max == doctest::Approx(1e-3).epsilon(1e-9));
  CHECK(cmp.max_deviation.at(a.labels[0]) == doctest::Approx(1e-3).epsilon(1e-9));
  auto c = a;
  c.times[3] += 1.0;
  CHECK_THROWS_AS(compare_traces(a, c), ParameterError);
}

TEST_CASE("microscopic two-excitation trace tracks the reference (regression)") {
  const CoupledSpec s = operating_pair();
  const CoupledSystem sys = build_coupled_hamiltonian(s);
  const auto times = time_grid(2 / sys.J_eff, 400);
  const auto micro = evolve(sys, {1, 1}, times);
  const auto ref = bosonic_reference(sys.J_eff, sys.U2, std::nullopt, {1, 1}, times);
  const double dev = compare_traces(micro, ref).overall_max;
  CHECK(dev < 2e-2);
  CHECK(dev == doctest::Approx(0.0127).epsilon(0.1));
}

}
