#include <doctest.h>

#include <cmath>
#include <vector>

#include "threebody/errors.hpp"
#include "threebody/sweeps.hpp"

using namespace threebody;

namespace {

LatticeSpec small_soft() {
  LatticeSpec s;
  s.Lx = 3;
  s.Ly = 3;
  s.alpha = 1.0 / 3;
  s.N = 3;
  s.n_max = 3;
  s.U3 = 10.0;
  s.scheme = HoppingScheme::next_nearest;
  return s;
}

SolveOptions four() {
  SolveOptions o;
  o.lanczos.k = 4;
  return o;
}

}  // namespace

TEST_SUITE("sweeps") {

TEST_CASE("plan validation names what is missing") {
  SweepPlan p;
  p.target = SweepTarget::fig4b_order;
  p.axes = {{"U2", {0, 1}}, {"U3", {}}};
  CHECK_THROWS_WITH_AS(p.validate(), doctest::Contains("U3"), ParameterError);
  p.axes["U3"] = {10};
  CHECK_THROWS_WITH_AS(p.validate(), doctest::Contains("Lx"), ParameterError);
  p.fixed = {{"Lx", "4"}, {"Ly", "4"}, {"alpha", "0.25"}, {"N", "4"},
             {"n_max", "3"}, {"scheme", "NNN"}, {"seed", "1"}};
  CHECK_NOTHROW(p.validate());
  CHECK(parse_target("feasibility") == SweepTarget::feasibility);
  CHECK_THROWS_AS(parse_target("fig9"), ParameterError);
}

TEST_CASE("default order grids") {
  const auto u2 = default_fig4b_U2_grid();
  const auto u3 = default_fig4b_U3_grid();
  CHECK(u2.size() == 11);
  CHECK(u2.front() == 0.0);
  CHECK(u2.back() == 10.0);
  CHECK(u3.size() == 13);
  CHECK(u3.front() == doctest::Approx(1.0));
  CHECK(u3.back() == doctest::Approx(100.0));
  CHECK(u3[1] / u3[0] == doctest::Approx(u3[12] / u3[11]));
}

TEST_CASE("order map: layout, isolation and thread independence") {
  const std::vector<double> U2{0.0, 2.0};
  const std::vector<double> U3{5.0, 50.0};
  const auto a = run_fig4b(U2, U3, small_soft(), four(), 1);
  const auto b = run_fig4b(U2, U3, small_soft(), four(), 3);
  REQUIRE(a.size() == 4);
  CHECK(a[1].U2 == 0.0);
  CHECK(a[1].U3 == 50.0);
  CHECK(a[2].U2 == 2.0);
  for (std::size_t i = 0; i < a.size(); ++i) {
    CHECK(a[i].lambda == b[i].lambda);
    CHECK(a[i].gap == b[i].gap);
  }
  const OrderCell alone = order_cell(2.0, 50.0, small_soft(), four());
  CHECK(std::abs(alone.lambda - a[3].lambda) <= 1e-9 * std::max(1.0, std::abs(a[3].lambda)));
  const auto along = lambda_along_U2(a, 49.0);
  REQUIRE(along.size() == 2);
  CHECK(along[0] == a[1].lambda);
  CHECK(along[1] == a[3].lambda);
  LatticeSpec hard = small_soft();
  hard.n_max = 2;
  CHECK_THROWS_AS(run_fig4b(U2, U3, hard, four()), ParameterError);
}

TEST_CASE("monotonic helpers") {
  CHECK(non_increasing(std::vector<double>{3, 2, 2, 1}));
  CHECK_FALSE(non_increasing(std::vector<double>{3, 4}));
  CHECK(non_decreasing(std::vector<double>{1, 1, 2}));
  CHECK_FALSE(non_decreasing(std::vector<double>{2, 1}));
}

TEST_CASE("scheme comparison shares everything but the hopping") {
  LatticeSpec s = small_soft();
  s.n_max = 2;
  s.U3 = INFINITY;
  const auto runs = run_fig4a(s, four());
  REQUIRE(runs.size() == 3);
  CHECK(runs[0].scheme == HoppingScheme::nearest);
  CHECK(runs[2].scheme == HoppingScheme::long_range);
  for (const auto& r : runs) {
    CHECK(r.result.dimension == runs[0].result.dimension);
    CHECK(r.result.spec.N == s.N);
  }
  CHECK(runs[0].result.eigenvalues(0) != runs[1].result.eigenvalues(0));
}

TEST_CASE("feasibility arithmetic") {
  EffectiveModel m;
  m.U3 = 0.01;
  const std::vector<double> ej{20.0};
  auto rows = feasibility_report(m, ej, 10.0);
  CHECK(rows[0].U3_MHz == doctest::Approx(200.0));
  CHECK(rows[0].few_hundred_MHz);
  CHECK(rows[0].ratio == doctest::Approx(20.0));
  CHECK_FALSE(rows[0].meets_ratio);

  m.U3 = 0.6 / 20.0;  // 600 MHz at 20 GHz
  rows = feasibility_report(m, ej, 10.0);
  CHECK(rows[0].ratio == doctest::Approx(60.0).epsilon(1e-12));
  CHECK(rows[0].meets_ratio);
  CHECK(rows[0].meets_coherence);

  rows = feasibility_report(m, ej, 0.0);
  CHECK(std::isinf(rows[0].ratio));
  CHECK_FALSE(rows[0].meets_coherence);
  CHECK_THROWS_AS(feasibility_report(m, ej, -1.0), ParameterError);
}

}
