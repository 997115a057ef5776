#include "threebody/sweeps.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "threebody/errors.hpp"
#include "threebody/parallel.hpp"

namespace threebody {

std::string to_string(SweepTarget target) {
  switch (target) {
    case SweepTarget::fig2_map: return "fig2_map";
    case SweepTarget::fig4a_schemes: return "fig4a_schemes";
    case SweepTarget::fig4b_order: return "fig4b_order";
    case SweepTarget::feasibility: return "feasibility";
  }
  return "?";
}

SweepTarget parse_target(const std::string& name) {
  for (auto t : {SweepTarget::fig2_map, SweepTarget::fig4a_schemes, SweepTarget::fig4b_order,
                 SweepTarget::feasibility}) {
    if (to_string(t) == name) return t;
  }
  throw ParameterError("unknown sweep target '" + name + "'");
}

void SweepPlan::validate() const {
  std::vector<std::string> need_axes, need_fixed;
  switch (target) {
    case SweepTarget::fig2_map:
      need_axes = {"EL", "phi_x"};
      need_fixed = {"Ec", "basis_size"};
      break;
    case SweepTarget::fig4a_schemes:
      need_fixed = {"Lx", "Ly", "alpha", "N", "n_max", "seed"};
      break;
    case SweepTarget::fig4b_order:
      need_axes = {"U2", "U3"};
      need_fixed = {"Lx", "Ly", "alpha", "N", "n_max", "scheme", "seed"};
      break;
    case SweepTarget::feasibility:
      need_axes = {"EJ_GHz"};
      need_fixed = {"U3_over_EJ", "J_MHz"};
      break;
  }
  for (const auto& a : need_axes) {
    auto it = axes.find(a);
    if (it == axes.end() || it->second.empty()) {
      throw ParameterError("sweep " + to_string(target) + " needs a non-empty axis '" + a + "'");
    }
  }
  for (const auto& f : need_fixed) {
    if (!fixed.contains(f)) {
      throw ParameterError("sweep " + to_string(target) + " needs fixed parameter '" + f + "'");
    }
  }
}

std::vector<SchemeRun> run_fig4a(const LatticeSpec& base, const SolveOptions& options) {
  const FockBasis basis = enumerate_basis(base, options.dimension_limit);
  std::vector<SchemeRun> runs;
  for (auto scheme : {HoppingScheme::nearest, HoppingScheme::next_nearest, HoppingScheme::long_range}) {
    LatticeSpec spec = base;
    spec.scheme = scheme;
    runs.push_back({scheme, solve_lattice(spec, basis, options)});
  }
  return runs;
}

namespace {

OrderCell make_cell(double U2, double U3, const LatticeSpec& base, const FockBasis& basis,
                    const SolveOptions& options) {
  LatticeSpec spec = base;
  spec.U2 = U2;
  spec.U3 = U3;
  SolveOptions opt = options;
  opt.lanczos.want_vectors = false;
  opt.lanczos.threads = 1;
  const EDResult r = solve_lattice(spec, basis, opt);
  return {U2, U3, r.degeneracy.lambda, r.degeneracy.gap, r.degeneracy.spread, r.eigenvalues};
}

void check_order_base(const LatticeSpec& base) {
  if (base.n_max != 3) throw ParameterError("order-parameter scans need n_max = 3");
}

}  // namespace

std::vector<OrderCell> run_fig4b(std::span<const double> U2_grid, std::span<const double> U3_grid,
                                 const LatticeSpec& base, const SolveOptions& options,
                                 int threads) {
  if (U2_grid.empty() || U3_grid.empty()) throw ParameterError("order grids must be non-empty");
  LatticeSpec probe = base;
  probe.U3 = U3_grid.front();
  check_order_base(probe);
  const FockBasis basis = enumerate_basis(probe, options.dimension_limit);
  std::vector<OrderCell> cells(U2_grid.size() * U3_grid.size());
  parallel_for(cells.size(), threads, [&](std::size_t i) {
    cells[i] = make_cell(U2_grid[i / U3_grid.size()], U3_grid[i % U3_grid.size()], base, basis, options);
  });
  return cells;
}

OrderCell order_cell(double U2, double U3, const LatticeSpec& base, const SolveOptions& options) {
  LatticeSpec probe = base;
  probe.U3 = U3;
  check_order_base(probe);
  const FockBasis basis = enumerate_basis(probe, options.dimension_limit);
  return make_cell(U2, U3, base, basis, options);
}

namespace {

template <class Key, class Other>
std::vector<double> slice(const std::vector<OrderCell>& cells, double target, Key key, Other other) {
  double nearest = std::numeric_limits<double>::quiet_NaN();
  for (const auto& c : cells) {
    if (std::isnan(nearest) || std::abs(key(c) - target) < std::abs(nearest - target)) nearest = key(c);
  }
  std::vector<std::pair<double, double>> picked;
  for (const auto& c : cells) {
    if (key(c) == nearest) picked.emplace_back(other(c), c.lambda);
  }
  std::sort(picked.begin(), picked.end());
  std::vector<double> out;
  for (const auto& p : picked) out.push_back(p.second);
  return out;
}

}  // namespace

std::vector<double> lambda_along_U2(const std::vector<OrderCell>& cells, double U3) {
  return slice(cells, U3, [](const OrderCell& c) { return c.U3; },
               [](const OrderCell& c) { return c.U2; });
}

std::vector<double> lambda_along_U3(const std::vector<OrderCell>& cells, double U2) {
  return slice(cells, U2, [](const OrderCell& c) { return c.U2; },
               [](const OrderCell& c) { return c.U3; });
}

bool non_increasing(std::span<const double> v) {
  return std::adjacent_find(v.begin(), v.end(), std::less<>{}) == v.end();
}

bool non_decreasing(std::span<const double> v) {
  return std::adjacent_find(v.begin(), v.end(), std::greater<>{}) == v.end();
}

std::vector<double> default_fig4b_U2_grid() {
  std::vector<double> g;
  for (int i = 0; i <= 10; ++i) g.push_back(i);
  return g;
}

std::vector<double> default_fig4b_U3_grid() {
  std::vector<double> g;
  for (int i = 0; i <= 12; ++i) g.push_back(std::pow(10.0, 2.0 * i / 12.0));
  return g;
}

std::vector<FeasibilityRow> feasibility_report(const EffectiveModel& qubit,
                                               std::span<const double> EJ_GHz, double J_MHz,
                                               const FeasibilityOptions& opt) {
  if (J_MHz < 0.0) throw ParameterError("J must be non-negative");
  std::vector<FeasibilityRow> rows;
  for (double ej : EJ_GHz) {
    FeasibilityRow r;
    r.EJ_GHz = ej;
    r.U3_MHz = qubit.U3 * ej * 1e3;
    r.J_MHz = J_MHz;
    r.ratio = J_MHz > 0.0 ? r.U3_MHz / J_MHz : std::numeric_limits<double>::infinity();
    r.meets_ratio = r.ratio >= opt.required_ratio;
    r.meets_coherence = J_MHz >= opt.min_J_MHz;
    r.few_hundred_MHz = r.U3_MHz >= 100.0 && r.U3_MHz < 1000.0;
    rows.push_back(r);
  }
  return rows;
}

}  // namespace threebody
