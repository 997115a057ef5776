// threebody: command-line driver for the qubit, two-qubit and lattice stages.
// Exit status 0 on success, 1 when a computation fails, 2 for usage or
// validation errors. Outputs are staged in memory and committed at the end.

#include <CLI11.hpp>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "threebody/chern.hpp"
#include "threebody/config.hpp"
#include "threebody/coupled_dynamics.hpp"
#include "threebody/ed.hpp"
#include "threebody/errors.hpp"
#include "threebody/io.hpp"
#include "threebody/qubit_spectrum.hpp"
#include "threebody/sweeps.hpp"

using namespace threebody;

namespace {

struct Context {
  std::string subcommand;
  std::string config_path;
  std::string out_dir;
  int threads = 1;
  std::optional<std::uint64_t> seed;
  std::optional<double> tol;
  bool verbose = false;
  bool computing = false;  // set once validation has passed
};

void log(const Context& ctx, const std::string& msg) {
  if (ctx.verbose) std::cerr << "[" << ctx.subcommand << "] " << msg << std::endl;
}

std::string num(double v) { return format_number(v); }

void default_if_missing(Config& c, const std::string& key, const std::string& value) {
  if (!c.entries().count(key)) c.set(key, value);
}

json manifest_for(const Context& ctx, const Config& config, const OutputSet& outputs,
                  const json& extra) {
  json m;
  m["program"] = "threebody";
  m["version"] = THREEBODY_VERSION;
  m["subcommand"] = ctx.subcommand;
  m["config_source"] = ctx.config_path.empty() ? "<flags>" : ctx.config_path;
  json cfg = json::object();
  for (const auto& [k, v] : config.entries()) cfg[k] = v;
  m["config"] = cfg;
  m["threads"] = ctx.threads;
  if (ctx.seed) m["seed"] = *ctx.seed;
  m["outputs"] = outputs.names();
  m["rerun"] = "threebody " + ctx.subcommand + " --config effective.cfg";
  if (!extra.is_null()) m["details"] = extra;
  return m;
}

void commit(const Context& ctx, const Config& config, OutputSet& outputs,
            const json& extra = json()) {
  outputs.add("effective.cfg", config.to_ini());
  outputs.commit(manifest_for(ctx, config, outputs, extra));
  log(ctx, "wrote " + outputs.directory().string());
}

void apply_seed_and_tol(const Context& ctx, Config& c) {
  if (ctx.seed) c.set("solver.seed", std::to_string(*ctx.seed));
  if (ctx.tol) c.set("solver.tol", num(*ctx.tol));
}

json spec_json(const LatticeSpec& s) {
  json j;
  j["Lx"] = s.Lx;
  j["Ly"] = s.Ly;
  j["alpha"] = s.alpha;
  j["N"] = s.N;
  j["n_max"] = s.n_max;
  j["U2"] = json_number(s.U2);
  j["U3"] = s.hard_core() ? json("hardcore") : json_number(s.U3);
  j["scheme"] = to_string(s.scheme);
  j["R"] = s.effective_range();
  j["theta_x"] = s.theta_x;
  j["theta_y"] = s.theta_y;
  j["flux_quanta"] = s.flux_quanta();
  j["filling"] = s.filling();
  return j;
}

json degeneracy_json(const DegeneracyReport& d) {
  json j;
  j["cluster_size"] = d.cluster_size;
  j["expected"] = d.expected;
  j["spread"] = json_number(d.spread);
  j["gap"] = json_number(d.gap);
  j["lambda"] = json_number(d.lambda);
  j["consistent"] = d.consistent;
  return j;
}

std::vector<double> to_vector(const Eigen::VectorXd& v) { return {v.data(), v.data() + v.size()}; }

// Resolves [qubit] phi_x, solving for the U2 root when asked to.
struct QubitPoint {
  QubitParams params;
  std::optional<ZeroU2Result> root;
};

ZeroU2Options root_options(const Config& c, const QubitParams& p) {
  ZeroU2Options o;
  o.phi_lo = c.get_double("root.phi_lo", o.phi_lo);
  o.phi_hi = c.get_double("root.phi_hi", o.phi_hi);
  o.scan_step = c.get_double("root.scan_step", o.scan_step);
  o.EJ = p.EJ;
  o.basis_size = p.basis_size;
  if (!(o.phi_lo < o.phi_hi) || !(o.scan_step > 0))
    throw ParameterError("root: need phi_lo < phi_hi and scan_step > 0");
  return o;
}

QubitPoint resolve_qubit(const QubitParams& p, bool use_root, const ZeroU2Options& ro) {
  QubitPoint q{p, std::nullopt};
  if (!use_root) return q;
  ZeroU2Result r = find_zero_U2(p.Ec, p.EL, ro);
  if (r.status == RootStatus::no_root) throw ConvergenceError("no U2 root: " + r.message);
  q.params.phi_x = r.phi_x;
  q.root = r;
  return q;
}

const char* status_name(RootStatus s) {
  switch (s) {
    case RootStatus::found: return "found";
    case RootStatus::flat: return "flat";
    case RootStatus::no_root: return "no_root";
  }
  return "?";
}

// ---------------------------------------------------------------- qubit

int run_qubit(Context& ctx, Config& c) {
  if (ctx.tol) c.set("qubit.convergence_tol", num(*ctx.tol));
  const QubitParams p = qubit_from(c);
  const bool use_root = qubit_phi_from_root(c, false);
  const ZeroU2Options ro = root_options(c, p);
  const int levels = c.get_int("qubit.levels", 6);
  const double conv_tol = c.get_double("qubit.convergence_tol", 1e-9);
  p.validate();
  if (levels < 4 || levels > p.basis_size / 4)
    throw ParameterError("qubit.levels must be in [4, basis_size / 4]");
  c.reject_unused();
  ctx.computing = true;

  const QubitPoint q = resolve_qubit(p, use_root, ro);
  const double conv = convergence_error(q.params, 4);
  if (conv > conv_tol)
    throw ConvergenceError("spectrum not converged: basis doubling moves levels by " + num(conv));
  const QubitSpectrum s = diagonalize_qubit(q.params, levels);
  const EffectiveModel m = extract_effective_model(s);

  std::cout << "phi_x  = " << num(q.params.phi_x) << "\n"
            << "omega0 = " << num(m.omega0) << " EJ\n"
            << "U2     = " << num(m.U2) << " EJ\n"
            << "U3     = " << num(m.U3) << " EJ\n";

  OutputSet out(ctx.out_dir);
  CsvTable table({"EL", "phi_x", "omega0", "U2", "U3"});
  table.add_row(std::vector<double>{q.params.EL, q.params.phi_x, m.omega0, m.U2, m.U3});
  out.add("qubit.csv", table);

  CsvTable lv({"n", "E_minus_E0", "phi_n_n1"});
  for (int n = 0; n < levels; ++n) {
    const double up = n + 1 < levels ? std::abs(s.phi_elements(n, n + 1)) : std::nan("");
    lv.add_row(std::vector<double>{double(n), s.energies(n) - s.energies(0), up});
  }
  out.add("levels.csv", lv);

  json j;
  j["EL"] = q.params.EL;
  j["phi_x"] = q.params.phi_x;
  j["omega0"] = m.omega0;
  j["U2"] = m.U2;
  j["U3"] = m.U3;
  j["Ec"] = q.params.Ec;
  j["EJ"] = q.params.EJ;
  j["basis_size"] = q.params.basis_size;
  j["convergence_error"] = conv;
  j["enhancement_deviation"] = enhancement_deviation(s);
  if (q.root) j["root_status"] = status_name(q.root->status);
  out.add("qubit.json", j);
  commit(ctx, c, out);
  return 0;
}

// ---------------------------------------------------------------- qubit-sweep

int run_qubit_sweep(Context& ctx, Config& c) {
  QubitParams p = qubit_from(c);
  const auto EL = c.get_grid("sweep.EL", parse_grid("lin:0.5:2.0:16"));
  const auto phi = c.get_grid("sweep.phi_x", parse_grid("lin:2.0:3.2:121"));
  const bool contour = c.get_bool("sweep.contour", true);
  const bool maximize = c.get_bool("sweep.maximize", false);
  const double EL_lo = c.get_double("sweep.EL_lo", 0.5);
  const double EL_hi = c.get_double("sweep.EL_hi", 2.0);
  const ZeroU2Options ro = root_options(c, p);
  p.validate();
  SweepPlan plan;
  plan.target = SweepTarget::fig2_map;
  plan.axes = {{"EL", EL}, {"phi_x", phi}};
  plan.fixed = {{"Ec", num(p.Ec)}, {"basis_size", std::to_string(p.basis_size)}};
  plan.output = ctx.out_dir;
  plan.validate();
  for (double v : EL)
    if (!(v > 0)) throw ParameterError("sweep.EL values must be positive");
  if (maximize && !(EL_lo < EL_hi)) throw ParameterError("sweep.EL_lo must be below sweep.EL_hi");
  c.reject_unused();
  ctx.computing = true;

  OutputSet out(ctx.out_dir);
  log(ctx, "map " + std::to_string(EL.size()) + " x " + std::to_string(phi.size()));
  const auto cells = sweep_U2_U3(p.Ec, EL, phi, p.basis_size, ctx.threads);
  CsvTable table({"EL", "phi_x", "omega0", "U2", "U3"});
  json failures = json::array();
  for (const auto& cell : cells) {
    if (cell.error) {
      const double nan = std::nan("");
      table.add_row(std::vector<double>{cell.EL, cell.phi_x, nan, nan, nan});
      failures.push_back({{"EL", cell.EL}, {"phi_x", cell.phi_x}, {"error", *cell.error}});
    } else {
      table.add_row(std::vector<double>{cell.EL, cell.phi_x, cell.model.omega0, cell.model.U2,
                                        cell.model.U3});
    }
  }
  out.add("sweep.csv", table);
  json j = json::array();
  for (const auto& cell : cells) {
    json row{{"EL", cell.EL}, {"phi_x", cell.phi_x}};
    row["omega0"] = cell.error ? json(nullptr) : json_number(cell.model.omega0);
    row["U2"] = cell.error ? json(nullptr) : json_number(cell.model.U2);
    row["U3"] = cell.error ? json(nullptr) : json_number(cell.model.U3);
    if (cell.error) row["error"] = *cell.error;
    j.push_back(row);
  }
  out.add("sweep.json", j);

  if (contour) {
    const auto points = zero_U2_contour(p.Ec, EL, ro, ctx.threads);
    CsvTable ct({"EL", "phi_x", "omega0", "U2", "U3", "status"});
    for (const auto& pt : points) {
      const auto& r = pt.root;
      const bool ok = r.status != RootStatus::no_root;
      const double nan = std::nan("");
      ct.add_row({num(pt.EL), ok ? num(r.phi_x) : "nan", num(ok ? r.model.omega0 : nan),
                  num(ok ? r.model.U2 : nan), num(ok ? r.model.U3 : nan), status_name(r.status)});
    }
    out.add("contour.csv", ct);
  }
  if (maximize) {
    const ContourMaximum best = max_U3_on_zero_contour(p.Ec, EL_lo, EL_hi, ro);
    std::cout << "largest U3 on the U2 = 0 contour: EL = " << num(best.EL)
              << ", phi_x = " << num(best.phi_x) << ", U3 = " << num(best.model.U3) << " EJ\n";
    out.add("maximum.json", json{{"EL", best.EL}, {"phi_x", best.phi_x}, {"omega0", best.model.omega0},
                                 {"U2", best.model.U2}, {"U3", best.model.U3}});
  }
  if (!failures.empty()) std::cerr << failures.size() << " cells failed; see sweep.json\n";
  commit(ctx, c, out, json{{"failed_cells", failures.size()}});
  return 0;
}

// ---------------------------------------------------------------- two-site

std::string label_name(Label l) {
  if (l.first < 10 && l.second < 10) return "P" + std::to_string(l.first) + std::to_string(l.second);
  return "P" + std::to_string(l.first) + "_" + std::to_string(l.second);
}

CsvTable trace_table(const PopulationTrace& tr) {
  std::vector<std::size_t> keep;
  for (std::size_t i = 0; i < tr.labels.size(); ++i) {
    double peak = 0.0;
    for (const auto& row : tr.populations) peak = std::max(peak, row[i]);
    if (peak > 1e-12) keep.push_back(i);
  }
  std::vector<std::string> header{"t"};
  for (auto i : keep) header.push_back(label_name(tr.labels[i]));
  CsvTable t(header);
  for (std::size_t s = 0; s < tr.times.size(); ++s) {
    std::vector<double> row{tr.times[s]};
    for (auto i : keep) row.push_back(tr.populations[s][i]);
    t.add_row(row);
  }
  return t;
}

int run_two_site(Context& ctx, Config& c) {
  CoupledSpec spec = coupled_from(c);
  const bool use_root = qubit_phi_from_root(c, true);
  const bool right_fixed = c.has("coupled.phi_x_right");
  const ZeroU2Options ro = root_options(c, spec.left);
  const Label init = parse_label(c.get_string("coupled.initial", "1,2"));
  const std::string reference = c.get_string("coupled.reference", "hardcore");
  if (reference != "hardcore" && reference != "U3")
    throw ParameterError("coupled.reference must be hardcore or U3");
  spec.validate();
  if (init.first >= spec.levels_per_qubit || init.second >= spec.levels_per_qubit)
    throw ParameterError("coupled.initial lies outside the truncation");
  c.reject_unused();
  ctx.computing = true;

  if (use_root) {
    const QubitPoint q = resolve_qubit(spec.left, true, ro);
    spec.left.phi_x = q.params.phi_x;
    if (!right_fixed) spec.right.phi_x = q.params.phi_x;
  }
  const CoupledSystem sys = build_coupled_hamiltonian(spec);
  if (sys.truncation_warning)
    std::cerr << "warning: coupling to truncated levels is " << num(sys.leakage)
              << " of M; raise coupled.levels\n";
  const double t_max = spec.t_max > 0 ? spec.t_max : 20.0 / sys.J_eff;
  const auto times = time_grid(t_max, spec.n_steps);
  const PopulationTrace tr = evolve(sys, init, times);

  double unitarity = 0.0;
  for (std::size_t s = 0; s < times.size(); ++s) unitarity = std::max(unitarity, std::abs(tr.total(s) - 1.0));
  std::vector<Label> triples;
  for (int n = 3; n < sys.levels; ++n) {
    triples.push_back({n, 0});
    triples.push_back({0, n});
  }
  const double triple = max_population(tr, triples);

  OutputSet out(ctx.out_dir);
  out.add("populations.csv", trace_table(tr));
  json j;
  j["phi_x_left"] = spec.left.phi_x;
  j["phi_x_right"] = spec.right.phi_x;
  j["M"] = spec.M;
  j["levels"] = sys.levels;
  j["J_eff"] = sys.J_eff;
  j["U2"] = sys.U2;
  j["U3"] = sys.U3;
  j["t_max"] = t_max;
  j["initial"] = {init.first, init.second};
  j["leakage"] = sys.leakage;
  j["truncation_warning"] = sys.truncation_warning;
  j["max_unitarity_error"] = unitarity;
  j["max_single_site_triple_population"] = triple;
  json labels = json::object();
  for (std::size_t i = 0; i < tr.labels.size(); ++i) {
    std::vector<double> col;
    for (const auto& row : tr.populations) col.push_back(row[i]);
    labels[label_name(tr.labels[i])] = json_array(col);
  }

  std::cout << "J_eff = " << num(sys.J_eff) << " EJ\n"
            << "max triple occupancy = " << num(triple) << "\n";
  if (init.first + init.second <= 3) {
    const std::optional<double> u3 = reference == "U3" ? std::optional<double>(sys.U3) : std::nullopt;
    const PopulationTrace ref = bosonic_reference(sys.J_eff, sys.U2, u3, init, times);
    const TraceComparison cmp = compare_traces(tr, ref);
    out.add("reference.csv", trace_table(ref));
    json dev = json::object();
    for (const auto& [l, v] : cmp.max_deviation)
      dev[label_name(l)] = {{"max", v}, {"rms", cmp.rms_deviation.at(l)}};
    j["reference"] = reference;
    j["deviation"] = dev;
    j["max_deviation"] = cmp.overall_max;
    std::cout << "max deviation from the bosonic reference = " << num(cmp.overall_max) << "\n";
  }
  out.add("two_site.json", j);
  out.add("populations.json", json{{"times", json_array(times)}, {"populations", labels}});
  commit(ctx, c, out);
  return 0;
}

// ---------------------------------------------------------------- ed

int run_ed(Context& ctx, Config& c) {
  apply_seed_and_tol(ctx, c);
  const LatticeSpec spec = lattice_from(c);
  SolveOptions opt = solver_from(c);
  const bool diagnostics = c.get_bool("ed.diagnostics", false);
  spec.validate();
  c.reject_unused();
  ctx.computing = true;

  opt.lanczos.threads = ctx.threads;
  opt.lanczos.want_vectors = diagnostics;
  const FockBasis basis = enumerate_basis(spec, opt.dimension_limit);
  log(ctx, "dimension " + std::to_string(basis.size()));
  const EDResult r = solve_lattice(spec, basis, opt);

  OutputSet out(ctx.out_dir);
  CsvTable table({"n", "E_over_J"});
  for (Eigen::Index i = 0; i < r.eigenvalues.size(); ++i)
    table.add_row(std::vector<double>{double(i + 1), r.eigenvalues(i)});
  out.add("spectrum.csv", table);
  json j;
  j["spec"] = spec_json(spec);
  j["dimension"] = r.dimension;
  j["eigenvalues"] = json_array(to_vector(r.eigenvalues));
  j["residuals"] = json_array(to_vector(r.residuals));
  j["degeneracy"] = degeneracy_json(r.degeneracy);
  out.add("ed.json", j);
  if (diagnostics) {
    const SiteCorrelations d = pair_pfaffian_diagnostics(r, basis, opt.manifold);
    out.add("diagnostics.json",
            json{{"density", json_array(d.density)}, {"mean_density", d.mean_density},
                 {"pair", d.pair}, {"triple", d.triple}, {"g2", json_number(d.g2)},
                 {"g3", json_number(d.g3)}, {"states", d.states}});
  }
  std::cout << "dimension = " << r.dimension << "\n"
            << "gap = " << num(r.degeneracy.gap) << "\n"
            << "spread = " << num(r.degeneracy.spread) << "\n"
            << "lambda = " << num(r.degeneracy.lambda) << "\n";
  commit(ctx, c, out);
  return 0;
}

// ---------------------------------------------------------------- chern

json chern_json(const ChernResult& r) {
  json j;
  j["grid"] = r.grid;
  j["manifold"] = r.manifold;
  j["total"] = r.total;
  j["raw_total"] = r.raw_total;
  j["per_state_average"] = static_cast<double>(r.total) / r.manifold;
  json rows = json::array();
  for (int iy = 0; iy < r.grid; ++iy) {
    std::vector<double> row(r.curvature.begin() + iy * r.grid, r.curvature.begin() + (iy + 1) * r.grid);
    rows.push_back(json_array(row));
  }
  j["curvature"] = rows;
  j["min_gap"] = r.min_gap;
  j["min_gap_theta"] = {r.min_gap_theta_x, r.min_gap_theta_y};
  j["max_spread"] = r.max_spread;
  json per = json::array();
  for (const auto& p : r.per_state) per.push_back(p ? json(*p) : json(nullptr));
  j["per_state"] = per;
  return j;
}

int run_chern(Context& ctx, Config& c) {
  apply_seed_and_tol(ctx, c);
  const LatticeSpec spec = lattice_from(c);
  ChernOptions opt = chern_from(c);
  const bool verify = c.get_bool("twist.verify_doubling", true);
  spec.validate();
  c.reject_unused();
  ctx.computing = true;

  opt.threads = ctx.threads;
  log(ctx, "grid " + std::to_string(opt.grid));
  const ChernResult coarse = chern_number(spec, opt);
  json j = chern_json(coarse);
  j["spec"] = spec_json(spec);
  std::cout << "total Chern number = " << coarse.total << " (grid " << coarse.grid << ", raw "
            << num(coarse.raw_total) << ")\n";
  if (verify) {
    ChernOptions fine = opt;
    fine.grid = 2 * opt.grid;
    log(ctx, "grid " + std::to_string(fine.grid));
    const ChernResult f = chern_number(spec, fine);
    j["doubled"] = chern_json(f);
    std::cout << "doubled grid " << f.grid << ": " << f.total << "\n";
    if (f.total != coarse.total)
      throw ConvergenceError("Chern number changes under grid doubling: " +
                             std::to_string(coarse.total) + " vs " + std::to_string(f.total));
  }
  OutputSet out(ctx.out_dir);
  out.add("chern.json", j);
  commit(ctx, c, out);
  return 0;
}

// ---------------------------------------------------------------- fig4a

int run_fig4a_cmd(Context& ctx, Config& c) {
  apply_seed_and_tol(ctx, c);
  const LatticeSpec spec = lattice_from(c);
  SolveOptions opt = solver_from(c);
  spec.validate();
  SweepPlan plan;
  plan.target = SweepTarget::fig4a_schemes;
  plan.fixed = {{"Lx", std::to_string(spec.Lx)}, {"Ly", std::to_string(spec.Ly)},
                {"alpha", num(spec.alpha)},      {"N", std::to_string(spec.N)},
                {"n_max", std::to_string(spec.n_max)}, {"seed", std::to_string(opt.lanczos.seed)}};
  plan.output = ctx.out_dir;
  plan.validate();
  c.reject_unused();
  ctx.computing = true;

  opt.lanczos.threads = ctx.threads;
  opt.lanczos.want_vectors = false;
  const auto runs = run_fig4a(spec, opt);
  std::vector<std::string> header{"n"};
  for (const auto& r : runs) header.push_back(to_string(r.scheme));
  CsvTable spectra(header);
  for (Eigen::Index i = 0; i < runs[0].result.eigenvalues.size(); ++i) {
    std::vector<double> row{double(i + 1)};
    for (const auto& r : runs) row.push_back(r.result.eigenvalues(i));
    spectra.add_row(row);
  }
  CsvTable summary({"scheme", "dimension", "gap", "spread", "lambda", "cluster_size"});
  json j = json::array();
  for (const auto& r : runs) {
    const auto& d = r.result.degeneracy;
    summary.add_row({to_string(r.scheme), std::to_string(r.result.dimension), num(d.gap),
                     num(d.spread), num(d.lambda), std::to_string(d.cluster_size)});
    json e;
    e["scheme"] = to_string(r.scheme);
    e["spec"] = spec_json(r.result.spec);
    e["eigenvalues"] = json_array(to_vector(r.result.eigenvalues));
    e["degeneracy"] = degeneracy_json(d);
    j.push_back(e);
    std::cout << to_string(r.scheme) << ": gap = " << num(d.gap) << ", spread = " << num(d.spread)
              << ", lambda = " << num(d.lambda) << "\n";
  }
  std::cout << "NNN / NN gap ratio = " << num(runs[1].result.degeneracy.gap / runs[0].result.degeneracy.gap)
            << "\n";
  OutputSet out(ctx.out_dir);
  out.add("fig4a_spectra.csv", spectra);
  out.add("fig4a_summary.csv", summary);
  out.add("fig4a.json", j);
  commit(ctx, c, out);
  return 0;
}

// ---------------------------------------------------------------- fig4b

double nearest(const std::vector<double>& grid, double target) {
  double best = grid.front();
  for (double v : grid)
    if (std::abs(v - target) < std::abs(best - target)) best = v;
  return best;
}

int run_fig4b_cmd(Context& ctx, Config& c) {
  apply_seed_and_tol(ctx, c);
  default_if_missing(c, "lattice.scheme", "NNN");
  default_if_missing(c, "lattice.n_max", "3");
  default_if_missing(c, "solver.k", "4");
  LatticeSpec spec = lattice_from(c);
  SolveOptions opt = solver_from(c);
  const auto U2 = c.get_grid("sweep.U2", default_fig4b_U2_grid());
  const auto U3 = c.get_grid("sweep.U3", default_fig4b_U3_grid());
  const double threshold = c.get_double("sweep.gapped_lambda", kGappedLambda);
  // The cell values replace U2 and U3 of the base spec.
  spec.U3 = U3.front();
  spec.validate();
  SweepPlan plan;
  plan.target = SweepTarget::fig4b_order;
  plan.axes = {{"U2", U2}, {"U3", U3}};
  plan.fixed = {{"Lx", std::to_string(spec.Lx)}, {"Ly", std::to_string(spec.Ly)},
                {"alpha", num(spec.alpha)},      {"N", std::to_string(spec.N)},
                {"n_max", std::to_string(spec.n_max)}, {"scheme", to_string(spec.scheme)},
                {"seed", std::to_string(opt.lanczos.seed)}};
  plan.output = ctx.out_dir;
  plan.validate();
  c.reject_unused();
  ctx.computing = true;

  opt.lanczos.want_vectors = false;
  log(ctx, std::to_string(U2.size() * U3.size()) + " cells");
  const auto cells = run_fig4b(U2, U3, spec, opt, ctx.threads);
  CsvTable table({"U2", "U3", "lambda", "gap", "spread"});
  for (const auto& cell : cells)
    table.add_row(std::vector<double>{cell.U2, cell.U3, cell.lambda, cell.gap, cell.spread});

  const double u3_ref = nearest(U3, 100.0);
  const double u2_ref = nearest(U2, 0.0);
  const auto along_U2 = lambda_along_U2(cells, u3_ref);
  const auto along_U3 = lambda_along_U3(cells, u2_ref);
  json j;
  j["scheme"] = to_string(spec.scheme);
  j["gapped_lambda"] = threshold;
  j["lambda_along_U2"] = {{"U3", u3_ref}, {"values", json_array(along_U2)},
                          {"non_increasing", non_increasing(along_U2)}};
  j["lambda_along_U3"] = {{"U2", u2_ref}, {"values", json_array(along_U3)},
                          {"non_decreasing", non_decreasing(along_U3)}};
  json gapped = json::array();
  for (const auto& cell : cells)
    gapped.push_back(json{{"U2", cell.U2}, {"U3", cell.U3}, {"gapped", cell.lambda >= threshold}});
  j["cells"] = gapped;
  std::cout << "lambda non-increasing along U2 at U3 = " << num(u3_ref) << ": "
            << (non_increasing(along_U2) ? "yes" : "no") << "\n"
            << "lambda non-decreasing along U3 at U2 = " << num(u2_ref) << ": "
            << (non_decreasing(along_U3) ? "yes" : "no") << "\n";
  OutputSet out(ctx.out_dir);
  out.add("order_parameter.csv", table);
  out.add("fig4b.json", j);
  commit(ctx, c, out);
  return 0;
}

// ---------------------------------------------------------------- feasibility

int run_feasibility(Context& ctx, Config& c) {
  const QubitParams p = qubit_from(c);
  const bool use_root = qubit_phi_from_root(c, true);
  const ZeroU2Options ro = root_options(c, p);
  const auto EJ = c.get_grid("feasibility.EJ_GHz", {10, 20, 30, 40, 50});
  FeasibilityOptions fo;
  const double J = c.get_double("feasibility.J_MHz", 10.0);
  fo.required_ratio = c.get_double("feasibility.required_ratio", fo.required_ratio);
  fo.min_J_MHz = c.get_double("feasibility.min_J_MHz", fo.min_J_MHz);
  p.validate();
  SweepPlan plan;
  plan.target = SweepTarget::feasibility;
  plan.axes = {{"EJ_GHz", EJ}};
  plan.fixed = {{"U3_over_EJ", use_root ? "zero-U2 root" : num(p.phi_x)}, {"J_MHz", num(J)}};
  plan.output = ctx.out_dir;
  plan.validate();
  if (!(J >= 0)) throw ParameterError("feasibility.J_MHz must be non-negative");
  c.reject_unused();
  ctx.computing = true;

  const QubitPoint q = resolve_qubit(p, use_root, ro);
  const EffectiveModel m = effective_model_at(q.params);
  const auto rows = feasibility_report(m, EJ, J, fo);
  CsvTable table({"EJ_GHz", "U3_MHz", "J_MHz", "ratio", "meets_ratio", "meets_coherence",
                  "few_hundred_MHz"});
  for (const auto& r : rows)
    table.add_row({num(r.EJ_GHz), num(r.U3_MHz), num(r.J_MHz), num(r.ratio),
                   r.meets_ratio ? "1" : "0", r.meets_coherence ? "1" : "0",
                   r.few_hundred_MHz ? "1" : "0"});
  std::cout << "U3 = " << num(m.U3) << " EJ at phi_x = " << num(q.params.phi_x) << "\n";
  for (const auto& r : rows)
    std::cout << "EJ " << num(r.EJ_GHz) << " GHz: U3 " << num(r.U3_MHz) << " MHz, U3/J "
              << num(r.ratio) << (r.meets_ratio ? "" : "  (below required ratio)")
              << (r.meets_coherence ? "" : "  (J below coherence floor)") << "\n";
  OutputSet out(ctx.out_dir);
  out.add("feasibility.csv", table);
  out.add("feasibility.json", json{{"phi_x", q.params.phi_x}, {"omega0", m.omega0}, {"U2", m.U2},
                                   {"U3_over_EJ", m.U3}, {"J_MHz", J},
                                   {"required_ratio", fo.required_ratio},
                                   {"min_J_MHz", fo.min_J_MHz}});
  commit(ctx, c, out);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Three-body qubit and lattice simulations"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(THREEBODY_VERSION));

  Context ctx;
  std::vector<std::string> sets;
  std::map<std::string, std::string> flag_values;

  struct Flag {
    const char* name;
    const char* key;
    const char* help;
  };
  const std::map<std::string, std::vector<Flag>> flags = {
      {"qubit",
       {{"--Ec", "qubit.Ec", "charging energy / EJ"},
        {"--EL", "qubit.EL", "inductive energy / EJ"},
        {"--EJ", "qubit.EJ", "Josephson energy (1 sets the unit)"},
        {"--phix", "qubit.phi_x", "external flux in radians, or zero-U2"},
        {"--basis", "qubit.basis_size", "oscillator basis size"}}},
      {"qubit-sweep",
       {{"--Ec", "qubit.Ec", "charging energy / EJ"},
        {"--EL-grid", "sweep.EL", "EL grid"},
        {"--phix-grid", "sweep.phi_x", "phi_x grid"}}},
      {"two-site",
       {{"--M", "coupled.M", "coupling energy / EJ"},
        {"--initial", "coupled.initial", "initial levels n1,n2"},
        {"--phix", "qubit.phi_x", "external flux in radians, or zero-U2"},
        {"--t-max", "coupled.t_max", "evolution window, 1/EJ"}}},
      {"ed",
       {{"--scheme", "lattice.scheme", "NN, NNN or LR"},
        {"--U2", "interaction.U2", "two-body interaction / J"},
        {"--U3", "interaction.U3", "three-body interaction / J, or hardcore"},
        {"--k", "solver.k", "eigenvalues to compute"}}},
      {"chern",
       {{"--scheme", "lattice.scheme", "NN, NNN or LR"},
        {"--grid", "twist.grid", "twist points per direction"}}},
      {"fig4a", {}},
      {"fig4b",
       {{"--scheme", "lattice.scheme", "NN, NNN or LR"},
        {"--U2-grid", "sweep.U2", "U2 grid"},
        {"--U3-grid", "sweep.U3", "U3 grid"}}},
      {"feasibility",
       {{"--EJ-grid", "feasibility.EJ_GHz", "EJ values in GHz"},
        {"--J", "feasibility.J_MHz", "hopping J / 2 pi in MHz"}}},
  };
  const std::vector<std::pair<std::string, std::string>> commands = {
      {"qubit", "single-qubit spectrum and effective interactions"},
      {"qubit-sweep", "U2 / U3 maps over (EL, phi_x) and the U2 = 0 contour"},
      {"two-site", "two coupled qubits against the bosonic reference"},
      {"ed", "lowest eigenvalues of the lattice model"},
      {"chern", "Chern number of the ground manifold over boundary twists"},
      {"fig4a", "NN, NNN and long-range spectra on a shared basis"},
      {"fig4b", "order parameter over (U2, U3)"},
      {"feasibility", "U3 in physical units against the hopping"},
  };
  std::map<std::string, std::map<std::string, std::string>> per_command;
  for (const auto& [name, help] : commands) {
    CLI::App* sub = app.add_subcommand(name, help);
    sub->add_option("--config,-c", ctx.config_path, "INI config file");
    sub->add_option("--out,-o", ctx.out_dir, "output directory (default results/<subcommand>)");
    sub->add_option("--threads,-j", ctx.threads, "worker threads")->check(CLI::Range(1, 1024));
    sub->add_option_function<std::uint64_t>("--seed", [&](std::uint64_t s) { ctx.seed = s; },
                                            "start-vector seed");
    sub->add_option_function<double>("--tol", [&](double t) { ctx.tol = t; }, "solver tolerance");
    sub->add_flag("--verbose,-v", ctx.verbose, "progress on stderr");
    sub->add_option("--set", sets, "override a config key: section.key=value")->take_all();
    for (const auto& f : flags.at(name))
      sub->add_option(f.name, per_command[name][f.key], f.help);
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  CLI::App* chosen = app.get_subcommands().front();
  ctx.subcommand = chosen->get_name();
  if (ctx.out_dir.empty()) ctx.out_dir = "results/" + ctx.subcommand;

  try {
    Config config;
    if (!ctx.config_path.empty()) {
      if (!std::filesystem::exists(ctx.config_path))
        throw ParameterError("config file not found: " + ctx.config_path);
      config = Config::load(ctx.config_path);
    }
    for (const auto& f : flags.at(ctx.subcommand)) {
      if (chosen->count(f.name) > 0) config.set(f.key, per_command[ctx.subcommand][f.key]);
    }
    for (const auto& s : sets) config.set(s);

    const std::map<std::string, int (*)(Context&, Config&)> dispatch = {
        {"qubit", run_qubit},       {"qubit-sweep", run_qubit_sweep}, {"two-site", run_two_site},
        {"ed", run_ed},             {"chern", run_chern},             {"fig4a", run_fig4a_cmd},
        {"fig4b", run_fig4b_cmd},   {"feasibility", run_feasibility},
    };
    return dispatch.at(ctx.subcommand)(ctx, config);
  } catch (const std::exception& e) {
    const bool validation = !ctx.computing;
    std::cerr << "threebody " << ctx.subcommand << ": " << (validation ? "invalid input: " : "error: ")
              << e.what() << std::endl;
    return validation ? 2 : 1;
  }
}
