#include "threebody/qubit_spectrum.hpp"

#include <boost/math/tools/minima.hpp>
#include <boost/math/tools/roots.hpp>
#include <cmath>
#include <sstream>

#include "threebody/errors.hpp"
#include "threebody/parallel.hpp"

namespace threebody {

void QubitParams::validate() const {
  if (!(Ec > 0.0)) throw ParameterError("Ec must be positive");
  if (!(EL > 0.0)) throw ParameterError("EL must be positive");
  if (!(EJ >= 0.0)) throw ParameterError("EJ must be non-negative");
  if (!std::isfinite(phi_x)) throw ParameterError("phi_x must be finite");
  if (basis_size < 20) throw ParameterError("basis_size must be at least 20");
}

double phi_zero_point(const QubitParams& params) {
  return std::pow(8.0 * params.Ec / params.EL, 0.25) / std::sqrt(2.0);
}

namespace {

Eigen::MatrixXd phi_matrix(const QubitParams& params) {
  const int n = params.basis_size;
  const double zpf = phi_zero_point(params);
  Eigen::MatrixXd phi = Eigen::MatrixXd::Zero(n, n);
  for (int k = 0; k + 1 < n; ++k) {
    phi(k, k + 1) = phi(k + 1, k) = zpf * std::sqrt(static_cast<double>(k + 1));
  }
  return phi;
}

}  // namespace

Eigen::MatrixXd build_qubit_hamiltonian(const QubitParams& params) {
  params.validate();
  const int n = params.basis_size;
  const double omega = std::sqrt(8.0 * params.Ec * params.EL);

  Eigen::MatrixXd h = Eigen::MatrixXd::Zero(n, n);
  for (int k = 0; k < n; ++k) h(k, k) = omega * (k + 0.5);
  if (params.EJ == 0.0) return h;

  // cos(phi) and sin(phi) from the spectral decomposition of the truncated
  // phi matrix, i.e. the real and imaginary parts of exp(i phi).
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> phi_eig(phi_matrix(params));
  const Eigen::MatrixXd& q = phi_eig.eigenvectors();
  const Eigen::ArrayXd x = phi_eig.eigenvalues().array();
  const Eigen::MatrixXd cos_phi = q * x.cos().matrix().asDiagonal() * q.transpose();
  const Eigen::MatrixXd sin_phi = q * x.sin().matrix().asDiagonal() * q.transpose();

  // cos(phi + phi_x) = cos(phi_x) cos(phi) - sin(phi_x) sin(phi)
  h -= params.EJ * (std::cos(params.phi_x) * cos_phi - std::sin(params.phi_x) * sin_phi);
  return 0.5 * (h + h.transpose());
}

QubitSpectrum diagonalize_qubit(const QubitParams& params, int m) {
  params.validate();
  if (m < 1 || m > params.basis_size / 4) {
    throw ParameterError("requested " + std::to_string(m) +
                         " levels; at most basis_size/4 = " +
                         std::to_string(params.basis_size / 4) + " are kept");
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(build_qubit_hamiltonian(params));
  if (eig.info() != Eigen::Success) throw ConvergenceError("qubit eigensolver failed");

  const Eigen::MatrixXd low = eig.eigenvectors().leftCols(m);
  QubitSpectrum out;
  out.energies = eig.eigenvalues().head(m);
  out.phi_elements = low.transpose() * phi_matrix(params) * low;
  out.phi_elements = 0.5 * (out.phi_elements + out.phi_elements.transpose()).eval();
  return out;
}

double convergence_error(const QubitParams& params, int levels) {
  QubitParams doubled = params;
  doubled.basis_size = 2 * params.basis_size;
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> a(build_qubit_hamiltonian(params),
                                                   Eigen::EigenvaluesOnly);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> b(build_qubit_hamiltonian(doubled),
                                                   Eigen::EigenvaluesOnly);
  return (a.eigenvalues().head(levels) - b.eigenvalues().head(levels)).cwiseAbs().maxCoeff();
}

void check_convergence(const QubitParams& params, int levels, double tol) {
  const double err = convergence_error(params, levels);
  if (!(err < tol)) {
    std::ostringstream msg;
    msg << "qubit spectrum not converged at basis_size " << params.basis_size
        << ": doubling the basis moves the lowest " << levels << " levels by " << err;
    throw ConvergenceError(msg.str());
  }
}

EffectiveModel extract_effective_model(std::span<const double> e) {
  if (e.size() < 4) throw ParameterError("effective model needs at least 4 levels");
  EffectiveModel m;
  m.omega0 = e[1] - e[0];
  m.U2 = (e[2] - e[0]) - 2.0 * m.omega0;
  m.U3 = (e[3] - e[0]) - 3.0 * m.omega0 - 3.0 * m.U2;
  return m;
}

EffectiveModel extract_effective_model(const QubitSpectrum& spectrum) {
  return extract_effective_model(
      std::span<const double>(spectrum.energies.data(), spectrum.energies.size()));
}

std::array<double, 4> model_levels(const EffectiveModel& m, double e0) {
  std::array<double, 4> e{};
  for (int n = 0; n < 4; ++n) {
    e[n] = e0 + m.omega0 * n + m.U2 * n * (n - 1) / 2.0 + m.U3 * n * (n - 1) * (n - 2) / 6.0;
  }
  return e;
}

EffectiveModel effective_model_at(const QubitParams& params) {
  return extract_effective_model(diagonalize_qubit(params, 4));
}

namespace {

double U2_at(double Ec, double EL, double phi_x, const ZeroU2Options& opt) {
  QubitParams p{Ec, EL, opt.EJ, phi_x, opt.basis_size};
  return effective_model_at(p).U2;
}

}  // namespace

ZeroU2Result find_zero_U2(double Ec, double EL, const ZeroU2Options& opt) {
  if (!(opt.phi_hi > opt.phi_lo) || !(opt.scan_step > 0.0)) {
    throw ParameterError("phi window must be non-empty with a positive scan step");
  }
  QubitParams{Ec, EL, opt.EJ, opt.phi_lo, opt.basis_size}.validate();

  const int steps = std::max(1, static_cast<int>(std::ceil((opt.phi_hi - opt.phi_lo) / opt.scan_step)));
  std::vector<double> phis(steps + 1), u2(steps + 1);
  double largest = 0.0;
  for (int i = 0; i <= steps; ++i) {
    phis[i] = std::min(opt.phi_hi, opt.phi_lo + i * opt.scan_step);
    u2[i] = U2_at(Ec, EL, phis[i], opt);
    largest = std::max(largest, std::abs(u2[i]));
  }

  ZeroU2Result out;
  if (largest < opt.flat_threshold) {
    out.status = RootStatus::flat;
    out.phi_x = 0.5 * (opt.phi_lo + opt.phi_hi);
    out.model = effective_model_at({Ec, EL, opt.EJ, out.phi_x, opt.basis_size});
    out.message = "U2 vanishes across the window; reporting the midpoint";
    return out;
  }

  for (int i = 0; i < steps; ++i) {
    if (u2[i] == 0.0) {
      out.status = RootStatus::found;
      out.phi_x = phis[i];
      break;
    }
    if ((u2[i] < 0.0) != (u2[i + 1] < 0.0)) {
      auto f = [&](double phi) { return U2_at(Ec, EL, phi, opt); };
      boost::uintmax_t max_iter = 100;
      const auto bracket = boost::math::tools::toms748_solve(
          f, phis[i], phis[i + 1], u2[i], u2[i + 1],
          boost::math::tools::eps_tolerance<double>(48), max_iter);
      out.status = RootStatus::found;
      out.phi_x = 0.5 * (bracket.first + bracket.second);
      break;
    }
  }
  if (out.status != RootStatus::found) {
    out.status = RootStatus::no_root;
    std::ostringstream msg;
    msg << "U2 does not change sign for phi_x in [" << opt.phi_lo << ", " << opt.phi_hi
        << "] at EL = " << EL;
    out.message = msg.str();
    return out;
  }
  out.model = effective_model_at({Ec, EL, opt.EJ, out.phi_x, opt.basis_size});
  return out;
}

std::vector<QubitSweepCell> sweep_U2_U3(double Ec, std::span<const double> EL_grid,
                                         std::span<const double> phi_grid, int basis_size,
                                         int threads) {
  if (EL_grid.empty() || phi_grid.empty()) throw ParameterError("sweep grids must be non-empty");
  std::vector<QubitSweepCell> cells(EL_grid.size() * phi_grid.size());
  parallel_for(cells.size(), threads, [&](std::size_t idx) {
    QubitSweepCell& cell = cells[idx];
    cell.EL = EL_grid[idx / phi_grid.size()];
    cell.phi_x = phi_grid[idx % phi_grid.size()];
    try {
      cell.model = effective_model_at({Ec, cell.EL, 1.0, cell.phi_x, basis_size});
    } catch (const std::exception& e) {
      cell.error = e.what();
      const double nan = std::nan("");
      cell.model = {nan, nan, nan};
    }
  });
  return cells;
}

std::vector<ContourPoint> zero_U2_contour(double Ec, std::span<const double> EL_grid,
                                          const ZeroU2Options& options, int threads) {
  std::vector<ContourPoint> points(EL_grid.size());
  parallel_for(points.size(), threads, [&](std::size_t i) {
    points[i].EL = EL_grid[i];
    points[i].root = find_zero_U2(Ec, EL_grid[i], options);
  });
  return points;
}

ContourMaximum max_U3_on_zero_contour(double Ec, double EL_lo, double EL_hi,
                                      const ZeroU2Options& options) {
  if (!(EL_hi > EL_lo) || !(EL_lo > 0.0)) throw ParameterError("invalid EL interval");
  auto negative_U3 = [&](double EL) {
    const ZeroU2Result r = find_zero_U2(Ec, EL, options);
    if (r.status != RootStatus::found) {
      throw ParameterError("U2 = 0 contour leaves the phi window at EL = " + std::to_string(EL));
    }
    return -r.model.U3;
  };
  // 10 bits of relative precision keeps the EL bracket below 1e-3 for EL ~ 1.
  boost::uintmax_t max_iter = 200;
  const auto best = boost::math::tools::brent_find_minima(negative_U3, EL_lo, EL_hi, 10, max_iter);
  const ZeroU2Result r = find_zero_U2(Ec, best.first, options);
  return {best.first, r.phi_x, r.model};
}

double enhancement_deviation(const QubitSpectrum& s) {
  if (s.phi_elements.rows() < 4) throw ParameterError("need at least 4 levels");
  const double base = std::abs(s.phi_elements(0, 1));
  double worst = 0.0;
  for (int n = 2; n <= 3; ++n) {
    const double ratio = std::abs(s.phi_elements(n - 1, n)) / (std::sqrt(double(n)) * base);
    worst = std::max(worst, std::abs(ratio - 1.0));
  }
  return worst;
}

}  // namespace threebody
