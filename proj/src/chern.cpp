#include "threebody/chern.hpp"

#include <cmath>
#include <numbers>
#include <sstream>

#include "threebody/errors.hpp"
#include "threebody/parallel.hpp"

namespace threebody {

namespace {

cplx unit_link(const Eigen::MatrixXcd& a, const Eigen::MatrixXcd& b) {
  const cplx d = (a.adjoint() * b).determinant();
  const double mag = std::abs(d);
  if (mag < 1e-12) throw GapClosedError("vanishing overlap between neighbouring twist points");
  return d / mag;
}

}  // namespace

ChernResult chern_number(const LatticeSpec& spec, const ChernOptions& opt) {
  using std::numbers::pi;
  spec.validate();
  if (opt.grid < 2) throw ParameterError("twist grid needs at least 2 points per direction");
  if (opt.manifold < 1) throw ParameterError("manifold must be positive");
  const int g = opt.grid;
  const int m = opt.manifold;
  const FockBasis basis = enumerate_basis(spec);

  LanczosOptions lopt = opt.lanczos;
  lopt.k = m + 1;
  lopt.block_size = m + 1;
  lopt.want_vectors = true;
  lopt.threads = 1;

  std::vector<Eigen::MatrixXcd> vecs(g * g);
  std::vector<Eigen::VectorXd> vals(g * g);
  parallel_for(vecs.size(), opt.threads, [&](std::size_t p) {
    LatticeSpec s = spec;
    s.theta_x = 2.0 * pi * static_cast<double>(p % g) / g;
    s.theta_y = 2.0 * pi * static_cast<double>(p / g) / g;
    const SparseHam h = build_hamiltonian(s, basis);
    EigenPairs pairs = lanczos_lowest(h, lopt);
    vals[p] = pairs.values;
    vecs[p] = pairs.vectors.leftCols(m);
  });

  ChernResult out;
  out.grid = g;
  out.manifold = m;
  out.min_gap = std::numeric_limits<double>::infinity();
  for (int p = 0; p < g * g; ++p) {
    const double gap = vals[p](m) - vals[p](m - 1);
    out.max_spread = std::max(out.max_spread, vals[p](m - 1) - vals[p](0));
    if (gap < out.min_gap) {
      out.min_gap = gap;
      out.min_gap_theta_x = 2.0 * pi * (p % g) / g;
      out.min_gap_theta_y = 2.0 * pi * (p / g) / g;
    }
  }
  if (out.min_gap < opt.min_gap) {
    std::ostringstream msg;
    msg << "ground manifold gap closes (" << out.min_gap << ") at twist (" << out.min_gap_theta_x
        << ", " << out.min_gap_theta_y << ")";
    throw GapClosedError(msg.str());
  }

  // theta + 2 pi is the gauge transform exp(i 2 pi sum_r x_r n_r / Lx) of theta.
  Eigen::VectorXcd shift_x(basis.size()), shift_y(basis.size());
  for (std::size_t i = 0; i < basis.size(); ++i) {
    const auto occ = basis.state(i);
    double px = 0.0, py = 0.0;
    for (int r = 0; r < spec.sites(); ++r) {
      px += static_cast<double>(r % spec.Lx) * occ[r];
      py += static_cast<double>(r / spec.Lx) * occ[r];
    }
    shift_x(i) = std::polar(1.0, 2.0 * pi * px / spec.Lx);
    shift_y(i) = std::polar(1.0, 2.0 * pi * py / spec.Ly);
  }
  auto neighbour = [&](int ix, int iy, int dir, int state_lo, int count) -> Eigen::MatrixXcd {
    const int jx = dir == 0 ? ix + 1 : ix;
    const int jy = dir == 1 ? iy + 1 : iy;
    Eigen::MatrixXcd v = vecs[(jy % g) * g + (jx % g)].middleCols(state_lo, count);
    if (jx == g) v = shift_x.asDiagonal() * v;
    if (jy == g) v = shift_y.asDiagonal() * v;
    return v;
  };
  auto field = [&](int state_lo, int count, std::vector<double>* curvature) {
    std::vector<cplx> ux(g * g), uy(g * g);
    for (int iy = 0; iy < g; ++iy) {
      for (int ix = 0; ix < g; ++ix) {
        const Eigen::MatrixXcd here = vecs[iy * g + ix].middleCols(state_lo, count);
        ux[iy * g + ix] = unit_link(here, neighbour(ix, iy, 0, state_lo, count));
        uy[iy * g + ix] = unit_link(here, neighbour(ix, iy, 1, state_lo, count));
      }
    }
    double total = 0.0;
    for (int iy = 0; iy < g; ++iy) {
      for (int ix = 0; ix < g; ++ix) {
        const cplx loop = ux[iy * g + ix] * uy[iy * g + (ix + 1) % g] *
                          std::conj(ux[((iy + 1) % g) * g + ix]) * std::conj(uy[iy * g + ix]);
        const double f = std::arg(loop);
        if (curvature) curvature->push_back(f);
        total += f;
      }
    }
    return total / (2.0 * pi);
  };

  out.raw_total = field(0, m, &out.curvature);
  out.total = static_cast<int>(std::lround(out.raw_total));
  if (std::abs(out.raw_total - out.total) > 1e-6) {
    std::ostringstream msg;
    msg << "plaquette sum " << out.raw_total << " is not an integer";
    throw ConvergenceError(msg.str());
  }

  // Individual levels only carry a Chern number if they never touch.
  for (int s = 0; s < m; ++s) {
    bool isolated = true;
    for (int p = 0; p < g * g && isolated; ++p) {
      const double below = s > 0 ? vals[p](s) - vals[p](s - 1) : 1.0;
      const double above = vals[p](s + 1) - vals[p](s);
      isolated = below > opt.min_gap && above > opt.min_gap;
    }
    if (!isolated) {
      out.per_state.emplace_back(std::nullopt);
      continue;
    }
    const double c = field(s, 1, nullptr);
    out.per_state.emplace_back(static_cast<int>(std::lround(c)));
  }
  return out;
}

}  // namespace threebody
