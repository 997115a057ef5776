#include "threebody/lattice_hamiltonian.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numbers>

#include "threebody/errors.hpp"
#include "threebody/parallel.hpp"

namespace threebody {

std::string to_string(HoppingScheme scheme) {
  switch (scheme) {
    case HoppingScheme::nearest: return "NN";
    case HoppingScheme::next_nearest: return "NNN";
    case HoppingScheme::long_range: return "LR";
  }
  return "?";
}

HoppingScheme parse_scheme(const std::string& name) {
  if (name == "NN") return HoppingScheme::nearest;
  if (name == "NNN") return HoppingScheme::next_nearest;
  if (name == "LR" || name == "long-range") return HoppingScheme::long_range;
  throw ParameterError("unknown hopping scheme '" + name + "' (expected NN, NNN or LR)");
}

int LatticeSpec::effective_range() const {
  return range > 0 ? range : std::max(1, std::min(Lx, Ly) / 2);
}

void LatticeSpec::validate() const {
  if (Lx < 1 || Ly < 1) throw ParameterError("lattice dimensions must be positive");
  if (N < 0) throw ParameterError("particle number must be non-negative");
  if (n_max < 1) throw ParameterError("n_max must be at least 1");
  if (N > n_max * sites()) throw ParameterError("N exceeds n_max * Lx * Ly");
  if (!std::isfinite(alpha)) throw ParameterError("alpha must be finite");
  const double flux = flux_quanta();
  if (std::abs(flux - std::round(flux)) > 1e-9) {
    throw ParameterError("alpha * Lx * Ly = " + std::to_string(flux) +
                         " must be an integer on the torus");
  }
  if (!std::isfinite(U2)) throw ParameterError("U2 must be finite");
  if (std::isnan(U3) || U3 == -std::numeric_limits<double>::infinity()) {
    throw ParameterError("U3 must be finite or +infinity (hard core)");
  }
  if (hard_core() && n_max > 2) {
    throw ParameterError("hard-core runs (U3 = infinity) require n_max <= 2");
  }
  if (range < 0) throw ParameterError("range must be non-negative");
  if (!std::isfinite(theta_x) || !std::isfinite(theta_y)) throw ParameterError("twists must be finite");
}

cplx hop_amplitude(int dx, int dy, double y, double alpha) {
  using std::numbers::pi;
  const long parity = std::labs(static_cast<long>(dx) + dy + static_cast<long>(dx) * dy) % 2;
  const double sign = parity ? -1.0 : 1.0;
  const double magnitude = std::exp(-0.5 * pi * (1.0 - alpha) * (dx * dx + dy * dy - 1.0));
  const double phase = -2.0 * pi * alpha * (y * dx + 0.5 * dx * dy);
  return sign * magnitude * std::polar(1.0, phase);
}

std::vector<std::pair<int, int>> displacements(const LatticeSpec& spec) {
  std::vector<std::pair<int, int>> d = {{1, 0}, {-1, 0}, {0, 1}, {0, -1}};
  switch (spec.scheme) {
    case HoppingScheme::nearest:
      break;
    case HoppingScheme::next_nearest:
      d.insert(d.end(), {{1, 1}, {1, -1}, {-1, 1}, {-1, -1}});
      break;
    case HoppingScheme::long_range: {
      d.clear();
      const int r = spec.effective_range();
      for (int dy = -r; dy <= r; ++dy)
        for (int dx = -r; dx <= r; ++dx)
          if (dx != 0 || dy != 0) d.emplace_back(dx, dy);
      break;
    }
  }
  return d;
}

namespace {

int floor_div(int a, int b) { return (a >= 0) ? a / b : -((-a + b - 1) / b); }
int wrap(int a, int b) { return a - b * floor_div(a, b); }

}  // namespace

std::vector<HoppingTerm> hopping_terms(const LatticeSpec& spec) {
  using std::numbers::pi;
  spec.validate();
  std::map<std::pair<int, int>, cplx> merged;
  for (int y = 0; y < spec.Ly; ++y) {
    for (int x = 0; x < spec.Lx; ++x) {
      const int src = x + spec.Lx * y;
      for (const auto& [dx, dy] : displacements(spec)) {
        cplx amp = hop_amplitude(dx, dy, y, spec.alpha);
        if (std::abs(amp) < 1e-8) continue;
        const int xt = x + dx;
        const int yt = y + dy;
        // a_{x, y + Ly} = exp(-i 2 pi alpha Ly x) a_{x, y} keeps the Landau
        // gauge consistent across the y boundary.
        const int wraps_y = floor_div(yt, spec.Ly);
        amp *= std::polar(1.0, 2.0 * pi * spec.alpha * spec.Ly * wraps_y * xt);
        amp *= std::polar(1.0, spec.theta_x * dx / spec.Lx + spec.theta_y * dy / spec.Ly);
        const int dst = wrap(xt, spec.Lx) + spec.Lx * wrap(yt, spec.Ly);
        merged[{src, dst}] += amp;
      }
    }
  }
  std::vector<HoppingTerm> terms;
  terms.reserve(merged.size());
  for (const auto& [key, amp] : merged) {
    if (std::abs(amp) < 1e-14) continue;
    terms.push_back({key.first, key.second, amp});
  }
  return terms;
}

SparseHam::SparseHam(std::size_t dim, std::vector<std::size_t> row_ptr,
                     std::vector<std::size_t> cols, std::vector<cplx> vals)
    : dim_(dim), row_ptr_(std::move(row_ptr)), cols_(std::move(cols)), vals_(std::move(vals)) {
  if (row_ptr_.size() != dim_ + 1 || cols_.size() != vals_.size() || row_ptr_.back() != vals_.size()) {
    throw ParameterError("inconsistent compressed-row arrays");
  }
}

void SparseHam::apply(const cplx* x, cplx* y, int threads) const {
  parallel_chunks(dim_, threads, [&](std::size_t begin, std::size_t end) {
    for (std::size_t i = begin; i < end; ++i) {
      cplx acc = 0.0;
      for (std::size_t k = row_ptr_[i]; k < row_ptr_[i + 1]; ++k) acc += vals_[k] * x[cols_[k]];
      y[i] = acc;
    }
  });
}

Eigen::VectorXcd SparseHam::apply(const Eigen::VectorXcd& x, int threads) const {
  Eigen::VectorXcd y(dim_);
  apply(x.data(), y.data(), threads);
  return y;
}

double SparseHam::hermiticity_error() const {
  double worst = 0.0;
  for (std::size_t i = 0; i < dim_; ++i) {
    for (std::size_t k = row_ptr_[i]; k < row_ptr_[i + 1]; ++k) {
      const std::size_t j = cols_[k];
      const auto first = cols_.begin() + row_ptr_[j];
      const auto last = cols_.begin() + row_ptr_[j + 1];
      const auto it = std::lower_bound(first, last, i);
      const cplx partner = (it != last && *it == i) ? vals_[it - cols_.begin()] : cplx{0.0};
      worst = std::max(worst, std::abs(vals_[k] - std::conj(partner)));
    }
  }
  return worst;
}

double SparseHam::norm_bound() const {
  double worst = 0.0;
  for (std::size_t i = 0; i < dim_; ++i) {
    double s = 0.0;
    for (std::size_t k = row_ptr_[i]; k < row_ptr_[i + 1]; ++k) s += std::abs(vals_[k]);
    worst = std::max(worst, s);
  }
  return worst;
}

Eigen::MatrixXcd SparseHam::to_dense() const {
  Eigen::MatrixXcd h = Eigen::MatrixXcd::Zero(dim_, dim_);
  for (std::size_t i = 0; i < dim_; ++i)
    for (std::size_t k = row_ptr_[i]; k < row_ptr_[i + 1]; ++k) h(i, cols_[k]) += vals_[k];
  return h;
}

FockBasis enumerate_basis(const LatticeSpec& spec, std::size_t dimension_limit) {
  spec.validate();
  return FockBasis(spec.sites(), spec.N, spec.n_max, dimension_limit);
}

SparseHam build_hamiltonian(const LatticeSpec& spec, const FockBasis& basis, int threads) {
  return build_hamiltonian(spec, basis, hopping_terms(spec), threads);
}

SparseHam build_hamiltonian(const LatticeSpec& spec, const FockBasis& basis,
                            const std::vector<HoppingTerm>& terms, int threads) {
  spec.validate();
  if (basis.sites() != spec.sites() || basis.particles() != spec.N || basis.n_max() != spec.n_max) {
    throw ParameterError("basis does not match the lattice specification");
  }
  const int sites = spec.sites();
  const int n_max = spec.n_max;

  // Terms grouped by the site that gains the particle; on-site terms kept apart.
  std::vector<std::vector<HoppingTerm>> into(sites);
  std::vector<double> onsite(sites, 0.0);
  for (const HoppingTerm& t : terms) {
    if (t.src < 0 || t.dst < 0 || t.src >= sites || t.dst >= sites) {
      throw ParameterError("hopping term outside the lattice");
    }
    if (t.src == t.dst) {
      onsite[t.src] += t.amp.real();
    } else {
      into[t.dst].push_back(t);
    }
  }

  const std::size_t dim = basis.size();
  std::vector<std::vector<std::pair<std::size_t, cplx>>> rows(dim);
  parallel_chunks(dim, threads, [&](std::size_t begin, std::size_t end) {
    std::vector<std::uint8_t> occ(sites);
    for (std::size_t i = begin; i < end; ++i) {
      const auto state = basis.state(i);
      std::copy(state.begin(), state.end(), occ.begin());
      auto& row = rows[i];

      double diag = 0.0;
      for (int s = 0; s < sites; ++s) {
        const double n = occ[s];
        diag += onsite[s] * n + 0.5 * spec.U2 * n * (n - 1.0);
        if (!spec.hard_core()) diag += spec.U3 * n * (n - 1.0) * (n - 2.0) / 6.0;
      }
      row.emplace_back(i, cplx{diag, 0.0});

      // <i| a^+_t a_s |j>: site t of |i> holds the moved particle, |j> has it on s.
      for (int t = 0; t < sites; ++t) {
        const int nt = occ[t];
        if (nt == 0) continue;
        for (const HoppingTerm& term : into[t]) {
          const int ns = occ[term.src];
          if (ns + 1 > n_max) continue;
          occ[t] = static_cast<std::uint8_t>(nt - 1);
          occ[term.src] = static_cast<std::uint8_t>(ns + 1);
          const auto j = basis.index(occ);
          occ[t] = static_cast<std::uint8_t>(nt);
          occ[term.src] = static_cast<std::uint8_t>(ns);
          if (!j) throw ParameterError("hop left the fixed-N basis");
          row.emplace_back(*j, term.amp * std::sqrt(double(nt) * (ns + 1)));
        }
      }
      std::sort(row.begin(), row.end(),
                [](const auto& a, const auto& b) { return a.first < b.first; });
      // Merge repeated columns in place.
      std::size_t w = 0;
      for (std::size_t r = 0; r < row.size(); ++r) {
        if (w > 0 && row[w - 1].first == row[r].first) {
          row[w - 1].second += row[r].second;
        } else {
          row[w++] = row[r];
        }
      }
      row.resize(w);
    }
  });

  std::vector<std::size_t> row_ptr(dim + 1, 0);
  for (std::size_t i = 0; i < dim; ++i) row_ptr[i + 1] = row_ptr[i] + rows[i].size();
  std::vector<std::size_t> cols(row_ptr.back());
  std::vector<cplx> vals(row_ptr.back());
  for (std::size_t i = 0; i < dim; ++i) {
    std::size_t k = row_ptr[i];
    for (const auto& [c, v] : rows[i]) {
      cols[k] = c;
      vals[k] = v;
      ++k;
    }
  }
  SparseHam h(dim, std::move(row_ptr), std::move(cols), std::move(vals));
  const double herm = h.hermiticity_error();
  if (herm > 1e-12) {
    throw ParameterError("lattice Hamiltonian is not Hermitian (error " + std::to_string(herm) + ")");
  }
  return h;
}

}  // namespace threebody
