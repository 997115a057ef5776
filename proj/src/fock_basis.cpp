#include "threebody/fock_basis.hpp"

#include <limits>
#include <string>

#include "threebody/errors.hpp"

namespace threebody {

FockBasis::FockBasis(int sites, int particles, int n_max, std::size_t dimension_limit)
    : sites_(sites), particles_(particles), n_max_(n_max) {
  if (sites < 1) throw ParameterError("basis needs at least one site");
  if (particles < 0) throw ParameterError("particle number must be non-negative");
  if (n_max < 1 || n_max > 255) throw ParameterError("n_max must be in [1, 255]");
  if (particles > n_max * sites) {
    throw ParameterError("N = " + std::to_string(particles) + " exceeds n_max * sites = " +
                         std::to_string(n_max * sites));
  }

  const int np = particles + 1;
  counts_.assign(static_cast<std::size_t>(sites + 1) * np, 0);
  counts_[0] = 1;  // zero sites hold zero particles one way
  constexpr auto kMax = std::numeric_limits<std::uint64_t>::max();
  for (int k = 1; k <= sites; ++k) {
    for (int n = 0; n <= particles; ++n) {
      std::uint64_t c = 0;
      for (int v = 0; v <= std::min(n, n_max); ++v) {
        const std::uint64_t add = counts_[(k - 1) * np + (n - v)];
        c = (kMax - c < add) ? kMax : c + add;
      }
      counts_[k * np + n] = c;
    }
  }
  const std::uint64_t dim = count(sites, particles);
  if (dim > dimension_limit) {
    throw ParameterError("Hilbert-space dimension " + std::to_string(dim) +
                         " exceeds the configured limit " + std::to_string(dimension_limit));
  }
  size_ = static_cast<std::size_t>(dim);
  occupations_.resize(size_ * sites_);

  // Depth-first generation with the largest occupation first on each site.
  std::vector<std::uint8_t> current(sites_, 0);
  std::size_t next = 0;
  auto fill = [&](auto&& self, int site, int remaining) -> void {
    if (site == sites_ - 1) {
      current[site] = static_cast<std::uint8_t>(remaining);
      std::copy(current.begin(), current.end(), occupations_.begin() + next * sites_);
      ++next;
      return;
    }
    const int rest = sites_ - site - 1;
    for (int v = std::min(remaining, n_max_); v >= 0; --v) {
      if (remaining - v > rest * n_max_) break;
      current[site] = static_cast<std::uint8_t>(v);
      self(self, site + 1, remaining - v);
    }
  };
  if (size_ > 0) fill(fill, 0, particles_);
}

std::uint64_t FockBasis::count(int k, int n) const {
  if (k < 0 || k > sites_ || n < 0 || n > particles_) return 0;
  return counts_[static_cast<std::size_t>(k) * (particles_ + 1) + n];
}

std::optional<std::size_t> FockBasis::index(std::span<const std::uint8_t> occ) const {
  if (occ.size() != static_cast<std::size_t>(sites_)) return std::nullopt;
  std::size_t rank = 0;
  int remaining = particles_;
  for (int site = 0; site < sites_; ++site) {
    const int v = occ[site];
    if (v > n_max_ || v > remaining) return std::nullopt;
    // States with a larger occupation on this site come first.
    for (int w = std::min(remaining, n_max_); w > v; --w) {
      rank += count(sites_ - site - 1, remaining - w);
    }
    remaining -= v;
  }
  if (remaining != 0) return std::nullopt;
  return rank;
}

}  // namespace threebody
