#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

namespace threebody {

/// Bosonic occupation states of `sites` modes with exactly `particles`
/// bosons and at most `n_max` per site, in descending lexicographic order
/// ((2,0), (1,1), (0,2), ...). Ranking is combinatorial, so lookups need no
/// hash table.
class FockBasis {
 public:
  static constexpr std::size_t kDefaultDimensionLimit = 5'000'000;

  FockBasis(int sites, int particles, int n_max,
            std::size_t dimension_limit = kDefaultDimensionLimit);

  int sites() const { return sites_; }
  int particles() const { return particles_; }
  int n_max() const { return n_max_; }
  std::size_t size() const { return size_; }

  std::span<const std::uint8_t> state(std::size_t i) const {
    return {occupations_.data() + i * sites_, static_cast<std::size_t>(sites_)};
  }

  /// Ordinal of an occupation vector, or nullopt if it is not in the basis.
  std::optional<std::size_t> index(std::span<const std::uint8_t> occupation) const;

  /// Number of capped compositions of n into k sites.
  std::uint64_t count(int k, int n) const;

 private:
  int sites_;
  int particles_;
  int n_max_;
  std::size_t size_ = 0;
  std::vector<std::uint64_t> counts_;  // (sites+1) x (particles+1)
  std::vector<std::uint8_t> occupations_;
};

}  // namespace threebody
