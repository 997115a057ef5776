#include <doctest.h>

#include <cstdint>
#include <functional>
#include <vector>

#include "threebody/errors.hpp"
#include "threebody/fock_basis.hpp"

using namespace threebody;

namespace {

// Direct recursion, independent of the table used by FockBasis.
std::uint64_t brute_count(int sites, int n, int cap) {
  if (sites == 0) return n == 0 ? 1 : 0;
  std::uint64_t total = 0;
  for (int k = 0; k <= std::min(n, cap); ++k) total += brute_count(sites - 1, n - k, cap);
  return total;
}

std::uint64_t binom(int n, int k) {
  if (k < 0 || k > n) return 0;
  std::uint64_t r = 1;
  for (int i = 1; i <= k; ++i) r = r * (n - k + i) / i;
  return r;
}

}  // namespace

TEST_SUITE("fock_basis") {

TEST_CASE("two sites, two bosons") {
  FockBasis b(2, 2, 2);
  REQUIRE(b.size() == 3);
  CHECK(std::vector<int>(b.state(0).begin(), b.state(0).end()) == std::vector<int>{2, 0});
  CHECK(std::vector<int>(b.state(1).begin(), b.state(1).end()) == std::vector<int>{1, 1});
  CHECK(std::vector<int>(b.state(2).begin(), b.state(2).end()) == std::vector<int>{0, 2});
}

TEST_CASE("4 bosons on 16 sites") {
  // A site holding >= 3: pick it (16 ways), place the fourth boson anywhere (16 ways).
  // No state has two such sites.
  const std::uint64_t capped = binom(19, 4) - 16 * binom(16, 1);
  CHECK(capped == 3620);
  CHECK(FockBasis(16, 4, 2).size() == capped);
  CHECK(brute_count(16, 4, 2) == capped);
  CHECK(FockBasis(16, 4, 4).size() == binom(19, 4));
  CHECK(FockBasis(16, 4, 3).size() == binom(19, 4) - 16);
}

TEST_CASE("counts agree with brute force") {
  for (int sites = 1; sites <= 7; ++sites)
    for (int n = 0; n <= 7; ++n)
      for (int cap = 1; cap <= 3; ++cap) {
        if (n > sites * cap) continue;
        CHECK(FockBasis(sites, n, cap).size() == brute_count(sites, n, cap));
      }
}

TEST_CASE("ranking round trip and canonical order") {
  FockBasis b(9, 4, 2);
  for (std::size_t i = 0; i < b.size(); ++i) {
    auto s = b.state(i);
    int sum = 0;
    for (auto v : s) {
      CHECK(v <= 2);
      sum += v;
    }
    CHECK(sum == 4);
    CHECK(b.index(s) == i);
    if (i > 0) {
      auto prev = b.state(i - 1);
      CHECK(std::lexicographical_compare(s.begin(), s.end(), prev.begin(), prev.end()));
    }
  }
  std::vector<std::uint8_t> outside{3, 1, 0, 0, 0, 0, 0, 0, 0};
  CHECK_FALSE(b.index(outside).has_value());
  std::vector<std::uint8_t> wrong_n{1, 0, 0, 0, 0, 0, 0, 0, 0};
  CHECK_FALSE(b.index(wrong_n).has_value());
}

TEST_CASE("limits") {
  CHECK_THROWS_AS(FockBasis(2, 5, 2), ParameterError);
  CHECK_THROWS_AS(FockBasis(16, 8, 2, 1000), ParameterError);
}

}
