#include <doctest.h>

#include <random>

#include "threebody/errors.hpp"
#include "threebody/lanczos.hpp"
#include "threebody/lattice_hamiltonian.hpp"

using namespace threebody;

namespace {

struct Case {
  LatticeSpec spec;
  std::size_t dim;
};

// Random small lattices: alpha in {0, 1/4, 1/3}, random twists, schemes and interactions.
std::vector<Case> random_cases(int count, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> angle(0, 6.283185307179586);
  std::vector<Case> out;
  const std::vector<std::tuple<int, int, double>> shapes = {
      {3, 3, 1.0 / 3}, {4, 3, 0.25}, {4, 4, 0.25}, {3, 3, 0.0}, {4, 3, 0.0},
      {4, 2, 0.25},    {3, 4, 1.0 / 3}, {2, 3, 1.0 / 3}, {4, 4, 0.0}};
  while (static_cast<int>(out.size()) < count) {
    const auto [Lx, Ly, alpha] = shapes[rng() % shapes.size()];
    LatticeSpec s;
    s.Lx = Lx;
    s.Ly = Ly;
    s.alpha = alpha;
    s.N = 2 + static_cast<int>(rng() % 3);
    s.scheme = static_cast<HoppingScheme>(rng() % 3);
    s.theta_x = angle(rng);
    s.theta_y = angle(rng);
    if (rng() % 2) {
      s.n_max = 3;
      s.U2 = 0.5 * (rng() % 5);
      s.U3 = 1.0 + (rng() % 20);
    }
    if (s.N > s.n_max * s.sites()) continue;
    const FockBasis b = enumerate_basis(s);
    if (b.size() > 500 || b.size() < 60) continue;
    out.push_back({s, b.size()});
  }
  return out;
}

}  // namespace

TEST_SUITE("lanczos") {

TEST_CASE("dense oracle: 2 hard-core bosons on 3x3 at alpha = 1/3") {
  LatticeSpec s;
  s.Lx = 3;
  s.Ly = 3;
  s.alpha = 1.0 / 3;
  s.N = 2;
  const FockBasis b = enumerate_basis(s);
  REQUIRE(b.size() == 45);
  const SparseHam h = build_hamiltonian(s, b);
  LanczosOptions o;
  o.k = 6;
  o.max_basis = 24;  // below the dimension: the Krylov path is taken
  const EigenPairs l = lanczos_lowest(h, o);
  const EigenPairs d = dense_lowest(h.to_dense(), 6);
  CHECK((l.values - d.values).cwiseAbs().maxCoeff() < 1e-9);
  CHECK(l.matvecs < 45 * 10);
}

TEST_CASE("random configurations against dense diagonalization") {
  const auto cases = random_cases(24, 99);
  int restarted = 0;
  for (const auto& c : cases) {
    const FockBasis b = enumerate_basis(c.spec);
    const SparseHam h = build_hamiltonian(c.spec, b);
    LanczosOptions o;
    o.k = 6;
    o.max_basis = 30;
    const EigenPairs l = lanczos_lowest(h, o);
    const EigenPairs d = dense_lowest(h.to_dense(), 6, false);
    INFO("dim " << c.dim << " scheme " << to_string(c.spec.scheme));
    CHECK((l.values - d.values).cwiseAbs().maxCoeff() < 1e-9);
    CHECK(l.residuals.maxCoeff() < 1e-8 * std::max(h.norm_bound(), 1.0));
    restarted += l.restarts > 0;
  }
  CHECK(restarted > 0);
}

TEST_CASE("degenerate levels are all found") {
  // One particle at alpha = 1/4 on 4x4: four-fold lowest band.
  LatticeSpec s;
  s.N = 1;
  const FockBasis b = enumerate_basis(s);
  const SparseHam h = build_hamiltonian(s, b);
  LanczosOptions o;
  o.k = 5;
  o.max_basis = 15;
  const EigenPairs l = lanczos_lowest(h, o);
  const EigenPairs d = dense_lowest(h.to_dense(), 5);
  CHECK((l.values - d.values).cwiseAbs().maxCoeff() < 1e-9);
  CHECK(l.values(3) - l.values(0) < 1e-9);
}

TEST_CASE("eigenvectors are orthonormal with small residuals") {
  const LatticeSpec s;
  const FockBasis b = enumerate_basis(s);
  const SparseHam h = build_hamiltonian(s, b);
  LanczosOptions o;
  o.k = 4;
  const EigenPairs l = lanczos_lowest(h, o);
  const Eigen::MatrixXcd g = l.vectors.adjoint() * l.vectors;
  CHECK((g - Eigen::MatrixXcd::Identity(4, 4)).cwiseAbs().maxCoeff() < 1e-10);
  for (int i = 0; i < 4; ++i) {
    const Eigen::VectorXcd r = h.apply(l.vectors.col(i)) - l.values(i) * l.vectors.col(i);
    CHECK(r.norm() < 1e-8 * h.norm_bound());
  }
}

TEST_CASE("deterministic for a fixed seed and any thread count") {
  LatticeSpec s;
  s.theta_x = 0.7;
  const FockBasis b = enumerate_basis(s);
  const SparseHam h = build_hamiltonian(s, b);
  LanczosOptions o;
  o.k = 4;
  const EigenPairs a = lanczos_lowest(h, o);
  o.threads = 3;
  const EigenPairs c = lanczos_lowest(h, o);
  CHECK(a.values == c.values);
  CHECK(a.vectors == c.vectors);
  o.seed = 1;
  const EigenPairs other = lanczos_lowest(h, o);
  CHECK((other.values - a.values).cwiseAbs().maxCoeff() < 1e-9);
}

TEST_CASE("non-convergence carries the best residuals") {
  const LatticeSpec s;
  const FockBasis b = enumerate_basis(s);
  const SparseHam h = build_hamiltonian(s, b);
  LanczosOptions o;
  o.k = 4;
  o.max_expansions = 2;
  try {
    lanczos_lowest(h, o);
    FAIL("expected LanczosError");
  } catch (const LanczosError& e) {
    CHECK(e.residuals.size() == 4);
    CHECK(e.residuals.maxCoeff() > 0);
  }
  o = LanczosOptions{};
  o.k = 10;
  o.max_basis = 15;
  CHECK_THROWS_AS(lanczos_lowest(h, o), ParameterError);
}

TEST_CASE("small operators fall back to dense") {
  Eigen::MatrixXcd m = Eigen::MatrixXcd::Zero(5, 5);
  for (int i = 0; i < 5; ++i) m(i, i) = 5 - i;
  const LinearMap op = [&](const cplx* x, cplx* y) {
    Eigen::Map<Eigen::VectorXcd>(y, 5) = m * Eigen::Map<const Eigen::VectorXcd>(x, 5);
  };
  LanczosOptions o;
  o.k = 3;
  const EigenPairs e = lanczos_lowest(op, 5, 5.0, o);
  CHECK(e.values(0) == doctest::Approx(1.0));
  CHECK(e.values(2) == doctest::Approx(3.0));
}

}
