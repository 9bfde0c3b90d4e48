#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <numeric>
#include <random>

#include "bosegas/errors.hpp"
#include "bosegas/fock.hpp"

using namespace bosegas;

namespace {

const RadialPotential kSoft = RadialPotential::soft_sphere(50.0, 0.2);
const IVec3 kZero{0, 0, 0};

double element(const CsrMatrix& A, std::size_t i, std::size_t j) {
  for (auto k = A.row_ptr[i]; k < A.row_ptr[i + 1]; ++k)
    if (static_cast<std::size_t>(A.col[k]) == j) return A.val[k];
  return 0.0;
}

ScaledVhat table(const ModeSet& ms, int N, const RadialPotential& V = kSoft, double kappa = 0.04) {
  return ScaledVhat(V, N, kappa, 4 * ms.max_nsq());
}

}  // namespace

TEST_CASE("Fock dimensions") {
  CHECK(fock_dimension(1, 7) == 1);
  CHECK(fock_dimension(13, 1) == 13);
  CHECK(fock_dimension(3, 2) == 6);
  CHECK(fock_dimension(13, 5) == 6188);
  CHECK_THROWS_AS(fock_dimension(4000, 200), ResourceError);
  CHECK_THROWS_AS(FockBasis(build_mode_set_count(13), 12, 1000), ResourceError);
}

TEST_CASE("ranking round trip") {
  const FockBasis b(build_mode_set_count(7), 4);
  CHECK(b.dim() == fock_dimension(7, 4));
  std::vector<std::uint8_t> occ(b.M());
  for (std::size_t i = 0; i < b.dim(); ++i) {
    const std::uint8_t* o = b.occupation(i);
    CHECK(std::accumulate(o, o + b.M(), 0) == 4);
    CHECK(b.rank(o) == i);
    b.unrank(i, occ.data());
    CHECK(std::equal(occ.begin(), occ.end(), o));
    CHECK(b.index_of(o) == static_cast<std::int64_t>(i));
  }
}

TEST_CASE("momentum sectors partition the basis") {
  const ModeSet ms = build_mode_set_count(7);
  const FockBasis full(ms, 3);
  std::size_t total = 0;
  for (int a = -3; a <= 3; ++a)
    for (int b = -3; b <= 3; ++b)
      for (int c = -3; c <= 3; ++c) {
        try {
          total += FockBasis(ms, 3, IVec3{a, b, c}).dim();
        } catch (const ConfigError&) {
        }
      }
  CHECK(total == full.dim());
}

TEST_CASE("Hamiltonian symmetry and the zero-coupling spectrum") {
  const ModeSet ms = build_mode_set_count(13);
  const FockBasis b(ms, 4);
  const CsrMatrix H = build_hamiltonian(b, table(ms, 4));
  std::mt19937_64 rng(3);
  std::uniform_int_distribution<std::size_t> pick(0, b.dim() - 1);
  for (int t = 0; t < 200; ++t) {
    const std::size_t i = pick(rng), j = pick(rng);
    CHECK(std::abs(element(H, i, j) - element(H, j, i)) <= 1e-12);
  }
  for (std::size_t i = 0; i < b.dim(); ++i) {
    for (auto k = H.row_ptr[i]; k < H.row_ptr[i + 1]; ++k)
      CHECK(std::abs(element(H, static_cast<std::size_t>(H.col[k]), i) - H.val[k]) <= 1e-12);
  }

  const CsrMatrix H0 = build_hamiltonian(b, table(ms, 4, RadialPotential::soft_sphere(0.0, 0.2)));
  const CsrMatrix K = build_kinetic(b);
  for (std::size_t i = 0; i < b.dim(); ++i) {
    CHECK(H0.diagonal(i) == K.diagonal(i));
    for (auto k = H0.row_ptr[i]; k < H0.row_ptr[i + 1]; ++k)
      if (static_cast<std::size_t>(H0.col[k]) != i) CHECK(H0.val[k] == 0.0);
  }
  const GroundState g0 = ground_state(H0);
  CHECK(std::abs(g0.energy) <= 1e-12);
  CHECK(std::abs(std::abs(g0.psi[0]) - 1.0) <= 1e-9);
  CHECK_THROWS_AS(build_hamiltonian(b, table(ms, 5)), ConfigError);
}

TEST_CASE("single particle is free") {
  const ModeSet ms = build_mode_set_count(13);
  const FockBasis b(ms, 1);
  const CsrMatrix H = build_hamiltonian(b, table(ms, 1));
  for (std::size_t i = 0; i < b.dim(); ++i) CHECK(H.diagonal(i) == doctest::Approx(state_kinetic(b, i)));
}

TEST_CASE("two bosons match the pair oracle") {
  for (int M : {7, 13, 19}) {
    const ModeSet ms = build_mode_set_count(M);
    const ScaledVhat vn = table(ms, 2);
    const GroundState gs = ground_state(build_hamiltonian(FockBasis(ms, 2), vn));
    const double oracle = bosonic_pair_ground_energy(ms, vn);
    CHECK(std::abs(gs.energy - oracle) <= 1e-10 * std::abs(oracle));
  }
}

TEST_CASE("ground state: variational, Hartree bound, sector and thread independence") {
  const ModeSet ms = build_mode_set_count(13);
  const int N = 4;
  const ScaledVhat vn = table(ms, N);
  const FockBasis b(ms, N);
  const CsrMatrix H = build_hamiltonian(b, vn);
  const GroundState gs = ground_state(H);
  CHECK(gs.residual <= 1e-9 * std::max(1.0, std::abs(gs.energy)));
  const double hartree = 0.5 * N * (N - 1) * vn(0);
  CHECK(gs.energy <= hartree);
  CHECK(H.diagonal(0) == doctest::Approx(hartree));
  for (std::uint64_t seed = 1; seed <= 10; ++seed) CHECK(gs.energy <= expectation(H, random_state(H.n, seed)));

  const FockBasis b0(ms, N, kZero);
  const GroundState g0 = ground_state(build_hamiltonian(b0, vn));
  CHECK(g0.energy == doctest::Approx(gs.energy).epsilon(1e-9));

  LanczosOptions serial;
  serial.parallel = false;
  const GroundState gsr = ground_state(H, serial);
  CHECK(gsr.energy == gs.energy);
  CHECK(gsr.psi == gs.psi);

  const Observables o = observables(gs.psi, b, H, 0.0);
  CHECK(o.energy == doctest::Approx(gs.energy));
  CHECK(std::abs(o.condensate_fraction + o.depletion - 1.0) <= 1e-12);
  CHECK(o.condensate_fraction > 0.9);
  CHECK(o.n_above == doctest::Approx(o.n_plus));
  CHECK(std::accumulate(o.gamma1_diag.begin(), o.gamma1_diag.end(), 0.0) == doctest::Approx(1.0));
}

TEST_CASE("observables of basis states") {
  const ModeSet ms = build_mode_set_count(7);
  const FockBasis b(ms, 3);
  const CsrMatrix K = build_kinetic(b);
  StateVector psi(b.dim(), 0.0);
  psi[0] = 1.0;
  Observables o = observables(psi, b, K, 0.0);
  CHECK(o.condensate_fraction == 1.0);
  CHECK(o.depletion == 0.0);
  CHECK(o.kinetic == 0.0);
  std::vector<std::uint8_t> occ(b.M(), 0);
  occ[0] = 2;
  occ[1] = 1;
  psi.assign(b.dim(), 0.0);
  psi[static_cast<std::size_t>(b.index_of(occ.data()))] = 1.0;
  o = observables(psi, b, K, 1.0);
  CHECK(o.kinetic == doctest::Approx(kUnitPsq));
  CHECK(o.n_plus == 1.0);
  CHECK(o.n_above == 1.0);
  CHECK(observables(psi, b, K, kTwoPi).n_above == 0.0);
  CHECK(o.condensate_fraction == doctest::Approx(2.0 / 3.0));
}

TEST_CASE("creation is the adjoint of annihilation") {
  const ModeSet ms = build_mode_set_count(7);
  const FockBasis b3(ms, 3), b2(ms, 2);
  const StateVector x = random_state(b3.dim(), 1), y = random_state(b2.dim(), 2);
  for (int m = 0; m < 7; ++m) {
    const StateVector ax = annihilate(b3, b2, m, x);
    const StateVector cy = create(b2, b3, m, y);
    const double l = std::inner_product(ax.begin(), ax.end(), y.begin(), 0.0);
    const double r = std::inner_product(x.begin(), x.end(), cy.begin(), 0.0);
    CHECK(l == doctest::Approx(r).epsilon(1e-13));
  }
  CHECK_THROWS_AS(annihilate(b3, b3, 0, x), ConfigError);
}

TEST_CASE("cubic operator on the condensate") {
  const ModeSet ms = build_mode_set_count(13);
  const int N = 4;
  const double kappa = 0.04;
  const ScaledVhat vn = table(ms, N);
  const LowSet low = low_set(ms, N, 0.0);
  const RenormKernel k = build_kernel(ms, low, vn);
  const FockBasis b(ms, N), b1(ms, N - 1);
  StateVector psi(b.dim(), 0.0);
  psi[0] = 1.0;
  const IVec3 r{1, 0, 0};
  const StateVector d = apply_cubic_d(r, psi, b, b1, k);
  std::vector<std::uint8_t> occ(ms.size(), 0);
  occ[0] = N - 2;
  occ[static_cast<std::size_t>(ms.index_of(-r))] = 1;
  const auto t = static_cast<std::size_t>(b1.index_of(occ.data()));
  const double expect = std::pow(double(N), kappa - 1.0) * k.eta(-r, r, kZero, kZero) * std::sqrt(double(N * (N - 1)));
  CHECK(d[t] == doctest::Approx(expect).epsilon(1e-13));
  CHECK(std::inner_product(d.begin(), d.end(), d.begin(), 0.0) == doctest::Approx(expect * expect));

  const RenormKernel k0 = build_kernel(ms, low, table(ms, N, RadialPotential::soft_sphere(0.0, 0.2)));
  const StateVector d0 = apply_cubic_d(r, random_state(b.dim(), 5), b, b1, k0);
  CHECK(std::all_of(d0.begin(), d0.end(), [](double v) { return v == 0.0; }));

  const ModeSet other = build_mode_set_count(7);
  const FockBasis bo(other, N), bo1(other, N - 1);
  CHECK_THROWS_AS(apply_cubic_d(r, StateVector(bo.dim(), 0.0), bo, bo1, k), ConfigError);
}

TEST_CASE("state files round trip") {
  const StateVector psi = random_state(100, 9);
  CHECK(std::inner_product(psi.begin(), psi.end(), psi.begin(), 0.0) == doctest::Approx(1.0));
  CHECK(random_state(100, 9) == psi);
  CHECK(random_state(100, 10) != psi);
  const auto p = std::filesystem::temp_directory_path() / "bosegas_state_test.bin";
  write_state(p, psi);
  CHECK(read_state(p) == psi);
  std::filesystem::remove(p);
  CHECK_THROWS_AS(read_state("/nonexistent/state.bin"), ConfigError);
}
