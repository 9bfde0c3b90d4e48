#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <numbers>

#include "bosegas/errors.hpp"
#include "bosegas/lattice_green.hpp"
#include "bosegas/twobody.hpp"

using namespace bosegas;

namespace {

const RadialPotential kSoft = RadialPotential::soft_sphere(50.0, 0.2);
const IVec3 kZero{0, 0, 0};

}  // namespace

TEST_CASE("scaled interaction elements") {
  const long N = 4;
  const double kappa = 0.05, L = length_scale(N, kappa);
  const ScaledVhat vn(kSoft, N, kappa, 12);
  CHECK(vn.L() == doctest::Approx(std::pow(4.0, 0.95)));
  CHECK(vn(0) == doctest::Approx(v_hat(kSoft, 0.0) / L));
  CHECK(vn(IVec3{1, 1, 0}) == doctest::Approx(v_hat(kSoft, kTwoPi * std::sqrt(2.0) / L) / L));
  CHECK(vn(40) == doctest::Approx(v_hat(kSoft, kTwoPi * std::sqrt(40.0) / L) / L));
  CHECK(vn_element(kSoft, N, kappa, {1, 0, 0}, {0, 0, 0}, {0, 1, 0}, {0, 0, 0}) == 0.0);
  CHECK(vn_element(kSoft, N, kappa, {1, 0, 0}, {0, 1, 0}, {0, 1, 0}, {1, 0, 0}) ==
        doctest::Approx(vn(2)));
  CHECK_THROWS_AS(ScaledVhat(RadialPotential::soft_sphere(1.0, 0.4), 2, 2.0), ConfigError);
}

TEST_CASE("sector matrices are symmetric and the zero-coupling kernel vanishes") {
  const ModeSet ms = build_mode_set(kTwoPi * 2.0 + 1e-9);
  const LowSet low = low_set(ms, 10000, 0.2);
  const ScaledVhat vn(kSoft, 4, 0.05, 64);
  for (const IVec3& P : enumerate_sectors(low)) {
    const SectorMatrix sm = assemble_sector(P, ms, low, vn);
    CHECK((sm.M - sm.M.transpose()).cwiseAbs().maxCoeff() == 0.0);
  }
  const ScaledVhat v0(RadialPotential::soft_sphere(0.0, 0.2), 4, 0.05, 64);
  const RenormKernel k0 = build_kernel(ms, low, v0);
  for (const auto& sk : k0.sectors()) {
    CHECK(sk.vren.cwiseAbs().maxCoeff() == 0.0);
    if (sk.eta.size() > 0) CHECK(sk.eta.cwiseAbs().maxCoeff() == 0.0);
  }
}

TEST_CASE("Schur complement: symmetry, residuals and the lowest eigenvalue") {
  const ModeSet ms = build_mode_set(kTwoPi * 2.0 + 1e-9);
  const LowSet low({{0, 0, 0}, {1, 0, 0}, {-1, 0, 0}, {0, 1, 0}, {0, -1, 0}, {0, 0, 1}, {0, 0, -1}},
                   kUnitPsq);
  const ScaledVhat vn(kSoft, 4, 0.05, 64);
  const RenormKernel k = build_kernel(ms, low, vn);
  CHECK(k.max_residual() <= 1e-10);
  for (const auto& sk : k.sectors()) {
    CHECK((sk.vren - sk.vren.transpose()).cwiseAbs().maxCoeff() <= 1e-12 * sk.vren.cwiseAbs().maxCoeff());
    const SchurEigenCheck ec = schur_lowest_eigenvalue(assemble_sector(sk.P, ms, low, vn));
    CHECK(ec.bracketed);
    CHECK(std::abs(ec.schur - ec.direct) <= 1e-8 * std::max(1.0, std::abs(ec.direct)));
  }
  CHECK(k.vren(kZero, kZero, kZero, kZero) <= v_hat(kSoft, 0.0));
}

TEST_CASE("kernel index structure and lookups") {
  const ModeSet ms = build_mode_set(kTwoPi * 2.0 + 1e-9);
  const LowSet low = low_set(ms, 10000, 0.2);
  const ScaledVhat vn(kSoft, 4, 0.05, 64);
  const RenormKernel k = build_kernel(ms, low, vn);
  const IVec3 e1{1, 0, 0}, e2{0, 1, 0}, d{1, 1, 0};

  CHECK(k.vren(e1, e2, e2, e1) == k.vren(e2, e1, e1, e2));
  CHECK(k.vren(e1, kZero, kZero, e2) == 0.0);
  CHECK_THROWS_AS(k.vren(d, -e2, e1, kZero), LookupError);
  CHECK(k.eta(e1, kZero, e1, kZero) == 0.0);           // low row
  CHECK(k.eta(d, -d, e1, e2) == 0.0);                   // momentum mismatch
  CHECK(k.eta(d, -e2, e1, kZero) != 0.0);               // high x low
  CHECK(k.eta(e1, kZero, d, -e2) == 0.0);               // low row, high column
  CHECK(k.eta(d, -d, IVec3{2, 0, 0}, IVec3{-2, 0, 0}) == 0.0);  // high column
  CHECK(k.eta(d, -d, kZero, kZero) == doctest::Approx(k.eta(-d, d, kZero, kZero)));
  CHECK_THROWS_AS(k.eta(IVec3{3, 0, 0}, IVec3{-3, 0, 0}, kZero, kZero), LookupError);

  const auto tmp = std::filesystem::temp_directory_path() / "bosegas_kernel_test.csv";
  write_kernel_csv(k, tmp);
  std::ifstream in(tmp);
  std::string header;
  std::getline(in, header);
  CHECK(header == "P,k1,k2,k3,k4,value,kind\r");
  std::size_t rows = 0, expected = 0;
  for (std::string line; std::getline(in, line);) ++rows;
  for (const auto& sk : k.sectors())
    expected += sk.low_first.size() * (sk.low_first.size() + sk.high_first.size());
  CHECK(rows == expected);
  std::filesystem::remove(tmp);
}

TEST_CASE("symmetric channel agrees with the dense sector") {
  const double cutoff = kTwoPi * 3.0 + 1e-9;
  const ModeSet ms = build_mode_set(cutoff);
  const ScaledVhat vn(kSoft, 4, 0.05);
  const LowSet low = low_set(ms, 4, 0.2);
  REQUIRE(low.is_trivial());
  const RenormKernel k = build_kernel(ms, low, vn);
  const ZeroChannel zc = zero_channel_renormalize(vn, low, cutoff);
  CHECK(zc.modes == ms.size());
  CHECK(zc.vren00 == doctest::Approx(k.vren(kZero, kZero, kZero, kZero)).epsilon(1e-11));
  double sup = 0.0;
  for (std::size_t i = 0; i < zc.orbit_rep.size(); ++i) {
    const IVec3 r = zc.orbit_rep[i];
    CHECK(zc.eta[i] == doctest::Approx(k.eta(r, -r, kZero, kZero)).epsilon(1e-10));
    sup = std::max(sup, std::abs(k.eta(r, -r, kZero, kZero)) * zc.kinetic[i]);
  }
  CHECK(zc.eta_weighted_sup() == doctest::Approx(sup).epsilon(1e-10));
  CHECK(verify_kernel_bounds(k, scattering_length(kSoft), 0.2).sup_eta ==
        doctest::Approx(sup).epsilon(1e-10));
}

TEST_CASE("resolvent kernel approaches the truncated kernel for a smooth potential") {
  const auto V = RadialPotential::load_table(std::filesystem::path(BOSEGAS_TEST_DATA) / "bump.dat");
  const ScatteringData sd = scattering_length(V);
  const long N = 4;
  const double kappa = 0.0;
  const ModeSet tiny = build_mode_set(1.0);
  const LowSet low = low_set(tiny, N, 0.0);
  const ScaledVhat vn(V, N, kappa);
  const ZeroChannel zc = zero_channel_renormalize(vn, low, kTwoPi * 16.0);
  const RenormKernel rk = build_resolvent_kernel(V, sd, N, kappa, low, tiny);
  const double vr = rk.vren(kZero, kZero, kZero, kZero);
  CHECK(vr > sd.eight_pi_a);
  CHECK(std::abs(zc.vren00 - vr) <= 0.02 * std::abs(vr - sd.eight_pi_a) + 1e-3 * vr);
}

TEST_CASE("resolvent kernel at trivial coupling and its lookups") {
  const auto V0 = RadialPotential::soft_sphere(0.0, 0.2);
  const ScatteringData sd0 = scattering_length(V0);
  const ModeSet table = build_mode_set(18.9);
  const LowSet low = low_set(table, 10000, 0.2);
  const RenormKernel k0 = build_resolvent_kernel(V0, sd0, 10000, 0.05, low, table);
  CHECK(k0.vren(kZero, kZero, kZero, kZero) == 0.0);
  const KernelBounds b0 = verify_kernel_bounds(k0, sd0, 0.2);
  CHECK(b0.sup_vren == 0.0);
  CHECK(b0.sup_eta == 0.0);
  const LhyReport l0 = lhy_refinement(k0, sd0);
  CHECK(l0.lhs == 0.0);
  CHECK(l0.correction == 0.0);

  const ScatteringData sd = scattering_length(kSoft);
  const RenormKernel k = build_resolvent_kernel(kSoft, sd, 10000, 0.05, low, table);
  CHECK(k.kind() == KernelKind::Resolvent);
  const IVec3 e1{1, 0, 0}, d{1, 1, 0};
  CHECK(k.eta(d, -d, kZero, kZero) == doctest::Approx(k.eta(d, -d, e1, -e1)));
  CHECK(k.eta(e1, -e1, kZero, kZero) == 0.0);
  CHECK_THROWS_AS(k.eta(IVec3{4, 0, 0}, IVec3{-4, 0, 0}, kZero, kZero), LookupError);
}

TEST_CASE("pair Green's function") {
  // F(0) = zeta-regularized cubic lattice sum, -2.837297479 / (4 pi)
  CHECK(pair_green_F(kZero) == doctest::Approx(-2.837297479 / (4.0 * std::numbers::pi)).epsilon(1e-8));
  for (const IVec3& P : {kZero, IVec3{1, 0, 0}, IVec3{1, 1, 0}, IVec3{2, 0, 0}}) {
    CHECK(pair_green_F(P, 0.05) == doctest::Approx(pair_green_F(P, 0.12)).epsilon(1e-10));
  }
  const LowSet trivial({kZero}, 1.0);
  CHECK(sector_green_constant(kZero, trivial) == doctest::Approx(0.5 * pair_green_F(kZero)));
}

TEST_CASE("two-boson oracle lies below the condensate energy") {
  const ModeSet ms = build_mode_set(kTwoPi + 1e-9);
  const ScaledVhat vn(kSoft, 2, 0.04, 16);
  const double e = bosonic_pair_ground_energy(ms, vn);
  CHECK(e >= 0.0);
  CHECK(e <= vn(0) + 1e-14);
}
