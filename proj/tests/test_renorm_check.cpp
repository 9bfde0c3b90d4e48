#include <doctest.h>

#include <cmath>
#include <numbers>

#include "bosegas/errors.hpp"
#include "bosegas/renorm_check.hpp"

using namespace bosegas;

namespace {

const IVec3 kZero{0, 0, 0};

struct Setup {
  ModeSet ms;
  ScaledVhat vn;
  FockBasis basis;
  CsrMatrix H;
  RenormKernel kernel;

  Setup(int N, const RadialPotential& V, const LowSet& low, int modes = 13, double kappa = 0.04)
      : ms(build_mode_set_count(modes)),
        vn(V, N, kappa, 4 * ms.max_nsq()),
        basis(ms, N),
        H(build_hamiltonian(basis, vn)),
        kernel(build_kernel(ms, low, vn, KernelKind::ModelConsistent)) {}
};

LowSet trivial_low() { return LowSet({kZero}, 1.0); }

LowSet seven_low() {
  return LowSet({{0, 0, 0}, {1, 0, 0}, {-1, 0, 0}, {0, 1, 0}, {0, -1, 0}, {0, 0, 1}, {0, 0, -1}},
                kUnitPsq);
}

}  // namespace

TEST_CASE("check configuration") {
  const CheckConfig c = CheckConfig::defaults(5);
  CHECK(c.alpha == doctest::Approx(1.05 * 4.1 * 0.04));
  CHECK(c.beta == doctest::Approx(1.05 * 2.5 * 0.04));
  CHECK(c.delta > c.kappa / 2);
  CHECK(c.delta < c.alpha);
  CHECK_NOTHROW(c.validate());
  CheckConfig bad = CheckConfig::defaults(5, 0.05);
  CHECK_THROWS_AS(bad.validate(), ConfigError);
  bad.exploratory = true;
  CHECK_NOTHROW(bad.validate());
  CheckConfig d = c;
  d.delta = c.alpha;
  CHECK_THROWS_AS(d.validate(), ConfigError);
  d = c;
  d.alpha = 1.2;
  CHECK_THROWS_AS(d.validate(), ConfigError);
  d.beta = -1.0;
  d.exploratory = true;
  CHECK_THROWS_AS(d.validate(), ConfigError);
}

TEST_CASE("zero coupling: the lower bound is the kinetic energy") {
  for (const LowSet& low : {trivial_low(), seven_low()}) {
    Setup s(4, RadialPotential::soft_sphere(0.0, 0.2), low);
    const GapEvaluator ev(s.basis, s.kernel, s.vn, s.H);
    const CsrMatrix K = build_kinetic(s.basis);
    const StateVector psi = random_state(s.basis.dim(), 11);
    const GapReport g = ev.evaluate(psi);
    CHECK(g.kinetic_c == doctest::Approx(expectation(K, psi)).epsilon(1e-12));
    CHECK(g.vren_term == 0.0);
    CHECK(g.rn_term == 0.0);
    CHECK(g.dropped == 0.0);
    CHECK(std::abs(g.gap) <= 1e-12 * std::max(1.0, g.lhs));
  }
}

TEST_CASE("renormalized potential on the condensate") {
  const int N = 4;
  Setup s(N, RadialPotential::soft_sphere(50.0, 0.2), trivial_low());
  const GapEvaluator ev(s.basis, s.kernel, s.vn, s.H);
  StateVector psi(s.basis.dim(), 0.0);
  psi[0] = 1.0;
  const double expect = s.kernel.vren(kZero, kZero, kZero, kZero) * N * (N - 1) / (2.0 * s.vn.L());
  CHECK(ev.vren_expectation(psi) == doctest::Approx(expect).epsilon(1e-13));
}

TEST_CASE("sextic term with a single low mode reduces to one sum") {
  const int N = 4;
  Setup s(N, RadialPotential::soft_sphere(50.0, 0.2), trivial_low());
  const GapEvaluator ev(s.basis, s.kernel, s.vn, s.H);
  const FockBasis b1(s.ms, N - 1), b2(s.ms, N - 2), b3(s.ms, N - 3);
  const double pref = std::pow(double(N), 2.0 * 0.04 - 2.0);
  for (std::uint64_t seed : {1, 2}) {
    const StateVector psi = random_state(s.basis.dim(), seed);
    const StateVector y = annihilate(b1, b2, 0, annihilate(s.basis, b1, 0, psi));
    double hand = 0.0;
    for (std::size_t r = 1; r < s.ms.size(); ++r) {
      const IVec3 rn = s.ms[r].n;
      const double e = s.kernel.eta(-rn, rn, kZero, kZero);
      const StateVector z = annihilate(b2, b3, s.ms.index_of(-rn), y);
      double zz = 0.0;
      for (double v : z) zz += v * v;
      hand += s.ms[r].psq() * e * e * zz;
    }
    hand *= pref;
    CHECK(ev.rn_expectation(psi) == doctest::Approx(hand).epsilon(1e-11));
  }
}

TEST_CASE("gap equals the dropped term and both sextic paths agree") {
  for (const LowSet& low : {trivial_low(), seven_low()}) {
    Setup s(4, RadialPotential::soft_sphere(50.0, 0.2), low);
    const GapEvaluator ev(s.basis, s.kernel, s.vn, s.H);
    const GroundState gs = ground_state(s.H);
    std::vector<StateVector> states{gs.psi};
    for (std::uint64_t i = 0; i < 5; ++i) states.push_back(random_state(s.basis.dim(), 100 + i));
    for (const auto& psi : states) {
      const GapReport g = lowerbound_gap(ev, psi);
      CHECK(g.asserted);
      CHECK(g.holds);
      CHECK(g.dropped >= -1e-12);
      CHECK(std::abs(g.gap - g.dropped) <= 1e-10 * std::max(1.0, g.lhs));
      CHECK(std::abs(g.rn_term - g.rn_direct) <= 1e-10 * std::max(1.0, std::abs(g.rn_term)));
    }
  }
}

TEST_CASE("a negative model-consistent gap raises") {
  // A kernel built for a stronger potential overstates V_ren for the weak Hamiltonian.
  const int N = 3;
  const ModeSet ms = build_mode_set_count(13);
  const ScaledVhat weak(RadialPotential::soft_sphere(1.0, 0.2), N, 0.04, 4 * ms.max_nsq());
  const ScaledVhat strong(RadialPotential::soft_sphere(5000.0, 0.2), N, 0.04, 4 * ms.max_nsq());
  const FockBasis b(ms, N);
  const CsrMatrix H = build_hamiltonian(b, weak);
  const RenormKernel k = build_kernel(ms, trivial_low(), strong, KernelKind::ModelConsistent);
  const GapEvaluator ev(b, k, weak, H);
  StateVector psi(b.dim(), 0.0);
  psi[0] = 1.0;
  CHECK_THROWS_AS(lowerbound_gap(ev, psi), InvariantViolation);
  const RenormKernel kt = build_kernel(ms, trivial_low(), strong, KernelKind::Truncated);
  const GapEvaluator evt(b, kt, weak, H);
  const GapReport g = lowerbound_gap(evt, psi);
  CHECK_FALSE(g.holds);
  CHECK_FALSE(g.asserted);
}

TEST_CASE("evaluator preconditions") {
  Setup s(3, RadialPotential::soft_sphere(50.0, 0.2), trivial_low());
  CHECK_THROWS_AS(GapEvaluator(s.basis, s.kernel, s.vn, s.H, 10.0), ResourceError);
  const FockBasis b7(build_mode_set_count(7), 3);
  CHECK_THROWS_AS(GapEvaluator(b7, s.kernel, s.vn, s.H), ConfigError);
}

TEST_CASE("Markov inequality over all basis states") {
  for (int N = 1; N <= 4; ++N) {
    const ModeSet ms = build_mode_set_count(13);
    const FockBasis b(ms, N);
    const ScaledVhat vn(RadialPotential::soft_sphere(50.0, 0.2), N, 0.04, 4 * ms.max_nsq());
    const CsrMatrix H = build_hamiltonian(b, vn);
    const GroundState gs = ground_state(H);
    const MarkovReport m = markov_check(b, CheckConfig::defaults(N), gs.psi, H);
    CHECK(m.states == b.dim());
    CHECK(m.violations == 0);
    CHECK(m.max_ratio <= 1.0);
    CHECK(m.second_holds);
    CHECK(m.expect_n_above <= m.expect_kinetic * std::pow(double(N), -2.0 * CheckConfig::defaults(N).beta) + 1e-12);
  }
  // zeta below the first shell: every excited particle counts
  CheckConfig wide = CheckConfig::defaults(4);
  wide.beta = 1.0;
  const FockBasis b(build_mode_set_count(7), 2);
  CHECK(markov_check(b, wide, {}, CsrMatrix{}).violations == 0);
}

TEST_CASE("log-log slopes and exponent fits") {
  CHECK(loglog_slope({1, 2, 4, 8}, {3, 12, 48, 192}) == doctest::Approx(2.0));
  CHECK(std::isnan(loglog_slope({1, 2}, {1, 0})));
  CHECK(std::isnan(loglog_slope({1}, {1})));
  std::vector<AprioriRow> rows;
  for (long N : {10, 20, 40}) rows.push_back({N, 0.5 * N, 0.1 * N * N, 0.0});
  const auto fits = apriori_fits(rows, 0.04, 0.1);
  REQUIRE(fits.size() == 3);
  CHECK(fits[0].fitted == doctest::Approx(1.0));
  CHECK(fits[0].bound == doctest::Approx(1.04 - 0.2));
  CHECK(fits[0].within);
  CHECK(fits[1].fitted == doctest::Approx(2.0));
  CHECK_FALSE(fits[1].within);
  CHECK(std::isnan(fits[2].fitted));
}

TEST_CASE("theorem row at zero and weak coupling") {
  const ModeSet ms = build_mode_set_count(13);
  const int N = 5;
  for (double v0 : {0.0, 1e-3}) {
    const auto V = RadialPotential::soft_sphere(v0, 0.2);
    const ScaledVhat vn(V, N, 0.04, 4 * ms.max_nsq());
    const FockBasis b(ms, N);
    const CsrMatrix H = build_hamiltonian(b, vn);
    const GroundState gs = ground_state(H);
    const Observables o = observables(gs.psi, b, H, 1.0);
    const TheoremRow t = theorem_row(b, gs, o, vn, scattering_length(V));
    CHECK(t.hartree_holds);
    CHECK(std::abs(t.condensate_fraction + t.depletion - 1.0) <= 1e-12);
    if (v0 == 0.0) {
      CHECK(t.condensate_fraction == 1.0);
      CHECK(std::isnan(t.energy_ratio));
      CHECK(std::abs(t.energy) <= 1e-12);
    } else {
      CHECK(t.condensate_fraction > 0.99999);
    }
  }
}

TEST_CASE("a priori row of the condensate vanishes") {
  const FockBasis b(build_mode_set_count(13), 3);
  StateVector psi(b.dim(), 0.0);
  psi[0] = 1.0;
  const AprioriRow r = apriori_row(b, psi, 0.1);
  CHECK(r.n_above == 0.0);
  CHECK(r.k_n_above == 0.0);
  CHECK(r.k_n2_above == 0.0);
}
