#include "bosegas/renorm_check.hpp"

#include <cmath>
#include <limits>
#include <set>

#include "bosegas/errors.hpp"

namespace bosegas {

CheckConfig CheckConfig::defaults(long N, double kappa, double epsilon) {
  CheckConfig c;
  c.N = N;
  c.kappa = kappa;
  c.epsilon = epsilon;
  c.alpha = (1.0 + epsilon) * 4.1 * kappa;
  c.beta = (1.0 + epsilon) * 2.5 * kappa;
  c.delta = 0.5 * (0.5 * kappa + c.alpha);
  return c;
}

void CheckConfig::validate() const {
  auto bad = [](const std::string& msg) { throw ConfigError(msg); };
  if (N < 1) bad("N must be >= 1");
  for (double x : {kappa, epsilon, alpha, beta, delta}) {
    if (!std::isfinite(x)) bad("scaling parameters must be finite");
  }
  if (kappa < 0.0) bad("kappa must be >= 0");
  if (alpha < 0.0) bad("alpha must be >= 0");
  if (beta < 0.0) bad("beta must be >= 0");
  if (exploratory) return;
  if (!(kappa < 0.05)) bad("kappa must lie in [0, 1/20) (set exploratory to override)");
  if (alpha > 1.0 - kappa) bad("alpha must lie in [0, 1-kappa] (set exploratory to override)");
  if (!(delta > kappa / 2 && delta < alpha)) {
    bad("delta must lie in (kappa/2, alpha) = (" + std::to_string(kappa / 2) + ", " +
        std::to_string(alpha) + ") (set exploratory to override)");
  }
}

struct GapEvaluator::PairVectors {
  std::size_t M = 0;
  std::vector<int> slot;         // p*M+q -> index into vec, -1 when zero
  std::vector<StateVector> vec;  // a_p a_q psi in the N-2 basis
  const StateVector* get(std::size_t p, std::size_t q) const {
    const int s = slot[p * M + q];
    return s < 0 ? nullptr : &vec[static_cast<std::size_t>(s)];
  }
};

namespace {

double dotv(const StateVector& a, const StateVector& b) {
  return kernels::omp::dot(a.data(), b.data(), a.size());
}

void axpyv(double a, const StateVector& x, StateVector& y) {
  kernels::omp::axpy(a, x.data(), y.data(), x.size());
}

}  // namespace

GapEvaluator::GapEvaluator(const FockBasis& basis, const RenormKernel& kernel, const ScaledVhat& vn,
                           const CsrMatrix& H, double cost_limit)
    : basis_(basis), kernel_(kernel), vn_(vn), H_(H) {
  if (!(kernel.ambient() == basis.modes())) {
    throw ConfigError("kernel and Fock basis were built on different mode sets");
  }
  if (basis.sector()) throw ConfigError("lower-bound checks need the unrestricted Fock basis");
  if (basis.N() < 2) throw ConfigError("lower-bound checks need N >= 2");
  if (vn.N() != basis.N() || kernel.N() != basis.N()) {
    throw ConfigError("kernel, V_N and basis disagree on N");
  }
  vn_.reserve(4 * basis.modes().max_nsq());
  const std::size_t M = basis.M();
  b1_.emplace(basis.modes(), basis.N() - 1);
  b2_.emplace(basis.modes(), basis.N() - 2);
  if (basis.N() >= 3) b3_.emplace(basis.modes(), basis.N() - 3);
  const double m = static_cast<double>(M);
  const double cost = m * m * m * (double(b2_->dim()) + (b3_ ? double(b3_->dim()) : 0.0)) +
                      m * m * double(basis.dim());
  if (cost > cost_limit) {
    throw ResourceError("sextic term needs about " + std::to_string(cost) +
                        " operations, above the limit " + std::to_string(cost_limit));
  }
}

GapEvaluator::PairVectors GapEvaluator::pair_vectors(const StateVector& psi) const {
  PairVectors y;
  const std::size_t M = basis_.M();
  y.M = M;
  y.slot.assign(M * M, -1);
  std::vector<StateVector> single(M);
  for (std::size_t q = 0; q < M; ++q) single[q] = annihilate(basis_, *b1_, static_cast<int>(q), psi);
  for (std::size_t p = 0; p < M; ++p)
    for (std::size_t q = p; q < M; ++q) {
      StateVector v = annihilate(*b1_, *b2_, static_cast<int>(p), single[q]);
      y.slot[p * M + q] = y.slot[q * M + p] = static_cast<int>(y.vec.size());
      y.vec.push_back(std::move(v));
    }
  return y;
}

double GapEvaluator::modified_kinetic(const StateVector& psi) const {
  const ModeSet& ms = basis_.modes();
  double total = 0.0;
  for (std::size_t r = 1; r < ms.size(); ++r) {
    StateVector c = annihilate(basis_, *b1_, static_cast<int>(r), psi);
    axpyv(1.0, apply_cubic_d(ms[r].n, psi, basis_, *b1_, kernel_), c);
    total += ms[r].psq() * dotv(c, c);
  }
  return total;
}

double GapEvaluator::vren_expectation(const StateVector& psi) const {
  const PairVectors y = pair_vectors(psi);
  const ModeSet& ms = basis_.modes();
  double total = 0.0;
  for (const auto& sk : kernel_.sectors()) {
    for (std::size_t i = 0; i < sk.low_first.size(); ++i) {
      const auto* yi = y.get(ms.index_of(sk.low_first[i]), ms.index_of(sk.P - sk.low_first[i]));
      for (std::size_t j = 0; j < sk.low_first.size(); ++j) {
        const auto* yj = y.get(ms.index_of(sk.low_first[j]), ms.index_of(sk.P - sk.low_first[j]));
        total += sk.vren(i, j) * dotv(*yi, *yj);
      }
    }
  }
  return 0.5 * total / length_scale(kernel_.N(), kernel_.kappa());
}

std::vector<StateVector> GapEvaluator::amplitudes_A(const PairVectors& y, const IVec3& r) const {
  // A_{r,m} psi = sum_{(p,q) in P_L^2, p+q = r+m} eta(m, r; p, q) a_p a_q psi
  const ModeSet& ms = basis_.modes();
  std::vector<StateVector> A(ms.size());
  for (std::size_t m = 0; m < ms.size(); ++m) {
    StateVector acc(b2_->dim(), 0.0);
    for (const auto& p : kernel_.low().members()) {
      const IVec3 q = r + ms[m].n - p;
      if (!kernel_.low().contains(q) || !ms.contains(q)) continue;
      const double e = kernel_.eta(ms[m].n, r, p, q);
      if (e != 0.0) axpyv(e, *y.get(ms.index_of(p), ms.index_of(q)), acc);
    }
    A[m] = std::move(acc);
  }
  return A;
}

double GapEvaluator::rn_expectation(const StateVector& psi) const {
  if (!b3_) return 0.0;
  const PairVectors y = pair_vectors(psi);
  const ModeSet& ms = basis_.modes();
  const std::size_t M = ms.size();
  const double pref = std::pow(static_cast<double>(kernel_.N()), 2.0 * kernel_.kappa() - 2.0);
  double total = 0.0;
  for (std::size_t r = 1; r < M; ++r) {
    const auto A = amplitudes_A(y, ms[r].n);
    // Z[m][m'] = a_{m'} A_{r,m} psi
    std::vector<std::vector<StateVector>> Z(M);
    for (std::size_t m = 0; m < M; ++m) {
      Z[m].resize(M);
      for (std::size_t mp = 0; mp < M; ++mp) Z[m][mp] = annihilate(*b2_, *b3_, static_cast<int>(mp), A[m]);
    }
    double s = 0.0;
    for (std::size_t m = 0; m < M; ++m)
      for (std::size_t mp = 0; mp < M; ++mp) s += dotv(Z[m][mp], Z[mp][m]);
    total += ms[r].psq() * s;
  }
  return pref * total;
}

double GapEvaluator::rn_expectation_direct(const StateVector& psi) const {
  const PairVectors y = pair_vectors(psi);
  const ModeSet& ms = basis_.modes();
  const double pref = std::pow(static_cast<double>(kernel_.N()), 2.0 * kernel_.kappa() - 2.0);
  double total = 0.0;
  for (std::size_t r = 1; r < ms.size(); ++r) {
    const StateVector d = apply_cubic_d(ms[r].n, psi, basis_, *b1_, kernel_);
    double contraction = 0.0;
    for (const auto& a : amplitudes_A(y, ms[r].n)) contraction += dotv(a, a);
    total += ms[r].psq() * (dotv(d, d) - pref * contraction);
  }
  return total;
}

double GapEvaluator::dropped_term(const StateVector& psi) const {
  const PairVectors y = pair_vectors(psi);
  const ModeSet& ms = basis_.modes();
  const LowSet& low = kernel_.low();
  const double pref = std::pow(static_cast<double>(kernel_.N()), kernel_.kappa() - 1.0);
  std::set<IVec3, decltype(&mode_less)> sectors(&mode_less);
  for (std::size_t i = 0; i < ms.size(); ++i)
    for (std::size_t j = 0; j < ms.size(); ++j) sectors.insert(ms[i].n + ms[j].n);

  double total = 0.0;
  for (const auto& P : sectors) {
    std::vector<IVec3> high, lowp;
    for (const auto& m : ms.modes()) {
      if (!ms.contains(P - m.n)) continue;
      (low.pair_low(m.n, P - m.n) ? lowp : high).push_back(m.n);
    }
    // Y_h = a_h a_{P-h} psi + N^{k-1} sum_l eta(h, l) a_l a_{P-l} psi
    std::vector<StateVector> Y;
    for (const auto& h : high) {
      StateVector v = *y.get(ms.index_of(h), ms.index_of(P - h));
      for (const auto& l : lowp) {
        const double e = kernel_.eta(h, P - h, l, P - l);
        if (e != 0.0) axpyv(pref * e, *y.get(ms.index_of(l), ms.index_of(P - l)), v);
      }
      Y.push_back(std::move(v));
    }
    for (std::size_t a = 0; a < high.size(); ++a)
      for (std::size_t b = 0; b < high.size(); ++b) total += vn_(high[a] - high[b]) * dotv(Y[a], Y[b]);
  }
  return 0.5 * total;
}

GapReport GapEvaluator::evaluate(const StateVector& psi) const {
  GapReport g;
  g.lhs = expectation(H_, psi);
  g.kinetic_c = modified_kinetic(psi);
  g.vren_term = vren_expectation(psi);
  g.rn_term = rn_expectation(psi);
  g.rn_direct = rn_expectation_direct(psi);
  g.gap = g.lhs - (g.kinetic_c + g.vren_term - g.rn_term);
  g.dropped = dropped_term(psi);
  g.asserted = kernel_.kind() == KernelKind::ModelConsistent;
  g.holds = g.gap >= -kGapTol * std::max(1.0, std::abs(g.lhs));
  return g;
}

GapReport lowerbound_gap(const GapEvaluator& ev, const StateVector& psi) {
  GapReport g = ev.evaluate(psi);
  if (g.asserted && !g.holds) {
    throw InvariantViolation("lower bound violated: gap " + std::to_string(g.gap) + " with <H> = " +
                             std::to_string(g.lhs));
  }
  return g;
}

MarkovReport markov_check(const FockBasis& basis, const CheckConfig& cfg, const StateVector& psi,
                          const CsrMatrix& H) {
  MarkovReport rep;
  const ModeSet& ms = basis.modes();
  const long double zeta_sq = std::pow(static_cast<long double>(cfg.N), 2.0L * cfg.beta);
  const long double unit = static_cast<long double>(kUnitPsq);
  const double inv = std::pow(static_cast<double>(cfg.N), -2.0 * cfg.beta);
  for (std::size_t s = 0; s < basis.dim(); ++s) {
    const std::uint8_t* occ = basis.occupation(s);
    long long count = 0, weighted_nsq = 0;
    for (std::size_t m = 0; m < ms.size(); ++m) {
      weighted_nsq += static_cast<long long>(occ[m]) * ms[m].nsq();
      if (unit * ms[m].nsq() > zeta_sq) count += occ[m];
    }
    ++rep.states;
    // count <= N^{-2 beta} K  <=>  count N^{2 beta} <= 4 pi^2 sum n |n|^2
    if (static_cast<long double>(count) * zeta_sq > unit * weighted_nsq) ++rep.violations;
    if (weighted_nsq > 0) {
      rep.max_ratio = std::max(rep.max_ratio, double(count) / (inv * kUnitPsq * double(weighted_nsq)));
    }
    const double w = psi.empty() ? 0.0 : psi[s] * psi[s];
    rep.expect_n_above += w * double(count);
    rep.expect_kinetic += w * kUnitPsq * double(weighted_nsq);
  }
  if (!psi.empty()) {
    rep.expect_energy = expectation(H, psi);
    rep.second_holds = rep.expect_kinetic <= rep.expect_energy * (1.0 + 1e-12) + 1e-12;
  }
  return rep;
}

AprioriRow apriori_row(const FockBasis& basis, const StateVector& psi, double beta) {
  AprioriRow row;
  row.N = basis.N();
  const double N = basis.N();
  const double zeta = std::pow(N, beta);
  for (std::size_t s = 0; s < basis.dim(); ++s) {
    const double w = psi[s] * psi[s];
    const double c = state_count_above(basis, s, zeta);
    const double k = state_kinetic(basis, s);
    row.n_above += w * c;
    row.k_n_above += w * k * c;
    row.k_n2_above += w * k * c * c;
  }
  row.k_n_above /= N;
  row.k_n2_above /= N * N;
  return row;
}

double loglog_slope(const std::vector<double>& x, const std::vector<double>& y) {
  const std::size_t n = x.size();
  if (n < 2 || y.size() != n) return std::numeric_limits<double>::quiet_NaN();
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < n; ++i) {
    if (!(x[i] > 0.0) || !(y[i] > 0.0)) return std::numeric_limits<double>::quiet_NaN();
    const double lx = std::log(x[i]), ly = std::log(y[i]);
    sx += lx;
    sy += ly;
    sxx += lx * lx;
    sxy += lx * ly;
  }
  return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

std::vector<ExponentFit> apriori_fits(const std::vector<AprioriRow>& rows, double kappa,
                                      double beta, double tolerance) {
  std::vector<double> n, q1, q2, q3;
  for (const auto& r : rows) {
    n.push_back(double(r.N));
    q1.push_back(r.n_above);
    q2.push_back(r.k_n_above);
    q3.push_back(r.k_n2_above);
  }
  const double k = kappa, b = beta;
  std::vector<ExponentFit> fits{
      {"n_above", loglog_slope(n, q1), 1 + k - 2 * b, true},
      {"k_n_above", loglog_slope(n, q2), std::max(1 + 2 * k - 2 * b, 1.5 * k + 0.5 * b), true},
      {"k_n2_above", loglog_slope(n, q3), std::max({1 + 3 * k - 4 * b, b + 2 * k, 2.5 * k - 1.5 * b}), true},
  };
  for (auto& f : fits) f.within = std::isnan(f.fitted) || f.fitted <= f.bound + tolerance;
  return fits;
}

TheoremRow theorem_row(const FockBasis& basis, const GroundState& gs, const Observables& obs,
                       const ScaledVhat& vn, const ScatteringData& sd) {
  TheoremRow t;
  t.N = basis.N();
  t.M = basis.M();
  t.energy = gs.energy;
  const double N = basis.N();
  const double scale = 4.0 * std::numbers::pi * sd.a * std::pow(N, 1.0 + vn.kappa());
  t.energy_ratio = sd.a > 0.0 ? gs.energy / scale : std::numeric_limits<double>::quiet_NaN();
  t.condensate_fraction = obs.condensate_fraction;
  t.depletion = obs.depletion;
  t.hartree_upper = 0.5 * N * (N - 1.0) * vn(0);
  t.hartree_holds = gs.energy <= t.hartree_upper + 1e-10 * std::max(1.0, std::abs(t.hartree_upper));
  return t;
}

}  // namespace bosegas
