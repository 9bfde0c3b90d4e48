#include "bosegas/fock.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <bit>
#include <cmath>
#include <fstream>
#include <limits>
#include <random>

#include "bosegas/errors.hpp"

namespace bosegas {
namespace {

constexpr std::uint64_t kOverflow = std::numeric_limits<std::uint64_t>::max();

std::vector<std::uint64_t> binomial_table(std::size_t nmax, int kmax) {
  const std::size_t w = static_cast<std::size_t>(kmax) + 1;
  std::vector<std::uint64_t> t((nmax + 1) * w, 0);
  for (std::size_t n = 0; n <= nmax; ++n) {
    t[n * w] = 1;
    for (std::size_t k = 1; k <= std::min<std::size_t>(n, kmax); ++k) {
      const std::uint64_t a = t[(n - 1) * w + k - 1];
      const std::uint64_t b = k <= n - 1 ? t[(n - 1) * w + k] : 0;
      t[n * w + k] = (a == kOverflow || b == kOverflow || a > kOverflow - b) ? kOverflow : a + b;
    }
  }
  return t;
}

IVec3 total_momentum(const std::uint8_t* occ, const ModeSet& ms) {
  IVec3 P{0, 0, 0};
  for (std::size_t i = 0; i < ms.size(); ++i) {
    for (int d = 0; d < 3; ++d) P[d] += occ[i] * ms[i].n[d];
  }
  return P;
}

}  // namespace

std::uint64_t fock_dimension(std::size_t M, int N) {
  if (M == 0 || N < 0) throw ConfigError("Fock basis needs M >= 1 and N >= 0");
  const auto t = binomial_table(M + N - 1, N);
  const std::uint64_t d = t[(M + N - 1) * (N + 1) + N];
  if (d == kOverflow) throw ResourceError("Fock dimension C(N+M-1, N) overflows 64 bits");
  return d;
}

FockBasis::FockBasis(ModeSet ms, int N, std::uint64_t max_dim) : ms_(std::move(ms)), N_(N) {
  build(max_dim);
}

FockBasis::FockBasis(ModeSet ms, int N, const IVec3& total_momentum, std::uint64_t max_dim)
    : ms_(std::move(ms)), N_(N), sector_(total_momentum) {
  build(max_dim);
}

void FockBasis::build(std::uint64_t max_dim) {
  if (N_ < 0 || N_ > 255) throw ConfigError("particle number must lie in [0, 255]");
  const std::size_t M = ms_.size();
  const std::uint64_t full = fock_dimension(M, N_);
  const std::uint64_t limit = sector_ ? 64 * max_dim : max_dim;
  if (full > limit) {
    throw ResourceError("Fock dimension C(N+M-1,N) = C(" + std::to_string(N_ + M - 1) + "," +
                        std::to_string(N_) + ") = " + std::to_string(full) +
                        " exceeds the limit " + std::to_string(limit));
  }
  binom_ = binomial_table(M + N_, N_);
  if (!sector_) {
    dim_ = full;
    occ_.resize(dim_ * M);
    for (std::uint64_t r = 0; r < full; ++r) unrank(r, occ_.data() + r * M);
    return;
  }
  std::vector<std::uint8_t> tmp(M);
  for (std::uint64_t r = 0; r < full; ++r) {
    unrank(r, tmp.data());
    if (total_momentum(tmp.data(), ms_) != *sector_) continue;
    ranks_.push_back(r);
    occ_.insert(occ_.end(), tmp.begin(), tmp.end());
  }
  dim_ = ranks_.size();
  if (dim_ > max_dim) {
    throw ResourceError("sector dimension " + std::to_string(dim_) + " exceeds the limit " +
                        std::to_string(max_dim));
  }
}

std::uint64_t FockBasis::rank(const std::uint8_t* occ) const {
  std::uint64_t r = 0;
  std::size_t j = 0;
  for (std::size_t i = 0; i < M(); ++i) {
    for (int t = 0; t < occ[i]; ++t, ++j) r += binom(i + j, j + 1);
  }
  return r;
}

void FockBasis::unrank(std::uint64_t r, std::uint8_t* occ) const {
  std::fill(occ, occ + M(), 0);
  std::size_t c = M() + N_ - 1;
  for (int j = N_ - 1; j >= 0; --j) {
    const auto k = static_cast<std::size_t>(j) + 1;
    do { --c; } while (binom(c, k) > r);
    r -= binom(c, k);
    ++occ[c - j];
  }
}

std::int64_t FockBasis::index_of(const std::uint8_t* occ) const {
  int total = 0;
  for (std::size_t i = 0; i < M(); ++i) total += occ[i];
  if (total != N_) return -1;
  const std::uint64_t r = rank(occ);
  if (!sector_) return static_cast<std::int64_t>(r);
  auto it = std::lower_bound(ranks_.begin(), ranks_.end(), r);
  if (it == ranks_.end() || *it != r) return -1;
  return it - ranks_.begin();
}

CsrMatrix build_hamiltonian(const FockBasis& basis, const ScaledVhat& vn) {
  if (vn.N() != basis.N()) throw ConfigError("V_N table built for a different particle number");
  const ModeSet& ms = basis.modes();
  const std::size_t M = ms.size();
  ScaledVhat table = vn;
  table.reserve(4 * ms.max_nsq());
  // target[(p*M + q)*M + a] = index of p + q - a, or -1.
  std::vector<int> target(M * M * M, -1);
  for (std::size_t p = 0; p < M; ++p)
    for (std::size_t q = 0; q < M; ++q)
      for (std::size_t a = 0; a < M; ++a)
        target[(p * M + q) * M + a] = ms.index_of(ms[p].n + ms[q].n - ms[a].n);
  std::vector<double> kin(M);
  for (std::size_t i = 0; i < M; ++i) kin[i] = ms[i].psq();

  const auto dim = static_cast<std::int64_t>(basis.dim());
  std::vector<std::vector<std::pair<std::int32_t, double>>> rows(basis.dim());
#pragma omp parallel
  {
    std::vector<std::uint8_t> occ(M);
    std::vector<std::pair<std::int32_t, double>> entries;
#pragma omp for schedule(dynamic, 64)
    for (std::int64_t s = 0; s < dim; ++s) {
      entries.clear();
      const std::uint8_t* src = basis.occupation(static_cast<std::size_t>(s));
      double diag = 0.0;
      for (std::size_t i = 0; i < M; ++i) diag += kin[i] * src[i];
      entries.emplace_back(static_cast<std::int32_t>(s), diag);
      std::copy(src, src + M, occ.begin());
      for (std::size_t q = 0; q < M; ++q) {
        if (occ[q] == 0) continue;
        const double aq = std::sqrt(double(occ[q]));
        --occ[q];
        for (std::size_t p = 0; p < M; ++p) {
          if (occ[p] == 0) continue;
          const double amp = aq * std::sqrt(double(occ[p]));
          --occ[p];
          for (std::size_t a = 0; a < M; ++a) {
            const int b = target[(p * M + q) * M + a];
            if (b < 0) continue;
            double c = amp * std::sqrt(double(occ[b] + 1));
            ++occ[b];
            c *= std::sqrt(double(occ[a] + 1));
            ++occ[a];
            const std::int64_t t = basis.index_of(occ.data());
            if (t >= 0) {
              entries.emplace_back(static_cast<std::int32_t>(t),
                                   0.5 * c * table(ms[a].n - ms[p].n));
            }
            --occ[a];
            --occ[b];
          }
          ++occ[p];
        }
        ++occ[q];
      }
      std::sort(entries.begin(), entries.end(),
                [](const auto& x, const auto& y) { return x.first < y.first; });
      auto& row = rows[static_cast<std::size_t>(s)];
      for (const auto& e : entries) {
        if (!row.empty() && row.back().first == e.first) {
          row.back().second += e.second;
        } else {
          row.push_back(e);
        }
      }
    }
  }
  CsrMatrix H;
  H.n = basis.dim();
  H.row_ptr.reserve(H.n + 1);
  for (const auto& row : rows) {
    for (const auto& [c, v] : row) {
      H.col.push_back(c);
      H.val.push_back(v);
    }
    H.row_ptr.push_back(static_cast<std::int64_t>(H.col.size()));
  }
  return H;
}

double state_kinetic(const FockBasis& basis, std::size_t i) {
  const std::uint8_t* occ = basis.occupation(i);
  double k = 0.0;
  for (std::size_t m = 0; m < basis.M(); ++m) k += basis.modes()[m].psq() * occ[m];
  return k;
}

int state_count_above(const FockBasis& basis, std::size_t i, double zeta) {
  const std::uint8_t* occ = basis.occupation(i);
  int n = 0;
  for (std::size_t m = 0; m < basis.M(); ++m) {
    if (basis.modes()[m].psq() > zeta * zeta) n += occ[m];
  }
  return n;
}

CsrMatrix build_kinetic(const FockBasis& basis) {
  CsrMatrix K;
  K.n = basis.dim();
  for (std::size_t i = 0; i < K.n; ++i) {
    K.col.push_back(static_cast<std::int32_t>(i));
    K.val.push_back(state_kinetic(basis, i));
    K.row_ptr.push_back(static_cast<std::int64_t>(K.col.size()));
  }
  return K;
}

GroundState ground_state(const CsrMatrix& H, const LanczosOptions& opts) {
  const std::size_t n = H.n;
  if (n == 0) throw ConfigError("empty operator");
  auto matvec = opts.parallel ? kernels::omp::matvec : kernels::serial::matvec;
  auto dot = opts.parallel ? kernels::omp::dot : kernels::serial::dot;
  auto axpy = opts.parallel ? kernels::omp::axpy : kernels::serial::axpy;
  auto norm = opts.parallel ? kernels::omp::norm : kernels::serial::norm;

  double hnorm = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    double s = 0.0;
    for (auto k = H.row_ptr[i]; k < H.row_ptr[i + 1]; ++k) s += std::abs(H.val[k]);
    hnorm = std::max(hnorm, s);
  }
  const int m = static_cast<int>(std::min<std::size_t>(std::max(opts.krylov, 2), n));
  StateVector start = random_state(n, opts.seed);
  GroundState gs;
  gs.gap = std::numeric_limits<double>::infinity();
  StateVector w(n), hpsi(n);
  for (int restart = 0; restart <= opts.max_restarts; ++restart) {
    std::vector<StateVector> Q{start};
    std::vector<double> alpha, beta;
    for (int j = 0; j < m; ++j) {
      matvec(H, Q[j].data(), w.data());
      ++gs.iterations;
      const double a = dot(Q[j].data(), w.data(), n);
      alpha.push_back(a);
      for (int pass = 0; pass < 2; ++pass) {
        for (const auto& q : Q) axpy(-dot(q.data(), w.data(), n), q.data(), w.data(), n);
      }
      const double b = norm(w.data(), n);
      if (j + 1 == m || b <= 1e-13 * std::max(1.0, hnorm)) break;
      beta.push_back(b);
      StateVector next(w);
      for (double& x : next) x /= b;
      Q.push_back(std::move(next));
    }
    const auto k = static_cast<Eigen::Index>(alpha.size());
    Eigen::VectorXd diag = Eigen::Map<Eigen::VectorXd>(alpha.data(), k);
    Eigen::VectorXd sub = k > 1 ? Eigen::VectorXd(Eigen::Map<Eigen::VectorXd>(beta.data(), k - 1))
                                : Eigen::VectorXd(0);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es;
    es.computeFromTridiagonal(diag, sub, Eigen::ComputeEigenvectors);
    const Eigen::VectorXd y = es.eigenvectors().col(0);
    StateVector psi(n, 0.0);
    for (Eigen::Index i = 0; i < k; ++i) axpy(y(i), Q[i].data(), psi.data(), n);
    const double pn = norm(psi.data(), n);
    for (double& x : psi) x /= pn;
    matvec(H, psi.data(), hpsi.data());
    const double E = dot(psi.data(), hpsi.data(), n);
    axpy(-E, psi.data(), hpsi.data(), n);
    gs.energy = E;
    gs.residual = norm(hpsi.data(), n);
    gs.psi = psi;
    if (k > 1) gs.gap = es.eigenvalues()(1) - es.eigenvalues()(0);
    if (gs.residual <= opts.tol * std::max(1.0, std::abs(E))) {
      gs.degenerate = gs.gap < 1e-8;
      return gs;
    }
    start = std::move(psi);
  }
  throw NumericError("Lanczos did not converge: residual " + std::to_string(gs.residual) +
                     " after " + std::to_string(gs.iterations) + " matvecs");
}

double expectation(const CsrMatrix& A, const StateVector& psi, bool parallel) {
  StateVector y(psi.size());
  if (parallel) {
    kernels::omp::matvec(A, psi.data(), y.data());
    return kernels::omp::dot(psi.data(), y.data(), psi.size());
  }
  kernels::serial::matvec(A, psi.data(), y.data());
  return kernels::serial::dot(psi.data(), y.data(), psi.size());
}

Observables observables(const StateVector& psi, const FockBasis& basis, const CsrMatrix& H,
                        double zeta) {
  Observables o;
  o.zeta = zeta;
  o.energy = expectation(H, psi);
  o.gamma1_diag.assign(basis.M(), 0.0);
  const double N = basis.N();
  for (std::size_t s = 0; s < basis.dim(); ++s) {
    const double w = psi[s] * psi[s];
    const std::uint8_t* occ = basis.occupation(s);
    o.kinetic += w * state_kinetic(basis, s);
    o.n_above += w * state_count_above(basis, s, zeta);
    o.n_plus += w * (basis.N() - occ[0]);
    for (std::size_t m = 0; m < basis.M(); ++m) o.gamma1_diag[m] += w * occ[m] / N;
  }
  o.condensate_fraction = o.gamma1_diag[0];
  o.depletion = o.n_plus / N;
  return o;
}

StateVector annihilate(const FockBasis& from, const FockBasis& to, int mode, const StateVector& psi) {
  if (to.N() + 1 != from.N()) throw ConfigError("annihilate: target basis must hold N-1 particles");
  StateVector out(to.dim(), 0.0);
  std::vector<std::uint8_t> occ(from.M());
  for (std::size_t s = 0; s < from.dim(); ++s) {
    if (psi[s] == 0.0) continue;
    const std::uint8_t* src = from.occupation(s);
    if (src[mode] == 0) continue;
    std::copy(src, src + from.M(), occ.begin());
    const double amp = std::sqrt(double(occ[mode]));
    --occ[mode];
    const std::int64_t t = to.index_of(occ.data());
    if (t < 0) throw ConfigError("annihilate: target basis is missing a state");
    out[static_cast<std::size_t>(t)] += amp * psi[s];
  }
  return out;
}

StateVector create(const FockBasis& from, const FockBasis& to, int mode, const StateVector& psi) {
  if (to.N() != from.N() + 1) throw ConfigError("create: target basis must hold N+1 particles");
  StateVector out(to.dim(), 0.0);
  std::vector<std::uint8_t> occ(from.M());
  for (std::size_t s = 0; s < from.dim(); ++s) {
    if (psi[s] == 0.0) continue;
    const std::uint8_t* src = from.occupation(s);
    std::copy(src, src + from.M(), occ.begin());
    ++occ[mode];
    const std::int64_t t = to.index_of(occ.data());
    if (t < 0) throw ConfigError("create: target basis is missing a state");
    out[static_cast<std::size_t>(t)] += std::sqrt(double(occ[mode])) * psi[s];
  }
  return out;
}

StateVector apply_cubic_d(const IVec3& r, const StateVector& psi, const FockBasis& from,
                          const FockBasis& to, const RenormKernel& kernel) {
  const ModeSet& ms = from.modes();
  if (!(kernel.ambient() == ms) || !(to.modes() == ms)) {
    throw ConfigError("kernel and Fock basis were built on different mode sets");
  }
  if (to.N() + 1 != from.N()) throw ConfigError("apply_cubic_d: target basis must hold N-1 particles");
  const int ri = ms.index_of(r);
  if (ri < 0) throw ConfigError("apply_cubic_d: r is not in the mode set");
  const double pref = std::pow(static_cast<double>(kernel.N()), kernel.kappa() - 1.0);

  struct Term {
    int p, q, t;
    double coeff;
  };
  std::vector<Term> terms;
  for (const auto& pn : kernel.low().members())
    for (const auto& qn : kernel.low().members()) {
      const IVec3 tn = pn + qn - r;
      const int t = ms.index_of(tn);
      if (t < 0) continue;
      const double e = kernel.eta(tn, r, pn, qn);
      if (e == 0.0) continue;
      terms.push_back({ms.index_of(pn), ms.index_of(qn), t, pref * e});
    }

  StateVector out(to.dim(), 0.0);
  std::vector<std::uint8_t> occ(ms.size());
  for (std::size_t s = 0; s < from.dim(); ++s) {
    if (psi[s] == 0.0) continue;
    const std::uint8_t* src = from.occupation(s);
    std::copy(src, src + ms.size(), occ.begin());
    for (const auto& tm : terms) {
      if (occ[tm.q] == 0) continue;
      double amp = std::sqrt(double(occ[tm.q]));
      --occ[tm.q];
      if (occ[tm.p] > 0) {
        amp *= std::sqrt(double(occ[tm.p]));
        --occ[tm.p];
        ++occ[tm.t];
        amp *= std::sqrt(double(occ[tm.t]));
        const std::int64_t t = to.index_of(occ.data());
        if (t < 0) throw ConfigError("apply_cubic_d: target basis is missing a state");
        out[static_cast<std::size_t>(t)] += tm.coeff * amp * psi[s];
        --occ[tm.t];
        ++occ[tm.p];
      }
      ++occ[tm.q];
    }
  }
  return out;
}

StateVector random_state(std::size_t dim, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> g;
  StateVector v(dim);
  for (double& x : v) x = g(rng);
  const double n = kernels::serial::norm(v.data(), dim);
  for (double& x : v) x /= n;
  return v;
}

void write_state(const std::filesystem::path& path, const StateVector& psi) {
  static_assert(std::endian::native == std::endian::little, "state dumps assume little-endian");
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ConfigError("cannot write " + path.string());
  const std::uint64_t n = psi.size();
  out.write(reinterpret_cast<const char*>(&n), sizeof n);
  out.write(reinterpret_cast<const char*>(psi.data()), static_cast<std::streamsize>(n * sizeof(double)));
}

StateVector read_state(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot read " + path.string());
  std::uint64_t n = 0;
  in.read(reinterpret_cast<char*>(&n), sizeof n);
  StateVector psi(n);
  in.read(reinterpret_cast<char*>(psi.data()), static_cast<std::streamsize>(n * sizeof(double)));
  if (!in) throw ConfigError("truncated state file " + path.string());
  return psi;
}

}  // namespace bosegas
