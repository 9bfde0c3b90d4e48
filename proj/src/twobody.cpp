#include "bosegas/twobody.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <map>
#include <unordered_map>

#include "bosegas/csv.hpp"
#include "bosegas/errors.hpp"
#include "bosegas/lattice_green.hpp"

namespace bosegas {

double length_scale(long N, double kappa) {
  return std::pow(static_cast<double>(N), 1.0 - kappa);
}

void check_torus_embedding(const RadialPotential& V, long N, double kappa) {
  if (N < 1) throw ConfigError("N must be >= 1");
  if (!(V.support_radius() / length_scale(N, kappa) < 0.5)) {
    throw ConfigError("potential does not fit torus at this N, kappa (R N^{kappa-1} = " +
                      std::to_string(V.support_radius() / length_scale(N, kappa)) + ")");
  }
}

ScaledVhat::ScaledVhat(const RadialPotential& V, long N, double kappa, int max_transfer_sq)
    : V_(V), N_(N), kappa_(kappa), L_(length_scale(N, kappa)), prefactor_(1.0 / L_) {
  check_torus_embedding(V, N, kappa);
  reserve(max_transfer_sq);
}

void ScaledVhat::reserve(int nsq) {
  for (int d = static_cast<int>(table_.size()); d <= nsq; ++d) {
    table_.push_back(prefactor_ * v_hat(V_, kTwoPi * std::sqrt(static_cast<double>(d)) / L_));
  }
}

double ScaledVhat::operator()(int transfer_nsq) const {
  if (transfer_nsq < 0) throw ConfigError("negative momentum transfer");
  if (transfer_nsq < static_cast<int>(table_.size())) return table_[static_cast<std::size_t>(transfer_nsq)];
  return prefactor_ * v_hat(V_, kTwoPi * std::sqrt(static_cast<double>(transfer_nsq)) / L_);
}

double vn_element(const RadialPotential& V, long N, double kappa, const IVec3& k1, const IVec3& k2,
                  const IVec3& k3, const IVec3& k4) {
  check_torus_embedding(V, N, kappa);
  if (k1 + k2 != k3 + k4) return 0.0;
  const double L = length_scale(N, kappa);
  return v_hat(V, kTwoPi * std::sqrt(static_cast<double>(norm_sq(k1 - k3))) / L) / L;
}

SectorMatrix assemble_sector(const IVec3& P, const ModeSet& ms, const LowSet& low,
                             const ScaledVhat& vn) {
  SectorMatrix sm;
  Sector& s = sm.sector;
  s.P = P;
  s.N = vn.N();
  s.kappa = vn.kappa();
  for (const auto& m : ms.modes()) {
    const IVec3 l = P - m.n;
    if (!ms.contains(l)) continue;
    const bool lo = low.pair_low(m.n, l);
    (lo ? s.lo_idx : s.hi_idx).push_back(static_cast<int>(s.first.size()));
    s.first.push_back(m.n);
    s.lo_mask.push_back(lo);
    s.kinetic.push_back(kUnitPsq * (norm_sq(m.n) + norm_sq(l)));
  }
  const auto n = static_cast<Eigen::Index>(s.size());
  if (n == 0) throw ConfigError("sector " + format_ivec(P) + " has no pairs in the mode set");
  sm.M.resize(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j <= i; ++j) {
      const double v = vn(s.first[i] - s.first[j]);
      sm.M(i, j) = v;
      sm.M(j, i) = v;
    }
    sm.M(i, i) += s.kinetic[i];
  }
  return sm;
}

SectorKernel schur_renormalize(const SectorMatrix& sm, double residual_tol) {
  const Sector& s = sm.sector;
  const double L = length_scale(s.N, s.kappa);
  const auto nl = static_cast<Eigen::Index>(s.lo_idx.size());
  const auto nh = static_cast<Eigen::Index>(s.hi_idx.size());
  SectorKernel out;
  out.P = s.P;
  for (int i : s.lo_idx) out.low_first.push_back(s.first[i]);
  for (int i : s.hi_idx) out.high_first.push_back(s.first[i]);

  Eigen::MatrixXd VLL(nl, nl);
  for (Eigen::Index i = 0; i < nl; ++i)
    for (Eigen::Index j = 0; j < nl; ++j) {
      VLL(i, j) = sm.M(s.lo_idx[i], s.lo_idx[j]) - (i == j ? s.kinetic[s.lo_idx[i]] : 0.0);
    }
  if (nh == 0) {
    out.vren = L * VLL;
    out.eta.resize(0, nl);
    return out;
  }
  Eigen::MatrixXd A(nh, nh), B(nh, nl);
  for (Eigen::Index i = 0; i < nh; ++i) {
    for (Eigen::Index j = 0; j < nh; ++j) A(i, j) = sm.M(s.hi_idx[i], s.hi_idx[j]);
    for (Eigen::Index j = 0; j < nl; ++j) B(i, j) = sm.M(s.hi_idx[i], s.lo_idx[j]);
  }
  Eigen::LLT<Eigen::MatrixXd> llt(A);
  if (llt.info() != Eigen::Success) {
    throw NumericError("high block of sector " + format_ivec(s.P) + " is not positive definite");
  }
  Eigen::MatrixXd X = llt.solve(B);
  X += llt.solve(B - A * X);
  const Eigen::MatrixXd R = B - A * X;
  for (Eigen::Index j = 0; j < nl; ++j) {
    const double bn = B.col(j).norm();
    const double res = bn > 0.0 ? R.col(j).norm() / bn : R.col(j).norm();
    out.max_residual = std::max(out.max_residual, res);
  }
  if (!(out.max_residual <= residual_tol)) {
    throw NumericError("Schur solve residual " + std::to_string(out.max_residual) +
                       " above tolerance in sector " + format_ivec(s.P));
  }
  Eigen::MatrixXd S = VLL - B.transpose() * X;
  out.vren = L * 0.5 * (S + S.transpose());
  out.eta = L * X;
  return out;
}

RenormKernel::RenormKernel(KernelKind kind, ModeSet ambient, LowSet low, long N, double kappa,
                           std::vector<SectorKernel> sectors)
    : kind_(kind), ambient_(std::move(ambient)), low_(std::move(low)), N_(N), kappa_(kappa),
      sectors_(std::move(sectors)) {
  std::sort(sectors_.begin(), sectors_.end(),
            [](const SectorKernel& a, const SectorKernel& b) { return mode_less(a.P, b.P); });
  for (const auto& sk : sectors_) {
    Index ix;
    ix.lo_pos.assign(ambient_.size(), -1);
    ix.hi_pos.assign(ambient_.size(), -1);
    for (std::size_t i = 0; i < sk.low_first.size(); ++i) {
      const int m = ambient_.index_of(sk.low_first[i]);
      if (m < 0) throw ConfigError("kernel low pair outside the ambient mode set");
      ix.lo_pos[m] = static_cast<int>(i);
    }
    for (std::size_t i = 0; i < sk.high_first.size(); ++i) {
      const int m = ambient_.index_of(sk.high_first[i]);
      if (m < 0) throw ConfigError("kernel high pair outside the ambient mode set");
      ix.hi_pos[m] = static_cast<int>(i);
    }
    index_.push_back(std::move(ix));
  }
}

std::string RenormKernel::kind_name() const {
  switch (kind_) {
    case KernelKind::ModelConsistent: return "model-consistent";
    case KernelKind::Truncated: return "truncated";
    case KernelKind::Resolvent: return "resolvent";
  }
  return "unknown";
}

const SectorKernel* RenormKernel::find_sector(const IVec3& P) const {
  auto it = std::lower_bound(sectors_.begin(), sectors_.end(), P,
                             [](const SectorKernel& a, const IVec3& p) { return mode_less(a.P, p); });
  if (it == sectors_.end() || it->P != P) return nullptr;
  return &*it;
}

double RenormKernel::vren(const IVec3& k1, const IVec3& k2, const IVec3& k3,
                          const IVec3& k4) const {
  if (k1 + k2 != k3 + k4) return 0.0;
  const SectorKernel* sk = find_sector(k3 + k4);
  if (!sk || !low_.pair_low(k1, k2) || !low_.pair_low(k3, k4)) {
    throw LookupError("V_ren requested outside the low block: (" + format_ivec(k1) + "; " +
                      format_ivec(k2) + " | " + format_ivec(k3) + "; " + format_ivec(k4) + ")");
  }
  const Index& ix = index_[static_cast<std::size_t>(sk - sectors_.data())];
  return sk->vren(ix.lo_pos[ambient_.index_of(k1)], ix.lo_pos[ambient_.index_of(k3)]);
}

double RenormKernel::eta(const IVec3& k1, const IVec3& k2, const IVec3& k3,
                         const IVec3& k4) const {
  if (k1 + k2 != k3 + k4) return 0.0;
  if (!low_.pair_low(k3, k4) || low_.pair_low(k1, k2)) return 0.0;
  const SectorKernel* sk = find_sector(k3 + k4);
  const Index& ix = index_[static_cast<std::size_t>(sk - sectors_.data())];
  const int m = ambient_.index_of(k1);
  const int row = m < 0 ? -1 : ix.hi_pos[m];
  if (row < 0) {
    throw LookupError("eta requested for a high pair outside the tabulated set: (" +
                      format_ivec(k1) + "; " + format_ivec(k2) + ")");
  }
  return sk->eta(row, ix.lo_pos[ambient_.index_of(k3)]);
}

double RenormKernel::max_residual() const {
  double r = 0.0;
  for (const auto& sk : sectors_) r = std::max(r, sk.max_residual);
  return r;
}

RenormKernel build_kernel(const ModeSet& ambient, const LowSet& low, const ScaledVhat& vn,
                          KernelKind kind) {
  ScaledVhat table = vn;
  table.reserve(4 * ambient.max_nsq());
  const auto sectors = enumerate_sectors(low);
  std::vector<SectorKernel> out(sectors.size());
  std::exception_ptr err;
#pragma omp parallel for schedule(dynamic)
  for (std::size_t i = 0; i < sectors.size(); ++i) {
    try {
      out[i] = schur_renormalize(assemble_sector(sectors[i], ambient, low, table));
    } catch (...) {
#pragma omp critical
      if (!err) err = std::current_exception();
    }
  }
  if (err) std::rethrow_exception(err);
  return RenormKernel(kind, ambient, low, vn.N(), vn.kappa(), std::move(out));
}

RenormKernel build_resolvent_kernel(const RadialPotential& V, const ScatteringData& sd, long N,
                                    double kappa, const LowSet& low, const ModeSet& eta_table) {
  check_torus_embedding(V, N, kappa);
  const double L = length_scale(N, kappa);
  const double s = sd.eight_pi_a;
  std::map<int, double> vf_cache;  // keyed by |2 n_k - n_P|^2
  std::vector<SectorKernel> out;
  for (const auto& P : enumerate_sectors(low)) {
    SectorKernel sk;
    sk.P = P;
    const double denom = 1.0 + s * sector_green_constant(P, low) / L;
    if (!(denom > 0.0)) {
      throw NumericError("resolvent denominator non-positive in sector " + format_ivec(P));
    }
    std::vector<double> row_value;
    for (const auto& m : eta_table.modes()) {
      const IVec3 l = P - m.n;
      if (!eta_table.contains(l)) continue;
      if (low.pair_low(m.n, l)) {
        sk.low_first.push_back(m.n);
        continue;
      }
      const IVec3 twice_q = m.n + m.n - P;
      const int key = norm_sq(twice_q);
      auto it = vf_cache.find(key);
      if (it == vf_cache.end()) {
        const double q = 0.5 * kTwoPi * std::sqrt(static_cast<double>(key));
        it = vf_cache.emplace(key, vf_hat(sd, V, q / L)).first;
      }
      const double kin = kUnitPsq * (norm_sq(m.n) + norm_sq(l));
      sk.high_first.push_back(m.n);
      row_value.push_back(it->second / (denom * kin));
    }
    const auto nl = static_cast<Eigen::Index>(sk.low_first.size());
    sk.vren = Eigen::MatrixXd::Constant(nl, nl, s / denom);
    sk.eta.resize(static_cast<Eigen::Index>(row_value.size()), nl);
    for (std::size_t i = 0; i < row_value.size(); ++i) sk.eta.row(i).setConstant(row_value[i]);
    out.push_back(std::move(sk));
  }
  return RenormKernel(KernelKind::Resolvent, eta_table, low, N, kappa, std::move(out));
}

double ZeroChannel::eta_weighted_sup() const {
  double sup = 0.0;
  for (std::size_t i = 0; i < eta.size(); ++i) sup = std::max(sup, std::abs(eta[i]) * kinetic[i]);
  return sup;
}

ZeroChannel zero_channel_renormalize(const ScaledVhat& vn, const LowSet& low, double cutoff,
                                     std::size_t max_modes) {
  const ModeSet ms = build_mode_set(cutoff, max_modes);
  ScaledVhat table = vn;
  table.reserve(4 * ms.max_nsq());

  std::map<IVec3, int> orbit_of_key;
  std::vector<IVec3> reps;
  std::vector<int> sizes;
  std::vector<int> oid(ms.size());
  for (std::size_t i = 0; i < ms.size(); ++i) {
    const IVec3 key = cubic_orbit_key(ms[i].n);
    auto [it, fresh] = orbit_of_key.emplace(key, static_cast<int>(reps.size()));
    if (fresh) {
      reps.push_back(ms[i].n);
      sizes.push_back(0);
    }
    oid[i] = it->second;
    ++sizes[it->second];
  }
  const auto no = static_cast<Eigen::Index>(reps.size());
  if (no > 20000) {
    throw ResourceError("symmetric channel has " + std::to_string(no) + " orbits, limit 20000");
  }
  Eigen::MatrixXd M = Eigen::MatrixXd::Zero(no, no);
#pragma omp parallel for schedule(dynamic)
  for (Eigen::Index a = 0; a < no; ++a) {
    for (std::size_t k = 0; k < ms.size(); ++k) M(a, oid[k]) += table(reps[a] - ms[k].n);
    for (Eigen::Index b = 0; b < no; ++b) M(a, b) *= std::sqrt(double(sizes[a]) / sizes[b]);
    M(a, a) += 2.0 * kUnitPsq * norm_sq(reps[a]);
  }

  std::vector<Eigen::Index> hi;
  for (Eigen::Index a = 0; a < no; ++a)
    if (!low.contains(reps[a])) hi.push_back(a);
  const auto nh = static_cast<Eigen::Index>(hi.size());
  const double L = vn.L();
  ZeroChannel zc;
  zc.modes = ms.size();
  zc.cutoff = cutoff;
  if (nh == 0) {
    zc.vren00 = L * M(0, 0);
    return zc;
  }
  Eigen::MatrixXd A(nh, nh);
  Eigen::VectorXd b(nh);
  for (Eigen::Index i = 0; i < nh; ++i) {
    b(i) = M(hi[i], 0);
    for (Eigen::Index j = 0; j < nh; ++j) A(i, j) = M(hi[i], hi[j]);
  }
  Eigen::LLT<Eigen::MatrixXd> llt(A);
  if (llt.info() != Eigen::Success) throw NumericError("symmetric-channel block not positive definite");
  Eigen::VectorXd x = llt.solve(b);
  x += llt.solve(b - A * x);
  zc.max_residual = (b - A * x).norm() / std::max(b.norm(), 1e-300);
  zc.vren00 = L * (M(0, 0) - b.dot(x));
  for (Eigen::Index i = 0; i < nh; ++i) {
    const auto a = hi[i];
    zc.orbit_rep.push_back(reps[a]);
    zc.orbit_size.push_back(sizes[a]);
    zc.eta.push_back(L * x(i) / std::sqrt(double(sizes[a])));
    zc.kinetic.push_back(2.0 * kUnitPsq * norm_sq(reps[a]));
  }
  return zc;
}

double ambient_cutoff(double factor, const RadialPotential& V, long N, double kappa) {
  if (!(factor > 0.0)) throw ConfigError("cutoff factor must be > 0");
  return factor * length_scale(N, kappa) / V.support_radius();
}

KernelBounds verify_kernel_bounds(const RenormKernel& kernel, const ScatteringData& sd,
                                  double alpha) {
  KernelBounds kb;
  const double Nd = static_cast<double>(kernel.N());
  const double scale = std::pow(Nd, kernel.kappa() - 1.0);
  const double na = std::pow(Nd, alpha);
  for (const auto& sk : kernel.sectors()) {
    const auto nl = sk.low_first.size();
    for (std::size_t i = 0; i < nl; ++i) {
      const IVec3 k1 = sk.low_first[i], k2 = sk.P - k1;
      for (std::size_t j = 0; j < nl; ++j) {
        const IVec3 k3 = sk.low_first[j], k4 = sk.P - k3;
        const double v = sk.vren(i, j);
        const double ksum = kUnitPsq * (norm_sq(k1) + norm_sq(k2) + norm_sq(k3) + norm_sq(k4));
        kb.sup_vren = std::max(kb.sup_vren, std::abs(v));
        kb.sup_vren_C =
            std::max(kb.sup_vren_C, std::abs(v - sd.eight_pi_a) / (scale * (na + ksum / na)));
        ++kb.low_quadruples;
      }
    }
    for (std::size_t h = 0; h < sk.high_first.size(); ++h) {
      const IVec3 k1 = sk.high_first[h];
      const double kin = kUnitPsq * (norm_sq(k1) + norm_sq(sk.P - k1));
      for (std::size_t j = 0; j < nl; ++j) {
        kb.sup_eta = std::max(kb.sup_eta, std::abs(sk.eta(h, j)) * kin);
        ++kb.eta_elements;
      }
    }
  }
  return kb;
}

LhyReport lhy_refinement(const RenormKernel& kernel, const ScatteringData& sd) {
  const IVec3 zero{0, 0, 0};
  LhyReport r;
  const double s = sd.eight_pi_a;
  r.lhs = kernel.vren(zero, zero, zero, zero) - s;
  double sum = 0.0;
  for (const auto& m : kernel.low().members()) {
    if (m != zero) sum += s * s / (kUnitPsq * norm_sq(m));
  }
  r.correction = 0.5 * sum / length_scale(kernel.N(), kernel.kappa());
  r.residual = r.lhs - r.correction;
  return r;
}

SchurEigenCheck schur_lowest_eigenvalue(const SectorMatrix& sm) {
  const Sector& s = sm.sector;
  SchurEigenCheck out;
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> full(sm.M, Eigen::EigenvaluesOnly);
  out.direct = full.eigenvalues()(0);

  const auto nl = static_cast<Eigen::Index>(s.lo_idx.size());
  const auto nh = static_cast<Eigen::Index>(s.hi_idx.size());
  Eigen::MatrixXd D(nl, nl), A(nh, nh), B(nh, nl);
  for (Eigen::Index i = 0; i < nl; ++i)
    for (Eigen::Index j = 0; j < nl; ++j) D(i, j) = sm.M(s.lo_idx[i], s.lo_idx[j]);
  for (Eigen::Index i = 0; i < nh; ++i) {
    for (Eigen::Index j = 0; j < nh; ++j) A(i, j) = sm.M(s.hi_idx[i], s.hi_idx[j]);
    for (Eigen::Index j = 0; j < nl; ++j) B(i, j) = sm.M(s.hi_idx[i], s.lo_idx[j]);
  }
  if (nl == 0) return out;
  if (nh == 0) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(D, Eigen::EigenvaluesOnly);
    out.schur = es.eigenvalues()(0);
    out.bracketed = true;
    return out;
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> ea(A, Eigen::EigenvaluesOnly);
  const double top = ea.eigenvalues()(0);
  auto h = [&](double E) {
    Eigen::MatrixXd shifted = A - E * Eigen::MatrixXd::Identity(nh, nh);
    Eigen::MatrixXd S = D - B.transpose() * shifted.llt().solve(B);
    S = 0.5 * (S + S.transpose());
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(S, Eigen::EigenvaluesOnly);
    return es.eigenvalues()(0) - E;
  };
  // h is strictly decreasing below the spectrum of A; bracket its root.
  double lo = -(sm.M.cwiseAbs().rowwise().sum().maxCoeff() + 1.0);
  double hi = top - 1e-12 * std::max(1.0, std::abs(top));
  if (!(h(lo) > 0.0) || !(h(hi) < 0.0)) return out;
  for (int it = 0; it < 200 && hi - lo > 1e-15 * std::max(1.0, std::abs(hi)); ++it) {
    const double mid = 0.5 * (lo + hi);
    (h(mid) > 0.0 ? lo : hi) = mid;
  }
  out.schur = 0.5 * (lo + hi);
  out.bracketed = true;
  return out;
}

double bosonic_pair_ground_energy(const ModeSet& ms, const ScaledVhat& vn) {
  ScaledVhat table = vn;
  table.reserve(4 * ms.max_nsq());
  std::map<IVec3, std::vector<std::pair<int, int>>, decltype(&mode_less)> sectors(&mode_less);
  for (std::size_t i = 0; i < ms.size(); ++i)
    for (std::size_t j = i; j < ms.size(); ++j)
      sectors[ms[i].n + ms[j].n].emplace_back(static_cast<int>(i), static_cast<int>(j));

  double best = std::numeric_limits<double>::infinity();
  for (const auto& [P, pairs] : sectors) {
    const auto n = static_cast<Eigen::Index>(pairs.size());
    Eigen::MatrixXd H(n, n);
    auto orderings = [&](const std::pair<int, int>& pr) {
      std::vector<std::pair<IVec3, IVec3>> o{{ms[pr.first].n, ms[pr.second].n}};
      if (pr.first != pr.second) o.emplace_back(ms[pr.second].n, ms[pr.first].n);
      return o;
    };
    for (Eigen::Index a = 0; a < n; ++a) {
      const auto oa = orderings(pairs[a]);
      for (Eigen::Index b = 0; b < n; ++b) {
        const auto ob = orderings(pairs[b]);
        double sum = 0.0;
        for (const auto& [k1, k2] : oa)
          for (const auto& [k3, k4] : ob) {
            sum += table(k1 - k3);
            if (k1 == k3 && k2 == k4) sum += kUnitPsq * (norm_sq(k1) + norm_sq(k2));
          }
        H(a, b) = sum / std::sqrt(double(oa.size() * ob.size()));
      }
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(H, Eigen::EigenvaluesOnly);
    best = std::min(best, es.eigenvalues()(0));
  }
  return best;
}

void write_kernel_csv(const RenormKernel& kernel, const std::filesystem::path& path) {
  CsvWriter w(path);
  w.row({"P", "k1", "k2", "k3", "k4", "value", "kind"});
  for (const auto& sk : kernel.sectors()) {
    for (std::size_t i = 0; i < sk.low_first.size(); ++i)
      for (std::size_t j = 0; j < sk.low_first.size(); ++j) {
        w.row({format_ivec(sk.P), format_ivec(sk.low_first[i]), format_ivec(sk.P - sk.low_first[i]),
               format_ivec(sk.low_first[j]), format_ivec(sk.P - sk.low_first[j]),
               format_double(sk.vren(i, j)), "vren"});
      }
    for (std::size_t h = 0; h < sk.high_first.size(); ++h)
      for (std::size_t j = 0; j < sk.low_first.size(); ++j) {
        w.row({format_ivec(sk.P), format_ivec(sk.high_first[h]), format_ivec(sk.P - sk.high_first[h]),
               format_ivec(sk.low_first[j]), format_ivec(sk.P - sk.low_first[j]),
               format_double(sk.eta(h, j)), "eta"});
      }
  }
}

}  // namespace bosegas
