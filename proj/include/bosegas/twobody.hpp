#pragma once

#include <Eigen/Dense>
#include <filesystem>
#include <string>
#include <utility>
#include <vector>

#include "bosegas/lattice.hpp"
#include "bosegas/potential.hpp"

namespace bosegas {

/// L = N^{1-kappa}, the inverse interaction range on the unit torus.
double length_scale(long N, double kappa);

/// Throws ConfigError unless support_radius * N^{kappa-1} < 1/2.
void check_torus_embedding(const RadialPotential& V, long N, double kappa);

/// N^{kappa-1} V_hat(2 pi |d| / L), cached by the integer |d|^2 of the
/// momentum transfer; values past the cache are computed on the fly. Built
/// once per (V, N, kappa) and shared read-only.
class ScaledVhat {
 public:
  ScaledVhat(const RadialPotential& V, long N, double kappa, int max_transfer_sq = 0);

  double operator()(int transfer_nsq) const;
  double operator()(const IVec3& d) const { return (*this)(norm_sq(d)); }
  /// Grows the cache to cover |d|^2 <= nsq. Not thread safe.
  void reserve(int nsq);

  long N() const { return N_; }
  double kappa() const { return kappa_; }
  double L() const { return L_; }
  const RadialPotential& potential() const { return V_; }

 private:
  RadialPotential V_;
  long N_;
  double kappa_, L_, prefactor_;
  std::vector<double> table_;
};

/// <k1 k2 | V_N | k3 k4> = delta_{k1+k2,k3+k4} N^{kappa-1} V_hat(|k1-k3|/L).
double vn_element(const RadialPotential& V, long N, double kappa, const IVec3& k1, const IVec3& k2,
                  const IVec3& k3, const IVec3& k4);

/// Ordered pairs (k, P-k) with both members in the ambient set.
struct Sector {
  IVec3 P{};
  std::vector<IVec3> first;     // k of each pair
  std::vector<char> lo_mask;    // both members in P_L
  std::vector<double> kinetic;  // |k|^2 + |P-k|^2
  std::vector<int> lo_idx, hi_idx;
  long N = 0;
  double kappa = 0.0;

  std::size_t size() const { return first.size(); }
  IVec3 second(std::size_t i) const { return P - first[i]; }
};

struct SectorMatrix {
  Sector sector;
  Eigen::MatrixXd M;  // kinetic + V_N over the pair basis
};

SectorMatrix assemble_sector(const IVec3& P, const ModeSet& ms, const LowSet& low,
                             const ScaledVhat& vn);

/// Renormalized blocks of one sector: vren over low x low, eta over high x low.
struct SectorKernel {
  IVec3 P{};
  std::vector<IVec3> low_first, high_first;
  Eigen::MatrixXd vren;
  Eigen::MatrixXd eta;
  double max_residual = 0.0;  // worst relative residual of the H-block solves
};

/// eta = L A^{-1} B and V_ren = L (V_LL - B^T A^{-1} B) with A the high block of
/// the sector matrix and B the high x low block of V_N. Dense Cholesky plus
/// one refinement step; throws NumericError if A is not positive definite
/// or a column residual exceeds `residual_tol`.
SectorKernel schur_renormalize(const SectorMatrix& sm, double residual_tol = 1e-10);

enum class KernelKind { ModelConsistent, Truncated, Resolvent };

/// Renormalized two-body kernel over all sectors reachable from P_L^2.
class RenormKernel {
 public:
  RenormKernel(KernelKind kind, ModeSet ambient, LowSet low, long N, double kappa,
               std::vector<SectorKernel> sectors);

  /// <k1 k2 | V_ren | k3 k4>. Zero off momentum conservation; LookupError
  /// unless both pairs are low.
  double vren(const IVec3& k1, const IVec3& k2, const IVec3& k3, const IVec3& k4) const;
  /// <k1 k2 | eta | k3 k4>. Zero off momentum conservation and outside
  /// high x low; LookupError if the high pair is not tabulated.
  double eta(const IVec3& k1, const IVec3& k2, const IVec3& k3, const IVec3& k4) const;

  KernelKind kind() const { return kind_; }
  std::string kind_name() const;
  const ModeSet& ambient() const { return ambient_; }
  const LowSet& low() const { return low_; }
  long N() const { return N_; }
  double kappa() const { return kappa_; }
  const std::vector<SectorKernel>& sectors() const { return sectors_; }
  /// nullptr when P is not a low sector.
  const SectorKernel* find_sector(const IVec3& P) const;
  double max_residual() const;

 private:
  struct Index {
    std::vector<int> lo_pos, hi_pos;  // ambient mode index -> row/col, -1 if absent
  };
  KernelKind kind_;
  ModeSet ambient_;
  LowSet low_;
  long N_;
  double kappa_;
  std::vector<SectorKernel> sectors_;
  std::vector<Index> index_;
};

/// Dense Schur route over every low sector, with `ambient` as the truncation of
/// the high block. Sectors run in parallel.
RenormKernel build_kernel(const ModeSet& ambient, const LowSet& low, const ScaledVhat& vn,
                          KernelKind kind = KernelKind::Truncated);

/// Untruncated route for large N: the high-block resolvent is rewritten by
/// the push-through identity around the zero-energy scattering solution, which
/// leaves the lattice pair Green's function of each sector. Low elements of
/// sector P equal s / (1 + s c_P / L) with s = int V f; eta rows are
/// V f_hat(|q|/L) / ((1 + s c_P / L) (|k|^2 + |P-k|^2)), q = k - P/2. Eta is
/// tabulated on the high pairs of `eta_table`.
RenormKernel build_resolvent_kernel(const RadialPotential& V, const ScatteringData& sd, long N,
                                    double kappa, const LowSet& low, const ModeSet& eta_table);

/// Sector 0 restricted to pairs (k, -k) that are symmetric under the cubic
/// group, i.e. the (0,0) column of the Schur complement. Exact for that column
/// since V_N couples (0,0) only to the symmetric channel.
struct ZeroChannel {
  double vren00 = 0.0;
  std::vector<IVec3> orbit_rep;      // high orbits only
  std::vector<int> orbit_size;
  std::vector<double> eta;           // eta(k,-k; 0,0) for k in the orbit
  std::vector<double> kinetic;       // 2|k|^2
  std::size_t modes = 0;
  double cutoff = 0.0;
  double max_residual = 0.0;

  /// sup of |eta| (|k|^2 + |-k|^2).
  double eta_weighted_sup() const;
};

ZeroChannel zero_channel_renormalize(const ScaledVhat& vn, const LowSet& low, double cutoff,
                                     std::size_t max_modes = 2000000);

/// Ambient truncation for asymptotic kernels: factor * L / support_radius.
double ambient_cutoff(double factor, const RadialPotential& V, long N, double kappa);

struct KernelBounds {
  double sup_vren = 0.0;       // sup over low quadruples of |V_ren|
  double sup_vren_C = 0.0;     // sup |V_ren - 8 pi a| / [N^{k-1}(N^a + N^{-a} sum |k_i|^2)]
  double sup_eta = 0.0;        // sup |eta| (|k1|^2 + |k2|^2)
  std::size_t low_quadruples = 0;
  std::size_t eta_elements = 0;
};

KernelBounds verify_kernel_bounds(const RenormKernel& kernel, const ScatteringData& sd,
                                  double alpha);

struct LhyReport {
  double lhs = 0.0;         // V_ren(00,00) - 8 pi a
  double correction = 0.0;  // (N^{k-1}/2) sum_{0 != s in P_L} (8 pi a)^2 / |s|^2
  double residual = 0.0;
};

LhyReport lhy_refinement(const RenormKernel& kernel, const ScatteringData& sd);

/// Lowest eigenvalue of a sector matrix two ways: dense diagonalization, and
/// the root of E = lambda_min(M_LL - B^T (A - E)^{-1} B) below the spectrum of A.
struct SchurEigenCheck {
  double direct = 0.0;
  double schur = 0.0;
  bool bracketed = false;
};

SchurEigenCheck schur_lowest_eigenvalue(const SectorMatrix& sm);

/// Lowest eigenvalue of kinetic + V_N on symmetric two-boson states
/// (|kl> + |lk>)/sqrt2, minimized over all total momenta of pairs in ms.
double bosonic_pair_ground_energy(const ModeSet& ms, const ScaledVhat& vn);

/// Rows: sector P, k1..k4, value, kind in {vren, eta}.
void write_kernel_csv(const RenormKernel& kernel, const std::filesystem::path& path);

}  // namespace bosegas
