#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <vector>

#include "bosegas/kernels.hpp"
#include "bosegas/lattice.hpp"
#include "bosegas/twobody.hpp"

namespace bosegas {

using StateVector = std::vector<double>;

/// Number of N-boson occupation states over M modes, C(N+M-1, N). Throws
/// ResourceError on 64-bit overflow.
std::uint64_t fock_dimension(std::size_t M, int N);

/// Occupation basis over a ModeSet. A state with occupied mode indices
/// i_0 <= ... <= i_{N-1} maps to the combination c_j = i_j + j and is ranked
/// colexicographically, rank = sum_j C(c_j, j+1). With a total-momentum filter
/// only states of that momentum are kept, in rank order.
class FockBasis {
 public:
  static constexpr std::uint64_t kDefaultMaxDim = 2000000;

  FockBasis(ModeSet ms, int N, std::uint64_t max_dim = kDefaultMaxDim);
  FockBasis(ModeSet ms, int N, const IVec3& total_momentum,
            std::uint64_t max_dim = kDefaultMaxDim);

  std::size_t dim() const { return dim_; }
  int N() const { return N_; }
  std::size_t M() const { return ms_.size(); }
  const ModeSet& modes() const { return ms_; }
  const std::optional<IVec3>& sector() const { return sector_; }

  const std::uint8_t* occupation(std::size_t i) const { return occ_.data() + i * M(); }
  std::uint64_t rank(const std::uint8_t* occ) const;
  void unrank(std::uint64_t r, std::uint8_t* occ) const;
  /// Basis position of an occupation vector, -1 if it is not in the basis.
  std::int64_t index_of(const std::uint8_t* occ) const;

 private:
  void build(std::uint64_t max_dim);
  std::uint64_t binom(std::size_t n, std::size_t k) const { return binom_[n * (N_ + 1) + k]; }

  ModeSet ms_;
  int N_;
  std::optional<IVec3> sector_;
  std::size_t dim_ = 0;
  std::vector<std::uint64_t> binom_;
  std::vector<std::uint8_t> occ_;
  std::vector<std::uint64_t> ranks_;  // only with a sector filter
};

/// H_N = sum_r |r|^2 a*_r a_r + (N^kappa / 2N) sum V_hat(r/L) a*_{p+r} a*_{q-r} a_p a_q
/// with every index in the basis ModeSet. `vn` must be built for the same N.
CsrMatrix build_hamiltonian(const FockBasis& basis, const ScaledVhat& vn);

/// Diagonal kinetic operator K restricted to nonzero modes.
CsrMatrix build_kinetic(const FockBasis& basis);

struct LanczosOptions {
  double tol = 1e-9;
  int krylov = 120;
  int max_restarts = 200;
  std::uint64_t seed = 20240611;
  bool parallel = true;
};

struct GroundState {
  double energy = 0.0;
  StateVector psi;
  double residual = 0.0;  // ||H psi - E psi||
  double gap = 0.0;       // second Ritz value minus the first, inf if unknown
  bool degenerate = false;
  int iterations = 0;
};

/// Lowest eigenpair by restarted Lanczos with full reorthogonalization.
/// Throws NumericError if the residual stays above tol * max(1, |E|).
GroundState ground_state(const CsrMatrix& H, const LanczosOptions& opts = {});

double expectation(const CsrMatrix& A, const StateVector& psi, bool parallel = true);

struct Observables {
  double energy = 0.0;
  double kinetic = 0.0;
  double n_plus = 0.0;
  double n_above = 0.0;  // <N_{>zeta}>
  double zeta = 0.0;
  double condensate_fraction = 0.0;
  double depletion = 0.0;  // <N_+> / N
  std::vector<double> gamma1_diag;
};

Observables observables(const StateVector& psi, const FockBasis& basis, const CsrMatrix& H,
                        double zeta);

/// Sum_r |r|^2 n_r of a basis state.
double state_kinetic(const FockBasis& basis, std::size_t i);
/// Number of particles in modes with |p| > zeta.
int state_count_above(const FockBasis& basis, std::size_t i, double zeta);

/// a_m psi, mapping `from` (N particles) into `to` (N-1 particles, same modes).
StateVector annihilate(const FockBasis& from, const FockBasis& to, int mode, const StateVector& psi);
/// a*_m psi, mapping `from` (N) into `to` (N+1).
StateVector create(const FockBasis& from, const FockBasis& to, int mode, const StateVector& psi);

/// d_r psi = N^{kappa-1} sum_{(p,q) in P_L^2} <p+q-r, r | eta | p, q> a*_{p+q-r} a_p a_q psi,
/// in the (N-1)-particle basis `to`. Throws ConfigError if the kernel was built on
/// a different mode set.
StateVector apply_cubic_d(const IVec3& r, const StateVector& psi, const FockBasis& from,
                          const FockBasis& to, const RenormKernel& kernel);

/// Seeded vector uniform on the unit sphere.
StateVector random_state(std::size_t dim, std::uint64_t seed);

/// Raw dump: dimension as uint64 then doubles, little-endian.
void write_state(const std::filesystem::path& path, const StateVector& psi);
StateVector read_state(const std::filesystem::path& path);

}  // namespace bosegas
