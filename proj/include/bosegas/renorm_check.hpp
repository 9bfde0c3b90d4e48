#pragma once

#include <optional>
#include <string>
#include <vector>

#include "bosegas/fock.hpp"
#include "bosegas/twobody.hpp"

namespace bosegas {

struct CheckConfig {
  long N = 5;
  double kappa = 0.04;
  double epsilon = 0.05;
  double alpha = 0.0;
  double beta = 0.0;
  double delta = 0.0;
  bool exploratory = false;  // lifts the range checks below

  /// alpha = (1+eps) 41/10 kappa, beta = (1+eps) 5/2 kappa, delta midway in (kappa/2, alpha).
  static CheckConfig defaults(long N, double kappa = 0.04, double epsilon = 0.05);

  /// kappa in [0, 1/20), delta in (kappa/2, alpha), alpha in [0, 1-kappa], beta >= 0.
  /// Throws ConfigError naming the offending parameter.
  void validate() const;
};

struct GapReport {
  double lhs = 0.0;        // <H_N>
  double kinetic_c = 0.0;  // sum_{r != 0} |r|^2 ||c_r psi||^2
  double vren_term = 0.0;
  double rn_term = 0.0;
  double rn_direct = 0.0;  // R_N through ||d_r psi||^2, independent of rn_term
  double gap = 0.0;        // lhs - (kinetic_c + vren_term - rn_term)
  double dropped = 0.0;    // closed form of the gap: lift of S* Pi_H V_N Pi_H S
  bool asserted = false;   // model-consistent kernel
  bool holds = true;       // gap >= -tol max(1, |lhs|)
};

/// Expectations entering the many-body lower bound on states of one Fock
/// basis. Holds the bases with N-1, N-2, N-3 particles over the same modes.
class GapEvaluator {
 public:
  static constexpr double kGapTol = 1e-9;
  /// Operation budget for the sextic term.
  static constexpr double kDefaultCostLimit = 5e10;

  GapEvaluator(const FockBasis& basis, const RenormKernel& kernel, const ScaledVhat& vn,
               const CsrMatrix& H, double cost_limit = kDefaultCostLimit);

  double modified_kinetic(const StateVector& psi) const;
  double vren_expectation(const StateVector& psi) const;
  /// Sextic term from its normal-ordered form.
  double rn_expectation(const StateVector& psi) const;
  /// Same quantity as sum_r |r|^2 (||d_r psi||^2 - N^{2k-2} sum_m ||A_{r,m} psi||^2).
  double rn_expectation_direct(const StateVector& psi) const;
  double dropped_term(const StateVector& psi) const;

  /// All terms; never throws on a negative gap.
  GapReport evaluate(const StateVector& psi) const;

 private:
  struct PairVectors;
  PairVectors pair_vectors(const StateVector& psi) const;
  std::vector<StateVector> amplitudes_A(const PairVectors& y, const IVec3& r) const;

  const FockBasis& basis_;
  const RenormKernel& kernel_;
  ScaledVhat vn_;
  const CsrMatrix& H_;
  std::optional<FockBasis> b1_, b2_, b3_;
};

/// Evaluates and throws InvariantViolation when a model-consistent gap is negative.
GapReport lowerbound_gap(const GapEvaluator& ev, const StateVector& psi);

struct MarkovReport {
  std::size_t states = 0;
  std::size_t violations = 0;
  double max_ratio = 0.0;       // max count / (N^{-2 beta} K) over states with K > 0
  double expect_n_above = 0.0;  // on psi
  double expect_kinetic = 0.0;
  double expect_energy = 0.0;
  bool second_holds = true;     // N^{-2b} <K> <= N^{-2b} <H>
};

/// First inequality exhaustively over basis states; second in expectation on psi.
MarkovReport markov_check(const FockBasis& basis, const CheckConfig& cfg, const StateVector& psi,
                          const CsrMatrix& H);

struct AprioriRow {
  long N = 0;
  double n_above = 0.0;    // <N_{>N^beta}>
  double k_n_above = 0.0;  // N^{-1} <K N_{>N^beta}>
  double k_n2_above = 0.0; // N^{-2} <K N^2_{>N^beta}>
};

struct ExponentFit {
  std::string quantity;
  double fitted = 0.0;  // NaN when a value is not positive
  double bound = 0.0;
  bool within = true;   // fitted <= bound + tolerance
};

AprioriRow apriori_row(const FockBasis& basis, const StateVector& psi, double beta);

/// Least-squares slope of log y against log x; NaN if any y <= 0 or < 2 points.
double loglog_slope(const std::vector<double>& x, const std::vector<double>& y);

/// Fits the three quantities against N, compared with 1+k-2b,
/// max(1+2k-2b, 3k/2+b/2) and max(1+3k-4b, b+2k, 5k/2-3b/2).
std::vector<ExponentFit> apriori_fits(const std::vector<AprioriRow>& rows, double kappa,
                                      double beta, double tolerance = 0.3);

struct TheoremRow {
  long N = 0;
  std::size_t M = 0;
  double energy = 0.0;
  double energy_ratio = 0.0;  // E0 / (4 pi a N^{1+k}), NaN at a = 0
  double condensate_fraction = 0.0;
  double depletion = 0.0;
  double hartree_upper = 0.0;  // (N(N-1)/2) N^{k-1} V_hat(0)
  bool hartree_holds = true;
};

TheoremRow theorem_row(const FockBasis& basis, const GroundState& gs, const Observables& obs,
                       const ScaledVhat& vn, const ScatteringData& sd);

}  // namespace bosegas
