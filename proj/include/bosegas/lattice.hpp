#pragma once

#include <array>
#include <cstddef>
#include <numbers>
#include <vector>

namespace bosegas {

inline constexpr double kTwoPi = 2.0 * std::numbers::pi;
/// |p|^2 of the unit lattice vector, 4 pi^2.
inline constexpr double kUnitPsq = kTwoPi * kTwoPi;

/// Integer lattice coordinates n of a momentum p = 2 pi n on the unit torus.
using IVec3 = std::array<int, 3>;

constexpr IVec3 operator+(const IVec3& a, const IVec3& b) {
  return {a[0] + b[0], a[1] + b[1], a[2] + b[2]};
}
constexpr IVec3 operator-(const IVec3& a, const IVec3& b) {
  return {a[0] - b[0], a[1] - b[1], a[2] - b[2]};
}
constexpr IVec3 operator-(const IVec3& a) { return {-a[0], -a[1], -a[2]}; }
constexpr int norm_sq(const IVec3& a) { return a[0] * a[0] + a[1] * a[1] + a[2] * a[2]; }

/// Deterministic total order: by |n|^2, then lexicographic on n.
constexpr bool mode_less(const IVec3& a, const IVec3& b) {
  const int na = norm_sq(a), nb = norm_sq(b);
  return na != nb ? na < nb : a < b;
}

struct Mode {
  IVec3 n{};

  int nsq() const { return norm_sq(n); }
  /// |p|^2 = 4 pi^2 |n|^2.
  double psq() const { return kUnitPsq * nsq(); }
  std::array<double, 3> p() const { return {kTwoPi * n[0], kTwoPi * n[1], kTwoPi * n[2]}; }
  friend bool operator==(const Mode&, const Mode&) = default;
};

/// Finite, negation-closed set of lattice modes containing 0, sorted by
/// `mode_less`. Lookups by coordinates go through a dense cube table.
class ModeSet {
 public:
  static constexpr std::size_t kDefaultMaxModes = 200000;

  ModeSet() = default;
  /// Validates: contains 0, negation closed, no duplicates. Sorts.
  explicit ModeSet(std::vector<IVec3> modes);

  std::size_t size() const { return modes_.size(); }
  const Mode& operator[](std::size_t i) const { return modes_[i]; }
  const std::vector<Mode>& modes() const { return modes_; }

  /// Position of n, or -1 when absent.
  int index_of(const IVec3& n) const;
  bool contains(const IVec3& n) const { return index_of(n) >= 0; }

  /// max |p| over the set.
  double cutoff() const { return cutoff_; }
  int max_abs_coord() const { return nmax_; }
  int max_nsq() const { return modes_.empty() ? 0 : modes_.back().nsq(); }

  /// True if the set is invariant under all 48 signed permutations of axes.
  bool cubic_invariant() const;

  friend bool operator==(const ModeSet& a, const ModeSet& b) { return a.modes_ == b.modes_; }

 private:
  std::vector<Mode> modes_;
  std::vector<int> cube_;
  int nmax_ = 0;
  double cutoff_ = 0.0;
};

/// All lattice modes with |2 pi n| <= cutoff.
ModeSet build_mode_set(double cutoff, std::size_t max_modes = ModeSet::kDefaultMaxModes);

/// The first `count` modes in (|n|^2, +/- pair) order: 0, then whole
/// negation pairs ranked by |n|^2 and the lexicographically larger member.
/// `count` must be odd.
ModeSet build_mode_set_count(int count);

/// P_L = { p : |p| <= N^alpha }, stored by coordinates so it can be matched
/// against any ambient ModeSet.
class LowSet {
 public:
  LowSet() = default;
  /// `threshold_sq` is N^{2 alpha}; membership compares 4 pi^2 |n|^2 against it.
  LowSet(std::vector<IVec3> members, double threshold_sq);

  const std::vector<IVec3>& members() const { return members_; }
  std::size_t size() const { return members_.size(); }
  double threshold() const { return threshold_; }
  double threshold_sq() const { return threshold_sq_; }
  bool contains(const IVec3& n) const { return kUnitPsq * norm_sq(n) <= threshold_sq_; }
  bool pair_low(const IVec3& a, const IVec3& b) const { return contains(a) && contains(b); }
  bool is_trivial() const { return members_.size() == 1; }

 private:
  std::vector<IVec3> members_;
  double threshold_ = 0.0;
  double threshold_sq_ = 0.0;
};

/// Modes of `ms` with |p| <= N^alpha. Throws ConfigError if N^alpha exceeds
/// the truncation, i.e. if some lattice mode inside the ball is missing from
/// `ms`.
LowSet low_set(const ModeSet& ms, long N, double alpha);

/// Sorted, deduplicated {p + q : p, q in P_L}.
std::vector<IVec3> enumerate_sectors(const LowSet& low);

/// Canonical representative of the orbit of n under the cubic group:
/// absolute values sorted in decreasing order.
IVec3 cubic_orbit_key(const IVec3& n);

}  // namespace bosegas
