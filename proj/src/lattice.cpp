#include "bosegas/lattice.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <set>
#include <string>

#include "bosegas/errors.hpp"

namespace bosegas {

ModeSet::ModeSet(std::vector<IVec3> modes) {
  std::sort(modes.begin(), modes.end(), mode_less);
  if (std::adjacent_find(modes.begin(), modes.end()) != modes.end()) {
    throw ConfigError("mode set contains duplicate modes");
  }
  if (modes.empty() || modes.front() != IVec3{0, 0, 0}) {
    throw ConfigError("mode set must contain the zero mode");
  }
  for (const auto& n : modes) {
    nmax_ = std::max({nmax_, std::abs(n[0]), std::abs(n[1]), std::abs(n[2])});
  }
  const int side = 2 * nmax_ + 1;
  cube_.assign(static_cast<std::size_t>(side) * side * side, -1);
  modes_.reserve(modes.size());
  for (const auto& n : modes) {
    const std::size_t slot =
        (static_cast<std::size_t>(n[0] + nmax_) * side + (n[1] + nmax_)) * side + (n[2] + nmax_);
    cube_[slot] = static_cast<int>(modes_.size());
    modes_.push_back(Mode{n});
  }
  for (const auto& m : modes_) {
    if (index_of(-m.n) < 0) throw ConfigError("mode set is not closed under negation");
  }
  cutoff_ = std::sqrt(modes_.back().psq());
}

int ModeSet::index_of(const IVec3& n) const {
  if (std::abs(n[0]) > nmax_ || std::abs(n[1]) > nmax_ || std::abs(n[2]) > nmax_) return -1;
  const int side = 2 * nmax_ + 1;
  return cube_[(static_cast<std::size_t>(n[0] + nmax_) * side + (n[1] + nmax_)) * side +
               (n[2] + nmax_)];
}

bool ModeSet::cubic_invariant() const {
  static constexpr std::array<std::array<int, 3>, 6> perms{
      {{0, 1, 2}, {0, 2, 1}, {1, 0, 2}, {1, 2, 0}, {2, 0, 1}, {2, 1, 0}}};
  for (const auto& m : modes_) {
    for (const auto& pm : perms) {
      for (int signs = 0; signs < 8; ++signs) {
        IVec3 g{};
        for (int i = 0; i < 3; ++i) g[i] = ((signs >> i) & 1 ? -1 : 1) * m.n[pm[i]];
        if (index_of(g) < 0) return false;
      }
    }
  }
  return true;
}

ModeSet build_mode_set(double cutoff, std::size_t max_modes) {
  if (!(cutoff >= 0.0) || !std::isfinite(cutoff)) {
    throw ConfigError("mode cutoff must be a finite non-negative number");
  }
  const double radius = cutoff / kTwoPi;
  const double estimate = 4.0 / 3.0 * std::numbers::pi * radius * radius * radius;
  if (estimate > 2.0 * static_cast<double>(max_modes) + 100.0) {
    throw ResourceError("mode cutoff " + std::to_string(cutoff) + " gives about " +
                        std::to_string(static_cast<long long>(estimate)) +
                        " modes, above the limit " + std::to_string(max_modes));
  }
  const int nmax = static_cast<int>(std::floor(radius)) + 1;
  const double cut_sq = cutoff * cutoff;
  std::vector<IVec3> modes;
  for (int a = -nmax; a <= nmax; ++a)
    for (int b = -nmax; b <= nmax; ++b)
      for (int c = -nmax; c <= nmax; ++c) {
        const IVec3 n{a, b, c};
        if (kUnitPsq * norm_sq(n) <= cut_sq) modes.push_back(n);
      }
  if (modes.size() > max_modes) {
    throw ResourceError("mode count " + std::to_string(modes.size()) + " exceeds the limit " +
                        std::to_string(max_modes));
  }
  return ModeSet(std::move(modes));
}

ModeSet build_mode_set_count(int count) {
  if (count < 1 || count % 2 == 0) {
    throw ConfigError("mode count must be odd (0 plus whole +/- pairs), got " +
                      std::to_string(count));
  }
  std::vector<IVec3> reps;
  for (int shell = 1; static_cast<int>(reps.size()) * 2 + 1 < count; ++shell) {
    const int r = static_cast<int>(std::ceil(std::sqrt(static_cast<double>(shell))));
    std::vector<IVec3> layer;
    for (int a = -r; a <= r; ++a)
      for (int b = -r; b <= r; ++b)
        for (int c = -r; c <= r; ++c) {
          const IVec3 n{a, b, c};
          if (norm_sq(n) == shell && n > -n) layer.push_back(n);
        }
    std::sort(layer.begin(), layer.end());
    reps.insert(reps.end(), layer.begin(), layer.end());
  }
  std::vector<IVec3> modes{{0, 0, 0}};
  for (int i = 0; static_cast<int>(modes.size()) < count; ++i) {
    modes.push_back(reps[i]);
    modes.push_back(-reps[i]);
  }
  return ModeSet(std::move(modes));
}

LowSet::LowSet(std::vector<IVec3> members, double threshold_sq)
    : members_(std::move(members)), threshold_(std::sqrt(threshold_sq)), threshold_sq_(threshold_sq) {
  std::sort(members_.begin(), members_.end(), mode_less);
}

LowSet low_set(const ModeSet& ms, long N, double alpha) {
  if (N < 1) throw ConfigError("N must be >= 1");
  if (!(alpha >= 0.0)) throw ConfigError("alpha must be >= 0");
  const double threshold_sq = std::pow(static_cast<double>(N), 2.0 * alpha);
  const double threshold = std::sqrt(threshold_sq);
  const int r = static_cast<int>(std::floor(threshold / kTwoPi)) + 1;
  std::vector<IVec3> members;
  for (int a = -r; a <= r; ++a)
    for (int b = -r; b <= r; ++b)
      for (int c = -r; c <= r; ++c) {
        const IVec3 n{a, b, c};
        if (kUnitPsq * norm_sq(n) > threshold_sq) continue;
        if (!ms.contains(n)) {
          throw ConfigError("low-momentum set |p| <= N^alpha = " + std::to_string(threshold) +
                            " does not fit inside the mode truncation (cutoff " +
                            std::to_string(ms.cutoff()) + ")");
        }
        members.push_back(n);
      }
  return LowSet(std::move(members), threshold_sq);
}

std::vector<IVec3> enumerate_sectors(const LowSet& low) {
  std::set<IVec3, decltype(&mode_less)> sums(&mode_less);
  for (const auto& p : low.members())
    for (const auto& q : low.members()) sums.insert(p + q);
  return {sums.begin(), sums.end()};
}

IVec3 cubic_orbit_key(const IVec3& n) {
  IVec3 k{std::abs(n[0]), std::abs(n[1]), std::abs(n[2])};
  std::sort(k.begin(), k.end(), std::greater<>());
  return k;
}

}  // namespace bosegas
