#include "bosegas/lattice_green.hpp"

#include <cmath>

namespace bosegas {

double pair_green_F(const IVec3& nP, double tau, int shells) {
  const double pi = std::numbers::pi;
  const double P[3] = {kTwoPi * nP[0], kTwoPi * nP[1], kTwoPi * nP[2]};
  const double m2 = (P[0] * P[0] + P[1] * P[1] + P[2] * P[2]) / 4.0;
  const double m = std::sqrt(m2);
  const double st = std::sqrt(tau);
  const double pref = std::pow(4.0 * pi, -1.5);

  double total = -2.0 / st * pref;
  const double J = -2.0 / st * (std::exp(-m2 * tau) - 1.0) - 2.0 * m * std::sqrt(pi) * std::erf(m * st);
  total += pref * J;

  for (int a = -shells; a <= shells; ++a) {
    for (int b = -shells; b <= shells; ++b) {
      for (int c = -shells; c <= shells; ++c) {
        if (a != 0 || b != 0 || c != 0) {
          const double r = std::sqrt(double(a * a + b * b + c * c));
          const int parity = nP[0] * a + nP[1] * b + nP[2] * c;
          const double chi = (parity % 2 == 0) ? 1.0 : -1.0;
          const double x = r / (2.0 * st);
          total += chi *
                   (std::exp(-m * r) * std::erfc(x - m * st) + std::exp(m * r) * std::erfc(x + m * st)) /
                   (8.0 * pi * r);
        }
        const double q[3] = {kTwoPi * a - P[0] / 2, kTwoPi * b - P[1] / 2, kTwoPi * c - P[2] / 2};
        const double d = q[0] * q[0] + q[1] * q[1] + q[2] * q[2] + m2;
        if (d == 0.0) continue;
        total += std::exp(-tau * d) / d;
      }
    }
  }
  if (m2 == 0.0) total -= tau;
  return total;
}

double sector_green_constant(const IVec3& nP, const LowSet& low) {
  double c = pair_green_F(nP) / 2.0;
  for (const auto& k : low.members()) {
    const IVec3 l = nP - k;
    if (!low.contains(l)) continue;
    const int kin = norm_sq(k) + norm_sq(l);
    if (kin == 0) continue;
    c -= 1.0 / (kUnitPsq * kin);
  }
  return c;
}

}  // namespace bosegas
