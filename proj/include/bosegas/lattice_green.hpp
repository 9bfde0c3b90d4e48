#pragma once

#include "bosegas/lattice.hpp"

namespace bosegas {

/// Regularized pair Green's function of total momentum P = 2 pi nP on the unit
/// torus:
///   F(P) = lim_{K->inf} [ sum_{q in 2piZ^3 - P/2, |q|<K} 1/(q^2 + m^2)
///                         - int_{|q|<K} d^3q/(2pi)^3 1/q^2 ],   m = |P|/2,
/// with the q = 0 term dropped when P = 0. Evaluated by Ewald splitting.
double pair_green_F(const IVec3& nP, double tau = 1.0 / (4.0 * std::numbers::pi),
                    int shells = 6);

/// c_P = F(P)/2 - sum over low pairs (k, P-k), k != P-k or kinetic > 0, of
/// 1/(|k|^2 + |P-k|^2). The low pairs are removed because the Schur
/// complement only resolves the high block.
double sector_green_constant(const IVec3& nP, const LowSet& low);

}  // namespace bosegas
