#ifndef IST_SOLITONS_HPP
#define IST_SOLITONS_HPP

#include <vector>

#include "ist/model.hpp"

namespace ist {

// Reflectionless closed forms from the determinant machinery: the NbarxNbar
// and NxN systems are assembled per x node and solved by LU (Cramer's rule as
// replaced-column linear solves), giving q(x) = -2 k1(x,x), r(x) = 2 kbar2(x,x).
// Time enters through the norming constants, m_k e^{-2 A0(lambda_k) t} and
// m_bar_k e^{+2 A0(lambda_bar_k) t}.
//
// upper: states with Im(lambda) > 0 (zeros of a), lower: Im < 0 (zeros of
// a_bar). Throws SingularDeterminant when either system's condition number
// exceeds 1e12.
SampledPotential soliton_potential(const std::vector<BoundState>& upper,
                                   const std::vector<BoundState>& lower,
                                   const DispersionSpec& dispersion, double x0,
                                   double dx, std::size_t n, double t);

// Slowest tail decay rate of the reflectionless potential: 2 * min |Im lambda|
// over all states (the surviving exponent of the one-term asymptotics).
// Throws EmptySpectrum when no states are given.
double asymptotic_envelope(const std::vector<BoundState>& upper,
                           const std::vector<BoundState>& lower);

}  // namespace ist

#endif
