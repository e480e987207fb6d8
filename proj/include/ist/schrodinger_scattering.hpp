#ifndef IST_SCHRODINGER_SCATTERING_HPP
#define IST_SCHRODINGER_SCATTERING_HPP

#include <vector>

#include "ist/model.hpp"

namespace ist {

// Forward scattering for the KdV case r = -1, i.e. the Schroedinger equation
//   v'' + (lambda^2 + q) v = 0
// in the Faddeev normalization m1 = e^{-i lambda x} f1, m2 = e^{i lambda x} f2
// with m1 -> 1 at the right edge and m2 -> 1 at the left edge.

struct FaddeevPair {
  Complex lambda;  // Im >= 0
  std::vector<Complex> m1, m2;
};

// Marches the two Volterra problems (4th order in dx). Throws SingularLambda
// for |lambda| < 1e-8 and DivergedIntegration on overflow.
FaddeevPair faddeev_solve(const SampledPotential& p, Complex lambda);

// Scattering coefficients on a real grid excluding 0:
//   1/T  = 1 + (1/2 i lambda) Int q m1 dt   (cross-checked against the m2 route)
//   R1/T = (-1/2 i lambda) Int e^{-2 i lambda t} q m2 dt
//   R2/T = (-1/2 i lambda) Int e^{ 2 i lambda t} q m1 dt
// Returned with a = 1/T, b = R1/T, a_bar = 1/T, b_bar = R2/T.
ScatteringData kdv_coefficients(const SampledPotential& p,
                                const std::vector<double>& lambda_grid);

// 1/T at a single (possibly complex, Im >= 0) lambda, via the m1 route.
Complex kdv_inverse_transmission(const SampledPotential& p, Complex lambda);

// Zeros of 1/T on (0, i*beta_max]: bound states i*beta_n with norming
// constants c_n = (Int f1(x, i beta_n)^2 dx)^{-1}.
std::vector<BoundState> kdv_bound_states(const SampledPotential& p, double beta_max);

}  // namespace ist

#endif
