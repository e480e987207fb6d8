#ifndef IST_PDE_ORACLE_HPP
#define IST_PDE_ORACLE_HPP

#include "ist/model.hpp"

namespace ist {

// Direct PDE integrators, independent of the scattering machinery, used as
// ground truth. Both operate on a zero-padded periodic box (next power of two
// past 1.5x the grid) at the potential's own spacing.

// Focusing NLS q_t = i q_xx + 2 i q^2 q* for the reduction r = -q*, split-step
// Fourier with Strang splitting; r is maintained as -q*. The mKdV reduction
// r = q (real) is dispatched to an integrating-factor RK4 for the defocusing
// q_t - 6 q^2 q_x + q_xxx = 0. Throws CflViolation when the pointwise
// nonlinear phase per step exceeds pi/4.
SampledPotential step_nls(const SampledPotential& p, double dt, int n_steps);

// KdV q_t + 6 q q_x + q_xxx = 0 (the normalization matching evolution under
// A0 = -4iz^3: norming growth e^{8 beta^3 t} translates the soliton at speed
// 4 beta^2), Fourier integrating-factor RK4. Throws CflViolation when the
// advective phase 6 max|q| k_max dt exceeds pi/4.
SampledPotential step_kdv(const SampledPotential& p, double dt, int n_steps);

}  // namespace ist

#endif
