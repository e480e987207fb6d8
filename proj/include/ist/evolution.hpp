#ifndef IST_EVOLUTION_HPP
#define IST_EVOLUTION_HPP

#include "ist/model.hpp"

namespace ist {

// Exact evolution of scattering data under the dispersion A0 carried by sd:
//   a, a_bar and bound-state locations unchanged,
//   b      -> b      * e^{-2 A0(lambda) (t1 - t)},
//   b_bar  -> b_bar  * e^{+2 A0(lambda) (t1 - t)},
//   upper-state norming -> m_k    * e^{-2 A0(lambda_k) dt},
//   lower-state norming -> m_bk   * e^{+2 A0(lambda_bk) dt}.
// Requires a polynomial dispersion of effective degree >= 1. Throws Overflow
// if any bound-state exponent magnitude exceeds the cap.
ScatteringData evolve(const ScatteringData& sd, double t1,
                      double exponent_cap = 600.0);

}  // namespace ist

#endif
