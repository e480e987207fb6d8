#ifndef IST_ZS_SCATTERING_HPP
#define IST_ZS_SCATTERING_HPP

#include <vector>

#include "ist/model.hpp"

namespace ist {

// Forward scattering for the Zakharov-Shabat system
//   v1x + i*lambda*v1 = q v2,   v2x - i*lambda*v2 = r v1.
// Jost solutions are integrated with the plane-wave oscillation factored out,
// so the marching is stable throughout the half plane of analyticity:
// Phi/Psi continue to Im(lambda) >= 0, PhiBar/PsiBar to Im(lambda) <= 0
// (a = W(phi, psi) is the function analytic in the upper half plane).

enum class JostKind { Phi, PhiBar, Psi, PsiBar };

struct JostSolution {
  Complex lambda;
  std::vector<Complex> phi1, phi2;  // raw components on the x-grid
  JostKind which = JostKind::Phi;
};

struct SearchBox {
  double re_lo, re_hi, im_lo, im_hi;
};

// Jost solution with the NLSEq-normalization at the appropriate grid edge.
// 4th order in dx. Throws DivergedIntegration if the reduced solution norm
// exceeds the overflow bound.
JostSolution jost_solve(const SampledPotential& p, Complex lambda, JostKind which);

// a(lambda) = W(phi, psi), continued into Im(lambda) >= 0.
Complex a_coefficient(const SampledPotential& p, Complex lambda);
// a_bar(lambda) = W(phi_bar, psi_bar), continued into Im(lambda) <= 0.
Complex a_bar_coefficient(const SampledPotential& p, Complex lambda);

// Wronskian route on a real grid: a = W(phi,psi), b = -W(phi,psi_bar),
// a_bar = W(phi_bar,psi_bar), b_bar = W(phi_bar,psi), evaluated at the right
// grid edge. bound_states left empty.
ScatteringData scattering_coefficients(const SampledPotential& p,
                                       const std::vector<double>& lambda_grid);

// Integral representation b(lambda) = Int e^{-i lambda y} r(y) phi1(y) dy,
// usable for Im(lambda) >= 0 when the decay of r dominates the e^{2 Im(lambda) y}
// growth at the right grid edge. Throws EnvelopeInsufficient otherwise.
Complex extend_b(const SampledPotential& p, Complex lambda);

// All zeros of a in the box (strictly inside the upper half plane), counted by
// argument-principle winding and refined by Newton to |a| < 1e-10. Norming
// constants are returned in the m_k convention (residue of b/a at lambda_k).
std::vector<BoundState> find_bound_states(const SampledPotential& p,
                                          const SearchBox& box);

// Mirror search: zeros of a_bar in the lower half plane, m_bar_k convention.
std::vector<BoundState> find_bound_states_lower(const SampledPotential& p,
                                                const SearchBox& box);

}  // namespace ist

#endif
