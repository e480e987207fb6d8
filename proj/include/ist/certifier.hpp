#ifndef IST_CERTIFIER_HPP
#define IST_CERTIFIER_HPP

#include <vector>

#include "ist/model.hpp"

namespace ist {

enum class Field { Q, R };

// Least-squares fit of log|field(x)| <= log C - c |x|^(1+delta) over the far
// tail on the chosen side, scanning delta in [0, 2] (step 0.01) and keeping
// the largest delta whose sup-norm log residual stays within 0.05 with c > 0.
// If no delta qualifies, the best-residual fit is returned and the caller
// judges it by the stored residual. Throws NoDecay when the tail has fewer
// than 16 positive samples beyond |x| >= 1 or is not eventually decreasing.
DecayEnvelope fit_envelope(const SampledPotential& p, Field field, Side side);

// Admissible window for the growth order rho of the extended coefficients:
// (1 + 1/min(delta, beta), d) for polynomial A0 of degree d. Nonempty iff
// min(delta, beta) * (d - 1) > 1, evaluated exactly. Throws NotPolynomial for
// rational dispersion.
CertificateReport rho_window(const DecayEnvelope& env_q,
                             const DecayEnvelope& env_r,
                             const DispersionSpec& dispersion);
// KdV form: only the q envelope enters.
CertificateReport rho_window(const DecayEnvelope& env_q,
                             const DispersionSpec& dispersion);

// Finite-radius proxy for the indicator function h_b(phi): along each ray
// re^{i phi}, |extend_b| is sampled at geometric radii over the largest
// attainable decade (the cap found by probing where the continuation's
// truncation check still passes) and max log|b| / r^rho is reported. Rays
// whose smallest probe already fails are returned with attained = false.
std::vector<IndicatorSample> indicator_estimate(const SampledPotential& p0,
                                                double rho,
                                                const std::vector<double>& angles);

// Full uniqueness-hypothesis check at two times: envelopes at t0
// and t1, the rho window against the dispersion, and (NLS) indicator samples.
// ConditionsMet means the hypotheses hold numerically; the conclusion
// (triviality) is then checked empirically and any mismatch is noted as a
// counterexample candidate, i.e. a numerical artifact.
CertificateReport certify(const SampledPotential& p0, const SampledPotential& p1,
                          const DispersionSpec& dispersion);

}  // namespace ist

#endif
