#include "ist/evolution.hpp"

#include <cmath>

#include "ist/errors.hpp"

namespace ist {

ScatteringData evolve(const ScatteringData& sd, double t1, double exponent_cap) {
  if (!std::isfinite(t1)) throw ValidationError("evolve: t1 must be finite");
  if (!sd.dispersion.is_polynomial())
    throw NotPolynomial("evolve: evolution factors need a polynomial A0");
  if (sd.dispersion.effective_degree() < 1)
    throw ValidationError("evolve: dispersion effective degree must be >= 1");
  const double dt = t1 - sd.t;
  ScatteringData out = sd;
  out.t = t1;
  if (dt == 0.0) return out;

  for (std::size_t k = 0; k < sd.lambda_grid.size(); ++k) {
    Complex a0 = sd.dispersion.eval(Complex(sd.lambda_grid[k], 0.0));
    out.b[k] = sd.b[k] * std::exp(-2.0 * a0 * dt);
    out.b_bar[k] = sd.b_bar[k] * std::exp(2.0 * a0 * dt);
  }
  for (auto& s : out.bound_states) {
    Complex a0 = sd.dispersion.eval(s.lambda);
    Complex expo = (s.half_plane == HalfPlane::Upper ? -2.0 : 2.0) * a0 * dt;
    if (std::abs(expo) > exponent_cap)
      throw Overflow("evolve: bound-state growth factor exceeds exponent cap");
    s.norming *= std::exp(expo);
  }
  return out;
}

}  // namespace ist
