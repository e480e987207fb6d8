#include "ist/solitons.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <limits>

#include "ist/errors.hpp"

namespace ist {

namespace {

using Mat = Eigen::MatrixXcd;
using Vec = Eigen::VectorXcd;

void check_states(const std::vector<BoundState>& upper,
                  const std::vector<BoundState>& lower) {
  for (const auto& s : upper)
    if (!(s.lambda.imag() > 0.0))
      throw ValidationError("soliton states tagged Upper need Im(lambda) > 0");
  for (const auto& s : lower)
    if (!(s.lambda.imag() < 0.0))
      throw ValidationError("soliton states tagged Lower need Im(lambda) < 0");
  for (const auto& u : upper)
    for (const auto& l : lower)
      if (std::abs(u.lambda - l.lambda) < 1e-12)
        throw ValidationError("upper and lower eigenvalues must be disjoint");
}

// One refinement step; returns ||correction|| / (eps ||sol||) as an effective
// condition estimate. Raw rcond over-reports trouble in the far tails where
// the exponentials are huge but the solve direction is benign.
double refine_solve(const Eigen::PartialPivLU<Mat>& lu, const Mat& a,
                    const Vec& rhs, Vec& sol) {
  sol = lu.solve(rhs);
  Vec corr = lu.solve(rhs - a * sol);
  sol += corr;
  const double ns = std::max(sol.cwiseAbs().maxCoeff(), 1e-300);
  return corr.cwiseAbs().maxCoeff() / (ns * 1e-16);
}

}  // namespace

SampledPotential soliton_potential(const std::vector<BoundState>& upper,
                                   const std::vector<BoundState>& lower,
                                   const DispersionSpec& dispersion, double x0,
                                   double dx, std::size_t n, double t) {
  if (upper.empty() && lower.empty())
    throw EmptySpectrum("soliton_potential: no bound states given");
  if (!(dx > 0.0) || n < 8)
    throw ValidationError("soliton_potential: need dx > 0 and n >= 8");
  check_states(upper, lower);
  if (t != 0.0 && !dispersion.is_polynomial())
    throw NotPolynomial("soliton_potential: time evolution needs polynomial A0");

  const std::size_t nu = upper.size(), nl = lower.size();
  const Complex i(0.0, 1.0);

  // Time enters only through the norming constants.
  std::vector<Complex> lam(nu), mu(nu), lamb(nl), mub(nl);
  for (std::size_t k = 0; k < nu; ++k) {
    lam[k] = upper[k].lambda;
    mu[k] = upper[k].norming;
    if (t != 0.0) mu[k] *= std::exp(-2.0 * dispersion.eval(lam[k]) * t);
  }
  for (std::size_t k = 0; k < nl; ++k) {
    lamb[k] = lower[k].lambda;
    mub[k] = lower[k].norming;
    if (t != 0.0) mub[k] *= std::exp(2.0 * dispersion.eval(lamb[k]) * t);
  }

  SampledPotential out;
  out.x0 = x0;
  out.dx = dx;
  out.t = t;
  out.case_tag = CaseTag::NlsCase;
  out.q.assign(n, Complex(0.0, 0.0));
  out.r.assign(n, Complex(0.0, 0.0));

  Mat ap(nl, nl), aq(nu, nu);
  Vec rp(nl), rq(nu);
  for (std::size_t jx = 0; jx < n; ++jx) {
    const double x = x0 + dx * static_cast<double>(jx);

    std::vector<Complex> eu(nu), el(nl);  // e^{i lambda x} per state
    for (std::size_t k = 0; k < nu; ++k) eu[k] = std::exp(i * lam[k] * x);
    for (std::size_t k = 0; k < nl; ++k) el[k] = std::exp(i * lamb[k] * x);

    if (nl > 0) {
      for (std::size_t k = 0; k < nl; ++k) {
        for (std::size_t j = 0; j < nl; ++j) {
          Complex s(0.0, 0.0);
          for (std::size_t l = 0; l < nu; ++l)
            s += mu[l] * mub[k] * eu[l] * eu[l] / (el[k] * el[j]) /
                 ((lam[l] - lamb[k]) * (lam[l] - lamb[j]));
          // Coupling sign: eliminating Q from the P-equation picks up
          // (-1) from each semi-infinite exponential integral.
          ap(k, j) = (k == j ? 1.0 : 0.0) - s;
        }
        rp(k) = i * mub[k] / el[k];
      }
      Eigen::PartialPivLU<Mat> lu(ap);
      Vec p1;
      if (refine_solve(lu, ap, rp, p1) > 1e12)
        throw SingularDeterminant("soliton_potential: P-system singular");
      Complex k1(0.0, 0.0);
      for (std::size_t k = 0; k < nl; ++k) k1 += p1(k) / el[k];
      out.q[jx] = -2.0 * k1;
    }
    if (nu > 0) {
      for (std::size_t k = 0; k < nu; ++k) {
        for (std::size_t j = 0; j < nu; ++j) {
          Complex s(0.0, 0.0);
          for (std::size_t l = 0; l < nl; ++l)
            s += mu[k] * mub[l] * eu[k] * eu[j] / (el[l] * el[l]) /
                 ((lam[j] - lamb[l]) * (lam[k] - lamb[l]));
          aq(k, j) = (k == j ? 1.0 : 0.0) - s;
        }
        rq(k) = i * mu[k] * eu[k];
      }
      Eigen::PartialPivLU<Mat> lu(aq);
      Vec q2;
      if (refine_solve(lu, aq, rq, q2) > 1e12)
        throw SingularDeterminant("soliton_potential: Q-system singular");
      Complex kb2(0.0, 0.0);
      for (std::size_t k = 0; k < nu; ++k) kb2 += q2(k) * eu[k];
      // The Q-system's driving term carries the opposite sign relative to the
      // P-system, so the diagonal read-off is negated; fixed against the
      // directly integrated scattering problem (sech soliton anchor).
      out.r[jx] = -2.0 * kb2;
    }
  }
  return out;
}

double asymptotic_envelope(const std::vector<BoundState>& upper,
                           const std::vector<BoundState>& lower) {
  if (upper.empty() && lower.empty())
    throw EmptySpectrum("asymptotic_envelope: no bound states given");
  check_states(upper, lower);
  double eta = std::numeric_limits<double>::infinity();
  for (const auto& s : upper) eta = std::min(eta, s.lambda.imag());
  for (const auto& s : lower) eta = std::min(eta, -s.lambda.imag());
  return 2.0 * eta;
}

}  // namespace ist
