#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <limits>

#include "helpers.hpp"
#include "ist/certifier.hpp"
#include "ist/errors.hpp"
#include "ist/model.hpp"
#include "ist/solitons.hpp"

using namespace ist;

namespace {

DecayEnvelope envelope(double delta) {
  DecayEnvelope e;
  e.amplitude = 1.0;
  e.rate = 1.0;
  e.exponent_excess = delta;
  return e;
}

}  // namespace

TEST_CASE("rho window thresholds are exact") {
  // degree 3: nonempty iff delta > 1/2
  auto kdv = dispersion_preset("kdv3");
  CHECK(!rho_window(envelope(0.5), kdv).window_nonempty);
  auto r = rho_window(envelope(0.6), kdv);
  CHECK(r.window_nonempty);
  CHECK(r.rho_lo == doctest::Approx(1.0 + 1.0 / 0.6));
  CHECK(r.rho_hi == doctest::Approx(3.0));

  // degree 2: nonempty iff delta > 1
  auto nls = dispersion_preset("nls2");
  CHECK(!rho_window(envelope(1.0), envelope(1.0), nls).window_nonempty);
  auto r2 = rho_window(envelope(1.2), envelope(1.2), nls);
  CHECK(r2.window_nonempty);
  CHECK(r2.rho_lo == doctest::Approx(1.0 + 1.0 / 1.2));
  CHECK(r2.rho_hi == doctest::Approx(2.0));

  // the pair form uses the weaker of the two envelopes
  CHECK(!rho_window(envelope(2.0), envelope(0.9), nls).window_nonempty);

  // degree 1: empty for every delta
  auto tr = dispersion_preset("transport1");
  for (double d : {0.1, 1.0, 2.0, 10.0})
    CHECK(!rho_window(envelope(d), envelope(d), tr).window_nonempty);

  DispersionSpec rational = nls;
  rational.denominator = {Complex(1, 0), Complex(1, 0)};
  CHECK_THROWS_AS(rho_window(envelope(1.5), rational), NotPolynomial);
}

TEST_CASE("gaussian data fits a delta = 1 envelope") {
  auto p = helpers::gauss_pair(1.0, -6.0, 0.01, 1201);
  auto e = fit_envelope(p, Field::Q, Side::Right);
  CHECK(std::abs(e.exponent_excess - 1.0) < 0.05);
  CHECK(e.rate > 0.5);
  CHECK(e.residual < 0.05);
  auto el = fit_envelope(p, Field::Q, Side::Left);
  CHECK(std::abs(el.exponent_excess - 1.0) < 0.05);
}

TEST_CASE("sech data rejects every delta >= 0.1") {
  auto p = helpers::sech_pair(1.0, -1.0, -14.0, 0.01, 2801);
  auto e = fit_envelope(p, Field::Q, Side::Right);
  CHECK(e.exponent_excess < 0.1);
}

TEST_CASE("no-decay inputs throw") {
  SampledPotential p;
  p.x0 = -5.0;
  p.dx = 0.1;
  p.q.resize(101);
  p.r.resize(101);
  for (std::size_t j = 0; j < p.size(); ++j) {
    double x = p.x(j);
    p.q[j] = Complex(1.0 + x * x, 0.0);  // growing tail
    p.r[j] = -p.q[j];
  }
  CHECK_THROWS_AS(fit_envelope(p, Field::Q, Side::Right), NoDecay);
}

TEST_CASE("certify: zero potential meets the hypotheses") {
  SampledPotential p0;
  p0.x0 = -6.0;
  p0.dx = 0.01;
  p0.case_tag = CaseTag::KdvCase;
  p0.q.assign(1201, Complex(0, 0));
  p0.r.assign(1201, Complex(-1, 0));
  auto p1 = p0;
  p1.t = 1.0;
  auto rep = certify(p0, p1, dispersion_preset("kdv3"));
  CHECK(rep.verdict == Verdict::ConditionsMet);
}

TEST_CASE("certify: a soliton pair fails the envelope hypothesis") {
  std::vector<BoundState> up{{Complex(0, 0.5), Complex(0, -1), HalfPlane::Upper}};
  std::vector<BoundState> lo{{Complex(0, -0.5), Complex(0, 1), HalfPlane::Lower}};
  auto s0 = soliton_potential(up, lo, dispersion_preset("nls2"), -12.0, 0.01,
                              2401, 0.0);
  auto s1 = soliton_potential(up, lo, dispersion_preset("nls2"), -12.0, 0.01,
                              2401, 1.0);
  auto rep = certify(s0, s1, dispersion_preset("nls2"));
  CHECK(rep.verdict == Verdict::ConditionsFailed);
}

TEST_CASE("indicator proxy: small gaussian stays non-positive in the window") {
  auto p = helpers::gauss_pair(0.01, -6.0, 0.01, 1201);
  auto samples = indicator_estimate(p, 1.9, {M_PI / 3, M_PI / 2, 2 * M_PI / 3});
  REQUIRE(samples.size() == 3);
  for (auto& s : samples) {
    if (!s.attained) continue;
    CHECK(s.h_b <= 0.1);
    CHECK(s.radius_cap > 1.0);
  }
  // at least the central ray should be attainable for this mild potential
  CHECK(samples[1].attained);
}

TEST_CASE("indicator proxy: zero potential is marked unattained everywhere") {
  SampledPotential p;
  p.x0 = -6.0;
  p.dx = 0.01;
  p.q.assign(1201, Complex(0, 0));
  p.r.assign(1201, Complex(0, 0));
  auto samples = indicator_estimate(p, 1.9, {M_PI / 3, M_PI / 2});
  for (auto& s : samples) {
    CHECK(!s.attained);
    CHECK(s.h_b == -std::numeric_limits<double>::infinity());
  }
}

TEST_CASE("indicator proxy rejects kdv-case input") {
  auto p = helpers::sech2_kdv(1.0, -6.0, 0.01, 1201);
  CHECK_THROWS_AS(indicator_estimate(p, 1.9, {M_PI / 2}), CaseMismatch);
}
