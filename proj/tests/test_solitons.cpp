#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "ist/errors.hpp"
#include "ist/model.hpp"
#include "ist/solitons.hpp"

using namespace ist;

TEST_CASE("one-state closed form reproduces the sech soliton") {
  std::vector<BoundState> up{{Complex(0, 0.5), Complex(0, -1), HalfPlane::Upper}};
  std::vector<BoundState> lo{{Complex(0, -0.5), Complex(0, 1), HalfPlane::Lower}};
  auto p = soliton_potential(up, lo, dispersion_preset("nls2"), -12.0, 0.01,
                             2401, 0.0);
  for (std::size_t j = 0; j < p.size(); ++j) {
    double s = 1.0 / std::cosh(p.x(j));
    CHECK(std::abs(p.q[j] - s) < 1e-12);
    CHECK(std::abs(p.r[j] + s) < 1e-12);
  }
}

TEST_CASE("two-state closed form reproduces 2 sech") {
  std::vector<BoundState> up{{Complex(0, 0.5), Complex(0, -2), HalfPlane::Upper},
                             {Complex(0, 1.5), Complex(0, -6), HalfPlane::Upper}};
  std::vector<BoundState> lo{{Complex(0, -0.5), Complex(0, 2), HalfPlane::Lower},
                             {Complex(0, -1.5), Complex(0, 6), HalfPlane::Lower}};
  auto p = soliton_potential(up, lo, dispersion_preset("nls2"), -10.0, 0.01,
                             2001, 0.0);
  double e = 0.0;
  for (std::size_t j = 0; j < p.size(); ++j)
    e = std::max(e, std::abs(p.q[j] - 2.0 / std::cosh(p.x(j))));
  CHECK(e < 1e-8);
}

TEST_CASE("general eigenvalue gives a moving soliton envelope") {
  // lambda = xi + i eta: |q| = 2 eta sech(2 eta (x - x0)), with the center
  // fixed by |m| = 2 eta e^{2 eta x0}.
  const double xi = 0.4, eta = 0.6, x0c = 0.8;
  Complex lam(xi, eta);
  Complex m = Complex(0.0, -2.0 * eta) * std::exp(2.0 * eta * x0c);
  std::vector<BoundState> up{{lam, m, HalfPlane::Upper}};
  std::vector<BoundState> lo{{std::conj(lam), std::conj(m), HalfPlane::Lower}};
  auto p = soliton_potential(up, lo, dispersion_preset("nls2"), -8.0, 0.01,
                             1601, 0.0);
  double e = 0.0;
  for (std::size_t j = 0; j < p.size(); ++j) {
    double env = 2.0 * eta / std::cosh(2.0 * eta * (p.x(j) - x0c));
    e = std::max(e, std::abs(std::abs(p.q[j]) - env));
  }
  CHECK(e < 1e-9);
  // the r = -conj(q) reduction holds for this conjugate-symmetric data
  for (std::size_t j = 0; j < p.size(); j += 40)
    CHECK(std::abs(p.r[j] + std::conj(p.q[j])) < 1e-9);
}

TEST_CASE("time evolution is a phase for the stationary sech soliton") {
  std::vector<BoundState> up{{Complex(0, 0.5), Complex(0, -1), HalfPlane::Upper}};
  std::vector<BoundState> lo{{Complex(0, -0.5), Complex(0, 1), HalfPlane::Lower}};
  const double t = 0.3;
  auto p0 = soliton_potential(up, lo, dispersion_preset("nls2"), -6.0, 0.01,
                              1201, 0.0);
  auto pt = soliton_potential(up, lo, dispersion_preset("nls2"), -6.0, 0.01,
                              1201, t);
  CHECK(pt.t == doctest::Approx(t));
  double e = 0.0;
  for (std::size_t j = 0; j < p0.size(); ++j)
    e = std::max(e, std::abs(pt.q[j] - p0.q[j] * std::exp(Complex(0.0, t))));
  CHECK(e < 1e-10);
}

TEST_CASE("kdv-style soliton translates under its dispersion") {
  // One upper state at i beta with kdv3: norming grows like e^{8 beta^3 t},
  // which translates the envelope by 4 beta^2 t.
  const double beta = 0.5, t = 0.2;
  std::vector<BoundState> up{{Complex(0, beta), Complex(0, -2.0 * beta),
                              HalfPlane::Upper}};
  std::vector<BoundState> lo{{Complex(0, -beta), Complex(0, 2.0 * beta),
                              HalfPlane::Lower}};
  auto p0 = soliton_potential(up, lo, dispersion_preset("kdv3"), -6.0, 0.01,
                              1201, 0.0);
  auto pt = soliton_potential(up, lo, dispersion_preset("kdv3"), -6.0, 0.01,
                              1201, t);
  const double shift = 4.0 * beta * beta * t;
  double e = 0.0;
  for (std::size_t j = 0; j < p0.size(); ++j) {
    double env = 2.0 * beta / std::cosh(2.0 * beta * (p0.x(j) - shift));
    e = std::max(e, std::abs(std::abs(pt.q[j]) - env));
  }
  CHECK(e < 1e-10);
}

TEST_CASE("asymptotic_envelope returns twice the smallest eta") {
  std::vector<BoundState> up{{Complex(0.3, 0.5), Complex(0, -2), HalfPlane::Upper},
                             {Complex(0, 1.5), Complex(0, -6), HalfPlane::Upper}};
  std::vector<BoundState> lo{{Complex(0, -0.8), Complex(0, 2), HalfPlane::Lower}};
  CHECK(asymptotic_envelope(up, lo) == doctest::Approx(1.0));
  CHECK_THROWS_AS(asymptotic_envelope({}, {}), EmptySpectrum);
}

TEST_CASE("state validation") {
  std::vector<BoundState> bad_up{{Complex(0, -0.5), Complex(0, -1),
                                  HalfPlane::Upper}};
  CHECK_THROWS_AS(
      soliton_potential(bad_up, {}, dispersion_preset("nls2"), -1, 0.01, 128, 0),
      ValidationError);
  std::vector<BoundState> up{{Complex(0, 0.5), Complex(0, -1), HalfPlane::Upper}};
  CHECK_THROWS_AS(
      soliton_potential(up, {}, dispersion_preset("nls2"), -1, 0.0, 128, 0),
      ValidationError);
  // time evolution demands a polynomial dispersion
  DispersionSpec rat = dispersion_preset("nls2");
  rat.denominator = {Complex(1, 0), Complex(1, 0)};
  CHECK_THROWS_AS(soliton_potential(up, {}, rat, -1, 0.01, 128, 0.5),
                  NotPolynomial);
}
