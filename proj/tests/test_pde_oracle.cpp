#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "helpers.hpp"
#include "ist/errors.hpp"
#include "ist/model.hpp"
#include "ist/pde_oracle.hpp"

using namespace ist;

TEST_CASE("nls integrator reproduces the exact sech breather phase") {
  // q = e^{it} sech x solves q_t = i q_xx + 2 i |q|^2 q.
  auto p = helpers::sech_pair(1.0, -1.0, -12.0, 0.01, 2401);
  const double t = 0.2;
  auto out = step_nls(p, 2e-4, 1000);
  CHECK(out.t == doctest::Approx(t));
  double e = 0.0;
  for (std::size_t j = 0; j < p.size(); ++j) {
    Complex exact = std::exp(Complex(0, t)) / std::cosh(p.x(j));
    e = std::max(e, std::abs(out.q[j] - exact));
    e = std::max(e, std::abs(out.r[j] + std::conj(exact)));
  }
  CHECK(e < 1e-5);  // second-order splitting at dt = 2e-4
}

TEST_CASE("kdv integrator translates the 2 sech^2 soliton at speed 4") {
  auto p = helpers::sech2_kdv(2.0, -14.0, 0.01, 2801);
  const double t = 0.1;
  auto out = step_kdv(p, 1e-4, 1000);
  double e = 0.0;
  for (std::size_t j = 0; j < p.size(); ++j) {
    double c = std::cosh(p.x(j) - 4.0 * t);
    e = std::max(e, std::abs(out.q[j] - 2.0 / (c * c)));
  }
  CHECK(e < 1e-5);
}

TEST_CASE("defocusing mkdv flow conserves mass and energy") {
  // Conservation over a finite window holds down to the amplitude the
  // dispersing tail reaches at the window edge, so use a wide grid.
  auto p = helpers::sech_pair(0.5, 0.5, -16.0, 0.01, 3201);
  auto out = step_nls(p, 2e-4, 500);
  double m0 = 0, m1 = 0, e0 = 0, e1 = 0;
  for (std::size_t j = 0; j < p.size(); ++j) {
    m0 += p.q[j].real() * p.dx;
    m1 += out.q[j].real() * p.dx;
    e0 += std::norm(p.q[j]) * p.dx;
    e1 += std::norm(out.q[j]) * p.dx;
  }
  CHECK(std::abs(m1 - m0) < 1e-5);
  CHECK(std::abs(e1 - e0) < 1e-8);
  // the reduction r = q is preserved
  for (std::size_t j = 0; j < out.size(); j += 100)
    CHECK(std::abs(out.r[j] - out.q[j]) < 1e-14);
}

TEST_CASE("nls flow conserves the L2 mass") {
  auto p = helpers::gauss_pair(0.7, -8.0, 0.01, 1601);
  auto out = step_nls(p, 2e-4, 500);
  double e0 = 0, e1 = 0;
  for (std::size_t j = 0; j < p.size(); ++j) {
    e0 += std::norm(p.q[j]) * p.dx;
    e1 += std::norm(out.q[j]) * p.dx;
  }
  CHECK(std::abs(e1 - e0) < 1e-8);
}

TEST_CASE("case and reduction mismatches are rejected") {
  auto pk = helpers::sech2_kdv(2.0, -8.0, 0.01, 1601);
  CHECK_THROWS_AS(step_nls(pk, 1e-3, 10), CaseMismatch);
  auto pn = helpers::sech_pair(1.0, -1.0, -8.0, 0.01, 1601);
  CHECK_THROWS_AS(step_kdv(pn, 1e-3, 10), CaseMismatch);
  // r neither -conj(q) nor q (real)
  auto bad = helpers::sech_pair(1.0, 0.3, -8.0, 0.01, 1601);
  CHECK_THROWS_AS(step_nls(bad, 1e-3, 10), ValidationError);
}

TEST_CASE("time steps violating the phase budget are refused") {
  auto p = helpers::sech_pair(3.0, -3.0, -8.0, 0.01, 1601);
  CHECK_THROWS_AS(step_nls(p, 0.2, 10), CflViolation);
  auto pk = helpers::sech2_kdv(2.0, -8.0, 0.01, 1601);
  CHECK_THROWS_AS(step_kdv(pk, 0.01, 10), CflViolation);
}
