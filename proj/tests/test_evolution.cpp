#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "ist/errors.hpp"
#include "ist/evolution.hpp"
#include "ist/model.hpp"

using namespace ist;

namespace {

ScatteringData base_data(const std::string& preset) {
  ScatteringData sd;
  sd.lambda_grid = {-1.0, 0.5, 1.5};
  sd.a = {Complex(0.8, 0.1), Complex(0.6, -0.2), Complex(1.0, 0.0)};
  sd.b = {Complex(0.2, 0.0), Complex(0.1, 0.3), Complex(0.05, 0.0)};
  sd.a_bar = sd.a;
  sd.b_bar = sd.b;
  sd.t = 0.0;
  sd.dispersion = dispersion_preset(preset);
  sd.case_tag = preset == "kdv3" ? CaseTag::KdvCase : CaseTag::NlsCase;
  return sd;
}

}  // namespace

TEST_CASE("b picks up e^{-2 A0 dt}, b_bar the inverse, a is untouched") {
  auto sd = base_data("nls2");
  const double t1 = 0.5;
  auto ev = evolve(sd, t1);
  CHECK(ev.t == doctest::Approx(t1));
  for (std::size_t j = 0; j < sd.lambda_grid.size(); ++j) {
    Complex lam(sd.lambda_grid[j], 0.0);
    Complex a0 = sd.dispersion.eval(lam);  // -2 i lam^2
    Complex fb = std::exp(-2.0 * a0 * t1);
    CHECK(std::abs(ev.a[j] - sd.a[j]) < 1e-15);
    CHECK(std::abs(ev.a_bar[j] - sd.a_bar[j]) < 1e-15);
    CHECK(std::abs(ev.b[j] - sd.b[j] * fb) < 1e-14);
    CHECK(std::abs(ev.b_bar[j] - sd.b_bar[j] / fb) < 1e-14);
  }
}

TEST_CASE("two evolution steps compose like one") {
  auto sd = base_data("nls2");
  auto one = evolve(sd, 0.7);
  auto two = evolve(evolve(sd, 0.3), 0.7);
  for (std::size_t j = 0; j < sd.b.size(); ++j) {
    CHECK(std::abs(one.b[j] - two.b[j]) < 1e-13);
    CHECK(std::abs(one.b_bar[j] - two.b_bar[j]) < 1e-13);
  }
}

TEST_CASE("norming constants evolve by the bound-state exponent") {
  auto sd = base_data("nls2");
  sd.bound_states = {{Complex(0.0, 0.5), Complex(0.0, -1.0), HalfPlane::Upper},
                     {Complex(0.0, -0.5), Complex(0.0, 1.0), HalfPlane::Lower}};
  const double t1 = 0.4;
  auto ev = evolve(sd, t1);
  // A0(i/2) = -2i (i/2)^2 = i/2: upper m -> m e^{-i t1}
  Complex mu = Complex(0.0, -1.0) * std::exp(Complex(0.0, -t1));
  CHECK(std::abs(ev.bound_states[0].norming - mu) < 1e-14);
  CHECK(std::abs(ev.bound_states[0].lambda - sd.bound_states[0].lambda) < 1e-15);
  // A0(-i/2) = i/2 as well: lower m_bar -> m_bar e^{+i t1}
  Complex ml = Complex(0.0, 1.0) * std::exp(Complex(0.0, t1));
  CHECK(std::abs(ev.bound_states[1].norming - ml) < 1e-14);
}

TEST_CASE("kdv soliton norming grows like e^{8 beta^3 t}") {
  auto sd = base_data("kdv3");
  sd.bound_states = {{Complex(0.0, 1.0), Complex(2.0, 0.0), HalfPlane::Upper}};
  auto ev = evolve(sd, 0.1);
  // A0(i) = -4i i^3 = -4: m -> m e^{+0.8}
  CHECK(std::abs(ev.bound_states[0].norming - 2.0 * std::exp(0.8)) < 1e-12);
}

TEST_CASE("rational dispersion is rejected") {
  auto sd = base_data("nls2");
  sd.dispersion.denominator = {Complex(1.0, 0.0), Complex(1.0, 0.0)};
  CHECK_THROWS_AS(evolve(sd, 0.1), NotPolynomial);
}

TEST_CASE("bound-state exponent overflow is caught") {
  auto sd = base_data("kdv3");
  sd.bound_states = {{Complex(0.0, 3.0), Complex(1.0, 0.0), HalfPlane::Upper}};
  // 2 |A0(3i)| t = 216 t: t = 5 exceeds the default cap of 600
  CHECK_THROWS_AS(evolve(sd, 5.0), Overflow);
  CHECK_NOTHROW(evolve(sd, 1.0));
}
