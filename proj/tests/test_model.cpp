#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <sstream>

#include "helpers.hpp"
#include "ist/errors.hpp"
#include "ist/model.hpp"

using namespace ist;

TEST_CASE("validate accepts a well-formed potential") {
  auto p = helpers::sech_pair(1.0, -1.0, -5.0, 0.1, 101);
  CHECK(validate(p).empty());
  CHECK(p.x(0) == doctest::Approx(-5.0));
  CHECK(p.x_max() == doctest::Approx(5.0));
}

TEST_CASE("validate flags broken invariants without throwing") {
  auto p = helpers::sech_pair(1.0, -1.0, -5.0, 0.1, 101);

  auto bad_dx = p;
  bad_dx.dx = 0.0;
  CHECK(!validate(bad_dx).empty());

  auto bad_size = p;
  bad_size.r.pop_back();
  CHECK(!validate(bad_size).empty());

  auto bad_val = p;
  bad_val.q[3] = Complex(std::nan(""), 0.0);
  CHECK(!validate(bad_val).empty());
}

TEST_CASE("weighted_l1 matches the trapezoid sum it advertises") {
  auto p = helpers::gauss_pair(0.7, -4.0, 0.05, 161);
  double acc = 0.0;
  for (std::size_t j = 0; j < p.size(); ++j) {
    double w = (j == 0 || j + 1 == p.size()) ? 0.5 : 1.0;
    double x = p.x(j);
    acc += w * (1.0 + std::abs(x)) * std::abs(p.q[j]) * p.dx;
  }
  // exact value of int (1+|x|) 0.7 e^{-x^2} dx = 0.7 (sqrt(pi) + 1)
  const double exact = 0.7 * (std::sqrt(M_PI) + 1.0);
  const double got = weighted_l1(p);
  CHECK(std::abs(got - exact) < 1e-3);
  CHECK(std::abs(got - acc) < 1e-2 * std::abs(acc) + 1e-12);
}

TEST_CASE("dispersion presets evaluate their polynomials") {
  auto nls = dispersion_preset("nls2");  // -2 i z^2
  CHECK(std::abs(nls.eval(Complex(0.0, 2.0)) - Complex(0.0, 8.0)) < 1e-14);
  CHECK(nls.effective_degree() == 2);
  CHECK(nls.is_polynomial());

  auto kdv = dispersion_preset("kdv3");  // -4 i z^3
  CHECK(std::abs(kdv.eval(Complex(0.0, 1.0)) - Complex(-4.0, 0.0)) < 1e-14);
  CHECK(kdv.effective_degree() == 3);

  auto tr = dispersion_preset("transport1");  // -i z
  CHECK(std::abs(tr.eval(Complex(3.0, 0.0)) - Complex(0.0, -3.0)) < 1e-14);
  CHECK(tr.effective_degree() == 1);

  CHECK_THROWS_AS(dispersion_preset("nosuch"), ValidationError);
}

TEST_CASE("rational dispersion degree bookkeeping") {
  DispersionSpec d;
  d.numerator = {Complex(0.0, 0.0), Complex(1.0, 0.0)};            // z
  d.denominator = {Complex(1.0, 0.0), Complex(0.0, 0.0),
                   Complex(2.0, 0.0)};                             // 1 + 2 z^2
  CHECK(d.numerator_degree() == 1);
  CHECK(d.denominator_degree() == 2);
  CHECK(d.effective_degree() == -1);
  CHECK(!d.is_polynomial());
  Complex z(2.0, 0.0);
  CHECK(std::abs(d.eval(z) - z / (1.0 + 2.0 * z * z)) < 1e-14);
}

TEST_CASE("potential CSV round trip preserves everything") {
  auto p = helpers::sech_pair(0.8, -0.8, -3.0, 0.25, 25);
  p.t = 1.5;
  std::ostringstream os;
  write_potential_csv(os, p);
  std::istringstream is(os.str());
  auto q = read_potential_csv(is);
  CHECK(q.size() == p.size());
  CHECK(q.t == doctest::Approx(1.5));
  CHECK(q.case_tag == CaseTag::NlsCase);
  CHECK(q.x0 == doctest::Approx(p.x0));
  CHECK(q.dx == doctest::Approx(p.dx));
  CHECK(helpers::max_qr_diff(p, q) < 1e-14);
}

TEST_CASE("kdv-case CSV round trip keeps the tag") {
  auto p = helpers::sech2_kdv(2.0, -4.0, 0.5, 17);
  std::ostringstream os;
  write_potential_csv(os, p);
  std::istringstream is(os.str());
  auto q = read_potential_csv(is);
  CHECK(q.case_tag == CaseTag::KdvCase);
  CHECK(helpers::max_qr_diff(p, q) < 1e-14);
}

TEST_CASE("malformed CSV is a validation error") {
  std::istringstream is("not,a,potential\n1,2\n");
  CHECK_THROWS_AS(read_potential_csv(is), ValidationError);
}

TEST_CASE("scattering JSON round trip") {
  ScatteringData sd;
  sd.lambda_grid = {-1.0, 0.5, 2.0};
  sd.a = {Complex(1, 0), Complex(0.5, 0.5), Complex(0, 1)};
  sd.b = {Complex(0, 0), Complex(0.1, -0.2), Complex(1e-8, 0)};
  sd.a_bar = sd.a;
  sd.b_bar = sd.b;
  sd.bound_states = {{Complex(0.0, 0.5), Complex(0.0, -1.0), HalfPlane::Upper},
                     {Complex(0.0, -0.5), Complex(0.0, 1.0), HalfPlane::Lower}};
  sd.t = 0.25;
  sd.dispersion = dispersion_preset("nls2");
  sd.case_tag = CaseTag::NlsCase;

  auto text = scattering_to_json(sd);
  auto back = scattering_from_json(text);
  CHECK(back.lambda_grid == sd.lambda_grid);
  CHECK(back.t == doctest::Approx(0.25));
  CHECK(back.case_tag == CaseTag::NlsCase);
  REQUIRE(back.bound_states.size() == 2);
  CHECK(std::abs(back.bound_states[0].lambda - Complex(0.0, 0.5)) < 1e-15);
  CHECK(back.bound_states[1].half_plane == HalfPlane::Lower);
  for (std::size_t j = 0; j < sd.a.size(); ++j) {
    CHECK(std::abs(back.a[j] - sd.a[j]) < 1e-15);
    CHECK(std::abs(back.b[j] - sd.b[j]) < 1e-15);
  }
  CHECK(std::abs(back.dispersion.eval(Complex(1.0, 0.0)) -
                 sd.dispersion.eval(Complex(1.0, 0.0))) < 1e-15);
  // determinism: serializing twice gives identical bytes
  CHECK(scattering_to_json(back) == scattering_to_json(scattering_from_json(text)));
}

TEST_CASE("report JSON round trip") {
  CertificateReport rep;
  rep.rho_lo = 2.0;
  rep.rho_hi = 3.0;
  rep.window_nonempty = true;
  rep.verdict = Verdict::ConditionsFailed;
  rep.notes = "example";
  rep.indicator_samples = {{0.5, -0.25, 12.0, true}, {1.5, 0.0, 0.0, false}};
  auto back = report_from_json(report_to_json(rep));
  CHECK(back.rho_lo == doctest::Approx(2.0));
  CHECK(back.rho_hi == doctest::Approx(3.0));
  CHECK(back.window_nonempty);
  CHECK(back.verdict == Verdict::ConditionsFailed);
  CHECK(back.notes == "example");
  REQUIRE(back.indicator_samples.size() == 2);
  CHECK(back.indicator_samples[0].h_b == doctest::Approx(-0.25));
  CHECK(!back.indicator_samples[1].attained);
}

TEST_CASE("resample_uniform reproduces a cubic exactly") {
  std::vector<double> x;
  std::vector<Complex> q, r;
  for (int j = 0; j <= 40; ++j) {
    double xi = -2.0 + 0.1 * j;
    x.push_back(xi);
    q.push_back(Complex(xi * xi * xi - xi, 0.5 * xi));
    r.push_back(Complex(-xi, xi * xi));
  }
  auto p = resample_uniform(x, q, r, 0.0, CaseTag::NlsCase, -1.5, 0.07, 40);
  for (std::size_t j = 0; j < p.size(); ++j) {
    double xi = p.x(j);
    CHECK(std::abs(p.q[j] - Complex(xi * xi * xi - xi, 0.5 * xi)) < 1e-10);
    CHECK(std::abs(p.r[j] - Complex(-xi, xi * xi)) < 1e-10);
  }
}
