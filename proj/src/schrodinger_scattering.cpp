#include "ist/schrodinger_scattering.hpp"

#include <algorithm>
#include <cmath>

#include "ist/errors.hpp"

namespace ist {

namespace {

constexpr double kOverflowBound = 1e100;

using State = std::array<Complex, 2>;  // (m, m')

std::vector<Complex> q_midpoints(const SampledPotential& p) {
  const std::size_t n = p.q.size();
  std::vector<Complex> qm(n - 1);
  for (std::size_t j = 0; j + 1 < n; ++j) {
    if (j == 0)
      qm[j] = 0.3125 * p.q[0] + 0.9375 * p.q[1] - 0.3125 * p.q[2] + 0.0625 * p.q[3];
    else if (j + 2 >= n)
      qm[j] = 0.0625 * p.q[n - 4] - 0.3125 * p.q[n - 3] + 0.9375 * p.q[n - 2] +
              0.3125 * p.q[n - 1];
    else
      qm[j] = (-p.q[j - 1] + 9.0 * p.q[j] + 9.0 * p.q[j + 1] - p.q[j + 2]) / 16.0;
  }
  return qm;
}

// m'' + s * 2 i lambda m' + q m = 0 with s = +1 for m1, s = -1 for m2.
State deriv(Complex two_il_s, Complex q, const State& y) {
  return {y[1], -two_il_s * y[1] - q * y[0]};
}

State axpy(const State& y, double h, const State& k) {
  return {y[0] + h * k[0], y[1] + h * k[1]};
}

std::vector<State> march(const SampledPotential& p, const std::vector<Complex>& qm,
                         Complex lambda, double sign, bool forward) {
  const std::size_t n = p.q.size();
  const Complex two_il_s = sign * Complex(0.0, 2.0) * lambda;
  const double h = forward ? p.dx : -p.dx;
  std::vector<State> traj(n);
  State y{1.0, 0.0};
  traj[forward ? 0 : n - 1] = y;
  for (std::size_t s = 0; s + 1 < n; ++s) {
    const std::size_t j = forward ? s : n - 2 - s;
    const Complex q0 = forward ? p.q[j] : p.q[j + 1];
    const Complex q1 = forward ? p.q[j + 1] : p.q[j];
    const State k1 = deriv(two_il_s, q0, y);
    const State k2 = deriv(two_il_s, qm[j], axpy(y, h * 0.5, k1));
    const State k3 = deriv(two_il_s, qm[j], axpy(y, h * 0.5, k2));
    const State k4 = deriv(two_il_s, q1, axpy(y, h, k3));
    y[0] += (h / 6.0) * (k1[0] + 2.0 * k2[0] + 2.0 * k3[0] + k4[0]);
    y[1] += (h / 6.0) * (k1[1] + 2.0 * k2[1] + 2.0 * k3[1] + k4[1]);
    if (std::abs(y[0]) + std::abs(y[1]) > kOverflowBound)
      throw DivergedIntegration("Faddeev march overflow");
    traj[forward ? j + 1 : j] = y;
  }
  return traj;
}

void require_kdv(const SampledPotential& p) {
  auto v = validate(p);
  if (!v.empty()) throw ValidationError("invalid potential: " + v.front());
  if (p.case_tag != CaseTag::KdvCase)
    throw CaseMismatch("Schroedinger scattering requires the KdV case");
}

Complex trapz(const SampledPotential& p,
              const std::function<Complex(std::size_t)>& f) {
  Complex acc(0.0, 0.0);
  const std::size_t n = p.q.size();
  for (std::size_t j = 0; j < n; ++j) acc += ((j == 0 || j + 1 == n) ? 0.5 : 1.0) * f(j);
  return acc * p.dx;
}

}  // namespace

FaddeevPair faddeev_solve(const SampledPotential& p, Complex lambda) {
  require_kdv(p);
  if (std::abs(lambda) < 1e-8)
    throw SingularLambda("faddeev_solve: lambda = 0 hits the 1/(2 i lambda) kernel");
  if (lambda.imag() < -1e-12)
    throw ValidationError("faddeev_solve: Im(lambda) must be >= 0");
  auto qm = q_midpoints(p);
  auto t1 = march(p, qm, lambda, +1.0, false);  // m1 from the right
  auto t2 = march(p, qm, lambda, -1.0, true);   // m2 from the left
  FaddeevPair fp;
  fp.lambda = lambda;
  fp.m1.resize(p.q.size());
  fp.m2.resize(p.q.size());
  for (std::size_t j = 0; j < p.q.size(); ++j) {
    fp.m1[j] = t1[j][0];
    fp.m2[j] = t2[j][0];
  }
  return fp;
}

ScatteringData kdv_coefficients(const SampledPotential& p,
                                const std::vector<double>& lambda_grid) {
  require_kdv(p);
  for (std::size_t k = 0; k < lambda_grid.size(); ++k) {
    if (std::abs(lambda_grid[k]) < 1e-8)
      throw SingularLambda("kdv_coefficients: lambda grid must exclude 0");
    if (k + 1 < lambda_grid.size() && !(lambda_grid[k] < lambda_grid[k + 1]))
      throw ValidationError("lambda_grid must be strictly increasing");
  }
  ScatteringData sd;
  sd.lambda_grid = lambda_grid;
  sd.t = p.t;
  sd.case_tag = CaseTag::KdvCase;
  const std::size_t nl = lambda_grid.size();
  sd.a.resize(nl);
  sd.b.resize(nl);
  sd.a_bar.resize(nl);
  sd.b_bar.resize(nl);
  const Complex i(0.0, 1.0);
  for (std::size_t k = 0; k < nl; ++k) {
    const Complex lam(lambda_grid[k], 0.0);
    FaddeevPair fp = faddeev_solve(p, lam);
    const Complex pref = 1.0 / (2.0 * i * lam);
    Complex invT1 = 1.0 + pref * trapz(p, [&](std::size_t j) { return p.q[j] * fp.m1[j]; });
    Complex invT2 = 1.0 + pref * trapz(p, [&](std::size_t j) { return p.q[j] * fp.m2[j]; });
    if (std::abs(invT1 - invT2) > 1e-8 * std::max(1.0, std::abs(invT1)))
      throw NoConvergence("kdv_coefficients: the two 1/T routes disagree beyond 1e-8");
    Complex r1T = -pref * trapz(p, [&](std::size_t j) {
      return std::exp(-2.0 * i * lam * p.x(j)) * p.q[j] * fp.m2[j];
    });
    Complex r2T = -pref * trapz(p, [&](std::size_t j) {
      return std::exp(2.0 * i * lam * p.x(j)) * p.q[j] * fp.m1[j];
    });
    sd.a[k] = invT1;
    sd.b[k] = r1T;
    sd.a_bar[k] = invT2;
    sd.b_bar[k] = r2T;
  }
  return sd;
}

Complex kdv_inverse_transmission(const SampledPotential& p, Complex lambda) {
  FaddeevPair fp = faddeev_solve(p, lambda);
  const Complex i(0.0, 1.0);
  return 1.0 + (1.0 / (2.0 * i * lambda)) *
                   trapz(p, [&](std::size_t j) { return p.q[j] * fp.m1[j]; });
}

std::vector<BoundState> kdv_bound_states(const SampledPotential& p, double beta_max) {
  require_kdv(p);
  if (!(beta_max > 0.0)) throw ValidationError("beta_max must be > 0");
  // 1/T(i beta) is real for real q; bracket its sign changes on (0, beta_max].
  const int nscan = 256;
  auto g = [&](double beta) {
    return kdv_inverse_transmission(p, Complex(0.0, beta)).real();
  };
  const double beta_lo = std::max(1e-4, beta_max / nscan * 0.05);
  std::vector<double> roots;
  double prev_b = beta_lo;
  double prev_g = g(prev_b);
  for (int s = 1; s <= nscan; ++s) {
    double bb = beta_lo + (beta_max - beta_lo) * s / nscan;
    double gg = g(bb);
    if (prev_g == 0.0) roots.push_back(prev_b);
    else if (prev_g * gg < 0.0) {
      double lo = prev_b, hi = bb, glo = prev_g;
      for (int it = 0; it < 80; ++it) {
        double mid = 0.5 * (lo + hi);
        double gm = g(mid);
        if (glo * gm <= 0.0) hi = mid;
        else {
          lo = mid;
          glo = gm;
        }
        if (hi - lo < 1e-13 * std::max(1.0, hi)) break;
      }
      roots.push_back(0.5 * (lo + hi));
    }
    prev_b = bb;
    prev_g = gg;
  }
  // Distinct, refined roots; coalescence means the bracketing heuristic and
  // the zero count disagree.
  for (std::size_t k = 0; k + 1 < roots.size(); ++k)
    if (roots[k + 1] - roots[k] < 1e-9)
      throw BracketFailure("kdv_bound_states: coalescing roots of 1/T");

  std::vector<BoundState> out;
  for (double beta : roots) {
    FaddeevPair fp = faddeev_solve(p, Complex(0.0, beta));
    // c_n = (Int f1^2 dx)^{-1}, f1 = e^{-beta x} m1.
    Complex norm = trapz(p, [&](std::size_t j) {
      Complex f1 = std::exp(-beta * p.x(j)) * fp.m1[j];
      return f1 * f1;
    });
    if (!(norm.real() > 0.0))
      throw BracketFailure("kdv_bound_states: non-positive norming integral");
    BoundState s;
    s.lambda = Complex(0.0, beta);
    s.norming = 1.0 / norm;
    s.half_plane = HalfPlane::Upper;
    out.push_back(s);
  }
  return out;
}

}  // namespace ist
