#include "ist/zs_scattering.hpp"

#include <algorithm>
#include <array>
#include <cmath>

#include "ist/errors.hpp"

namespace ist {

namespace {

constexpr double kOverflowBound = 1e100;

using State = std::array<Complex, 2>;

// q, r at interval midpoints, 4-point Lagrange interpolation (keeps the RK4
// march 4th order). Shared across lambda samples.
struct Midpoints {
  std::vector<Complex> qm, rm;
};

Midpoints midpoints(const SampledPotential& p) {
  const std::size_t n = p.q.size();
  Midpoints m;
  m.qm.resize(n - 1);
  m.rm.resize(n - 1);
  auto mid = [&](const std::vector<Complex>& f, std::size_t j) {
    if (j == 0)
      return 0.3125 * f[0] + 0.9375 * f[1] - 0.3125 * f[2] + 0.0625 * f[3];
    if (j + 2 >= n)
      return 0.0625 * f[n - 4] - 0.3125 * f[n - 3] + 0.9375 * f[n - 2] +
             0.3125 * f[n - 1];
    return (-f[j - 1] + 9.0 * f[j] + 9.0 * f[j + 1] - f[j + 2]) / 16.0;
  };
  for (std::size_t j = 0; j + 1 < n; ++j) {
    m.qm[j] = mid(p.q, j);
    m.rm[j] = mid(p.r, j);
  }
  return m;
}

// The two oscillation-free system forms.
//   SecondOsc: y1' = q y2,              y2' = 2 i lambda y2 + r y1
//              (Phi forward, PsiBar backward)
//   FirstOsc:  y1' = -2 i lambda y1 + q y2,  y2' = r y1
//              (PhiBar forward, Psi backward)
enum class SysForm { SecondOsc, FirstOsc };

inline State deriv(SysForm form, Complex two_il, Complex q, Complex r,
                   const State& y) {
  if (form == SysForm::SecondOsc)
    return {q * y[1], two_il * y[1] + r * y[0]};
  return {-two_il * y[0] + q * y[1], r * y[0]};
}

inline State axpy(const State& y, double h, const State& k) {
  return {y[0] + h * k[0], y[1] + h * k[1]};
}

// RK4 march across the whole grid; returns the final state and, when out is
// non-null, the trajectory at every node (in marching order positions).
State march(const SampledPotential& p, const Midpoints& m, Complex lambda,
            SysForm form, bool forward, State y,
            std::vector<State>* out = nullptr) {
  const std::size_t n = p.q.size();
  const Complex two_il = Complex(0.0, 2.0) * lambda;
  const double h = forward ? p.dx : -p.dx;
  if (out) {
    out->resize(n);
    (*out)[forward ? 0 : n - 1] = y;
  }
  for (std::size_t s = 0; s + 1 < n; ++s) {
    // Interval index and endpoint samples in marching order.
    const std::size_t j = forward ? s : n - 2 - s;
    const Complex q0 = forward ? p.q[j] : p.q[j + 1];
    const Complex r0 = forward ? p.r[j] : p.r[j + 1];
    const Complex q1 = forward ? p.q[j + 1] : p.q[j];
    const Complex r1 = forward ? p.r[j + 1] : p.r[j];
    const State k1 = deriv(form, two_il, q0, r0, y);
    const State k2 = deriv(form, two_il, m.qm[j], m.rm[j], axpy(y, h * 0.5, k1));
    const State k3 = deriv(form, two_il, m.qm[j], m.rm[j], axpy(y, h * 0.5, k2));
    const State k4 = deriv(form, two_il, q1, r1, axpy(y, h, k3));
    y[0] += (h / 6.0) * (k1[0] + 2.0 * k2[0] + 2.0 * k3[0] + k4[0]);
    y[1] += (h / 6.0) * (k1[1] + 2.0 * k2[1] + 2.0 * k3[1] + k4[1]);
    if (std::abs(y[0]) + std::abs(y[1]) > kOverflowBound)
      throw DivergedIntegration(
          "Jost march overflow: lambda too deep in the half plane for this grid");
    if (out) (*out)[forward ? j + 1 : j] = y;
  }
  return y;
}

void require_nls(const SampledPotential& p) {
  auto v = validate(p);
  if (!v.empty()) throw ValidationError("invalid potential: " + v.front());
  if (p.case_tag != CaseTag::NlsCase)
    throw CaseMismatch("ZS scattering requires the NLS case");
}

}  // namespace

JostSolution jost_solve(const SampledPotential& p, Complex lambda, JostKind which) {
  require_nls(p);
  const Midpoints m = midpoints(p);
  const std::size_t n = p.q.size();
  JostSolution js;
  js.lambda = lambda;
  js.which = which;
  std::vector<State> traj;

  SysForm form;
  bool forward;
  State init;
  double phase_sign;  // raw = reduced * exp(phase_sign * i * lambda * x)
  switch (which) {
    case JostKind::Phi:
      form = SysForm::SecondOsc; forward = true; init = {1.0, 0.0}; phase_sign = -1.0;
      break;
    case JostKind::PhiBar:
      form = SysForm::FirstOsc; forward = true; init = {0.0, -1.0}; phase_sign = 1.0;
      break;
    case JostKind::Psi:
      form = SysForm::FirstOsc; forward = false; init = {0.0, 1.0}; phase_sign = 1.0;
      break;
    case JostKind::PsiBar:
      form = SysForm::SecondOsc; forward = false; init = {1.0, 0.0}; phase_sign = -1.0;
      break;
  }
  march(p, m, lambda, form, forward, init, &traj);
  js.phi1.resize(n);
  js.phi2.resize(n);
  const Complex i(0.0, 1.0);
  for (std::size_t j = 0; j < n; ++j) {
    Complex ph = std::exp(phase_sign * i * lambda * p.x(j));
    js.phi1[j] = traj[j][0] * ph;
    js.phi2[j] = traj[j][1] * ph;
  }
  return js;
}

Complex a_coefficient(const SampledPotential& p, Complex lambda) {
  require_nls(p);
  const Midpoints m = midpoints(p);
  State u = march(p, m, lambda, SysForm::SecondOsc, true, {1.0, 0.0});
  return u[0];
}

Complex a_bar_coefficient(const SampledPotential& p, Complex lambda) {
  require_nls(p);
  const Midpoints m = midpoints(p);
  State u = march(p, m, lambda, SysForm::FirstOsc, true, {0.0, -1.0});
  return -u[1];
}

ScatteringData scattering_coefficients(const SampledPotential& p,
                                       const std::vector<double>& lambda_grid) {
  require_nls(p);
  for (std::size_t k = 0; k + 1 < lambda_grid.size(); ++k)
    if (!(lambda_grid[k] < lambda_grid[k + 1]))
      throw ValidationError("lambda_grid must be strictly increasing");
  const Midpoints m = midpoints(p);
  const Complex i(0.0, 1.0);
  const double xR = p.x_max();
  ScatteringData sd;
  sd.lambda_grid = lambda_grid;
  sd.t = p.t;
  sd.case_tag = p.case_tag;
  sd.a.resize(lambda_grid.size());
  sd.b.resize(lambda_grid.size());
  sd.a_bar.resize(lambda_grid.size());
  sd.b_bar.resize(lambda_grid.size());
  for (std::size_t k = 0; k < lambda_grid.size(); ++k) {
    const Complex lam(lambda_grid[k], 0.0);
    // At the right edge psi = (0,1)e^{i lam x} and psi_bar = (1,0)e^{-i lam x}
    // exactly, so the Wronskians collapse onto the phi / phi_bar marches.
    State u = march(p, m, lam, SysForm::SecondOsc, true, {1.0, 0.0});
    State ub = march(p, m, lam, SysForm::FirstOsc, true, {0.0, -1.0});
    sd.a[k] = u[0];
    sd.b[k] = u[1] * std::exp(-2.0 * i * lam * xR);
    sd.a_bar[k] = -ub[1];
    sd.b_bar[k] = ub[0] * std::exp(2.0 * i * lam * xR);
  }
  return sd;
}

Complex extend_b(const SampledPotential& p, Complex lambda) {
  require_nls(p);
  if (lambda.imag() < 0.0)
    throw ValidationError("extend_b: Im(lambda) must be >= 0");
  const std::size_t n = p.q.size();
  double rmax = 0.0;
  for (const auto& v : p.r) rmax = std::max(rmax, std::abs(v));
  if (rmax == 0.0) return Complex(0.0, 0.0);
  // Truncation check: the integrand tail r(x) e^{2 Im(lambda) x} at the right
  // edge must be negligible against the overall scale.
  const double edge = std::abs(p.r.back()) * std::exp(2.0 * lambda.imag() * p.x_max());
  if (edge > 1e-8 * std::max(1.0, rmax))
    throw EnvelopeInsufficient(
        "extend_b: decay of r does not dominate e^{2 Im(lambda) x} at the grid edge");

  const Midpoints m = midpoints(p);
  std::vector<State> traj;
  march(p, m, lambda, SysForm::SecondOsc, true, {1.0, 0.0}, &traj);
  // b = Int e^{-i lam y} r phi1 dy with phi1 = u1 e^{-i lam y}.
  const Complex i(0.0, 1.0);
  Complex acc(0.0, 0.0);
  for (std::size_t j = 0; j < n; ++j) {
    double w = (j == 0 || j + 1 == n) ? 0.5 : 1.0;
    acc += w * p.r[j] * traj[j][0] * std::exp(-2.0 * i * lambda * p.x(j));
  }
  return acc * p.dx;
}

namespace {

struct Box {
  double re_lo, re_hi, im_lo, im_hi;
  double width() const { return re_hi - re_lo; }
  double height() const { return im_hi - im_lo; }
};

template <typename F>
int winding_number(const F& f, const Box& b, int per_side) {
  // Accumulate arg increments along the counterclockwise boundary.
  double total = 0.0;
  Complex prev = f(Complex(b.re_lo, b.im_lo));
  auto walk = [&](Complex from, Complex to) {
    for (int s = 1; s <= per_side; ++s) {
      Complex z = from + (to - from) * (static_cast<double>(s) / per_side);
      Complex v = f(z);
      total += std::arg(v / prev);
      prev = v;
    }
  };
  walk(Complex(b.re_lo, b.im_lo), Complex(b.re_hi, b.im_lo));
  walk(Complex(b.re_hi, b.im_lo), Complex(b.re_hi, b.im_hi));
  walk(Complex(b.re_hi, b.im_hi), Complex(b.re_lo, b.im_hi));
  walk(Complex(b.re_lo, b.im_hi), Complex(b.re_lo, b.im_lo));
  return static_cast<int>(std::lround(total / (2.0 * M_PI)));
}

template <typename F>
int stable_winding(const F& f, const Box& b) {
  int per_side = 512;
  int w = winding_number(f, b, per_side);
  for (int iter = 0; iter < 3; ++iter) {
    per_side *= 2;
    int w2 = winding_number(f, b, per_side);
    if (w2 == w) return w;
    w = w2;
  }
  throw WindingMismatch("winding did not stabilize under boundary refinement");
}

template <typename F>
Complex newton_refine(const F& f, Complex z0, const Box& b) {
  Complex z = z0;
  const double h = 1e-5;
  for (int it = 0; it < 60; ++it) {
    Complex v = f(z);
    if (std::abs(v) < 1e-10) break;
    Complex d = (f(z + Complex(h, 0.0)) - f(z - Complex(h, 0.0))) / (2.0 * h);
    if (std::abs(d) == 0.0)
      throw WindingMismatch("Newton stalled on a flat a(lambda)");
    Complex step = v / d;
    // Keep the iterate near the box.
    double cap = std::max(b.width(), b.height());
    if (std::abs(step) > cap) step *= cap / std::abs(step);
    z -= step;
  }
  if (std::abs(f(z)) >= 1e-10)
    throw WindingMismatch("Newton failed to reach |a| < 1e-10");
  return z;
}

template <typename F>
void locate_zeros(const F& f, const Box& b, int depth, std::vector<Complex>& out) {
  int w = stable_winding(f, b);
  if (w == 0) return;
  if (w < 0)
    throw WindingMismatch("negative winding: a is not analytic on this box");
  const double tiny = 1e-7;
  const bool small = b.width() < tiny && b.height() < tiny;
  if (w == 1 || small) {
    Complex c(0.5 * (b.re_lo + b.re_hi), 0.5 * (b.im_lo + b.im_hi));
    Complex z = newton_refine(f, c, b);
    // Accept only a root that stayed near this box; Newton can escape to a
    // different zero, in which case shrinking the box re-anchors it.
    const double mw = 0.25 * b.width() + 1e-8, mh = 0.25 * b.height() + 1e-8;
    if (small || (z.real() > b.re_lo - mw && z.real() < b.re_hi + mw &&
                  z.imag() > b.im_lo - mh && z.imag() < b.im_hi + mh)) {
      out.push_back(z);
      return;
    }
  }
  if (depth > 48)
    throw WindingMismatch("subdivision depth exhausted: clustered zeros");
  // Split the longer side, slightly off-center so cuts avoid zeros.
  Box lo = b, hi = b;
  if (b.width() >= b.height()) {
    double cut = b.re_lo + 0.5061 * b.width();
    lo.re_hi = cut;
    hi.re_lo = cut;
  } else {
    double cut = b.im_lo + 0.5061 * b.height();
    lo.im_hi = cut;
    hi.im_lo = cut;
  }
  locate_zeros(f, lo, depth + 1, out);
  locate_zeros(f, hi, depth + 1, out);
}

}  // namespace

std::vector<BoundState> find_bound_states(const SampledPotential& p,
                                          const SearchBox& box) {
  require_nls(p);
  if (!(box.im_lo > 0.0))
    throw ValidationError("search box must lie strictly in the upper half plane");
  const Midpoints m = midpoints(p);
  auto a_fn = [&](Complex lam) {
    return march(p, m, lam, SysForm::SecondOsc, true, {1.0, 0.0})[0];
  };
  Box b{box.re_lo, box.re_hi, box.im_lo, box.im_hi};
  int w = stable_winding(a_fn, b);
  std::vector<Complex> zeros;
  locate_zeros(a_fn, b, 0, zeros);
  if (static_cast<int>(zeros.size()) != w)
    throw WindingMismatch("refined zero count disagrees with box winding");

  std::vector<BoundState> out;
  const std::size_t mid_node = p.q.size() / 2;
  const Complex i(0.0, 1.0);
  for (Complex lam : zeros) {
    // b_k from phi = b_k psi at an interior matching node.
    std::vector<State> phi_traj, psi_traj;
    march(p, m, lam, SysForm::SecondOsc, true, {1.0, 0.0}, &phi_traj);
    march(p, m, lam, SysForm::FirstOsc, false, {0.0, 1.0}, &psi_traj);
    const double xm = p.x(mid_node);
    Complex phase = std::exp(-2.0 * i * lam * xm);
    const State& u = phi_traj[mid_node];
    const State& w2 = psi_traj[mid_node];
    Complex bk = (std::abs(w2[1]) >= std::abs(w2[0])) ? u[1] / w2[1] * phase
                                                      : u[0] / w2[0] * phase;
    const double h = 1e-5;
    Complex ap = (a_fn(lam + Complex(h, 0.0)) - a_fn(lam - Complex(h, 0.0))) / (2.0 * h);
    BoundState s;
    s.lambda = lam;
    s.norming = bk / ap;  // m_k: residue of b/a at lambda_k
    s.half_plane = HalfPlane::Upper;
    out.push_back(s);
  }
  std::sort(out.begin(), out.end(), [](const BoundState& x, const BoundState& y) {
    return x.lambda.imag() < y.lambda.imag();
  });
  return out;
}

std::vector<BoundState> find_bound_states_lower(const SampledPotential& p,
                                                const SearchBox& box) {
  require_nls(p);
  if (!(box.im_hi < 0.0))
    throw ValidationError("mirror search box must lie strictly in the lower half plane");
  const Midpoints m = midpoints(p);
  auto abar_fn = [&](Complex lam) {
    return -march(p, m, lam, SysForm::FirstOsc, true, {0.0, -1.0})[1];
  };
  Box b{box.re_lo, box.re_hi, box.im_lo, box.im_hi};
  int w = stable_winding(abar_fn, b);
  std::vector<Complex> zeros;
  locate_zeros(abar_fn, b, 0, zeros);
  if (static_cast<int>(zeros.size()) != w)
    throw WindingMismatch("refined zero count disagrees with box winding");

  std::vector<BoundState> out;
  const std::size_t mid_node = p.q.size() / 2;
  const Complex i(0.0, 1.0);
  for (Complex lam : zeros) {
    // b_bar_k from phi_bar = b_bar_k psi_bar at the matching node.
    std::vector<State> phib_traj, psib_traj;
    march(p, m, lam, SysForm::FirstOsc, true, {0.0, -1.0}, &phib_traj);
    march(p, m, lam, SysForm::SecondOsc, false, {1.0, 0.0}, &psib_traj);
    const double xm = p.x(mid_node);
    Complex phase = std::exp(2.0 * i * lam * xm);
    const State& u = phib_traj[mid_node];
    const State& w2 = psib_traj[mid_node];
    Complex bk = (std::abs(w2[0]) >= std::abs(w2[1])) ? u[0] / w2[0] * phase
                                                      : u[1] / w2[1] * phase;
    const double h = 1e-5;
    Complex ap =
        (abar_fn(lam + Complex(h, 0.0)) - abar_fn(lam - Complex(h, 0.0))) / (2.0 * h);
    BoundState s;
    s.lambda = lam;
    s.norming = bk / ap;  // m_bar_k: residue of b_bar/a_bar at lambda_bar_k
    s.half_plane = HalfPlane::Lower;
    out.push_back(s);
  }
  std::sort(out.begin(), out.end(), [](const BoundState& x, const BoundState& y) {
    return x.lambda.imag() > y.lambda.imag();
  });
  return out;
}

}  // namespace ist
