#include "ist/pde_oracle.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

#include "ist/errors.hpp"

namespace ist {

namespace {

// In-place iterative radix-2 Cooley-Tukey; inverse scales by 1/n.
void fft(std::vector<Complex>& a, bool inverse) {
  const std::size_t n = a.size();
  for (std::size_t i = 1, j = 0; i < n; ++i) {
    std::size_t bit = n >> 1;
    for (; j & bit; bit >>= 1) j ^= bit;
    j ^= bit;
    if (i < j) std::swap(a[i], a[j]);
  }
  for (std::size_t len = 2; len <= n; len <<= 1) {
    const double ang = (inverse ? 2.0 : -2.0) * M_PI / static_cast<double>(len);
    const Complex wl(std::cos(ang), std::sin(ang));
    for (std::size_t i = 0; i < n; i += len) {
      Complex w(1.0, 0.0);
      for (std::size_t j = 0; j < len / 2; ++j) {
        Complex u = a[i + j], v = a[i + j + len / 2] * w;
        a[i + j] = u + v;
        a[i + j + len / 2] = u - v;
        w *= wl;
      }
    }
  }
  if (inverse)
    for (auto& c : a) c /= static_cast<double>(n);
}

std::size_t pad_size(std::size_t n) {
  std::size_t m = 64;
  while (m < n + n / 2) m <<= 1;
  return m;
}

std::vector<double> wavenumbers(std::size_t m, double dx) {
  std::vector<double> k(m);
  const double dk = 2.0 * M_PI / (static_cast<double>(m) * dx);
  for (std::size_t j = 0; j < m; ++j) {
    const double idx = j <= m / 2 ? static_cast<double>(j)
                                  : static_cast<double>(j) - static_cast<double>(m);
    k[j] = dk * idx;
  }
  return k;
}

void check_valid(const SampledPotential& p) {
  auto v = validate(p);
  if (!v.empty()) throw ValidationError("pde_oracle: invalid potential: " + v.front());
}

// Integrating-factor RK4 for q_t = -a * d/dx(q^pow) - q_xxx on the periodic
// box; pow = 2 with a = 3 gives KdV, pow = 3 with a = 2 gives mKdV.
std::vector<Complex> if_rk4(std::vector<Complex> qh, const std::vector<double>& k,
                            double dt, int n_steps, double a, int pow) {
  const std::size_t m = qh.size();
  std::vector<Complex> ex(m), exh(m);
  const Complex i(0.0, 1.0);
  for (std::size_t j = 0; j < m; ++j) {
    // integrating factor e^{-i k^3 t} removes the q_xxx term
    ex[j] = std::exp(i * (k[j] * k[j] * k[j]) * dt);
    exh[j] = std::exp(i * (k[j] * k[j] * k[j]) * (0.5 * dt));
  }
  auto nonlin = [&](const std::vector<Complex>& vh) {
    std::vector<Complex> w = vh;
    fft(w, true);
    for (auto& c : w) {
      Complex u = c;
      for (int t = 1; t < pow; ++t) c *= u;
    }
    fft(w, false);
    for (std::size_t j = 0; j < m; ++j) w[j] *= -a * i * k[j];
    return w;
  };
  for (int s = 0; s < n_steps; ++s) {
    // RK4 in the interaction picture: v = e^{-ik^3 t} q_hat.
    std::vector<Complex> k1 = nonlin(qh);
    std::vector<Complex> tmp(m);
    for (std::size_t j = 0; j < m; ++j) tmp[j] = exh[j] * (qh[j] + 0.5 * dt * k1[j]);
    std::vector<Complex> k2 = nonlin(tmp);
    for (std::size_t j = 0; j < m; ++j)
      tmp[j] = exh[j] * qh[j] + 0.5 * dt * k2[j];
    std::vector<Complex> k3 = nonlin(tmp);
    for (std::size_t j = 0; j < m; ++j)
      tmp[j] = ex[j] * qh[j] + dt * exh[j] * k3[j];
    std::vector<Complex> k4 = nonlin(tmp);
    for (std::size_t j = 0; j < m; ++j)
      qh[j] = ex[j] * qh[j] +
              (dt / 6.0) * (ex[j] * k1[j] + 2.0 * exh[j] * (k2[j] + k3[j]) + k4[j]);
  }
  return qh;
}

}  // namespace

SampledPotential step_nls(const SampledPotential& p, double dt, int n_steps) {
  check_valid(p);
  if (p.case_tag != CaseTag::NlsCase)
    throw CaseMismatch("step_nls: NLS-case potential required");
  if (!(dt > 0.0) || n_steps < 0)
    throw ValidationError("step_nls: need dt > 0 and n_steps >= 0");

  double dev_nls = 0.0, dev_mkdv = 0.0, qmax = 0.0, im_q = 0.0;
  for (std::size_t j = 0; j < p.size(); ++j) {
    dev_nls = std::max(dev_nls, std::abs(p.r[j] + std::conj(p.q[j])));
    dev_mkdv = std::max(dev_mkdv, std::abs(p.r[j] - p.q[j]));
    qmax = std::max(qmax, std::abs(p.q[j]));
    im_q = std::max(im_q, std::abs(p.q[j].imag()));
  }
  const double tol = 1e-10 * std::max(1.0, qmax);
  const bool mkdv = dev_mkdv <= tol && im_q <= tol;
  if (!mkdv && dev_nls > tol)
    throw ValidationError("step_nls: reduction must be r = -q* or r = q (real)");

  const std::size_t n = p.size(), m = pad_size(n);
  auto k = wavenumbers(m, p.dx);
  std::vector<Complex> qh(m, Complex(0.0, 0.0));
  for (std::size_t j = 0; j < n; ++j) qh[j] = p.q[j];

  SampledPotential out = p;
  out.t = p.t + dt * n_steps;

  if (mkdv) {
    const double kmax = M_PI / p.dx;
    if (6.0 * qmax * qmax * kmax * dt > M_PI / 4.0)
      throw CflViolation("step_nls (mKdV): advective phase per step exceeds pi/4");
    fft(qh, false);
    // r = +q is the defocusing reduction: q_t - 6 q^2 q_x + q_xxx = 0.
    qh = if_rk4(qh, k, dt, n_steps, -2.0, 3);
    fft(qh, true);
    for (std::size_t j = 0; j < n; ++j) {
      out.q[j] = Complex(qh[j].real(), 0.0);
      out.r[j] = out.q[j];
    }
    return out;
  }

  if (2.0 * qmax * qmax * dt > M_PI / 4.0)
    throw CflViolation("step_nls: nonlinear phase per step exceeds pi/4");
  const Complex i(0.0, 1.0);
  std::vector<Complex> lin(m);
  for (std::size_t j = 0; j < m; ++j) lin[j] = std::exp(-i * (k[j] * k[j]) * dt);
  for (int s = 0; s < n_steps; ++s) {
    for (auto& c : qh) c *= std::exp(i * (std::norm(c) * dt));  // half nonlinear
    fft(qh, false);
    for (std::size_t j = 0; j < m; ++j) qh[j] *= lin[j];
    fft(qh, true);
    for (auto& c : qh) c *= std::exp(i * (std::norm(c) * dt));
  }
  for (std::size_t j = 0; j < n; ++j) {
    out.q[j] = qh[j];
    out.r[j] = -std::conj(qh[j]);
  }
  return out;
}

SampledPotential step_kdv(const SampledPotential& p, double dt, int n_steps) {
  check_valid(p);
  if (p.case_tag != CaseTag::KdvCase)
    throw CaseMismatch("step_kdv: KdV-case potential required");
  if (!(dt > 0.0) || n_steps < 0)
    throw ValidationError("step_kdv: need dt > 0 and n_steps >= 0");
  double qmax = 0.0;
  for (std::size_t j = 0; j < p.size(); ++j) {
    if (std::abs(p.q[j].imag()) > 1e-10)
      throw ValidationError("step_kdv: q must be real");
    qmax = std::max(qmax, std::abs(p.q[j]));
  }
  const double kmax = M_PI / p.dx;
  if (6.0 * qmax * kmax * dt > M_PI / 4.0)
    throw CflViolation("step_kdv: advective phase per step exceeds pi/4");

  const std::size_t n = p.size(), m = pad_size(n);
  auto k = wavenumbers(m, p.dx);
  std::vector<Complex> qh(m, Complex(0.0, 0.0));
  for (std::size_t j = 0; j < n; ++j) qh[j] = p.q[j];
  fft(qh, false);
  qh = if_rk4(qh, k, dt, n_steps, 3.0, 2);  // q_t + 3 (q^2)_x + q_xxx = 0
  fft(qh, true);

  SampledPotential out = p;
  out.t = p.t + dt * n_steps;
  for (std::size_t j = 0; j < n; ++j) out.q[j] = Complex(qh[j].real(), 0.0);
  return out;
}

}  // namespace ist
