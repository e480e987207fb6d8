#ifndef IST_TESTS_HELPERS_HPP
#define IST_TESTS_HELPERS_HPP

#include <cmath>
#include <cstddef>
#include <vector>

#include "ist/model.hpp"

namespace helpers {

// (q, r) = (amp_q * sech, amp_r * sech) on a uniform grid.
inline ist::SampledPotential sech_pair(double amp_q, double amp_r, double x0,
                                       double dx, std::size_t n) {
  ist::SampledPotential p;
  p.x0 = x0;
  p.dx = dx;
  p.case_tag = ist::CaseTag::NlsCase;
  p.q.resize(n);
  p.r.resize(n);
  for (std::size_t j = 0; j < n; ++j) {
    double s = 1.0 / std::cosh(p.x(j));
    p.q[j] = amp_q * s;
    p.r[j] = amp_r * s;
  }
  return p;
}

// KdV-case potential q = amp * sech^2, r = -1.
inline ist::SampledPotential sech2_kdv(double amp, double x0, double dx,
                                       std::size_t n) {
  ist::SampledPotential p;
  p.x0 = x0;
  p.dx = dx;
  p.case_tag = ist::CaseTag::KdvCase;
  p.q.resize(n);
  p.r.assign(n, ist::Complex(-1.0, 0.0));
  for (std::size_t j = 0; j < n; ++j) {
    double c = std::cosh(p.x(j));
    p.q[j] = amp / (c * c);
  }
  return p;
}

// Focusing Gaussian pair q = amp e^{-x^2}, r = -conj(q).
inline ist::SampledPotential gauss_pair(double amp, double x0, double dx,
                                        std::size_t n) {
  ist::SampledPotential p;
  p.x0 = x0;
  p.dx = dx;
  p.case_tag = ist::CaseTag::NlsCase;
  p.q.resize(n);
  p.r.resize(n);
  for (std::size_t j = 0; j < n; ++j) {
    double x = p.x(j);
    double g = amp * std::exp(-x * x);
    p.q[j] = g;
    p.r[j] = -g;
  }
  return p;
}

// Midpoint lambda grid on [-half, half] with m nodes (no node at 0).
inline std::vector<double> midgrid(double half, std::size_t m) {
  std::vector<double> g(m);
  double d = 2.0 * half / static_cast<double>(m);
  for (std::size_t j = 0; j < m; ++j)
    g[j] = -half + (static_cast<double>(j) + 0.5) * d;
  return g;
}

inline double max_q_diff(const ist::SampledPotential& a,
                         const ist::SampledPotential& b) {
  double e = 0.0;
  for (std::size_t j = 0; j < a.size() && j < b.size(); ++j)
    e = std::max(e, std::abs(a.q[j] - b.q[j]));
  return e;
}

inline double max_qr_diff(const ist::SampledPotential& a,
                          const ist::SampledPotential& b) {
  double e = max_q_diff(a, b);
  for (std::size_t j = 0; j < a.size() && j < b.size(); ++j)
    e = std::max(e, std::abs(a.r[j] - b.r[j]));
  return e;
}

}  // namespace helpers

#endif
