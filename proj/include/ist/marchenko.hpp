#ifndef IST_MARCHENKO_HPP
#define IST_MARCHENKO_HPP

#include <string>
#include <vector>

#include "ist/model.hpp"

namespace ist {

// One Marchenko kernel F(z): an exact finite sum of decaying exponentials
// (bound-state residues) plus a tabulated continuous part (Fourier transform
// of the reflection data) on a uniform z-grid, interpolated cubically.
struct SampledKernel {
  double z0 = 0.0;
  double dz = 0.0;
  std::vector<Complex> values;  // continuous part; empty for reflectionless data

  struct ExpTerm {
    Complex coef;
    Complex alpha;  // term = coef * e^{alpha z}, Re(alpha) < 0
  };
  std::vector<ExpTerm> exp_terms;

  double bandwidth = 0.0;     // max oscillation rate (rad per unit z)
  double values_scale = 0.0;  // max |values|, set at build time

  Complex eval(double z) const;
  // dF/dz: exact on the exponential terms, differentiated cubic interpolation
  // on the tabulated part.
  Complex eval_deriv(double z) const;
  // Largest z where |F| is above eps * max(1, |F(0)|); -inf for the zero kernel.
  double decay_point(double eps) const;
};

struct MarchenkoKernels {
  CaseTag case_tag = CaseTag::NlsCase;
  // NLS case: right kernels F, F_bar of the coupled GLM system, plus the left
  // kernels G, G_bar (continuous parts only; kept for consistency checks, the
  // inversion uses the right pair).
  SampledKernel f, f_bar, g, g_bar;
  // KdV case: F1 (right) and F2 (left) of the scalar GLM equations.
  SampledKernel f1, f2;
  double t = 0.0;
  std::string notes;
};

// Fourier-synthesizes the kernels from sd on z in [z_lo, z_hi] with step dz.
// Continuous parts use the midpoint/trapezoid rule over sd.lambda_grid; the
// bound-state sums are kept in exact exponential form. Reflection data below
// 1e-5 absolute magnitude is dropped entirely (reflectionless short-circuit):
// it sits at the forward map's truncation-noise level and would otherwise stop
// the kernel tails from ever decaying.
MarchenkoKernels build_kernels(const ScatteringData& sd, double z_lo,
                               double z_hi, double dz = 0.02);

// Kernel range chosen automatically from the target x-interval of a later
// inversion: z in [2*x_lo - 2, max(2*x_hi + 2, exponential decay point)].
MarchenkoKernels build_kernels(const ScatteringData& sd);

struct SolveOptions {
  int gl_order = 8;            // Gauss-Legendre points per panel
  double panel_max = 6.0;      // max panel width
  double panel_rad = 5.0;      // target max phase per panel: width <= rad/bandwidth
  double trunc_eps = 1e-6;     // relative kernel floor for domain truncation
                               // (truncation error enters quadratically)
  double cond_limit = 1e12;    // Nystroem ill-conditioning threshold
  std::size_t max_nodes = 6000;
};

// Solves the GLM equations at every node of the uniform output grid and reads
// the potential off the diagonal: NLS q = -2 K1(x,x), r = -2 Kbar2(x,x); KdV
// q = -d/dx B1(x,0+), r = -1. Throws IllConditioned past the condition limit
// and GridTooShort when the tabulated kernel does not cover the needed range.
SampledPotential solve_marchenko(const MarchenkoKernels& k, double x0, double dx,
                                 std::size_t n, const SolveOptions& opt = {});

// forward -> evolve(t1) -> build_kernels -> solve_marchenko on p's own grid.
// Bound states are found automatically (KdV: real-line bisection on 1/T; NLS:
// argument-principle search, with the lower family mirrored through the
// r = -conj(q) symmetry when it holds and searched directly otherwise).
SampledPotential roundtrip(const SampledPotential& p, double t1,
                           const DispersionSpec& dispersion,
                           const SolveOptions& opt = {});

}  // namespace ist

#endif
