#ifndef IST_MODEL_HPP
#define IST_MODEL_HPP

#include <complex>
#include <iosfwd>
#include <string>
#include <vector>

namespace ist {

using Complex = std::complex<double>;

enum class CaseTag { NlsCase, KdvCase };
enum class HalfPlane { Upper, Lower };

// Complex-valued pair (q, r) sampled on a uniform x-grid with a time stamp.
// Immutable by convention once constructed; all operations return new values.
struct SampledPotential {
  double x0 = 0.0;       // left endpoint
  double dx = 1.0;       // grid step, > 0
  std::vector<Complex> q;
  std::vector<Complex> r;
  double t = 0.0;
  CaseTag case_tag = CaseTag::NlsCase;

  std::size_t size() const { return q.size(); }
  double x(std::size_t j) const { return x0 + dx * static_cast<double>(j); }
  double x_max() const { return x(q.empty() ? 0 : q.size() - 1); }
};

// Rational dispersion function A0(lambda), polynomial coefficients in
// ascending degree. The default denominator [1] makes it a polynomial.
struct DispersionSpec {
  std::vector<Complex> numerator;
  std::vector<Complex> denominator{Complex(1.0, 0.0)};
  std::string label;

  int numerator_degree() const;
  int denominator_degree() const;
  // deg(numerator) - deg(denominator)
  int effective_degree() const;
  bool is_polynomial() const { return denominator_degree() == 0; }
  Complex eval(Complex z) const;
};

// Named presets from the worked dispersion examples.
// kdv3: -4iz^3, nls2: -2iz^2, mkdv3: -4iz^3 (r=q reduction), transport1: -iz.
DispersionSpec dispersion_preset(const std::string& name);

struct BoundState {
  Complex lambda;   // Im != 0
  Complex norming;  // residue-derived m_k / m_bar_k, or KdV c_n
  HalfPlane half_plane = HalfPlane::Upper;
};

// Scattering coefficients on a real lambda grid plus the discrete spectrum.
// KdV case stores a = 1/T and b = R1/T; a_bar, b_bar hold 1/T and R2/T of the
// mirrored relation so that all four slots stay meaningful.
struct ScatteringData {
  std::vector<double> lambda_grid;
  std::vector<Complex> a, b, a_bar, b_bar;
  std::vector<BoundState> bound_states;
  double t = 0.0;
  DispersionSpec dispersion;
  CaseTag case_tag = CaseTag::NlsCase;
};

enum class Side { Right, Left };

// Fitted constants of a super-exponential bound C * exp(-c * |x|^(1+delta)).
struct DecayEnvelope {
  double amplitude = 0.0;        // C
  double rate = 0.0;             // c
  double exponent_excess = 0.0;  // delta (or beta)
  Side side = Side::Right;
  double residual = 0.0;  // sup-norm of log deviation over the fit window
};

enum class Verdict { ConditionsMet, ConditionsFailed, Inconclusive };

struct IndicatorSample {
  double angle = 0.0;  // phi in [0, pi]
  double h_b = 0.0;    // finite-radius proxy for the indicator function
  double radius_cap = 0.0;
  bool attained = false;  // false: ray dropped or b identically below floor
};

struct CertificateReport {
  double rho_lo = 0.0;  // open window (1 + 1/delta_eff, deg_eff(A0))
  double rho_hi = 0.0;
  bool window_nonempty = false;
  std::vector<IndicatorSample> indicator_samples;
  Verdict verdict = Verdict::Inconclusive;
  std::string notes;
};

// Empty list iff every SampledPotential invariant holds; each entry names the
// field and the violated rule. Total function, never throws.
std::vector<std::string> validate(const SampledPotential& p);

// Trapezoid estimate of the (1+|x|)|q| weighted integrability proxy.
double weighted_l1(const SampledPotential& p);

// ---- External formats ------------------------------------------------------
// CSV for SampledPotential: leading comment line `# t=<float> case=<nls|kdv>`,
// header `x,re_q,im_q,re_r,im_r`, one row per node. JSON for ScatteringData
// and CertificateReport with field names matching the structs.

void write_potential_csv(std::ostream& os, const SampledPotential& p);
SampledPotential read_potential_csv(std::istream& is);
void write_potential_csv_file(const std::string& path, const SampledPotential& p);
SampledPotential read_potential_csv_file(const std::string& path);

std::string scattering_to_json(const ScatteringData& sd);
ScatteringData scattering_from_json(const std::string& text);

std::string report_to_json(const CertificateReport& rep);
CertificateReport report_from_json(const std::string& text);

// Resample onto a uniform grid by cubic interpolation (ingestion path for
// non-uniform input).
SampledPotential resample_uniform(const std::vector<double>& x,
                                  const std::vector<Complex>& q,
                                  const std::vector<Complex>& r, double t,
                                  CaseTag tag, double x0, double dx,
                                  std::size_t n);

}  // namespace ist

#endif
