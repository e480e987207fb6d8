#include "ist/model.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

#include "ist/errors.hpp"
#include "json.hpp"

namespace ist {

namespace {

int poly_degree(const std::vector<Complex>& c) {
  for (int k = static_cast<int>(c.size()) - 1; k >= 0; --k)
    if (c[static_cast<std::size_t>(k)] != Complex(0.0, 0.0)) return k;
  return -1;  // zero polynomial
}

Complex horner(const std::vector<Complex>& c, Complex z) {
  Complex acc(0.0, 0.0);
  for (auto it = c.rbegin(); it != c.rend(); ++it) acc = acc * z + *it;
  return acc;
}

}  // namespace

int DispersionSpec::numerator_degree() const { return poly_degree(numerator); }
int DispersionSpec::denominator_degree() const { return poly_degree(denominator); }

int DispersionSpec::effective_degree() const {
  return numerator_degree() - denominator_degree();
}

Complex DispersionSpec::eval(Complex z) const {
  Complex den = horner(denominator, z);
  if (den == Complex(0.0, 0.0))
    throw SingularLambda("dispersion denominator vanishes at lambda");
  return horner(numerator, z) / den;
}

DispersionSpec dispersion_preset(const std::string& name) {
  DispersionSpec d;
  d.label = name;
  const Complex i(0.0, 1.0);
  if (name == "kdv3" || name == "mkdv3") {
    d.numerator = {0.0, 0.0, 0.0, -4.0 * i};
  } else if (name == "nls2") {
    d.numerator = {0.0, 0.0, -2.0 * i};
  } else if (name == "transport1") {
    d.numerator = {0.0, -i};
  } else {
    throw ValidationError("unknown dispersion preset: " + name);
  }
  return d;
}

std::vector<std::string> validate(const SampledPotential& p) {
  std::vector<std::string> out;
  if (p.q.size() != p.r.size()) out.push_back("q/r: lengths differ");
  if (p.q.size() < 8) out.push_back("q: grid too short (need >= 8 nodes)");
  if (!(p.dx > 0.0) || !std::isfinite(p.dx)) out.push_back("dx: must be finite and > 0");
  if (!std::isfinite(p.x0)) out.push_back("x0: must be finite");
  if (!std::isfinite(p.t)) out.push_back("t: must be finite");
  for (const auto& v : p.q)
    if (!std::isfinite(v.real()) || !std::isfinite(v.imag())) {
      out.push_back("q: non-finite entry");
      break;
    }
  for (const auto& v : p.r)
    if (!std::isfinite(v.real()) || !std::isfinite(v.imag())) {
      out.push_back("r: non-finite entry");
      break;
    }
  if (p.case_tag == CaseTag::KdvCase) {
    for (const auto& v : p.r)
      if (v != Complex(-1.0, 0.0)) {
        out.push_back("r: must equal -1 in KdV case");
        break;
      }
  }
  if (p.q.size() == p.r.size() && !p.q.empty()) {
    double w = weighted_l1(p);
    if (!std::isfinite(w)) out.push_back("q: weighted L1 proxy not finite");
  }
  return out;
}

double weighted_l1(const SampledPotential& p) {
  if (p.q.empty()) return 0.0;
  double acc = 0.0;
  for (std::size_t j = 0; j < p.q.size(); ++j) {
    double w = (j == 0 || j + 1 == p.q.size()) ? 0.5 : 1.0;
    acc += w * (1.0 + std::abs(p.x(j))) * std::abs(p.q[j]);
  }
  return acc * p.dx;
}

// ---- CSV -------------------------------------------------------------------

void write_potential_csv(std::ostream& os, const SampledPotential& p) {
  os.precision(17);
  os << "# t=" << p.t << " case=" << (p.case_tag == CaseTag::NlsCase ? "nls" : "kdv")
     << "\n";
  os << "x,re_q,im_q,re_r,im_r\n";
  for (std::size_t j = 0; j < p.q.size(); ++j) {
    os << p.x(j) << ',' << p.q[j].real() << ',' << p.q[j].imag() << ','
       << p.r[j].real() << ',' << p.r[j].imag() << '\n';
  }
}

SampledPotential read_potential_csv(std::istream& is) {
  SampledPotential p;
  std::string line;
  if (!std::getline(is, line) || line.rfind("#", 0) != 0)
    throw ValidationError("potential CSV: missing leading comment line");
  {
    std::istringstream hs(line.substr(1));
    std::string tok;
    bool have_t = false, have_case = false;
    while (hs >> tok) {
      if (tok.rfind("t=", 0) == 0) {
        p.t = std::stod(tok.substr(2));
        have_t = true;
      } else if (tok.rfind("case=", 0) == 0) {
        std::string c = tok.substr(5);
        if (c == "nls")
          p.case_tag = CaseTag::NlsCase;
        else if (c == "kdv")
          p.case_tag = CaseTag::KdvCase;
        else
          throw ValidationError("potential CSV: unknown case tag " + c);
        have_case = true;
      }
    }
    if (!have_t || !have_case)
      throw ValidationError("potential CSV: comment line must carry t= and case=");
  }
  if (!std::getline(is, line) || line != "x,re_q,im_q,re_r,im_r")
    throw ValidationError("potential CSV: bad header");
  std::vector<double> xs;
  while (std::getline(is, line)) {
    if (line.empty() || line[0] == '#') continue;
    std::istringstream ls(line);
    double x, rq, iq, rr, ir;
    char c;
    if (!(ls >> x >> c >> rq >> c >> iq >> c >> rr >> c >> ir))
      throw ValidationError("potential CSV: bad row: " + line);
    xs.push_back(x);
    p.q.emplace_back(rq, iq);
    p.r.emplace_back(rr, ir);
  }
  if (xs.size() < 2) throw ValidationError("potential CSV: too few rows");
  p.x0 = xs.front();
  p.dx = (xs.back() - xs.front()) / static_cast<double>(xs.size() - 1);
  // Tolerate slightly non-uniform input by resampling.
  double worst = 0.0;
  for (std::size_t j = 0; j < xs.size(); ++j)
    worst = std::max(worst, std::abs(xs[j] - (p.x0 + p.dx * static_cast<double>(j))));
  if (worst > 1e-9 * std::max(1.0, std::abs(p.dx))) {
    return resample_uniform(xs, p.q, p.r, p.t, p.case_tag, p.x0, p.dx, xs.size());
  }
  return p;
}

void write_potential_csv_file(const std::string& path, const SampledPotential& p) {
  std::ofstream os(path);
  if (!os) throw ValidationError("cannot open for writing: " + path);
  write_potential_csv(os, p);
}

SampledPotential read_potential_csv_file(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw ValidationError("cannot open: " + path);
  return read_potential_csv(is);
}

SampledPotential resample_uniform(const std::vector<double>& x,
                                  const std::vector<Complex>& q,
                                  const std::vector<Complex>& r, double t,
                                  CaseTag tag, double x0, double dx,
                                  std::size_t n) {
  if (x.size() != q.size() || x.size() != r.size() || x.size() < 4)
    throw ValidationError("resample: need >= 4 matching samples");
  auto interp = [&](const std::vector<Complex>& f, double xq) {
    // Cubic Lagrange on the 4 nearest source nodes.
    auto it = std::lower_bound(x.begin(), x.end(), xq);
    std::size_t j = static_cast<std::size_t>(std::distance(x.begin(), it));
    std::size_t j0 = (j < 2) ? 0 : j - 2;
    j0 = std::min(j0, x.size() - 4);
    Complex acc(0.0, 0.0);
    for (std::size_t a = 0; a < 4; ++a) {
      double w = 1.0;
      for (std::size_t b = 0; b < 4; ++b)
        if (a != b) w *= (xq - x[j0 + b]) / (x[j0 + a] - x[j0 + b]);
      acc += w * f[j0 + a];
    }
    return acc;
  };
  SampledPotential p;
  p.x0 = x0;
  p.dx = dx;
  p.t = t;
  p.case_tag = tag;
  p.q.resize(n);
  p.r.resize(n);
  for (std::size_t j = 0; j < n; ++j) {
    double xq = x0 + dx * static_cast<double>(j);
    p.q[j] = interp(q, xq);
    p.r[j] = interp(r, xq);
  }
  if (tag == CaseTag::KdvCase)
    for (auto& v : p.r) v = Complex(-1.0, 0.0);
  return p;
}

// ---- JSON ------------------------------------------------------------------

namespace {

using nlohmann::json;

json cplx(const Complex& z) { return json::array({z.real(), z.imag()}); }

Complex cplx(const json& j) {
  if (!j.is_array() || j.size() != 2)
    throw ValidationError("JSON: complex value must be [re, im]");
  return Complex(j[0].get<double>(), j[1].get<double>());
}

json cvec(const std::vector<Complex>& v) {
  json a = json::array();
  for (const auto& z : v) a.push_back(cplx(z));
  return a;
}

std::vector<Complex> cvec(const json& j) {
  std::vector<Complex> v;
  for (const auto& e : j) v.push_back(cplx(e));
  return v;
}

json dispersion_to_json(const DispersionSpec& d) {
  return json{{"numerator", cvec(d.numerator)},
              {"denominator", cvec(d.denominator)},
              {"label", d.label}};
}

DispersionSpec dispersion_from_json(const json& j) {
  DispersionSpec d;
  d.numerator = cvec(j.at("numerator"));
  d.denominator = cvec(j.at("denominator"));
  d.label = j.value("label", "");
  return d;
}

}  // namespace

std::string scattering_to_json(const ScatteringData& sd) {
  json bs = json::array();
  for (const auto& s : sd.bound_states)
    bs.push_back(json{{"lambda", cplx(s.lambda)},
                      {"norming", cplx(s.norming)},
                      {"half_plane", s.half_plane == HalfPlane::Upper ? "Upper" : "Lower"}});
  json j{{"lambda_grid", sd.lambda_grid},
         {"a", cvec(sd.a)},
         {"b", cvec(sd.b)},
         {"a_bar", cvec(sd.a_bar)},
         {"b_bar", cvec(sd.b_bar)},
         {"bound_states", bs},
         {"t", sd.t},
         {"dispersion", dispersion_to_json(sd.dispersion)},
         {"case_tag", sd.case_tag == CaseTag::NlsCase ? "nls" : "kdv"}};
  return j.dump(2);
}

ScatteringData scattering_from_json(const std::string& text) {
  json j = json::parse(text);
  ScatteringData sd;
  sd.lambda_grid = j.at("lambda_grid").get<std::vector<double>>();
  sd.a = cvec(j.at("a"));
  sd.b = cvec(j.at("b"));
  sd.a_bar = cvec(j.at("a_bar"));
  sd.b_bar = cvec(j.at("b_bar"));
  for (const auto& e : j.at("bound_states")) {
    BoundState s;
    s.lambda = cplx(e.at("lambda"));
    s.norming = cplx(e.at("norming"));
    std::string hp = e.at("half_plane").get<std::string>();
    if (hp == "Upper")
      s.half_plane = HalfPlane::Upper;
    else if (hp == "Lower")
      s.half_plane = HalfPlane::Lower;
    else
      throw ValidationError("JSON: bad half_plane " + hp);
    sd.bound_states.push_back(s);
  }
  sd.t = j.at("t").get<double>();
  sd.dispersion = dispersion_from_json(j.at("dispersion"));
  std::string c = j.at("case_tag").get<std::string>();
  if (c == "nls")
    sd.case_tag = CaseTag::NlsCase;
  else if (c == "kdv")
    sd.case_tag = CaseTag::KdvCase;
  else
    throw ValidationError("JSON: bad case_tag " + c);
  return sd;
}

std::string report_to_json(const CertificateReport& rep) {
  json samples = json::array();
  for (const auto& s : rep.indicator_samples)
    samples.push_back(json{{"angle", s.angle},
                           {"h_b", s.attained ? json(s.h_b) : json()},
                           {"radius_cap", s.radius_cap},
                           {"attained", s.attained}});
  const char* v = rep.verdict == Verdict::ConditionsMet      ? "ConditionsMet"
                  : rep.verdict == Verdict::ConditionsFailed ? "ConditionsFailed"
                                                             : "Inconclusive";
  json j{{"rho_window", json::array({rep.rho_lo, rep.rho_hi})},
         {"window_nonempty", rep.window_nonempty},
         {"indicator_samples", samples},
         {"verdict", v},
         {"notes", rep.notes}};
  return j.dump(2);
}

CertificateReport report_from_json(const std::string& text) {
  json j = json::parse(text);
  CertificateReport rep;
  rep.rho_lo = j.at("rho_window")[0].get<double>();
  rep.rho_hi = j.at("rho_window")[1].get<double>();
  rep.window_nonempty = j.at("window_nonempty").get<bool>();
  for (const auto& e : j.at("indicator_samples")) {
    IndicatorSample s;
    s.angle = e.at("angle").get<double>();
    s.attained = e.at("attained").get<bool>();
    s.h_b = s.attained ? e.at("h_b").get<double>()
                       : -std::numeric_limits<double>::infinity();
    s.radius_cap = e.at("radius_cap").get<double>();
    rep.indicator_samples.push_back(s);
  }
  std::string v = j.at("verdict").get<std::string>();
  if (v == "ConditionsMet")
    rep.verdict = Verdict::ConditionsMet;
  else if (v == "ConditionsFailed")
    rep.verdict = Verdict::ConditionsFailed;
  else
    rep.verdict = Verdict::Inconclusive;
  rep.notes = j.value("notes", "");
  return rep;
}

}  // namespace ist
