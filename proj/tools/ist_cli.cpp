#include <CLI11.hpp>
#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <json.hpp>
#include <sstream>
#include <string>
#include <vector>

#include "ist/certifier.hpp"
#include "ist/errors.hpp"
#include "ist/evolution.hpp"
#include "ist/marchenko.hpp"
#include "ist/model.hpp"
#include "ist/pde_oracle.hpp"
#include "ist/schrodinger_scattering.hpp"
#include "ist/solitons.hpp"
#include "ist/zs_scattering.hpp"

namespace {

using nlohmann::json;

struct GridSpec {
  double lo = 0.0, hi = 0.0;
  std::size_t n = 0;
};

GridSpec parse_grid(const std::string& s) {
  GridSpec g;
  char c1 = 0, c2 = 0;
  std::istringstream is(s);
  if (!(is >> g.lo >> c1 >> g.hi >> c2 >> g.n) || c1 != ':' || c2 != ':' ||
      !(g.hi > g.lo) || g.n < 2)
    throw ist::ValidationError("bad grid spec (want lo:hi:n): " + s);
  return g;
}

// Midpoint-style lambda grid: avoids a node at 0 when the range straddles it.
std::vector<double> lambda_grid(const GridSpec& g) {
  std::vector<double> v(g.n);
  const double step = (g.hi - g.lo) / static_cast<double>(g.n);
  for (std::size_t j = 0; j < g.n; ++j)
    v[j] = g.lo + (static_cast<double>(j) + 0.5) * step;
  return v;
}

std::string slurp(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw ist::ValidationError("cannot open " + path);
  std::ostringstream os;
  os << is.rdbuf();
  return os.str();
}

void spit(const std::string& path, const std::string& text) {
  std::ofstream os(path);
  if (!os) throw ist::ValidationError("cannot write " + path);
  os << text;
}

ist::DispersionSpec dispersion_for(const std::string& name,
                                   const ist::SampledPotential& p) {
  if (!name.empty()) return ist::dispersion_preset(name);
  return ist::dispersion_preset(p.case_tag == ist::CaseTag::KdvCase ? "kdv3"
                                                                    : "nls2");
}

// Bound-state search mirroring the roundtrip defaults.
std::vector<ist::BoundState> auto_bound_states(const ist::SampledPotential& p) {
  if (p.case_tag == ist::CaseTag::KdvCase) {
    double qmax = 0.0;
    for (std::size_t j = 0; j < p.size(); ++j)
      qmax = std::max(qmax, std::abs(p.q[j]));
    if (qmax < 1e-14) return {};
    return ist::kdv_bound_states(p, std::sqrt(qmax) + 0.2);
  }
  double l1 = 0.0, scale = 0.0;
  for (std::size_t j = 0; j < p.size(); ++j) {
    l1 += 0.5 * (std::abs(p.q[j]) + std::abs(p.r[j])) * p.dx;
    scale = std::max({scale, std::abs(p.q[j]), std::abs(p.r[j])});
  }
  if (scale < 1e-14) return {};
  const double beta_max = 0.55 * l1 + 0.3;
  ist::SearchBox upper{-4.0, 4.0, 0.02, beta_max};
  ist::SearchBox lower{-4.0, 4.0, -beta_max, -0.02};
  auto out = ist::find_bound_states(p, upper);
  auto ls = ist::find_bound_states_lower(p, lower);
  out.insert(out.end(), ls.begin(), ls.end());
  return out;
}

ist::SampledPotential soliton_from_json(const std::string& text) {
  json j = json::parse(text);
  std::vector<ist::BoundState> upper, lower;
  for (const auto& s : j.at("states")) {
    ist::BoundState b;
    b.lambda = ist::Complex(s.at("lambda")[0].get<double>(),
                            s.at("lambda")[1].get<double>());
    b.norming = ist::Complex(s.at("norming")[0].get<double>(),
                             s.at("norming")[1].get<double>());
    const std::string hp = s.value("half_plane", "upper");
    if (hp == "upper") {
      b.half_plane = ist::HalfPlane::Upper;
      upper.push_back(b);
    } else if (hp == "lower") {
      b.half_plane = ist::HalfPlane::Lower;
      lower.push_back(b);
    } else {
      throw ist::ValidationError("soliton spec: half_plane must be upper|lower");
    }
  }
  auto disp = ist::dispersion_preset(j.value("dispersion", "nls2"));
  return ist::soliton_potential(upper, lower, disp, j.at("x0").get<double>(),
                                j.at("dx").get<double>(),
                                j.at("n").get<std::size_t>(),
                                j.value("t", 0.0));
}

// Flags may come from a JSON config file; missing-on-command-line keys are
// appended as if typed.
std::vector<std::string> inject_config(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  std::string config;
  for (std::size_t i = 0; i + 1 < args.size(); ++i)
    if (args[i] == "--config") config = args[i + 1];
  if (config.empty()) return args;
  json j = json::parse(slurp(config));
  for (auto it = j.begin(); it != j.end(); ++it) {
    const std::string flag = "--" + it.key();
    if (std::find(args.begin(), args.end(), flag) != args.end()) continue;
    args.push_back(flag);
    if (it.value().is_string())
      args.push_back(it.value().get<std::string>());
    else
      args.push_back(it.value().dump());
  }
  return args;
}

double linf_diff(const ist::SampledPotential& a, const ist::SampledPotential& b) {
  double m = 0.0;
  const std::size_t n = std::min(a.size(), b.size());
  for (std::size_t j = 0; j < n; ++j)
    m = std::max({m, std::abs(a.q[j] - b.q[j]), std::abs(a.r[j] - b.r[j])});
  return m;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"inverse-scattering toolkit"};
  app.require_subcommand(1);
  int threads = 0;
  std::string config;
  app.add_option("--threads", threads, "worker thread count (0 = auto)");
  app.add_option("--config", config, "JSON config file mirroring flags");
  if (const char* env = std::getenv("IST_THREADS")) threads = std::atoi(env);

  std::string in, out, out2, grid_s, disp_s, spec_s, t0_s;
  double t1 = 0.0, dt = 0.0;
  int steps = 0;

  auto* fwd = app.add_subcommand("forward", "potential CSV -> scattering JSON");
  fwd->add_option("--in", in)->required();
  fwd->add_option("--out", out)->required();
  fwd->add_option("--grid", grid_s, "lambda grid lo:hi:n")->required();
  fwd->add_option("--dispersion", disp_s, "preset to stamp on the output");

  auto* evo = app.add_subcommand("evolve", "scattering JSON + t1 -> scattering JSON");
  evo->add_option("--in", in)->required();
  evo->add_option("--out", out)->required();
  evo->add_option("--t1", t1)->required();

  auto* inv = app.add_subcommand("inverse", "scattering JSON -> potential CSV");
  inv->add_option("--in", in)->required();
  inv->add_option("--out", out)->required();
  inv->add_option("--grid", grid_s, "x grid lo:hi:n")->required();

  auto* sol = app.add_subcommand("soliton", "spec JSON -> potential CSV");
  sol->add_option("--spec", spec_s)->required();
  sol->add_option("--out", out)->required();

  auto* cert = app.add_subcommand("certify", "two potential CSVs -> report JSON");
  cert->add_option("--t0", t0_s)->required();
  cert->add_option("--t1", in)->required();
  cert->add_option("--dispersion", disp_s)->required();
  cert->add_option("--out", out);

  auto* rt = app.add_subcommand("roundtrip", "forward -> evolve -> inverse");
  rt->add_option("--in", in)->required();
  rt->add_option("--out", out)->required();
  rt->add_option("--t1", t1)->required();
  rt->add_option("--dispersion", disp_s);

  auto* orc = app.add_subcommand("oracle", "direct PDE integration");
  orc->add_option("--in", in)->required();
  orc->add_option("--out", out)->required();
  orc->add_option("--dt", dt)->required();
  orc->add_option("--steps", steps)->required();

  try {
    auto args = inject_config(argc, argv);
    std::vector<const char*> cargs{argv[0]};
    for (const auto& a : args) cargs.push_back(a.c_str());
    app.parse(static_cast<int>(cargs.size()), cargs.data());

    if (*fwd) {
      auto p = ist::read_potential_csv_file(in);
      auto grid = lambda_grid(parse_grid(grid_s));
      ist::ScatteringData sd = p.case_tag == ist::CaseTag::KdvCase
                                   ? ist::kdv_coefficients(p, grid)
                                   : ist::scattering_coefficients(p, grid);
      sd.bound_states = auto_bound_states(p);
      sd.dispersion = dispersion_for(disp_s, p);
      spit(out, ist::scattering_to_json(sd));
    } else if (*evo) {
      auto sd = ist::scattering_from_json(slurp(in));
      spit(out, ist::scattering_to_json(ist::evolve(sd, t1)));
    } else if (*inv) {
      auto sd = ist::scattering_from_json(slurp(in));
      auto g = parse_grid(grid_s);
      const double dx = (g.hi - g.lo) / static_cast<double>(g.n - 1);
      auto kern = ist::build_kernels(sd);
      auto p = ist::solve_marchenko(kern, g.lo, dx, g.n);
      ist::write_potential_csv_file(out, p);
    } else if (*sol) {
      ist::write_potential_csv_file(out, soliton_from_json(slurp(spec_s)));
    } else if (*cert) {
      auto p0 = ist::read_potential_csv_file(t0_s);
      auto p1 = ist::read_potential_csv_file(in);
      auto rep = ist::certify(p0, p1, ist::dispersion_preset(disp_s));
      const std::string text = ist::report_to_json(rep);
      if (!out.empty()) spit(out, text);
      std::cout << text << "\n";
    } else if (*rt) {
      auto p = ist::read_potential_csv_file(in);
      auto back = ist::roundtrip(p, t1, dispersion_for(disp_s, p));
      ist::write_potential_csv_file(out, back);
      std::cout << "max_diff_vs_input=" << linf_diff(p, back) << "\n";
    } else if (*orc) {
      auto p = ist::read_potential_csv_file(in);
      auto q = p.case_tag == ist::CaseTag::KdvCase ? ist::step_kdv(p, dt, steps)
                                                   : ist::step_nls(p, dt, steps);
      ist::write_potential_csv_file(out, q);
    }
    return 0;
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  } catch (const ist::ValidationError& e) {
    std::cerr << "validation error: " << e.what() << "\n";
    return 2;
  } catch (const ist::IstError& e) {
    std::cerr << "numerical error: " << e.what() << "\n";
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
}
