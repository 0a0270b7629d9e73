// SPDX-License-Identifier: Apache-2.0
#include "experiments.hpp"

#include <openssl/evp.h>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "qbm/diagnostics.hpp"
#include "qbm/errors.hpp"
#include "qbm/io.hpp"
#include "qbm/kernels.hpp"
#include "qbm/mixture.hpp"
#include "qbm/phasespace.hpp"
#include "qbm/qsd.hpp"
#include "qbm/reconstruction.hpp"
#include "qbm/warnings.hpp"

#ifndef QBM_VERSION
#define QBM_VERSION "0.0.0"
#endif

namespace qbm::cli {

using nlohmann::json;

namespace {

json raw(const std::string& s) { return json::parse(s); }

// t_list in the config, else the given multiples of the localization time
std::vector<double> times(const ExperimentConfig& c, const DerivedScales& s, std::vector<double> in_t_loc) {
  if (!c.t_list.empty()) return c.t_list;
  for (double& t : in_t_loc) t *= s.t_loc;
  return in_t_loc;
}

Axis density_grid(const ExperimentConfig& c, const DerivedScales& s) {
  if (c.box > 0) return centered_axis(0.0, c.box, c.grid_points);
  return density_axis(state_moments(c.state, c.t_final, s), c.model.hbar);
}

template <class Grid>
void put_grid(Artifacts& a, const std::string& stem, const Grid& g) {
  std::ostringstream os;
  io::write_csv(os, g);
  a.put(stem + ".csv", os.str());
  a.put(stem + ".json", io::header_json(g));
}

std::string fmt(const char* f, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, v);
  return buf;
}

// ---- experiments -------------------------------------------------------------------

void decohere(const ExperimentConfig& c, const DerivedScales& s, Artifacts& a) {
  const DecoherenceFit fit = decoherence_rate(c.state, c.t_list, s);
  std::ostringstream os;
  os << "t,log_coherence\n";
  for (std::size_t k = 0; k < fit.t.size(); ++k) os << io::number(fit.t[k]) << ',' << io::number(fit.log_coherence[k]) << '\n';
  a.put("coherence.csv", os.str());
  a.put("decoherence.json", io::to_json(fit));
  put_grid(a, "rho_t", evolve_density(c.state, c.t_final, s, density_grid(c, s)));
  a.say("decoherence rate " + fmt("%.6g", fit.rate) + " (predicted " + fmt("%.6g", fit.predicted_rate) + ")");
}

void wigner_positivity(const ExperimentConfig& c, const DerivedScales& s, Artifacts& a) {
  std::vector<double> ts;
  if (!c.t_list.empty()) {
    ts = c.t_list;
  } else {
    for (int i = 1; i <= 30; ++i) ts.push_back(0.05 * i * s.t_loc);
  }
  const double h = c.model.hbar;
  const PhaseMixture w0 = wigner_mixture(density_from_state(c.state, h), h);
  const PhaseBox box = phase_box(state_moments(c.state, 0.0, s), c.phase_points, c.phase_points, 6.0);
  const PositivityReport r = positivity_scan(w0, box.p, box.q, ts, s);
  std::ostringstream os;
  os << "t,min_w,max_w\n";
  for (const auto& p : r.scan) os << io::number(p.t) << ',' << io::number(p.min_w) << ',' << io::number(p.max_w) << '\n';
  a.put("positivity.csv", os.str());
  a.put("positivity.json", io::to_json(r));
  a.say(r.t_crossing ? "t* = " + fmt("%.6g", *r.t_crossing) : std::string("no positivity crossing in the scan"));
}

void f_vs_wigner(const ExperimentConfig& c, const DerivedScales& s, Artifacts& a) {
  const auto ts = times(c, s, {2, 3, 5, 10});
  const double h = c.model.hbar;
  std::ostringstream os;
  os << "t,alpha_t,sup_relative_deviation,route_deviation\n";
  json ladder = json::array();
  bool decreasing = true;
  double prev = INFINITY;
  for (std::size_t k = 0; k < ts.size(); ++k) {
    const double t = ts[k];
    const PhaseBox box = phase_box(state_moments(c.state, t, s), c.phase_points, c.phase_points, 6.0);
    const FDistribution fd = f_distribution(c.state, box.p, box.q, t, s);
    const PhaseGrid w = sample(wigner_mixture(evolve_exact(c.state, t, s), h), box.p, box.q);
    const double dev = sup_relative_deviation(fd.f, w);
    decreasing = decreasing && dev < prev;
    prev = dev;
    os << io::number(t) << ',' << io::number(s.alpha * t) << ',' << io::number(dev) << ','
       << io::number(fd.route_deviation) << '\n';
    ladder.push_back({{"t", t}, {"alpha_t", s.alpha * t}, {"sup_relative_deviation", dev},
                      {"route_deviation", std::isfinite(fd.route_deviation) ? json(fd.route_deviation) : json()}});
    if (k + 1 == ts.size()) {
      put_grid(a, "f", fd.f);
      put_grid(a, "wigner", w);
    }
    a.say("alpha t = " + fmt("%g", s.alpha * t) + ": sup deviation " + fmt("%.4g", dev));
  }
  a.put("f_vs_wigner.csv", os.str());
  a.put("f_vs_wigner.json", json{{"ladder", ladder}, {"decreasing", decreasing}}.dump());
}

void qsd_ensemble(const ExperimentConfig& c, const DerivedScales& s, Artifacts& a) {
  const Axis x = density_grid(c, s);
  const QsdOptions opt{c.comoving};
  const EnsembleSummary e =
      run_ensemble(c.state, x, c.t_final, c.dt, s, c.seed, c.trajectories, c.record_every, opt);
  a.seeds = e.seeds;
  std::ostringstream os;
  io::write_trajectories_csv(os, e);
  a.put("trajectories.csv", os.str());

  std::vector<double> prod;
  for (const auto& tr : e.samples) prod.push_back(tr.back().dx * tr.back().dp);
  std::nth_element(prod.begin(), prod.begin() + prod.size() / 2, prod.end());
  const double median = prod[prod.size() / 2];
  a.say("median terminal dx dp " + fmt("%.4g", median) + " (hbar/sqrt2 = " + fmt("%.4g", c.model.hbar / std::sqrt(2.0)) + ")");

  json u{{"n", e.n},       {"t_final", c.t_final},   {"dt", c.dt},
         {"base_seed", c.seed}, {"comoving", c.comoving}, {"median_dx_dp", median}};
  if (c.comoving) {
    // each trajectory lives on its own window; no common lab grid to average on
    u["trace_distance"] = nullptr;
  } else {
    put_grid(a, "mean_rho", e.mean_rho);
    const DensityGrid ref = evolve_density(c.state, c.t_final, s, x);
    const double td = trace_distance(e.mean_rho, ref);
    u["trace_distance"] = td;
    a.say("ensemble of " + std::to_string(e.n) + ": trace distance to master equation " + fmt("%.4g", td));
  }
  a.put("unravelling.json", u.dump());
}

void reconstruct_ladder(const ExperimentConfig& c, const DerivedScales& s, Artifacts& a) {
  const auto ts = times(c, s, {2, 3, 5, 10});
  const auto ladder = convergence_ladder(c.state, ts, s);
  std::ostringstream os;
  os << "alpha_t,trace_distance,min_eigenvalue,f_min\n";
  json pts = json::array();
  for (const auto& p : ladder) {
    os << io::number(p.alpha_t) << ',' << io::number(p.trace_distance) << ',' << io::number(p.min_eigenvalue) << ','
       << io::number(p.f_min) << '\n';
    pts.push_back(raw(io::to_json(p)));
    a.say("alpha t = " + fmt("%g", p.alpha_t) + ": trace distance " + fmt("%.4g", p.trace_distance));
  }
  a.put("reconstruction.csv", os.str());
  a.put("reconstruction.json", json{{"ladder", pts}, {"monotone", is_monotone(ladder)}}.dump());
}

void residuals(const ExperimentConfig& c, const DerivedScales& s, Artifacts& a) {
  const double h = c.model.hbar;
  const double t = c.t_final;
  const double ht = 1e-3 * s.t_loc;
  json reports = json::array();

  const Axis x = density_grid(c, s);
  const std::array<DensityGrid, 3> rs{sample(evolve_exact(c.state, t - ht, s), x), sample(evolve_exact(c.state, t, s), x),
                                      sample(evolve_exact(c.state, t + ht, s), x)};
  reports.push_back(raw(io::to_json(master_residual(rs, t, ht, s))));

  const GaussianDensity rho0 = density_from_state(c.state, h);
  const PhaseMixture w0 = wigner_mixture(rho0, h);
  const PhaseBox wb = phase_box(moments(propagate(w0, t, s)), c.phase_points, c.phase_points, 6.0);
  const std::array<PhaseGrid, 3> ws{sample(propagate(w0, t - ht, s), wb.p, wb.q), sample(propagate(w0, t, s), wb.p, wb.q),
                                    sample(propagate(w0, t + ht, s), wb.p, wb.q)};
  reports.push_back(raw(io::to_json(fokker_planck_residual(ws, t, ht, FpEquation::W, s))));

  // f needs alpha t above the kernel's convergence bound
  for (double tf : times(c, s, {10})) {
    const PhaseBox fb = phase_box(moments(f_mixture(rho0, tf, s)), c.phase_points, c.phase_points, 6.0);
    const std::array<PhaseGrid, 3> fs{sample(f_mixture(rho0, tf - ht, s), fb.p, fb.q),
                                      sample(f_mixture(rho0, tf, s), fb.p, fb.q),
                                      sample(f_mixture(rho0, tf + ht, s), fb.p, fb.q)};
    reports.push_back(raw(io::to_json(fokker_planck_residual(fs, tf, ht, FpEquation::F, s))));
  }

  std::ostringstream os;
  os << "operator,t,relative,extra_term_fraction\n";
  for (const auto& r : reports) {
    os << r["operator"].get<std::string>() << ',' << io::number(r["t"].get<double>()) << ','
       << (r["relative"].is_null() ? "nan" : io::number(r["relative"].get<double>())) << ','
       << (r.contains("extra_term_fraction") && !r["extra_term_fraction"].is_null()
               ? io::number(r["extra_term_fraction"].get<double>())
               : "")
       << '\n';
    a.say(r["operator"].get<std::string>() + " at t = " + fmt("%g", r["t"].get<double>()) + ": relative residual " +
          (r["relative"].is_null() ? std::string("n/a") : fmt("%.3g", r["relative"].get<double>())));
  }
  a.put("residuals.csv", os.str());
  a.put("residuals.json", json{{"reports", reports}, {"fp_cross_coefficient", fp_cross_coefficient(s)}}.dump());
}

}  // namespace

void validate(const ExperimentConfig& c) {
  const DerivedScales s = derive_scales(c.model);
  const std::string& e = c.experiment;
  if (e == "qsd-ensemble") {
    // a zero-noise step runs the integrator's own stability and leak checks
    const TrajectoryState st = initial_state(c.state, density_grid(c, s), c.model.hbar, c.seed);
    qsd_step(st, WienerIncrement{cd{}, c.dt}, s, QsdOptions{c.comoving});
  } else if (e == "f-vs-wigner" || e == "reconstruct") {
    for (double t : times(c, s, {2, 3, 5, 10})) check_f_kernel_domain(t, s);
  } else if (e == "residuals") {
    for (double t : times(c, s, {10})) check_f_kernel_domain(t, s);
    if (!(c.t_final > 2e-3 * s.t_loc)) throw DomainError("t_final", "too small for the residual time stencil");
  } else if (e == "decohere") {
    if (c.state.components.size() < 2) throw DomainError("rho0", "decohere needs at least two packets");
  }
}

Artifacts run_experiment(const ExperimentConfig& c) {
  const DerivedScales s = derive_scales(c.model);
  drain_warnings();
  Artifacts a;
  const std::string& e = c.experiment;
  if (e == "decohere") decohere(c, s, a);
  else if (e == "wigner-positivity") wigner_positivity(c, s, a);
  else if (e == "f-vs-wigner") f_vs_wigner(c, s, a);
  else if (e == "qsd-ensemble") qsd_ensemble(c, s, a);
  else if (e == "reconstruct") reconstruct_ladder(c, s, a);
  else if (e == "residuals") residuals(c, s, a);
  else throw DomainError("experiment", "unknown experiment '" + e + "'");
  a.warnings = drain_warnings();
  return a;
}

std::string sha256_hex(const std::string& data) {
  unsigned char md[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  if (EVP_Digest(data.data(), data.size(), md, &len, EVP_sha256(), nullptr) != 1)
    throw std::runtime_error("sha256 failed");
  std::string hex;
  char buf[3];
  for (unsigned int i = 0; i < len; ++i) {
    std::snprintf(buf, sizeof buf, "%02x", md[i]);
    hex += buf;
  }
  return hex;
}

void write_outputs(const std::filesystem::path& dir, const ExperimentConfig& c, const Artifacts& a) {
  std::filesystem::create_directories(dir);
  json files = json::array();
  for (const auto& [name, content] : a.files) {
    std::ofstream f(dir / name, std::ios::binary);
    f << content;
    if (!f) throw std::runtime_error("cannot write " + (dir / name).string());
    files.push_back({{"name", name}, {"sha256", sha256_hex(content)}, {"bytes", content.size()}});
  }

  const DerivedScales s = derive_scales(c.model);
  const UnitSystem u = nondimensionalize(c.model);
  json warnings = json::array();
  for (const auto& w : a.warnings) warnings.push_back({{"code", w.code}, {"message", w.message}, {"value", w.value}});

  const json manifest{
      {"version", QBM_VERSION},
      {"experiment", c.experiment},
      {"config", c.echo},
      {"model", {{"m", c.model.m}, {"gamma", c.model.gamma}, {"kT", c.model.kT}, {"hbar", c.model.hbar}}},
      {"state", raw(c.state_json)},
      {"numerics",
       {{"grid_points", c.grid_points},
        {"box", c.box},
        {"phase_points", c.phase_points},
        {"dt", c.dt},
        {"trajectories", c.trajectories},
        {"t_list", c.t_list},
        {"t_final", c.t_final},
        {"record_every", c.record_every},
        {"comoving", c.comoving}}},
      {"derived_scales", raw(io::to_json(s))},
      {"units",
       {{"time", u.time}, {"length", u.length}, {"momentum", u.momentum}, {"energy", u.energy}}},
      {"seed", c.seed},
      {"seeds", a.seeds},
      {"warnings", warnings},
      {"files", files}};
  std::ofstream f(dir / "run_manifest.json", std::ios::binary);
  f << manifest.dump(2) << '\n';
  if (!f) throw std::runtime_error("cannot write run_manifest.json");
}

}  // namespace qbm::cli
