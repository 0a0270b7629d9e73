// SPDX-License-Identifier: Apache-2.0
#include "qbm/io.hpp"

#include <cmath>
#include <cstdio>
#include <istream>
#include <ostream>
#include <sstream>

#include <json.hpp>

#include "qbm/errors.hpp"

namespace qbm::io {

using nlohmann::json;

namespace {

json axis_json(const Axis& a) { return {{"min", a.min}, {"max", a.max}, {"n", a.n}}; }

Axis axis_from(const json& j) {
  Axis a{j.at("min").get<double>(), j.at("max").get<double>(), j.at("n").get<int>()};
  if (a.n < 2 || !(a.max > a.min)) throw DomainError("header", "bad axis");
  return a;
}

json parse(const std::string& text, const char* what) {
  try {
    return json::parse(text);
  } catch (const json::exception& e) {
    throw DomainError(what, e.what());
  }
}

// NaN and inf have no JSON literal; they go out as null
json num(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

int node(const Axis& a, double v, int line) {
  const double f = (v - a.min) / a.step();
  const long k = std::lround(f);
  if (k < 0 || k >= a.n || std::abs(f - k) > 1e-6)
    throw DomainError("csv", "line " + std::to_string(line) + ": coordinate " + number(v) + " is not an axis node");
  return static_cast<int>(k);
}

std::vector<double> fields(const std::string& s, std::size_t want, int line) {
  std::vector<double> out;
  std::stringstream ss(s);
  std::string tok;
  while (std::getline(ss, tok, ',')) {
    try {
      std::size_t used = 0;
      out.push_back(std::stod(tok, &used));
      if (used != tok.size()) throw std::invalid_argument(tok);
    } catch (const std::exception&) {
      throw DomainError("csv", "line " + std::to_string(line) + ": not a number: '" + tok + "'");
    }
  }
  if (out.size() != want)
    throw DomainError("csv", "line " + std::to_string(line) + ": expected " + std::to_string(want) + " fields");
  return out;
}

}  // namespace

std::string number(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

void write_csv(std::ostream& os, const DensityGrid& rho) {
  os << "x,y,re,im\n";
  for (int i = 0; i < rho.x.n; ++i)
    for (int j = 0; j < rho.x.n; ++j) {
      const cd v = rho.values(i, j);
      os << number(rho.x.at(i)) << ',' << number(rho.x.at(j)) << ',' << number(v.real()) << ',' << number(v.imag())
         << '\n';
    }
}

void write_csv(std::ostream& os, const PhaseGrid& g) {
  os << "p,q,value\n";
  for (int i = 0; i < g.p.n; ++i)
    for (int j = 0; j < g.q.n; ++j)
      os << number(g.p.at(i)) << ',' << number(g.q.at(j)) << ',' << number(g.values(i, j)) << '\n';
}

std::string header_json(const DensityGrid& rho) {
  return json{{"kind", "density"}, {"columns", {"x", "y", "re", "im"}}, {"x", axis_json(rho.x)}}.dump();
}

std::string header_json(const PhaseGrid& g) {
  return json{{"kind", "phase"}, {"columns", {"p", "q", "value"}}, {"p", axis_json(g.p)}, {"q", axis_json(g.q)}}
      .dump();
}

DensityGrid read_density(std::istream& csv, const std::string& header) {
  const json h = parse(header, "header");
  if (h.value("kind", "") != "density") throw DomainError("header", "not a density grid header");
  DensityGrid out{axis_from(h.at("x")), {}};
  out.values = Eigen::MatrixXcd::Zero(out.x.n, out.x.n);
  std::string line;
  if (!std::getline(csv, line) || line != "x,y,re,im") throw DomainError("csv", "line 1: expected header x,y,re,im");
  int ln = 1, count = 0;
  while (std::getline(csv, line)) {
    ++ln;
    if (line.empty()) continue;
    const auto f = fields(line, 4, ln);
    out.values(node(out.x, f[0], ln), node(out.x, f[1], ln)) = cd(f[2], f[3]);
    ++count;
  }
  if (count != out.x.n * out.x.n) throw DomainError("csv", "expected " + std::to_string(out.x.n * out.x.n) + " rows");
  return out;
}

PhaseGrid read_phase(std::istream& csv, const std::string& header) {
  const json h = parse(header, "header");
  if (h.value("kind", "") != "phase") throw DomainError("header", "not a phase grid header");
  PhaseGrid out{axis_from(h.at("p")), axis_from(h.at("q")), {}};
  out.values = PhaseGrid::Matrix::Zero(out.p.n, out.q.n);
  std::string line;
  if (!std::getline(csv, line) || line != "p,q,value") throw DomainError("csv", "line 1: expected header p,q,value");
  int ln = 1, count = 0;
  while (std::getline(csv, line)) {
    ++ln;
    if (line.empty()) continue;
    const auto f = fields(line, 3, ln);
    out.values(node(out.p, f[0], ln), node(out.q, f[1], ln)) = f[2];
    ++count;
  }
  if (count != out.p.n * out.q.n) throw DomainError("csv", "expected " + std::to_string(out.p.n * out.q.n) + " rows");
  return out;
}

void write_trajectories_csv(std::ostream& os, const EnsembleSummary& e) {
  os << "t,mean_x,mean_p,dx,dp,seed\n";
  for (std::size_t k = 0; k < e.samples.size(); ++k)
    for (const auto& s : e.samples[k])
      os << number(s.t) << ',' << number(s.mean_x) << ',' << number(s.mean_p) << ',' << number(s.dx) << ','
         << number(s.dp) << ',' << e.seeds[k] << '\n';
}

std::string to_json(const GaussianState& s) {
  json a = json::array();
  for (const auto& c : s.components)
    a.push_back({{"re_A", c.A.real()}, {"im_A", c.A.imag()}, {"q0", c.q0}, {"re_L", c.L.real()}, {"im_L", c.L.imag()},
                 {"p0", c.p0}});
  return a.dump();
}

GaussianState state_from_json(const std::string& text) {
  const json a = parse(text, "state");
  if (!a.is_array() || a.empty()) throw DomainError("state", "expected a non-empty array of components");
  GaussianState s;
  try {
    for (const auto& c : a) {
      GaussianComponent g;
      g.A = cd(c.at("re_A").get<double>(), c.at("im_A").get<double>());
      g.q0 = c.at("q0").get<double>();
      g.L = cd(c.at("re_L").get<double>(), c.at("im_L").get<double>());
      g.p0 = c.at("p0").get<double>();
      if (!(g.L.real() > 0.0)) throw DomainError("state", "component width needs Re(L) > 0");
      s.components.push_back(g);
    }
  } catch (const json::exception& e) {
    throw DomainError("state", e.what());
  }
  return s;
}

std::string to_json(const DerivedScales& s) {
  return json{{"alpha", s.alpha}, {"a_sq", s.a_sq}, {"D", s.D}, {"t_loc", s.t_loc}}.dump();
}

std::string to_json(const ResidualReport& r) {
  json j{{"operator", r.op},
         {"t", r.t},
         {"l2_residual", num(r.l2_residual)},
         {"relative", num(r.relative)},
         {"rhs_norm", num(r.rhs_norm)},
         {"dt_norm", num(r.dt_norm)},
         {"ht", r.ht},
         {"hx", r.hx},
         {"hp", r.hp},
         {"time_order", r.time_order},
         {"space_order", r.space_order}};
  if (r.extra_term_fraction) j["extra_term_fraction"] = num(*r.extra_term_fraction);
  return j.dump();
}

std::string to_json(const DecoherenceFit& f) {
  return json{{"ell", f.ell},
              {"rate", num(f.rate)},
              {"constant", num(f.constant)},
              {"predicted_rate", f.predicted_rate},
              {"t_window", f.t_window}}
      .dump();
}

std::string to_json(const PositivityReport& r) {
  json scan = json::array();
  for (const auto& p : r.scan) scan.push_back({{"t", p.t}, {"min_w", p.min_w}, {"max_w", p.max_w}});
  return json{{"eps_rel", r.eps_rel},
              {"t_star", r.t_first ? json(*r.t_first) : json(nullptr)},
              {"t_crossing", r.t_crossing ? json(*r.t_crossing) : json(nullptr)},
              {"t_bound_published", r.t_bound_published},
              {"t_bound_rederived", r.t_bound_rederived},
              {"scan", scan}}
      .dump();
}

std::string to_json(const LadderPoint& p) {
  return json{{"alpha_t", p.alpha_t},
              {"trace_distance", num(p.trace_distance)},
              {"min_eigenvalue", num(p.min_eigenvalue)},
              {"f_min", num(p.f_min)}}
      .dump();
}

}  // namespace qbm::io
