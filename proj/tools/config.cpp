// SPDX-License-Identifier: Apache-2.0
#include "config.hpp"

#include <algorithm>
#include <fstream>
#include <set>
#include <sstream>

#include "qbm/errors.hpp"
#include "qbm/io.hpp"

namespace qbm::cli {

const std::vector<std::string> kExperiments{"decohere",       "wigner-positivity", "f-vs-wigner",
                                            "qsd-ensemble", "reconstruct",       "residuals"};

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

const std::map<std::string, std::set<std::string>> kKeys{
    {"model", {"m", "gamma", "kT", "hbar"}},
    {"state", {"kind", "ell", "width", "p0", "p", "q", "components"}},
    {"numerics",
     {"grid_points", "box", "phase_points", "dt", "trajectories", "seed", "t_list", "t_final", "record_every",
      "comoving"}},
    {"run", {"experiment", "out"}},
};

class Reader {
 public:
  explicit Reader(const Ini& ini) : ini_(ini) {}

  [[noreturn]] void fail(int line, const std::string& msg) const {
    throw ConfigError(ini_.path + ":" + std::to_string(line) + ": " + msg);
  }

  const Entry* find(const std::string& sec, const std::string& key) const {
    auto s = ini_.sections.find(sec);
    if (s == ini_.sections.end()) return nullptr;
    auto k = s->second.find(key);
    return k == s->second.end() ? nullptr : &k->second;
  }

  double num(const std::string& sec, const std::string& key, double def, ExperimentConfig& c) const {
    const Entry* e = find(sec, key);
    if (!e) return def;
    c.echo[sec][key] = e->value;
    try {
      std::size_t used = 0;
      const double v = std::stod(e->value, &used);
      if (used != e->value.size()) throw std::invalid_argument(e->value);
      return v;
    } catch (const std::exception&) {
      fail(e->line, key + ": not a number: '" + e->value + "'");
    }
  }

  int integer(const std::string& sec, const std::string& key, int def, ExperimentConfig& c, int lo) const {
    const double v = num(sec, key, def, c);
    if (v != std::floor(v) || v < lo) fail(line(sec, key), key + ": expected an integer >= " + std::to_string(lo));
    return static_cast<int>(v);
  }

  std::string str(const std::string& sec, const std::string& key, const std::string& def, ExperimentConfig& c) const {
    const Entry* e = find(sec, key);
    if (!e) return def;
    c.echo[sec][key] = e->value;
    return e->value;
  }

  int line(const std::string& sec, const std::string& key) const {
    const Entry* e = find(sec, key);
    return e ? e->line : 0;
  }

 private:
  const Ini& ini_;
};

}  // namespace

Ini Ini::parse(const std::string& text, const std::string& path) {
  Ini ini;
  ini.path = path;
  std::istringstream is(text);
  std::string raw, section;
  int ln = 0;
  auto fail = [&](const std::string& msg) { throw ConfigError(path + ":" + std::to_string(ln) + ": " + msg); };
  while (std::getline(is, raw)) {
    ++ln;
    const auto hash = raw.find_first_of("#;");
    const std::string s = trim(hash == std::string::npos ? raw : raw.substr(0, hash));
    if (s.empty()) continue;
    if (s.front() == '[') {
      if (s.back() != ']') fail("unterminated section header");
      section = trim(s.substr(1, s.size() - 2));
      if (!kKeys.count(section)) fail("unknown section [" + section + "]");
      continue;
    }
    const auto eq = s.find('=');
    if (eq == std::string::npos) fail("expected key = value");
    if (section.empty()) fail("key outside any section");
    const std::string key = trim(s.substr(0, eq));
    if (!kKeys.at(section).count(key)) fail("unknown key '" + key + "' in [" + section + "]");
    if (ini.sections[section].count(key)) fail("duplicate key '" + key + "'");
    ini.sections[section][key] = {trim(s.substr(eq + 1)), ln};
  }
  return ini;
}

Ini Ini::load(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw ConfigError(path + ": cannot open config file");
  std::stringstream ss;
  ss << f.rdbuf();
  return parse(ss.str(), path);
}

ExperimentConfig build_config(const Ini& ini) {
  const Reader r(ini);
  ExperimentConfig c;

  c.model.m = r.num("model", "m", 1.0, c);
  c.model.gamma = r.num("model", "gamma", 1.0, c);
  c.model.kT = r.num("model", "kT", 1.0, c);
  c.model.hbar = r.num("model", "hbar", 1.0, c);
  try {
    derive_scales(c.model);
  } catch (const DomainError& e) {
    r.fail(r.line("model", e.field()), e.what());
  }
  const DerivedScales s = derive_scales(c.model);

  const std::string kind = r.str("state", "kind", "cat", c);
  if (kind == "cat") {
    const double ell = r.num("state", "ell", 4.0, c);
    const double width = r.num("state", "width", 1.0, c);
    if (!(ell > 0)) r.fail(r.line("state", "ell"), "ell must be positive");
    if (!(width > 0)) r.fail(r.line("state", "width"), "width must be positive");
    c.state = cat_state(ell, width, c.model.hbar, r.num("state", "p0", 0.0, c));
  } else if (kind == "coherent") {
    c.state = GaussianState{{coherent_state({r.num("state", "p", 0.0, c), r.num("state", "q", 0.0, c)}, s)}};
  } else if (kind == "components") {
    const std::string js = r.str("state", "components", "", c);
    try {
      c.state = normalized(io::state_from_json(js), c.model.hbar);
    } catch (const DomainError& e) {
      r.fail(r.line("state", "components"), e.what());
    }
  } else {
    r.fail(r.line("state", "kind"), "kind must be cat, coherent or components");
  }
  c.state_json = io::to_json(c.state);

  c.grid_points = r.integer("numerics", "grid_points", c.grid_points, c, 16);
  c.box = r.num("numerics", "box", c.box, c);
  if (c.box < 0) r.fail(r.line("numerics", "box"), "box must be >= 0");
  c.phase_points = r.integer("numerics", "phase_points", c.phase_points, c, 16);
  c.dt = r.num("numerics", "dt", c.dt, c);
  if (!(c.dt > 0)) r.fail(r.line("numerics", "dt"), "dt must be positive");
  c.trajectories = r.integer("numerics", "trajectories", c.trajectories, c, 1);
  const double seed = r.num("numerics", "seed", 1.0, c);
  if (seed < 0 || seed != std::floor(seed)) r.fail(r.line("numerics", "seed"), "seed must be a non-negative integer");
  c.seed = static_cast<std::uint64_t>(seed);
  c.t_final = r.num("numerics", "t_final", c.t_final, c);
  if (!(c.t_final > 0)) r.fail(r.line("numerics", "t_final"), "t_final must be positive");
  c.record_every = r.integer("numerics", "record_every", c.record_every, c, 1);
  const std::string co = r.str("numerics", "comoving", "false", c);
  if (co != "true" && co != "false") r.fail(r.line("numerics", "comoving"), "comoving must be true or false");
  c.comoving = co == "true";
  if (r.find("numerics", "t_list")) {
    const std::string tl = r.str("numerics", "t_list", "", c);
    std::stringstream ss(tl);
    std::string tok;
    while (std::getline(ss, tok, ',')) {
      try {
        c.t_list.push_back(std::stod(trim(tok)));
      } catch (const std::exception&) {
        r.fail(r.line("numerics", "t_list"), "t_list: not a number: '" + trim(tok) + "'");
      }
    }
    if (c.t_list.empty() || !std::is_sorted(c.t_list.begin(), c.t_list.end()) || c.t_list.front() <= 0)
      r.fail(r.line("numerics", "t_list"), "t_list must be increasing positive times");
  }

  c.experiment = r.str("run", "experiment", "", c);
  c.out = r.str("run", "out", c.out, c);
  return c;
}

}  // namespace qbm::cli
