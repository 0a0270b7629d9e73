// SPDX-License-Identifier: Apache-2.0
// qbm: run one named experiment from a config file and write CSV/JSON artifacts.
#include <CLI11.hpp>

#include <algorithm>
#include <cstdint>
#include <iostream>
#include <optional>
#include <string>

#include "config.hpp"
#include "experiments.hpp"
#include "qbm/errors.hpp"
#include "qbm/io.hpp"

namespace {
constexpr int kOk = 0;
constexpr int kConfigError = 2;
constexpr int kNumericalError = 3;
}  // namespace

int main(int argc, char** argv) {
  using namespace qbm::cli;

  CLI::App app{"Quantum Brownian motion experiment runner"};
  std::string command;
  std::string config_path, experiment, out;
  std::optional<std::uint64_t> seed;
  bool quiet = false;
  app.add_option("command", command, "optional 'run'")->check(CLI::IsMember({"run"}));
  app.add_option("--config", config_path, "sectioned key = value config file");
  app.add_option("--experiment", experiment, "one of: decohere, wigner-positivity, f-vs-wigner, qsd-ensemble, "
                                             "reconstruct, residuals");
  app.add_option("--seed", seed, "base seed (overrides [numerics] seed)");
  app.add_option("--out", out, "output directory (overrides [run] out)");
  app.add_flag("--quiet", quiet, "print nothing on success");
  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? kOk : kConfigError;
  }

  ExperimentConfig cfg;
  try {
    const Ini ini = config_path.empty() ? Ini::parse("", "<defaults>") : Ini::load(config_path);
    cfg = build_config(ini);
    if (!experiment.empty()) cfg.experiment = experiment;
    if (!out.empty()) cfg.out = out;
    if (seed) cfg.seed = *seed;
    if (cfg.experiment.empty()) throw ConfigError("no experiment given (--experiment or [run] experiment)");
    if (std::find(kExperiments.begin(), kExperiments.end(), cfg.experiment) == kExperiments.end())
      throw ConfigError("unknown experiment '" + cfg.experiment + "'");
  } catch (const ConfigError& e) {
    std::cerr << "qbm: config error: " << e.what() << '\n';
    return kConfigError;
  }

  try {
    validate(cfg);
    const Artifacts a = run_experiment(cfg);
    write_outputs(cfg.out, cfg, a);
    if (!quiet) {
      std::cout << "derived scales " << qbm::io::to_json(qbm::derive_scales(cfg.model)) << '\n';
      for (const auto& l : a.lines) std::cout << l << '\n';
      for (const auto& w : a.warnings) std::cout << "warning [" << w.code << "] " << w.message << '\n';
      std::cout << "wrote " << a.files.size() + 1 << " files to " << cfg.out << '\n';
    }
  } catch (const qbm::DomainError& e) {
    std::cerr << "qbm: " << e.what() << '\n';
    return kNumericalError;
  } catch (const std::exception& e) {
    std::cerr << "qbm: " << e.what() << '\n';
    return 1;
  }
  return kOk;
}
