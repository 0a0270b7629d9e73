// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "qbm/gaussian.hpp"
#include "qbm/model.hpp"

namespace qbm::cli {

// Config problems carry the file and line they came from.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct Entry {
  std::string value;
  int line = 0;
};

// [section] / key = value, '#' and ';' start comments.
struct Ini {
  std::string path;
  std::map<std::string, std::map<std::string, Entry>> sections;

  static Ini parse(const std::string& text, const std::string& path);
  static Ini load(const std::string& path);
};

struct ExperimentConfig {
  ModelParams model;
  GaussianState state;
  std::string state_json;  // echo for the manifest

  int grid_points = 256;
  double box = 12.0;  // density grid half width, 0 = sized from the state
  int phase_points = 121;
  double dt = 1e-3;
  int trajectories = 200;
  std::uint64_t seed = 1;
  std::vector<double> t_list;
  double t_final = 1.0;
  int record_every = 100;
  bool comoving = false;

  std::string experiment;
  std::string out = "qbm-out";

  // every key read, for the manifest echo
  std::map<std::string, std::map<std::string, std::string>> echo;
};

extern const std::vector<std::string> kExperiments;

// Unknown sections/keys, unparsable numbers and invalid model parameters
// are ConfigErrors anchored at "path:line".
ExperimentConfig build_config(const Ini& ini);

}  // namespace qbm::cli
