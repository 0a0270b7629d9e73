// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "config.hpp"
#include "qbm/warnings.hpp"

namespace qbm::cli {

// Files an experiment produced, kept in memory until the run succeeds so a
// failed run leaves no partial artifacts behind.
struct Artifacts {
  std::map<std::string, std::string> files;  // name -> content
  std::vector<std::uint64_t> seeds;
  std::vector<std::string> lines;  // human summary for stdout
  std::vector<Warning> warnings;

  void put(const std::string& name, std::string content) { files[name] = std::move(content); }
  void say(std::string line) { lines.push_back(std::move(line)); }
};

// Precondition checks for the chosen experiment; throws DomainError.
void validate(const ExperimentConfig& c);

// Runs c.experiment. Throws DomainError on numerical preconditions.
Artifacts run_experiment(const ExperimentConfig& c);

std::string sha256_hex(const std::string& data);

// Writes every artifact plus run_manifest.json into dir.
void write_outputs(const std::filesystem::path& dir, const ExperimentConfig& c, const Artifacts& a);

}  // namespace qbm::cli
