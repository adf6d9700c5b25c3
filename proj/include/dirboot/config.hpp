#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "dirboot/dirac.hpp"
#include "dirboot/equilibrium.hpp"
#include "dirboot/mc.hpp"
#include "dirboot/scan.hpp"

namespace dirboot {

struct ModelConfig {
  EnsembleSpec spec;
  bool impose_symmetry = false;
};

struct McConfig {
  ChainConfig chain;
  std::size_t chains = 1;  // independent chains, seeds seed, seed+1, ...
  std::vector<std::string> words;  // moment names; empty = default set
};

struct EquilibriumConfig {
  EnergySpec energy;
  double threshold = 0.01;                  // support_structure
  std::vector<std::array<double, 3>> sweep;  // (g2, g4, m) phase points
};

struct SpectralConfig {
  double t_min = 1e-2;
  double t_max = 1e3;
  std::size_t steps = 61;
  std::optional<double> mass;  // defaults to the equilibrium mass
};

// Everything a config file can say. Blocks not present keep defaults.
struct RunConfig {
  std::optional<ModelConfig> model;
  ScanConfig scan;
  McConfig mc;
  EquilibriumConfig equilibrium;
  SpectralConfig spectral;
  std::string out_dir = ".";
  std::optional<std::uint64_t> seed;
  std::optional<std::size_t> threads;
};

// Unknown keys and wrong types throw ModelError naming the JSON pointer,
// e.g. "/scan/lambda: expected a positive integer".
RunConfig parse_config(const std::string& json_text);
RunConfig load_config(const std::string& path);

}  // namespace dirboot
