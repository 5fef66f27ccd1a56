#pragma once

// Experiment configuration: a YAML document describing one or more panels.
// Site indices in the file are one-based; ExperimentConfig stores them
// zero-based.

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "qwalk/basis.hpp"
#include "qwalk/spectral.hpp"

namespace qwalk {

class ConfigError : public std::runtime_error {
 public:
  ConfigError(const std::string& origin, int line, const std::string& message)
      : std::runtime_error(origin + ":" + std::to_string(line) + ": " + message),
        line_(line) {}

  int line() const noexcept { return line_; }

 private:
  int line_;
};

enum class Mode { Unitary, Monitored, Averaged, BasisInfo };

const char* to_string(Mode mode);

struct BasisSpec {
  BasisKind kind = BasisKind::Localized;
  // Mixed only: explicit partition, or a random one drawn from (seed, max_block).
  std::optional<BasisPartition> partition;
  std::uint64_t seed = 0;
  std::size_t max_block = 4;
};

struct SpectrumSpec {
  enum class Kind { Ideal, Linear, Explicit };
  Kind kind = Kind::Linear;
  std::vector<double> energies;  // Explicit only
  bool detailed_balance = false;  // Explicit only
};

struct TimeGrid {
  double start = 1.0;
  double end = 100.0;
  double step = 1.0;

  // start, start + step, ... up to end (inclusive within rounding).
  std::vector<double> points() const;
};

struct MonitoredGrid {
  double tau = 1.0;
  std::size_t max_attempts = 1000;
};

struct Transition {
  std::size_t from;  // M'
  std::size_t to;    // M
};

struct ExperimentConfig {
  std::string name;
  std::size_t n = 10;
  BasisSpec basis;
  SpectrumSpec spectrum;
  std::optional<FluctuationModel> ensemble;
  Mode mode = Mode::Unitary;
  std::vector<Transition> transitions;
  TimeGrid times;
  std::optional<MonitoredGrid> monitored;
  std::uint64_t seed = 0;
  std::optional<std::size_t> monte_carlo_samples;
  bool cyclic_asymptote = false;
};

struct RunConfig {
  std::vector<ExperimentConfig> panels;
  std::optional<std::string> out_dir;
  std::uint64_t seed = 0;
  std::string source;  // raw config text, hashed into the manifest
};

// Throws ConfigError with a line reference for malformed input, unknown keys,
// missing mode-required fields and out-of-range indices. A seed override
// replaces every top-level and panel-level seed.
RunConfig parse_config(const std::string& text,
                       const std::string& origin = "<config>",
                       std::optional<std::uint64_t> seed_override = {});
RunConfig load_config(const std::filesystem::path& path,
                      std::optional<std::uint64_t> seed_override = {});

OrthonormalBasis build_basis(const ExperimentConfig& config);
Spectrum build_spectrum(const ExperimentConfig& config);
// Requires config.ensemble; means are the configured spectrum.
EigenvalueEnsemble build_ensemble(const ExperimentConfig& config);

}  // namespace qwalk
