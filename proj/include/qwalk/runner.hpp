#pragma once

// Configuration-driven experiment runner: CSV time series, a JSON manifest,
// and a matplotlib script rendering one panel per configured experiment.

#include <cstdint>
#include <filesystem>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "qwalk/config.hpp"

namespace qwalk {

inline constexpr const char* kLibraryVersion = "1.0.0";

inline constexpr const char* kCsvHeader =
    "t_or_m,transition,value,classical_part,quantum_part,weight";

// A numerical invariant failed during a run (maps to exit code 3).
class InvariantViolation : public std::runtime_error {
 public:
  InvariantViolation(std::string invariant, const std::string& detail)
      : std::runtime_error("invariant '" + invariant + "' violated: " + detail),
        invariant_(std::move(invariant)) {}

  const std::string& invariant() const noexcept { return invariant_; }

 private:
  std::string invariant_;
};

// Plot generation failed because the manifest or one of its CSVs is unusable
// (maps to exit code 2).
class ManifestError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct RunOptions {
  std::filesystem::path out_dir = "out";
  unsigned threads = 1;
};

struct RunResult {
  std::filesystem::path manifest;
  std::vector<std::filesystem::path> files;
};

RunResult run(const RunConfig& config, const RunOptions& options);

// Writes plot.py next to the manifest and returns its path.
std::filesystem::path emit_plot_script(const std::filesystem::path& manifest);

// 12 significant digits.
std::string format_value(double value);

std::uint64_t fnv1a64(std::string_view bytes);

}  // namespace qwalk
