// qwalk: run configured experiments, emit plot scripts, self-check.
//
// Exit codes: 0 success, 1 unexpected error, 2 bad config or manifest,
// 3 numerical invariant violated.

#include <cstdlib>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "qwalk/config.hpp"
#include "qwalk/errors.hpp"
#include "qwalk/runner.hpp"
#include "qwalk/selftest.hpp"

namespace {

constexpr const char* kOutDirEnv = "QWALK_OUT_DIR";

std::string resolve_out_dir(const std::string& flag,
                            const std::optional<std::string>& from_config) {
  if (!flag.empty()) return flag;
  if (const char* env = std::getenv(kOutDirEnv); env && *env) return env;
  if (from_config) return *from_config;
  return "out";
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Continuous-time quantum walks on the complete graph"};
  app.require_subcommand(1);

  std::string config_path;
  std::string out_dir;
  std::optional<std::uint64_t> seed;
  unsigned threads = 1;

  auto* run = app.add_subcommand("run", "run every panel of a config file");
  run->add_option("config", config_path, "YAML experiment config")
      ->required()
      ->check(CLI::ExistingFile);
  run->add_option("--seed", seed, "override every seed in the config");
  run->add_option("--out-dir", out_dir,
                  std::string("output directory (else $") + kOutDirEnv +
                      ", config out_dir, ./out)");
  run->add_option("--threads", threads, "worker threads for Monte Carlo")
      ->check(CLI::Range(1u, 1024u));

  std::string manifest_path;
  auto* plot = app.add_subcommand("plot", "write plot.py next to a manifest");
  plot->add_option("manifest", manifest_path, "manifest.json from a run")
      ->required();

  auto* selftest = app.add_subcommand("selftest", "quick numerical checks");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (*run) {
      const auto config = qwalk::load_config(config_path, seed);
      qwalk::RunOptions options;
      options.out_dir = resolve_out_dir(out_dir, config.out_dir);
      options.threads = threads;
      const auto result = qwalk::run(config, options);
      std::cout << result.manifest.string() << "\n";
      return 0;
    }
    if (*plot) {
      std::cout << qwalk::emit_plot_script(manifest_path).string() << "\n";
      return 0;
    }
    if (*selftest) return qwalk::run_selftest(std::cout);
  } catch (const qwalk::ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const qwalk::ManifestError& e) {
    std::cerr << "manifest error: " << e.what() << "\n";
    return 2;
  } catch (const qwalk::InvariantViolation& e) {
    std::cerr << e.what() << "\n";
    return 3;
  } catch (const qwalk::NumericalError& e) {
    std::cerr << "numerical error: " << e.what() << "\n";
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 1;
}
