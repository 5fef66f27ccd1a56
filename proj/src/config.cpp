#include "qwalk/config.hpp"

#include <cctype>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include <yaml-cpp/yaml.h>

#include "qwalk/errors.hpp"

namespace qwalk {

namespace {

const std::set<std::string> kPanelKeys = {
    "name",  "n",         "mode",    "basis", "spectrum",    "ensemble",
    "transitions", "times", "monitored", "seed", "monte_carlo",
    "cyclic_asymptote"};

class Parser {
 public:
  explicit Parser(std::string origin) : origin_(std::move(origin)) {}

  [[noreturn]] void fail(const YAML::Node& node,
                         const std::string& message) const {
    const int line = node.Mark().line >= 0 ? node.Mark().line + 1 : 0;
    throw ConfigError(origin_, line, message);
  }

  void require_map(const YAML::Node& node, const std::string& what) const {
    if (!node.IsMap()) fail(node, what + " must be a mapping");
  }

  void check_keys(const YAML::Node& node, const std::set<std::string>& allowed,
                  const std::string& what) const {
    require_map(node, what);
    for (const auto& entry : node) {
      const auto key = entry.first.as<std::string>();
      if (!allowed.contains(key)) {
        fail(entry.first, "unknown key '" + key + "' in " + what);
      }
    }
  }

  template <class T>
  T scalar(const YAML::Node& node, const std::string& what) const {
    if (!node.IsScalar()) fail(node, what + " must be a scalar");
    try {
      return node.as<T>();
    } catch (const YAML::Exception&) {
      fail(node, "cannot parse " + what + " from '" + node.Scalar() + "'");
    }
  }

  double real(const YAML::Node& node, const std::string& what) const {
    const auto value = scalar<double>(node, what);
    if (!std::isfinite(value)) fail(node, what + " must be finite");
    return value;
  }

  std::size_t count(const YAML::Node& node, const std::string& what) const {
    const auto value = scalar<long long>(node, what);
    if (value < 0) fail(node, what + " must be non-negative");
    return static_cast<std::size_t>(value);
  }

  std::uint64_t seed(const YAML::Node& node) const {
    return scalar<std::uint64_t>(node, "seed");
  }

  bool boolean(const YAML::Node& node, const std::string& what) const {
    return scalar<bool>(node, what);
  }

  ExperimentConfig panel(const YAML::Node& node, std::size_t index) const;

 private:
  BasisSpec basis(const YAML::Node& node, std::size_t n,
                  std::uint64_t panel_seed) const;
  SpectrumSpec spectrum(const YAML::Node& node, std::size_t n) const;
  FluctuationModel ensemble(const YAML::Node& node) const;

  std::string origin_;
};

BasisSpec Parser::basis(const YAML::Node& node, std::size_t n,
                        std::uint64_t panel_seed) const {
  BasisSpec spec;
  spec.seed = panel_seed;
  if (node.IsScalar()) {
    const auto kind = node.as<std::string>();
    if (kind == "localized") spec.kind = BasisKind::Localized;
    else if (kind == "plane_wave") spec.kind = BasisKind::PlaneWave;
    else if (kind == "mixed") spec.kind = BasisKind::Mixed;
    else fail(node, "unknown basis '" + kind + "'");
    return spec;
  }
  check_keys(node, {"kind", "partition", "seed", "max_block"}, "basis");
  if (!node["kind"]) fail(node, "basis requires 'kind'");
  const YAML::Node kind_node = node["kind"];
  const auto kind = scalar<std::string>(kind_node, "basis.kind");
  if (kind == "localized") spec.kind = BasisKind::Localized;
  else if (kind == "plane_wave") spec.kind = BasisKind::PlaneWave;
  else if (kind == "mixed") spec.kind = BasisKind::Mixed;
  else fail(kind_node, "unknown basis kind '" + kind + "'");

  const bool mixed_keys = node["partition"] || node["seed"] || node["max_block"];
  if (spec.kind != BasisKind::Mixed && mixed_keys) {
    fail(node, "partition/seed/max_block are only valid for the mixed basis");
  }
  if (node["seed"]) spec.seed = seed(node["seed"]);
  if (node["max_block"]) {
    spec.max_block = count(node["max_block"], "basis.max_block");
    if (spec.max_block == 0) fail(node["max_block"], "max_block must be >= 1");
  }
  if (const YAML::Node blocks = node["partition"]) {
    if (!blocks.IsSequence() || blocks.size() == 0) {
      fail(blocks, "partition must be a non-empty list of blocks");
    }
    std::vector<PartitionBlock> parsed;
    for (const auto& block : blocks) {
      check_keys(block, {"start", "length", "kind"}, "partition block");
      if (!block["start"] || !block["length"] || !block["kind"]) {
        fail(block, "partition block requires start, length and kind");
      }
      const std::size_t start = count(block["start"], "block start");
      if (start < 2) fail(block["start"], "block start must be >= 2");
      const auto tag = scalar<std::string>(block["kind"], "block kind");
      BlockKind block_kind{};
      if (tag == "localized") block_kind = BlockKind::Localized;
      else if (tag == "plane_wave") block_kind = BlockKind::PlaneWave;
      else fail(block["kind"], "unknown block kind '" + tag + "'");
      parsed.push_back({start - 1, count(block["length"], "block length"),
                        block_kind});
    }
    BasisPartition partition(std::move(parsed));
    try {
      partition.validate(n);
    } catch (const PartitionError& e) {
      fail(blocks, e.what());
    }
    spec.partition = std::move(partition);
  }
  return spec;
}

SpectrumSpec Parser::spectrum(const YAML::Node& node, std::size_t n) const {
  SpectrumSpec spec;
  std::string kind;
  if (node.IsScalar()) {
    kind = node.as<std::string>();
  } else {
    check_keys(node, {"kind", "energies", "detailed_balance"}, "spectrum");
    if (!node["kind"]) fail(node, "spectrum requires 'kind'");
    kind = scalar<std::string>(node["kind"], "spectrum.kind");
  }
  if (kind == "ideal") spec.kind = SpectrumSpec::Kind::Ideal;
  else if (kind == "linear") spec.kind = SpectrumSpec::Kind::Linear;
  else if (kind == "explicit") spec.kind = SpectrumSpec::Kind::Explicit;
  else fail(node, "unknown spectrum kind '" + kind + "'");

  if (spec.kind == SpectrumSpec::Kind::Explicit) {
    const YAML::Node energies = node.IsMap() ? node["energies"] : YAML::Node();
    if (!energies || !energies.IsSequence()) {
      fail(node, "explicit spectrum requires an 'energies' list");
    }
    if (energies.size() != n) {
      fail(energies, "expected " + std::to_string(n) + " energies, got " +
                         std::to_string(energies.size()));
    }
    for (const auto& e : energies) spec.energies.push_back(real(e, "energy"));
    if (node["detailed_balance"]) {
      spec.detailed_balance =
          boolean(node["detailed_balance"], "spectrum.detailed_balance");
      if (spec.detailed_balance && spec.energies.front() != 0.0) {
        fail(energies, "detailed_balance requires the first energy to be 0");
      }
    }
  } else if (node.IsMap() && (node["energies"] || node["detailed_balance"])) {
    fail(node, "energies/detailed_balance are only valid for explicit spectra");
  }
  return spec;
}

FluctuationModel Parser::ensemble(const YAML::Node& node) const {
  check_keys(node, {"model", "kappa", "a", "b"}, "ensemble");
  if (!node["model"]) fail(node, "ensemble requires 'model'");
  if (!node["kappa"]) fail(node, "ensemble requires 'kappa'");
  const auto model = scalar<std::string>(node["model"], "ensemble.model");
  const double kappa = real(node["kappa"], "kappa");
  if (!(kappa > 0.0)) fail(node["kappa"], "kappa must be > 0");
  if (model == "uncorrelated") {
    if (node["a"] || node["b"]) fail(node, "uncorrelated takes only kappa");
    return Uncorrelated{kappa};
  }
  if (model == "attractive") {
    if (!node["a"] || node["b"]) fail(node, "attractive requires a (and no b)");
    const double a = real(node["a"], "a");
    if (!(a > 0.0)) fail(node["a"], "a must be > 0");
    return Attractive{kappa, a};
  }
  if (model == "repulsive") {
    if (!node["b"] || node["a"]) fail(node, "repulsive requires b (and no a)");
    const double b = real(node["b"], "b");
    if (!(b > 1.0)) fail(node["b"], "b must be > 1");
    return Repulsive{kappa, b};
  }
  fail(node["model"], "unknown ensemble model '" + model + "'");
}

ExperimentConfig Parser::panel(const YAML::Node& node,
                               std::size_t index) const {
  ExperimentConfig cfg;
  cfg.name = node["name"] ? scalar<std::string>(node["name"], "name")
                          : "panel" + std::to_string(index + 1);
  for (char c : cfg.name) {
    if (!(std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '-')) {
      fail(node["name"], "panel name may only contain [A-Za-z0-9_-]");
    }
  }

  if (node["n"]) {
    cfg.n = count(node["n"], "n");
    if (cfg.n < 2 || cfg.n > 4096) fail(node["n"], "n must be in 2..4096");
  }
  if (node["seed"]) cfg.seed = seed(node["seed"]);

  if (!node["mode"]) fail(node, "missing required key 'mode'");
  const auto mode = scalar<std::string>(node["mode"], "mode");
  if (mode == "unitary") cfg.mode = Mode::Unitary;
  else if (mode == "monitored") cfg.mode = Mode::Monitored;
  else if (mode == "averaged") cfg.mode = Mode::Averaged;
  else if (mode == "basis_info") cfg.mode = Mode::BasisInfo;
  else fail(node["mode"], "unknown mode '" + mode + "'");

  if (node["basis"]) cfg.basis = basis(node["basis"], cfg.n, cfg.seed);
  else cfg.basis.seed = cfg.seed;
  if (node["spectrum"]) cfg.spectrum = spectrum(node["spectrum"], cfg.n);
  if (node["ensemble"]) cfg.ensemble = ensemble(node["ensemble"]);

  if (const YAML::Node list = node["transitions"]) {
    if (!list.IsSequence()) fail(list, "transitions must be a list of [from, to]");
    for (const auto& pair : list) {
      if (!pair.IsSequence() || pair.size() != 2) {
        fail(pair, "each transition must be a [from, to] pair");
      }
      const std::size_t from = count(pair[0], "transition source");
      const std::size_t to = count(pair[1], "transition target");
      if (from < 1 || from > cfg.n || to < 1 || to > cfg.n) {
        fail(pair, "transition sites must lie in 1.." + std::to_string(cfg.n));
      }
      cfg.transitions.push_back({from - 1, to - 1});
    }
  }
  if (cfg.mode != Mode::BasisInfo && cfg.transitions.empty()) {
    fail(node, "mode '" + mode + "' requires a non-empty 'transitions' list");
  }

  if (const YAML::Node times = node["times"]) {
    check_keys(times, {"t_start", "t_end", "t_step"}, "times");
    if (times["t_start"]) cfg.times.start = real(times["t_start"], "t_start");
    if (times["t_end"]) cfg.times.end = real(times["t_end"], "t_end");
    if (times["t_step"]) cfg.times.step = real(times["t_step"], "t_step");
    if (cfg.times.start < 0.0) fail(times, "t_start must be >= 0");
    if (!(cfg.times.step > 0.0)) fail(times, "t_step must be > 0");
    if (cfg.times.end < cfg.times.start) fail(times, "t_end must be >= t_start");
    if (cfg.times.points().size() > 1000000) fail(times, "time grid too large");
  }

  if (const YAML::Node monitored = node["monitored"]) {
    check_keys(monitored, {"tau", "m_max"}, "monitored");
    if (!monitored["tau"]) fail(monitored, "monitored requires 'tau'");
    MonitoredGrid grid;
    grid.tau = real(monitored["tau"], "tau");
    if (!(grid.tau > 0.0)) fail(monitored["tau"], "tau must be > 0");
    if (monitored["m_max"]) {
      grid.max_attempts = count(monitored["m_max"], "m_max");
      if (grid.max_attempts < 1) fail(monitored["m_max"], "m_max must be >= 1");
    }
    cfg.monitored = grid;
  }
  if (cfg.mode == Mode::Monitored && !cfg.monitored) {
    fail(node, "mode 'monitored' requires 'monitored: {tau: ...}'");
  }
  if (cfg.mode == Mode::Averaged && !cfg.ensemble) {
    fail(node, "mode 'averaged' requires an 'ensemble'");
  }

  if (const YAML::Node mc = node["monte_carlo"]) {
    check_keys(mc, {"samples"}, "monte_carlo");
    if (!mc["samples"]) fail(mc, "monte_carlo requires 'samples'");
    const std::size_t samples = count(mc["samples"], "samples");
    if (samples < 2) fail(mc["samples"], "samples must be >= 2");
    if (cfg.mode != Mode::Averaged) {
      fail(mc, "monte_carlo is only valid in averaged mode");
    }
    cfg.monte_carlo_samples = samples;
  }
  if (node["cyclic_asymptote"]) {
    cfg.cyclic_asymptote = boolean(node["cyclic_asymptote"], "cyclic_asymptote");
  }
  return cfg;
}

}  // namespace

const char* to_string(Mode mode) {
  switch (mode) {
    case Mode::Unitary: return "unitary";
    case Mode::Monitored: return "monitored";
    case Mode::Averaged: return "averaged";
    case Mode::BasisInfo: return "basis_info";
  }
  return "unknown";
}

std::vector<double> TimeGrid::points() const {
  const auto count =
      static_cast<std::size_t>(std::floor((end - start) / step + 1e-9)) + 1;
  std::vector<double> out(count);
  for (std::size_t i = 0; i < count; ++i) {
    out[i] = start + static_cast<double>(i) * step;
  }
  return out;
}

RunConfig parse_config(const std::string& text, const std::string& origin,
                       std::optional<std::uint64_t> seed_override) {
  YAML::Node root;
  try {
    root = YAML::Load(text);
  } catch (const YAML::ParserException& e) {
    throw ConfigError(origin, e.mark.line + 1, e.msg);
  }
  const Parser parser(origin);
  if (!root.IsMap()) parser.fail(root, "top level must be a mapping");

  std::set<std::string> top_keys = kPanelKeys;
  top_keys.insert({"panels", "out_dir"});
  parser.check_keys(root, top_keys, "top level");

  if (seed_override) {
    root["seed"] = *seed_override;
    const YAML::Node& lookup = root;
    if (lookup["panels"] && lookup["panels"].IsSequence()) {
      for (YAML::Node entry : root["panels"]) {
        const YAML::Node& view = entry;
        if (view.IsMap() && view["seed"]) entry["seed"] = *seed_override;
      }
    }
  }

  const YAML::Node& doc = root;
  RunConfig run;
  run.source = text;
  if (doc["seed"]) run.seed = parser.seed(doc["seed"]);
  if (doc["out_dir"]) {
    run.out_dir = parser.scalar<std::string>(doc["out_dir"], "out_dir");
  }

  if (const YAML::Node panels = doc["panels"]) {
    if (!panels.IsSequence() || panels.size() == 0) {
      parser.fail(panels, "panels must be a non-empty list");
    }
    std::set<std::string> names;
    for (std::size_t i = 0; i < panels.size(); ++i) {
      const YAML::Node entry = panels[i];
      parser.check_keys(entry, kPanelKeys, "panel");
      // Panel keys fall back to the top-level defaults.
      YAML::Node merged = YAML::Clone(entry);
      for (const auto& kv : doc) {
        const auto key = kv.first.as<std::string>();
        if (kPanelKeys.contains(key) && !merged[key]) merged[key] = kv.second;
      }
      ExperimentConfig cfg = parser.panel(merged, i);
      if (!names.insert(cfg.name).second) {
        parser.fail(entry, "duplicate panel name '" + cfg.name + "'");
      }
      run.panels.push_back(std::move(cfg));
    }
  } else {
    run.panels.push_back(parser.panel(doc, 0));
  }
  return run;
}

RunConfig load_config(const std::filesystem::path& path,
                      std::optional<std::uint64_t> seed_override) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError(path.string(), 0, "cannot open config file");
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return parse_config(buffer.str(), path.string(), seed_override);
}

OrthonormalBasis build_basis(const ExperimentConfig& config) {
  switch (config.basis.kind) {
    case BasisKind::Localized: return localized_basis(config.n);
    case BasisKind::PlaneWave: return plane_wave_basis(config.n);
    case BasisKind::Mixed: {
      const BasisPartition partition =
          config.basis.partition
              ? *config.basis.partition
              : random_partition(config.n, config.basis.seed,
                                 config.basis.max_block);
      return mixed_basis(config.n, partition);
    }
  }
  throw ParameterError("build_basis: unknown basis kind");
}

Spectrum build_spectrum(const ExperimentConfig& config) {
  switch (config.spectrum.kind) {
    case SpectrumSpec::Kind::Ideal: return ideal_spectrum(config.n);
    case SpectrumSpec::Kind::Linear: return linear_spectrum(config.n);
    case SpectrumSpec::Kind::Explicit:
      return Spectrum(Eigen::Map<const Eigen::VectorXd>(
                          config.spectrum.energies.data(),
                          static_cast<Eigen::Index>(config.spectrum.energies.size())),
                      config.spectrum.detailed_balance);
  }
  throw ParameterError("build_spectrum: unknown spectrum kind");
}

EigenvalueEnsemble build_ensemble(const ExperimentConfig& config) {
  if (!config.ensemble) {
    throw ParameterError("build_ensemble: configuration has no ensemble");
  }
  return EigenvalueEnsemble(build_spectrum(config).energies(), *config.ensemble);
}

}  // namespace qwalk
