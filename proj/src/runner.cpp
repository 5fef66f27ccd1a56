#include "qwalk/runner.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

#include <fmt/format.h>
#include <json.hpp>

#include "qwalk/basis.hpp"
#include "qwalk/errors.hpp"
#include "qwalk/evolution.hpp"
#include "qwalk/monitor.hpp"
#include "qwalk/parallel.hpp"
#include "qwalk/spectral.hpp"

namespace qwalk {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

constexpr double kProbabilityTolerance = 1e-10;
constexpr double kUnitarityTolerance = 1e-10;

struct Row {
  double x = 0.0;
  double value = 0.0;
  std::optional<double> classical;
  std::optional<double> quantum;
  std::optional<double> weight;
};

std::string transition_label(const Transition& tr) {
  return std::to_string(tr.from + 1) + "->" + std::to_string(tr.to + 1);
}

std::string file_stem(const ExperimentConfig& cfg, const Transition& tr) {
  return cfg.name + "__" + std::to_string(tr.from + 1) + "-" +
         std::to_string(tr.to + 1);
}

void check_probability(double p, const std::string& where) {
  if (!(p >= -kProbabilityTolerance && p <= 1.0 + kProbabilityTolerance)) {
    throw InvariantViolation("probability_bounds",
                             where + " produced " + format_value(p));
  }
}

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << text;
  if (!out) throw std::runtime_error("write failed for " + path.string());
}

std::string optional_field(const std::optional<double>& v) {
  return v ? format_value(*v) : std::string();
}

std::string render_rows(const std::string& label, const std::vector<Row>& rows,
                        bool integer_x) {
  std::string out = std::string(kCsvHeader) + "\n";
  for (const auto& row : rows) {
    out += integer_x ? std::to_string(static_cast<long long>(row.x))
                     : format_value(row.x);
    out += ',' + label + ',' + format_value(row.value) + ',' +
           optional_field(row.classical) + ',' + optional_field(row.quantum) +
           ',' + optional_field(row.weight) + '\n';
  }
  return out;
}

OrthonormalBasis checked_basis(const ExperimentConfig& cfg) {
  try {
    return build_basis(cfg);
  } catch (const LinearDependenceError& e) {
    throw InvariantViolation("basis_independence", e.what());
  } catch (const NumericalError& e) {
    throw InvariantViolation("basis_orthonormality", e.what());
  }
}

json basis_description(const ExperimentConfig& cfg) {
  json b;
  b["kind"] = to_string(cfg.basis.kind);
  if (cfg.basis.kind == BasisKind::Mixed) {
    const BasisPartition partition =
        cfg.basis.partition ? *cfg.basis.partition
                            : random_partition(cfg.n, cfg.basis.seed,
                                               cfg.basis.max_block);
    json blocks = json::array();
    for (const auto& block : partition.blocks()) {
      blocks.push_back({{"start", block.start + 1},
                        {"length", block.length},
                        {"kind", block.kind == BlockKind::Localized
                                     ? "localized"
                                     : "plane_wave"}});
    }
    b["partition"] = blocks;
    if (!cfg.basis.partition) b["seed"] = cfg.basis.seed;
  }
  return b;
}

const char* spectrum_name(const SpectrumSpec& spec) {
  switch (spec.kind) {
    case SpectrumSpec::Kind::Ideal: return "ideal";
    case SpectrumSpec::Kind::Linear: return "linear";
    case SpectrumSpec::Kind::Explicit: return "explicit";
  }
  return "unknown";
}

json ensemble_description(const FluctuationModel& model) {
  return std::visit(
      [](const auto& m) -> json {
        using M = std::decay_t<decltype(m)>;
        if constexpr (std::is_same_v<M, Uncorrelated>) {
          return {{"model", "uncorrelated"}, {"kappa", m.kappa}};
        } else if constexpr (std::is_same_v<M, Attractive>) {
          return {{"model", "attractive"}, {"kappa", m.kappa}, {"a", m.a}};
        } else {
          return {{"model", "repulsive"}, {"kappa", m.kappa}, {"b", m.b}};
        }
      },
      model);
}

class PanelRunner {
 public:
  PanelRunner(const ExperimentConfig& cfg, const fs::path& out_dir,
              unsigned threads)
      : cfg_(cfg), out_dir_(out_dir), threads_(threads) {}

  json run(std::vector<fs::path>& files) {
    json panel;
    panel["name"] = cfg_.name;
    panel["mode"] = to_string(cfg_.mode);
    panel["n"] = cfg_.n;
    panel["basis"] = basis_description(cfg_);
    panel["spectrum"] = spectrum_name(cfg_.spectrum);
    panel["seed"] = cfg_.seed;
    panel["files"] = json::array();

    const OrthonormalBasis basis = checked_basis(cfg_);
    switch (cfg_.mode) {
      case Mode::Unitary: unitary_mode(basis, panel, files); break;
      case Mode::Monitored: monitored_mode(basis, panel, files); break;
      case Mode::Averaged: averaged_mode(basis, panel, files); break;
      case Mode::BasisInfo: basis_info_mode(basis, panel, files); break;
    }
    return panel;
  }

 private:
  void emit(const Transition& tr, const std::vector<Row>& rows, bool integer_x,
            json entry, json& panel, std::vector<fs::path>& files) {
    const std::string name = file_stem(cfg_, tr) + ".csv";
    write_text(out_dir_ / name, render_rows(transition_label(tr), rows, integer_x));
    files.push_back(out_dir_ / name);
    entry["transition"] = transition_label(tr);
    entry["from"] = tr.from + 1;
    entry["to"] = tr.to + 1;
    entry["csv"] = name;
    panel["files"].push_back(std::move(entry));
  }

  void unitary_mode(const OrthonormalBasis& basis, json& panel,
                    std::vector<fs::path>& files) {
    const Spectrum spectrum = build_spectrum(cfg_);
    const std::vector<double> times = cfg_.times.points();
    const auto& pairs = cfg_.transitions;
    std::vector<std::vector<double>> values(times.size());
    parallel_for(times.size(), threads_, [&](std::size_t i) {
      const UnitaryOperator u = unitary(basis, spectrum, times[i]);
      const double defect = unitarity_defect(u.matrix);
      if (!(defect <= kUnitarityTolerance)) {
        throw InvariantViolation("unitarity",
                                 "|U U^dagger - 1| = " + format_value(defect) +
                                     " at t = " + format_value(times[i]));
      }
      values[i].resize(pairs.size());
      for (std::size_t p = 0; p < pairs.size(); ++p) {
        values[i][p] = transition_probability(u, pairs[p].to, pairs[p].from);
        check_probability(values[i][p], "unitary transition");
      }
    });
    for (std::size_t p = 0; p < pairs.size(); ++p) {
      std::vector<Row> rows(times.size());
      for (std::size_t i = 0; i < times.size(); ++i) {
        rows[i].x = times[i];
        rows[i].value = values[i][p];
      }
      emit(pairs[p], rows, false, json::object(), panel, files);
    }
    panel["x_label"] = "t";
    panel["times"] = cfg_.times.points();
  }

  void monitored_mode(const OrthonormalBasis& basis, json& panel,
                      std::vector<fs::path>& files) {
    const Spectrum spectrum = build_spectrum(cfg_);
    const MonitoredGrid grid = *cfg_.monitored;
    const auto& pairs = cfg_.transitions;
    std::vector<DetectionSeries> series(pairs.size());
    parallel_for(pairs.size(), threads_, [&](std::size_t p) {
      const MonitoredOperator op =
          monitored_operator_energy(basis, spectrum, grid.tau, pairs[p].to);
      try {
        check_invariants(op, basis);
      } catch (const NumericalError& e) {
        throw InvariantViolation("monitored_operator", e.what());
      }
      series[p] = detection_series(basis, spectrum, grid.tau, pairs[p].to,
                                   pairs[p].from, grid.max_attempts);
      const auto& s = series[p];
      for (std::size_t m = 0; m < s.probabilities.size(); ++m) {
        check_probability(s.probabilities[m], "detection probability");
        if (s.cumulative[m] > 1.0 + kProbabilityTolerance) {
          throw InvariantViolation("cumulative_detection_bound",
                                   "cumulative " + format_value(s.cumulative[m]));
        }
        if (std::abs(s.cumulative[m] - (1.0 - s.survival[m])) > 1e-9) {
          throw InvariantViolation("survival_bookkeeping",
                                   "at m = " + std::to_string(m + 1));
        }
      }
    });
    for (std::size_t p = 0; p < pairs.size(); ++p) {
      const auto& s = series[p];
      std::vector<Row> rows(s.probabilities.size());
      for (std::size_t m = 0; m < rows.size(); ++m) {
        rows[m].x = static_cast<double>(m + 1);
        rows[m].value = s.probabilities[m];
      }
      json entry;
      entry["attempts"] = rows.size();
      entry["detected"] = s.cumulative.empty() ? 0.0 : s.cumulative.back();
      emit(pairs[p], rows, true, std::move(entry), panel, files);
    }
    panel["x_label"] = "m";
    panel["tau"] = grid.tau;
    panel["m_max"] = grid.max_attempts;
  }

  void averaged_mode(const OrthonormalBasis& basis, json& panel,
                     std::vector<fs::path>& files) {
    const EigenvalueEnsemble ensemble = build_ensemble(cfg_);
    const std::vector<double> times = cfg_.times.points();
    const auto& pairs = cfg_.transitions;
    std::vector<std::vector<Row>> rows(pairs.size(),
                                       std::vector<Row>(times.size()));
    const std::size_t jobs = pairs.size() * times.size();
    parallel_for(jobs, threads_, [&](std::size_t job) {
      const std::size_t p = job / times.size();
      const std::size_t i = job % times.size();
      const AveragedTransition avg =
          averaged_transition(basis, ensemble, times[i], pairs[p].to,
                              pairs[p].from);
      const double split = (1.0 - avg.weight) * avg.classical_part +
                           avg.weight * avg.quantum_part;
      if (std::abs(split - avg.value) > 1e-12) {
        throw InvariantViolation("split_consistency",
                                 "double sum " + format_value(avg.value) +
                                     " vs split " + format_value(split));
      }
      check_probability(avg.value, "averaged transition");
      rows[p][i] = Row{times[i], avg.value, avg.classical_part,
                       avg.quantum_part, avg.weight};
    });

    for (std::size_t p = 0; p < pairs.size(); ++p) {
      json entry;
      entry["asymptote"] =
          cfg_.cyclic_asymptote
              ? cyclic_asymptotic_transition(basis, pairs[p].to, pairs[p].from)
              : asymptotic_transition(basis, pairs[p].to, pairs[p].from);
      if (cfg_.monte_carlo_samples) {
        const MonteCarloEstimate mc = monte_carlo_transition(
            basis, ensemble, times, pairs[p].to, pairs[p].from,
            *cfg_.monte_carlo_samples, cfg_.seed, threads_);
        std::string text = "t,transition,mean,standard_error\n";
        for (std::size_t i = 0; i < times.size(); ++i) {
          text += format_value(times[i]) + ',' + transition_label(pairs[p]) +
                  ',' + format_value(mc.mean[i]) + ',' +
                  format_value(mc.standard_error[i]) + '\n';
        }
        const std::string name = file_stem(cfg_, pairs[p]) + "__monte_carlo.csv";
        write_text(out_dir_ / name, text);
        files.push_back(out_dir_ / name);
        entry["monte_carlo_csv"] = name;
      }
      emit(pairs[p], rows[p], false, std::move(entry), panel, files);
    }

    std::vector<double> weights(times.size());
    for (std::size_t i = 0; i < times.size(); ++i) {
      weights[i] = weight_function(ensemble, times[i]);
    }
    panel["x_label"] = "t";
    panel["times"] = times;
    panel["ensemble"] = ensemble_description(*cfg_.ensemble);
    panel["sigma"] = ensemble.dephasing_rate();
    panel["weight"] = weights;
    if (cfg_.monte_carlo_samples) {
      panel["monte_carlo_samples"] = *cfg_.monte_carlo_samples;
    }
  }

  void basis_info_mode(const OrthonormalBasis& basis, json& panel,
                       std::vector<fs::path>& files) {
    std::string text = "k,c_k,classification\n";
    json coefficients = json::array();
    for (std::size_t k = 0; k < basis.size(); ++k) {
      const double c = localization_coefficient(basis, k);
      if (!(c > 0.0 && c <= 1.0 + kProbabilityTolerance)) {
        throw InvariantViolation("localization_coefficient_bounds",
                                 "c_" + std::to_string(k + 1) + " = " +
                                     format_value(c));
      }
      text += std::to_string(k + 1) + ',' + format_value(c) + ',' +
              to_string(classify_vector(c, basis.size())) + '\n';
      coefficients.push_back(c);
    }
    const std::string name = cfg_.name + "__basis_info.csv";
    write_text(out_dir_ / name, text);
    files.push_back(out_dir_ / name);
    panel["basis_info_csv"] = name;
    panel["localization_coefficients"] = coefficients;
    panel["orthonormality_defect"] = basis.orthonormality_defect();
    panel["x_label"] = "k";
  }

  const ExperimentConfig& cfg_;
  fs::path out_dir_;
  unsigned threads_;
};

// The layout holds only strings, numbers and lists/dicts of them, whose JSON
// spelling is also valid Python.
std::string python_repr(const json& value) { return value.dump(); }

}  // namespace

std::string format_value(double value) { return fmt::format("{:.12g}", value); }

std::uint64_t fnv1a64(std::string_view bytes) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

RunResult run(const RunConfig& config, const RunOptions& options) {
  fs::create_directories(options.out_dir);
  RunResult result;
  json manifest;
  manifest["library"] = {{"name", "qwalk"}, {"version", kLibraryVersion}};
  manifest["config_hash"] = fmt::format("fnv1a64:{:016x}", fnv1a64(config.source));
  manifest["seed"] = config.seed;
  manifest["panels"] = json::array();
  for (const auto& panel : config.panels) {
    PanelRunner runner(panel, options.out_dir, options.threads);
    manifest["panels"].push_back(runner.run(result.files));
  }
  result.manifest = options.out_dir / "manifest.json";
  write_text(result.manifest, manifest.dump(2) + "\n");
  return result;
}

fs::path emit_plot_script(const fs::path& manifest_path) {
  std::ifstream in(manifest_path);
  if (!in) throw ManifestError("cannot open manifest " + manifest_path.string());
  json manifest;
  try {
    in >> manifest;
  } catch (const json::exception& e) {
    throw ManifestError("malformed manifest: " + std::string(e.what()));
  }
  const fs::path dir = manifest_path.parent_path();
  if (!manifest.contains("panels") || !manifest["panels"].is_array() ||
      manifest["panels"].empty()) {
    throw ManifestError("manifest has no panels");
  }

  json layout = json::array();
  for (const auto& panel : manifest["panels"]) {
    const std::string mode = panel.value("mode", "");
    json spec;
    spec["title"] = panel.value("name", "") + " (" + mode + ", " +
                    panel["basis"].value("kind", "") + ")";
    spec["x_label"] = panel.value("x_label", "t");
    spec["series"] = json::array();
    if (mode == "basis_info") {
      const std::string csv = panel.value("basis_info_csv", "");
      if (csv.empty() || !fs::exists(dir / csv)) {
        throw ManifestError("missing CSV '" + csv + "'");
      }
      spec["kind"] = "basis_info";
      spec["series"].push_back({{"label", "c_k"}, {"csv", csv}});
      spec["y_label"] = "c_k";
    } else {
      if (!panel.contains("files") || panel["files"].empty()) {
        throw ManifestError("panel '" + panel.value("name", "") +
                            "' has an empty transitions list");
      }
      spec["kind"] = "series";
      spec["y_label"] = mode == "monitored" ? "first-detection probability"
                        : mode == "averaged" ? "averaged transition probability"
                                             : "transition probability";
      for (const auto& file : panel["files"]) {
        const std::string csv = file.value("csv", "");
        if (csv.empty() || !fs::exists(dir / csv)) {
          throw ManifestError("missing CSV '" + csv + "'");
        }
        json series = {{"label", file.value("transition", "")}, {"csv", csv}};
        if (file.contains("asymptote")) series["asymptote"] = file["asymptote"];
        spec["series"].push_back(std::move(series));
      }
    }
    layout.push_back(std::move(spec));
  }

  std::ostringstream py;
  py << "#!/usr/bin/env python3\n"
        "# Generated by qwalk " << kLibraryVersion << " from "
     << manifest_path.filename().string() << ".\n"
        "import csv\n"
        "import os\n"
        "import sys\n"
        "\n"
        "import matplotlib\n"
        "matplotlib.use(\"Agg\")\n"
        "import matplotlib.pyplot as plt\n"
        "\n"
        "HERE = os.path.dirname(os.path.abspath(__file__))\n"
        "PANELS = " << python_repr(layout) << "\n"
        "\n"
        "\n"
        "def read_columns(name, x_col, y_col):\n"
        "    xs, ys = [], []\n"
        "    with open(os.path.join(HERE, name), newline=\"\") as handle:\n"
        "        for row in csv.DictReader(handle):\n"
        "            xs.append(float(row[x_col]))\n"
        "            ys.append(float(row[y_col]))\n"
        "    return xs, ys\n"
        "\n"
        "\n"
        "def main():\n"
        "    out = sys.argv[1] if len(sys.argv) > 1 else os.path.join(HERE, \"plot.png\")\n"
        "    fig, axes = plt.subplots(1, len(PANELS), figsize=(6 * len(PANELS), 5),\n"
        "                             squeeze=False)\n"
        "    for ax, panel in zip(axes[0], PANELS):\n"
        "        for series in panel[\"series\"]:\n"
        "            if panel[\"kind\"] == \"basis_info\":\n"
        "                xs, ys = read_columns(series[\"csv\"], \"k\", \"c_k\")\n"
        "                ax.plot(xs, ys, \"o-\", label=series[\"label\"])\n"
        "                continue\n"
        "            xs, ys = read_columns(series[\"csv\"], \"t_or_m\", \"value\")\n"
        "            line, = ax.plot(xs, ys, \".-\", label=series[\"label\"])\n"
        "            if \"asymptote\" in series:\n"
        "                ax.axhline(series[\"asymptote\"], color=line.get_color(),\n"
        "                           linestyle=\"--\", linewidth=0.8)\n"
        "        ax.set_title(panel[\"title\"])\n"
        "        ax.set_xlabel(panel[\"x_label\"])\n"
        "        ax.set_ylabel(panel[\"y_label\"])\n"
        "        ax.legend()\n"
        "    fig.tight_layout()\n"
        "    fig.savefig(out, dpi=120)\n"
        "    print(out)\n"
        "\n"
        "\n"
        "if __name__ == \"__main__\":\n"
        "    main()\n";

  const fs::path script = dir / "plot.py";
  write_text(script, py.str());
  fs::permissions(script, fs::perms::owner_exec | fs::perms::group_exec,
                  fs::perm_options::add);
  return script;
}

}  // namespace qwalk
