// Acceptance suite: one line per criterion, nonzero exit if any fails.

#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <limits>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include <fmt/format.h>

#include "oracle.hpp"
#include "qwalk/config.hpp"
#include "qwalk/evolution.hpp"
#include "qwalk/monitor.hpp"
#include "qwalk/runner.hpp"

using namespace qwalk;
namespace fs = std::filesystem;

namespace {

struct Outcome {
  bool ok = true;
  std::string detail;
};

struct Criterion {
  int id;
  std::string name;
  double budget_seconds;
  std::function<Outcome()> body;
};

double max_abs(const Eigen::MatrixXcd& m) { return m.cwiseAbs().maxCoeff(); }

// ---------------------------------------------------------------- 1
Outcome ideal_hamiltonian() {
  double worst = 0.0;
  for (int n : {4, 10, 64}) {
    const Eigen::MatrixXcd target = Eigen::MatrixXcd::Identity(n, n) -
                                    Eigen::MatrixXcd::Constant(n, n, 1.0 / n);
    for (const auto& b : {localized_basis(n), plane_wave_basis(n)})
      worst = std::max(worst, max_abs(hamiltonian_from(b, ideal_spectrum(n)).matrix - target));
  }
  return {worst <= 1e-12, fmt::format("max deviation {:.2e} (tol 1e-12)", worst)};
}

// ---------------------------------------------------------------- 2
Outcome detailed_balance() {
  double worst = 0.0;
  for (const auto& b : {localized_basis(10), plane_wave_basis(10)})
    for (int t = 1; t <= 100; ++t) {
      const auto u = unitary(b, linear_spectrum(10), t).matrix;
      worst = std::max(worst, (u.rowwise().sum().array() - 1.0).abs().maxCoeff());
    }
  return {worst <= 1e-10, fmt::format("max |row sum - 1| {:.2e} (tol 1e-10)", worst)};
}

// ---------------------------------------------------------------- 3
Outcome oracle_equivalence() {
  const int n = 32;
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> time(0.1, 10.0);
  double worst = 0.0;
  for (int i = 0; i < 20; ++i) {
    const auto e = oracle::random_spectrum(n, rng());
    const double t = time(rng);
    for (const auto& b : {localized_basis(n), plane_wave_basis(n)}) {
      const auto reference = oracle::propagator(oracle::hamiltonian(b.rows(), e), t);
      worst = std::max(worst, max_abs(unitary(b, Spectrum(e), t).matrix - reference));
    }
  }
  return {worst <= 1e-9,
          fmt::format("20 spectra x 2 bases, n=32: max deviation {:.2e} (tol 1e-9)", worst)};
}

// ---------------------------------------------------------------- 4
Outcome monitored_consistency() {
  double first = 0.0, paths = 0.0, book = 0.0, excess = 0.0;
  for (std::size_t n : {4, 10, 32, 64}) {
    const Spectrum s(oracle::random_spectrum(int(n), 40 + n));
    for (const auto& b : {localized_basis(n), plane_wave_basis(n)}) {
      for (double tau : {0.5, 1.0, 2.0}) {
        const std::size_t to = n / 2, from = 1;
        const auto series = detection_series(b, s, tau, to, from, 100);
        const auto position = detection_amplitudes_position(b, s, tau, to, from, 100);
        first = std::max(first, std::abs(series.probabilities[0] -
                                         transition_probability(unitary(b, s, tau), to, from)));
        for (std::size_t m = 0; m < series.amplitudes.size(); ++m) {
          paths = std::max(paths, std::abs(series.amplitudes[m] - position[m]));
          book = std::max(book, std::abs(series.cumulative[m] - (1.0 - series.survival[m])));
          excess = std::max(excess, series.cumulative[m] - 1.0);
        }
      }
      // long run for the cumulative bound
      const auto long_run = detection_series(b, s, 1.0, 0, n - 1, 10000);
      for (std::size_t m = 0; m < long_run.cumulative.size(); ++m) {
        book = std::max(book, std::abs(long_run.cumulative[m] - (1.0 - long_run.survival[m])));
        excess = std::max(excess, long_run.cumulative[m] - 1.0);
      }
    }
  }
  const bool ok = first <= 1e-12 && paths <= 1e-9 && book <= 1e-9 && excess <= 0.0;
  return {ok, fmt::format("|Pi(1)-P| {:.2e} (1e-12), energy vs position {:.2e} (1e-9), "
                          "|cum-(1-surv)| {:.2e} (1e-9), max(cum-1) {:.2e} (<=0)",
                          first, paths, book, excess)};
}

// ---------------------------------------------------------------- 5
Outcome plane_wave_closed_form() {
  const int n = 10;
  const auto s = linear_spectrum(n);
  double worst = 0.0, literal = 0.0;
  for (int site = 0; site < n; ++site)
    for (double tau : {0.3, 1.0, 2.7}) {
      const auto op = monitored_operator_energy(plane_wave_basis(n), s, tau, site).matrix;
      worst = std::max(worst, max_abs(op - oracle::plane_wave_monitored(s.energies(), tau, site)));
      literal = std::max(
          literal, max_abs(op - oracle::plane_wave_monitored_literal(s.energies(), tau, site)));
    }
  return {worst <= 1e-12,
          fmt::format("max deviation {:.2e} (tol 1e-12); the as-printed phase convention "
                      "(E_k - E_l, opposite site sign) deviates by {:.2e}",
                      worst, literal)};
}

// ---------------------------------------------------------------- 6
Outcome block_scaling() {
  // One-based (M = n/2, k = 10) -> zero-based (site n/2 - 1, level 9).
  const auto defect = [](std::size_t n) {
    return invariant_subspace_defect(localized_basis(n), linear_spectrum(n), 1.0, n / 2 - 1, 9);
  };
  // Off-diagonal weight of the neglected uniform column k = 1.
  const auto leakage = [](std::size_t n) {
    const auto t = monitored_operator_energy(localized_basis(n), linear_spectrum(n), 1.0,
                                             n / 2 - 1).matrix;
    return t.col(0).tail(t.rows() - 1).norm();
  };
  const double d50 = defect(50), d200 = defect(200);
  const double ratio = d200 / d50;
  const bool ok = std::isfinite(ratio) && ratio >= 0.35 && ratio <= 0.65;
  return {ok, fmt::format("defect(50) = {:.3e}, defect(200) = {:.3e}, ratio {} (need "
                          "[0.35, 0.65]); levels 2..M-1 are an exact invariant block, so "
                          "the defect is zero up to rounding. Column k=1 leakage ratio "
                          "{:.4f} (n^-1/2 gives 0.5)",
                          d50, d200, std::isfinite(ratio) ? fmt::format("{:.3f}", ratio) : "undefined",
                          leakage(200) / leakage(50))};
}

// ---------------------------------------------------------------- 7
Outcome asymptotics() {
  const int n = 10;
  double late = 0.0;
  double weight = 0.0;
  for (const auto& b : {localized_basis(n), plane_wave_basis(n)}) {
    const EigenvalueEnsemble ens(linear_spectrum(n), Uncorrelated{1.0 / 500});
    weight = weight_function(ens, 100.0);
    for (int m = 0; m < n; ++m)
      for (int mp = 0; mp < n; ++mp)
        late = std::max(late, std::abs(averaged_transition(b, ens, 100.0, m, mp).value -
                                       asymptotic_transition(b, m, mp)));
  }
  double plane = 0.0;
  for (int m = 0; m < n; ++m)
    for (int mp = 0; mp < n; ++mp)
      plane = std::max(plane, std::abs(asymptotic_transition(plane_wave_basis(n), m, mp) - 0.1));
  double closed = 0.0;
  for (int m = 0; m < n; ++m)
    for (int mp = 0; mp <= m; ++mp)
      closed = std::max(closed, std::abs(localized_asymptotic_closed_form(n, m, mp) -
                                         oracle::localized_asymptote_direct(n, m, mp)));
  const bool ok = late <= 1e-3 && plane <= 5e-5 && closed <= 1e-12;
  return {ok, fmt::format("w(100) = {:.3e}; |avg(100) - asymptote| {:.2e} (1e-3), "
                          "|plane-wave - 0.1000| {:.2e}, closed form vs direct sum {:.2e} (1e-12)",
                          weight, late, plane, closed)};
}

// ---------------------------------------------------------------- 8
Outcome ensemble_oracle() {
  const int n = 6;
  const std::size_t samples = 100000;
  const std::vector<double> times{0.5, 1.0, 2.0, 5.0};
  int checks = 0, misses = 0;
  double worst_z = 0.0;
  std::uint64_t seed = 8;
  for (const FluctuationModel model :
       {FluctuationModel{Uncorrelated{1.0}}, FluctuationModel{Attractive{1.0, 1.0}},
        FluctuationModel{Repulsive{1.0, 2.0}}}) {
    const EigenvalueEnsemble ens(linear_spectrum(n), model);
    SpectrumSampler sampler(ens, seed++);
    std::vector<Eigen::VectorXd> x(samples);
    for (auto& v : x) v = sampler().energies() - ens.means();

    const auto judge = [&](double estimate, double se, double exact) {
      const double z = std::abs(estimate - exact) / se;
      worst_z = std::max(worst_z, z);
      ++checks;
      if (!(z <= 3.0)) ++misses;
    };
    for (int k = 0; k < n; ++k)
      for (int l = 0; l < n; ++l) {
        if (k == l) continue;
        for (double t : times) {
          double sr = 0, sr2 = 0, si = 0, si2 = 0;
          for (const auto& v : x) {
            const double phase = -(ens.means()(k) + v(k) - ens.means()(l) - v(l)) * t;
            const double re = std::cos(phase), im = std::sin(phase);
            sr += re; sr2 += re * re; si += im; si2 += im * im;
          }
          const double N = double(samples);
          const double mr = sr / N, mi = si / N;
          const double se_r = std::sqrt((sr2 / N - mr * mr) / (N - 1));
          const double se_i = std::sqrt((si2 / N - mi * mi) / (N - 1));
          const auto p = dephasing_factor(ens, k, l, t);
          judge(mr, se_r, p.real());
          judge(mi, se_i, p.imag());
        }
      }
    const Eigen::MatrixXd cov = correlation_matrices(ens).gamma_inv / 2.0;
    for (int k = 0; k < n; ++k)
      for (int l = k; l < n; ++l) {
        double s = 0, s2 = 0;
        for (const auto& v : x) {
          const double prod = v(k) * v(l);
          s += prod; s2 += prod * prod;
        }
        const double N = double(samples);
        const double mean = s / N;
        judge(mean, std::sqrt((s2 / N - mean * mean) / (N - 1)), cov(k, l));
      }
  }
  return {misses == 0, fmt::format("{} comparisons, {} beyond 3 standard errors, "
                                   "largest |z| = {:.2f}",
                                   checks, misses, worst_z)};
}

// ---------------------------------------------------------------- 9
Outcome degenerate_means() {
  const int n = 10;
  const EigenvalueEnsemble ens(Eigen::VectorXd::Constant(n, 0.7), Uncorrelated{0.002});
  double worst = 0.0;
  for (const auto& b : {localized_basis(n), plane_wave_basis(n)})
    for (double t : {0.0, 0.5, 1.0, 7.0, 100.0, 1e3, 1e5})
      for (int m = 0; m < n; ++m)
        for (int mp = 0; mp < n; ++mp)
          worst = std::max(worst, std::abs(averaged_transition(b, ens, t, m, mp).quantum_part -
                                           (m == mp ? 1.0 : 0.0)));
  return {worst <= 1e-12, fmt::format("max |quantum_part - delta| {:.2e} (tol 1e-12)", worst)};
}

// ---------------------------------------------------------------- 10
std::vector<double> csv_values(const fs::path& path) {
  std::ifstream in(path);
  std::string line;
  std::getline(in, line);
  std::vector<double> out;
  while (std::getline(in, line)) {
    std::istringstream fields(line);
    std::string x, label, value;
    std::getline(fields, x, ',');
    std::getline(fields, label, ',');
    std::getline(fields, value, ',');
    out.push_back(std::stod(value));
  }
  return out;
}

int turning_points(const std::vector<double>& v) {
  int count = 0;
  for (std::size_t i = 1; i + 1 < v.size(); ++i)
    if ((v[i] - v[i - 1]) * (v[i + 1] - v[i]) < 0) ++count;
  return count;
}

Outcome reference_configurations() {
  const fs::path configs = QWALK_CONFIG_DIR;
  const fs::path out = fs::temp_directory_path() / "qwalk_acceptance";
  fs::remove_all(out);
  run(load_config(configs / "unitary_vs_monitored.yaml"), {out / "two_panel", 1});
  run(load_config(configs / "averaged_plateaus.yaml"), {out / "plateaus", 1});

  bool ok = true;
  std::string detail;
  for (const char* pair : {"3-5", "5-5"}) {
    const auto u = csv_values(out / "two_panel" / fmt::format("unitary__{}.csv", pair));
    const auto [lo, hi] = std::minmax_element(u.begin(), u.end());
    const int turns = turning_points(u);
    const bool oscillating = turns >= 20 && *hi - *lo > 0.05;

    const auto m = csv_values(out / "two_panel" / fmt::format("monitored__{}.csv", pair));
    const double early = *std::max_element(m.begin(), m.begin() + 19);
    const double late = m.size() > 19 ? *std::max_element(m.begin() + 19, m.end()) : 0.0;
    ok = ok && oscillating && late < early;
    detail += fmt::format("{}: unitary {} turning points, range {:.3f}; monitored max "
                          "m<20 {:.4f} vs m>=20 {:.4f}. ",
                          pair, turns, *hi - *lo, early, late);
  }
  const double p35 = csv_values(out / "plateaus" / "localized__3-5.csv").back();
  const double p55 = csv_values(out / "plateaus" / "localized__5-5.csv").back();
  ok = ok && std::abs(p55 - p35) > 0.01;
  detail += fmt::format("localized averaged plateaus 3->5 {:.4f}, 5->5 {:.4f}", p35, p55);
  return {ok, detail};
}

}  // namespace

int main() {
  const std::vector<Criterion> criteria{
      {1, "ideal Hamiltonian reconstruction", 1, ideal_hamiltonian},
      {2, "detailed balance", 1, detailed_balance},
      {3, "evolution oracle equivalence", 10, oracle_equivalence},
      {4, "monitored consistency", 30, monitored_consistency},
      {5, "plane-wave monitored closed form", 1, plane_wave_closed_form},
      {6, "block-structure scaling", 10, block_scaling},
      {7, "asymptotics", 5, asymptotics},
      {8, "ensemble oracle", 60, ensemble_oracle},
      {9, "degenerate-mean localization", 1, degenerate_means},
      {10, "reference configurations", 10, reference_configurations},
  };
  int failed = 0;
  for (const auto& c : criteria) {
    const auto start = std::chrono::steady_clock::now();
    Outcome outcome;
    try {
      outcome = c.body();
    } catch (const std::exception& e) {
      outcome = {false, std::string("exception: ") + e.what()};
    }
    const double seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    const bool in_time = seconds < c.budget_seconds;
    const bool ok = outcome.ok && in_time;
    if (!ok) ++failed;
    std::cout << fmt::format("[{}] criterion {:>2}: {} ({:.2f}s, budget {:.0f}s{}) - {}\n",
                             ok ? "PASS" : "FAIL", c.id, c.name, seconds, c.budget_seconds,
                             in_time ? "" : ", over budget", outcome.detail);
  }
  std::cout << fmt::format("{} of {} criteria passed\n", criteria.size() - failed,
                           criteria.size());
  return failed == 0 ? 0 : 1;
}
