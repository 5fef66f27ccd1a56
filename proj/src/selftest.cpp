#include "qwalk/selftest.hpp"

#include <cmath>
#include <functional>
#include <random>
#include <string>
#include <vector>

#include <fmt/format.h>

#include "qwalk/basis.hpp"
#include "qwalk/evolution.hpp"
#include "qwalk/monitor.hpp"
#include "qwalk/spectral.hpp"

namespace qwalk {

namespace {

struct Check {
  std::string name;
  double tolerance;
  std::function<double()> deviation;
};

Spectrum random_spectrum(std::size_t n, std::uint64_t seed) {
  std::mt19937_64 engine(seed);
  std::uniform_real_distribution<double> dist(-2.0, 2.0);
  Eigen::VectorXd e(static_cast<Eigen::Index>(n));
  for (auto& x : e) x = dist(engine);
  return Spectrum(std::move(e));
}

std::vector<Check> checks() {
  std::vector<Check> out;
  out.push_back({"ideal hamiltonian from both bases", 1e-12, [] {
                   const std::size_t n = 10;
                   const Eigen::MatrixXcd target =
                       Eigen::MatrixXcd::Identity(10, 10) -
                       Eigen::MatrixXcd::Constant(10, 10, 1.0 / n);
                   double worst = 0.0;
                   for (const auto& b : {localized_basis(n), plane_wave_basis(n)}) {
                     const auto h = hamiltonian_from(b, ideal_spectrum(n)).matrix;
                     worst = std::max(worst, (h - target).cwiseAbs().maxCoeff());
                   }
                   return worst;
                 }});
  out.push_back({"detailed balance row sums", 1e-10, [] {
                   const std::size_t n = 10;
                   double worst = 0.0;
                   for (const auto& b : {localized_basis(n), plane_wave_basis(n)}) {
                     for (int t = 1; t <= 100; ++t) {
                       const auto u = unitary(b, linear_spectrum(n), t).matrix;
                       worst = std::max(
                           worst, (u.rowwise().sum().array() - 1.0).abs().maxCoeff());
                     }
                   }
                   return worst;
                 }});
  out.push_back({"spectral propagator vs matrix exponential", 1e-9, [] {
                   const std::size_t n = 16;
                   const Spectrum s = random_spectrum(n, 7);
                   double worst = 0.0;
                   for (const auto& b : {localized_basis(n), plane_wave_basis(n)}) {
                     const auto u = unitary(b, s, 3.7).matrix;
                     const auto v =
                         exponential_propagator(hamiltonian_from(b, s), 3.7);
                     worst = std::max(worst, (u - v).cwiseAbs().maxCoeff());
                   }
                   return worst;
                 }});
  out.push_back({"column normalization of P", 1e-10, [] {
                   const std::size_t n = 12;
                   const auto u =
                       unitary(localized_basis(n), random_spectrum(n, 3), 5.0);
                   const Eigen::RowVectorXd columns =
                       u.matrix.cwiseAbs2().colwise().sum();
                   return (columns.array() - 1.0).abs().maxCoeff();
                 }});
  out.push_back({"energy vs position detection amplitudes", 1e-9, [] {
                   const std::size_t n = 10;
                   const auto b = localized_basis(n);
                   const auto s = linear_spectrum(n);
                   const auto series = detection_series(b, s, 1.0, 4, 2, 50);
                   const auto position =
                       detection_amplitudes_position(b, s, 1.0, 4, 2, 50);
                   double worst = 0.0;
                   for (std::size_t m = 0; m < series.amplitudes.size(); ++m) {
                     worst = std::max(worst,
                                      std::abs(series.amplitudes[m] - position[m]));
                   }
                   return worst;
                 }});
  out.push_back({"survival bookkeeping", 1e-9, [] {
                   const std::size_t n = 10;
                   const auto series = detection_series(
                       plane_wave_basis(n), linear_spectrum(n), 1.0, 4, 2, 500);
                   double worst = 0.0;
                   for (std::size_t m = 0; m < series.cumulative.size(); ++m) {
                     worst = std::max(worst, std::abs(series.cumulative[m] -
                                                      (1.0 - series.survival[m])));
                   }
                   return worst;
                 }});
  out.push_back({"monitored spectral radius <= 1", 1e-9, [] {
                   const std::size_t n = 10;
                   const auto op = monitored_operator_energy(
                       localized_basis(n), linear_spectrum(n), 1.0, 4);
                   return std::max(0.0, spectral_radius_bound(op.matrix) - 1.0);
                 }});
  out.push_back({"averaged split consistency", 1e-12, [] {
                   const std::size_t n = 8;
                   const auto b = localized_basis(n);
                   double worst = 0.0;
                   for (const FluctuationModel model :
                        {FluctuationModel{Uncorrelated{0.3}},
                         FluctuationModel{Attractive{0.3, 1.0}},
                         FluctuationModel{Repulsive{0.3, 2.0}}}) {
                     const EigenvalueEnsemble ens(linear_spectrum(n), model);
                     const auto avg = averaged_transition(b, ens, 2.5, 4, 2);
                     worst = std::max(
                         worst,
                         std::abs(avg.value - ((1.0 - avg.weight) * avg.classical_part +
                                               avg.weight * avg.quantum_part)));
                   }
                   return worst;
                 }});
  out.push_back({"localized asymptote closed form", 1e-12, [] {
                   const std::size_t n = 10;
                   const auto b = localized_basis(n);
                   double worst = 0.0;
                   for (std::size_t m = 0; m < n; ++m) {
                     for (std::size_t mp = 0; mp <= m; ++mp) {
                       worst = std::max(
                           worst, std::abs(asymptotic_transition(b, m, mp) -
                                           localized_asymptotic_closed_form(n, m, mp)));
                     }
                   }
                   return worst;
                 }});
  return out;
}

}  // namespace

int run_selftest(std::ostream& out) {
  int failures = 0;
  for (const auto& check : checks()) {
    double deviation = 0.0;
    bool ok = false;
    try {
      deviation = check.deviation();
      ok = deviation <= check.tolerance;
    } catch (const std::exception& e) {
      out << fmt::format("[FAIL] {}: {}\n", check.name, e.what());
      ++failures;
      continue;
    }
    out << fmt::format("[{}] {} (deviation {:.3e}, tolerance {:.0e})\n",
                       ok ? "PASS" : "FAIL", check.name, deviation,
                       check.tolerance);
    if (!ok) ++failures;
  }
  out << (failures == 0 ? "selftest passed\n"
                        : fmt::format("selftest: {} check(s) failed\n", failures));
  return failures == 0 ? 0 : 3;
}

}  // namespace qwalk
