#include "qwalk/monitor.hpp"

#include <cmath>
#include <string>

#include "qwalk/errors.hpp"
#include "qwalk/evolution.hpp"

namespace qwalk {

namespace {

void require_inputs(const OrthonormalBasis& basis, const Spectrum& spectrum,
                    std::size_t site, const char* who) {
  if (basis.size() != spectrum.size()) {
    throw InvalidSizeError(std::string(who) + ": basis/spectrum size mismatch");
  }
  if (site >= basis.size()) {
    throw IndexError(std::string(who) + ": site " + std::to_string(site) +
                     " out of range");
  }
}

void require_positive_tau(double tau, const char* who) {
  if (!(tau > 0.0)) {
    throw ParameterError(std::string(who) + ": tau must be > 0");
  }
}

Eigen::VectorXcd half_step_phases(const Spectrum& spectrum, double tau) {
  const auto n = static_cast<Eigen::Index>(spectrum.size());
  Eigen::VectorXcd phases(n);
  for (Eigen::Index k = 0; k < n; ++k) {
    phases(k) = std::polar(1.0, -0.5 * spectrum.energies()(k) * tau);
  }
  return phases;
}

}  // namespace

Eigen::MatrixXcd projector_factor(const OrthonormalBasis& basis,
                                  std::size_t site) {
  const Eigen::VectorXcd q = basis.site_overlaps(site);
  const auto n = q.size();
  // (Q* E Q)_kl = q*_k q_l.
  return Eigen::MatrixXcd::Identity(n, n) - q.conjugate() * q.transpose();
}

MonitoredOperator monitored_operator_energy(const OrthonormalBasis& basis,
                                            const Spectrum& spectrum,
                                            double tau, std::size_t site) {
  require_inputs(basis, spectrum, site, "monitored_operator_energy");
  if (!(tau >= 0.0)) {
    throw ParameterError("monitored_operator_energy: tau must be >= 0");
  }
  const Eigen::VectorXcd phases = half_step_phases(spectrum, tau);
  Eigen::MatrixXcd t =
      phases.asDiagonal() * projector_factor(basis, site) * phases.asDiagonal();
  return MonitoredOperator{std::move(t), site, tau};
}

Eigen::MatrixXcd monitored_operator_position(const OrthonormalBasis& basis,
                                             const Spectrum& spectrum,
                                             double tau, std::size_t site) {
  require_inputs(basis, spectrum, site, "monitored_operator_position");
  require_positive_tau(tau, "monitored_operator_position");
  const Eigen::MatrixXcd half =
      exponential_propagator(hamiltonian_from(basis, spectrum), 0.5 * tau);
  Eigen::MatrixXcd projector =
      Eigen::MatrixXcd::Identity(half.rows(), half.cols());
  const auto m = static_cast<Eigen::Index>(site);
  projector(m, m) = 0.0;
  return half * projector * half;
}

double spectral_radius_bound(const Eigen::MatrixXcd& t, int max_iterations) {
  const auto n = t.cols();
  if (n == 0) return 0.0;
  const Eigen::MatrixXcd gram = t.adjoint() * t;
  Eigen::VectorXcd v(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    v(i) = Complex(1.0 + 0.1 * static_cast<double>(i % 7),
                   0.05 * static_cast<double>(i % 3));
  }
  v.normalize();
  double estimate = 0.0;
  for (int it = 0; it < max_iterations; ++it) {
    Eigen::VectorXcd w = gram * v;
    const double norm = w.norm();
    if (norm == 0.0) return 0.0;
    const double next = v.dot(w).real();
    v = w / norm;
    if (it > 10 && std::abs(next - estimate) <= 1e-15 * std::abs(next)) {
      estimate = next;
      break;
    }
    estimate = next;
  }
  return std::sqrt(std::max(0.0, estimate));
}

void check_invariants(const MonitoredOperator& op,
                      const OrthonormalBasis& basis) {
  const Eigen::VectorXcd q_bar = basis.site_overlaps(op.site).conjugate();
  const double annihilation = (projector_factor(basis, op.site) * q_bar).norm();
  if (annihilation > 1e-12) {
    throw NumericalError(
        "monitored operator: projector does not annihilate q*_M (residual " +
        std::to_string(annihilation) + ")");
  }
  const double radius = spectral_radius_bound(op.matrix);
  if (radius > 1.0 + 1e-9) {
    throw NumericalError("monitored operator: spectral radius bound " +
                         std::to_string(radius) + " exceeds 1");
  }
}

DetectionSeries detection_series(const OrthonormalBasis& basis,
                                 const Spectrum& spectrum, double tau,
                                 std::size_t to, std::size_t from,
                                 std::size_t max_attempts) {
  require_inputs(basis, spectrum, to, "detection_series");
  require_inputs(basis, spectrum, from, "detection_series");
  require_positive_tau(tau, "detection_series");
  if (max_attempts == 0) {
    throw ParameterError("detection_series: max_attempts must be >= 1");
  }

  const MonitoredOperator op =
      monitored_operator_energy(basis, spectrum, tau, to);
  const Eigen::VectorXcd phases = half_step_phases(spectrum, tau);
  // <r_M| exp(-iH tau/2) in energy coordinates, and the half-evolved state.
  const Eigen::VectorXcd readout =
      basis.site_overlaps(to).cwiseProduct(phases);
  Eigen::VectorXcd state =
      phases.cwiseProduct(basis.site_overlaps(from).conjugate());

  DetectionSeries series;
  series.site_from = from;
  series.site_to = to;
  series.tau = tau;
  double cumulative = 0.0;
  for (std::size_t m = 1; m <= max_attempts; ++m) {
    const Complex phi = readout.cwiseProduct(state).sum();
    const double probability = std::norm(phi);
    cumulative += probability;
    series.amplitudes.push_back(phi);
    series.probabilities.push_back(probability);
    series.cumulative.push_back(cumulative);
    state = op.matrix * state;
    const double survival = state.squaredNorm();
    series.survival.push_back(survival);
    if (survival < kFullyDetectedSurvival) break;
  }
  return series;
}

std::vector<Complex> detection_amplitudes_position(const OrthonormalBasis& basis,
                                                   const Spectrum& spectrum,
                                                   double tau, std::size_t to,
                                                   std::size_t from,
                                                   std::size_t max_attempts) {
  require_inputs(basis, spectrum, to, "detection_amplitudes_position");
  require_inputs(basis, spectrum, from, "detection_amplitudes_position");
  require_positive_tau(tau, "detection_amplitudes_position");
  const Eigen::MatrixXcd half =
      exponential_propagator(hamiltonian_from(basis, spectrum), 0.5 * tau);
  const Eigen::MatrixXcd monitored =
      monitored_operator_position(basis, spectrum, tau, to);
  Eigen::VectorXcd state = half.col(static_cast<Eigen::Index>(from));
  const Eigen::RowVectorXcd readout = half.row(static_cast<Eigen::Index>(to));
  std::vector<Complex> amplitudes;
  amplitudes.reserve(max_attempts);
  for (std::size_t m = 1; m <= max_attempts; ++m) {
    amplitudes.push_back((readout * state).value());
    state = monitored * state;
  }
  return amplitudes;
}

double invariant_subspace_defect(const OrthonormalBasis& basis,
                                 const Spectrum& spectrum, double tau,
                                 std::size_t site, std::size_t level) {
  require_inputs(basis, spectrum, site, "invariant_subspace_defect");
  require_positive_tau(tau, "invariant_subspace_defect");
  if (level < 1 || level >= site) {
    throw ParameterError("invariant_subspace_defect: level " +
                         std::to_string(level) + " outside 1.." +
                         std::to_string(site) + "-1");
  }
  const MonitoredOperator op =
      monitored_operator_energy(basis, spectrum, tau, site);
  const auto k = static_cast<Eigen::Index>(level);
  Eigen::VectorXcd residual = op.matrix.col(k);
  residual(k) -= std::polar(1.0, -spectrum.energies()(k) * tau);
  return residual.norm();
}

double removed_states_check(const OrthonormalBasis& basis,
                            const Spectrum& spectrum, double tau,
                            std::size_t site, std::size_t attempts) {
  require_inputs(basis, spectrum, site, "removed_states_check");
  require_positive_tau(tau, "removed_states_check");
  if (site < 2) {
    throw ParameterError("removed_states_check: site must be >= 2");
  }
  if (attempts < 1) {
    throw ParameterError("removed_states_check: attempts must be >= 1");
  }
  const MonitoredOperator op =
      monitored_operator_energy(basis, spectrum, tau, site);
  const auto n = static_cast<Eigen::Index>(basis.size());
  const auto s = static_cast<Eigen::Index>(site);
  Eigen::VectorXcd y = Eigen::VectorXcd::Zero(n);
  y.tail(n - s).setConstant(1.0 / std::sqrt(static_cast<double>(n - s)));
  for (std::size_t m = 1; m < attempts; ++m) y = op.matrix * y;
  return y.segment(1, s - 1).cwiseAbs().maxCoeff();
}

}  // namespace qwalk
