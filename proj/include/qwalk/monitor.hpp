#pragma once

// Monitored evolution: unitary half-steps of length tau/2 around the
// projector 1 - |r_M><r_M| that removes the measured site. Zero-based
// indices throughout.

#include <cstddef>
#include <vector>

#include <Eigen/Dense>

#include "qwalk/basis.hpp"
#include "qwalk/spectral.hpp"

namespace qwalk {

struct MonitoredOperator {
  Eigen::MatrixXcd matrix;  // energy-basis matrix
  std::size_t site = 0;     // measured site M
  double tau = 0.0;
};

// T_kl = exp(-i E_k tau/2) (delta_kl - q*_{M,k} q_{M,l}) exp(-i E_l tau/2).
// tau == 0 is accepted and yields the bare projector factor; tau < 0 throws.
MonitoredOperator monitored_operator_energy(const OrthonormalBasis& basis,
                                            const Spectrum& spectrum,
                                            double tau, std::size_t site);

// exp(-iH tau/2) (1 - |r_M><r_M|) exp(-iH tau/2) in site coordinates, with the
// half-step propagator taken from the matrix exponential of H.
Eigen::MatrixXcd monitored_operator_position(const OrthonormalBasis& basis,
                                             const Spectrum& spectrum,
                                             double tau, std::size_t site);

// The projector factor 1 - Q*_M E Q_M in the energy basis.
Eigen::MatrixXcd projector_factor(const OrthonormalBasis& basis,
                                  std::size_t site);

// Upper bound on the spectral radius: the operator 2-norm estimated by power
// iteration on T^dagger T.
double spectral_radius_bound(const Eigen::MatrixXcd& t,
                             int max_iterations = 500);

// Checks the documented invariants of a monitored operator; throws
// NumericalError naming the first violated one.
void check_invariants(const MonitoredOperator& op, const OrthonormalBasis& basis);

struct DetectionSeries {
  std::size_t site_from = 0;  // M'
  std::size_t site_to = 0;    // M
  double tau = 0.0;
  std::vector<Complex> amplitudes;    // phi_m, m = 1..
  std::vector<double> probabilities;  // |phi_m|^2
  std::vector<double> cumulative;     // partial sums of probabilities
  std::vector<double> survival;       // squared norm of the undetected state
};

inline constexpr std::size_t kDefaultMaxAttempts = 1000;
inline constexpr double kFullyDetectedSurvival = 1e-14;

// First-detection amplitudes by repeated application of the energy-basis
// monitored operator to the half-evolved initial state. Stops early once the
// surviving norm squared drops below 1e-14.
DetectionSeries detection_series(const OrthonormalBasis& basis,
                                 const Spectrum& spectrum, double tau,
                                 std::size_t to, std::size_t from,
                                 std::size_t max_attempts = kDefaultMaxAttempts);

// Same amplitudes computed in site coordinates from the position-space
// operator; no early stop.
std::vector<Complex> detection_amplitudes_position(const OrthonormalBasis& basis,
                                                   const Spectrum& spectrum,
                                                   double tau, std::size_t to,
                                                   std::size_t from,
                                                   std::size_t max_attempts);

// ||T e_k - exp(-i E_k tau) e_k|| for an energy level strictly between the
// uniform level and the measured site (zero-based: 1 <= level < site); throws
// ParameterError outside that range. Meaningful for the localized basis,
// where these levels form an invariant block.
double invariant_subspace_defect(const OrthonormalBasis& basis,
                                 const Spectrum& spectrum, double tau,
                                 std::size_t site, std::size_t level);

// max over levels 1..site-1 of |<e_k, T^{m-1} y>| with y uniform over levels
// site..n-1, where m = attempts >= 1. Defined for any basis; needs site >= 2.
double removed_states_check(const OrthonormalBasis& basis,
                            const Spectrum& spectrum, double tau,
                            std::size_t site, std::size_t attempts);

}  // namespace qwalk
