#pragma once

// Hamiltonians and propagators built from a prescribed eigenbasis and
// spectrum, plus disorder-averaged transition probabilities.
//
// Transition (from, to) = (M', M): P_{M M'}(t) = |U_{M M'}(t)|^2 is the
// probability to go from site M' to site M. Indices are zero-based.

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "qwalk/basis.hpp"
#include "qwalk/spectral.hpp"

namespace qwalk {

struct Hamiltonian {
  Eigen::MatrixXcd matrix;
};

struct UnitaryOperator {
  Eigen::MatrixXcd matrix;
  double time = 0.0;
};

// H = sum_k E_k row_k^dagger row_k.
Hamiltonian hamiltonian_from(const OrthonormalBasis& basis,
                             const Spectrum& spectrum);

// U_{MM'}(t) = sum_k q_{M,k} exp(-i E_k t) q*_{M',k}.
UnitaryOperator unitary(const OrthonormalBasis& basis, const Spectrum& spectrum,
                        double t);

// exp(-i H t) by Pade scaling-and-squaring, independent of any eigenbasis.
Eigen::MatrixXcd exponential_propagator(const Hamiltonian& hamiltonian,
                                        double t);

double unitarity_defect(const Eigen::MatrixXcd& u);

double transition_probability(const UnitaryOperator& u, std::size_t to,
                              std::size_t from);

struct AveragedTransition {
  double classical_part = 0.0;  // sum_k |q_{M',k}|^2 |q_{M,k}|^2
  double quantum_part = 0.0;    // P computed with the mean spectrum
  double weight = 0.0;          // w(t)
  double value = 0.0;           // <P_{MM'}(t)> from the full double sum
};

// Ensemble average of P_{to,from}(t). `value` is the exact double sum over
// level pairs with p_kl(t); the split fields satisfy
// value = (1 - weight) classical_part + weight quantum_part.
AveragedTransition averaged_transition(const OrthonormalBasis& basis,
                                       const EigenvalueEnsemble& ensemble,
                                       double t, std::size_t to,
                                       std::size_t from);

// t -> infinity limit: sum_k |q_{M,k}|^2 |q_{M',k}|^2.
double asymptotic_transition(const OrthonormalBasis& basis, std::size_t to,
                             std::size_t from);

// Closed form of the localized-basis limit for an n-site graph (zero-based
// sites; the pair is symmetric and is ordered internally).
double localized_asymptotic_closed_form(std::size_t n, std::size_t to,
                                        std::size_t from);

// Uniform average of asymptotic_transition over all n cyclic relabelings
// (to + s, from + s) mod n of the sites.
double cyclic_asymptotic_transition(const OrthonormalBasis& basis,
                                    std::size_t to, std::size_t from);

struct MonteCarloEstimate {
  std::vector<double> mean;
  std::vector<double> standard_error;
};

// Sample mean of P_{to,from}(t) over `samples` spectra drawn from the
// ensemble, for each t in `times`. Sample s uses its own stream seeded from
// (seed, s); results are reduced pairwise in sample order, so the output is
// independent of `threads`.
MonteCarloEstimate monte_carlo_transition(const OrthonormalBasis& basis,
                                          const EigenvalueEnsemble& ensemble,
                                          std::span<const double> times,
                                          std::size_t to, std::size_t from,
                                          std::size_t samples,
                                          std::uint64_t seed,
                                          unsigned threads = 1);

// Seed of Monte Carlo sample `index` under base seed `seed`.
std::uint64_t sample_seed(std::uint64_t seed, std::uint64_t index);

}  // namespace qwalk
