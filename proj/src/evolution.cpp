#include "qwalk/evolution.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include <unsupported/Eigen/MatrixFunctions>

#include "qwalk/errors.hpp"
#include "qwalk/parallel.hpp"

namespace qwalk {

namespace {

constexpr std::size_t kMonteCarloChunk = 512;

void require_matching(const OrthonormalBasis& basis, std::size_t levels,
                      const char* who) {
  if (basis.size() != levels) {
    throw InvalidSizeError(std::string(who) + ": basis has " +
                           std::to_string(basis.size()) + " rows but " +
                           std::to_string(levels) + " levels were given");
  }
}

void require_site(std::size_t site, std::size_t n, const char* who) {
  if (site >= n) {
    throw IndexError(std::string(who) + ": site " + std::to_string(site) +
                     " out of range for n = " + std::to_string(n));
  }
}

// a_k = q_{to,k} q*_{from,k}.
Eigen::VectorXcd pair_weights(const OrthonormalBasis& basis, std::size_t to,
                              std::size_t from) {
  return basis.site_overlaps(to).cwiseProduct(
      basis.site_overlaps(from).conjugate());
}

double phase_sum_probability(const Eigen::VectorXcd& weights,
                             const Eigen::VectorXd& energies, double t) {
  Complex amplitude{0.0, 0.0};
  for (Eigen::Index k = 0; k < weights.size(); ++k) {
    amplitude += weights(k) * std::polar(1.0, -energies(k) * t);
  }
  return std::norm(amplitude);
}

}  // namespace

Hamiltonian hamiltonian_from(const OrthonormalBasis& basis,
                             const Spectrum& spectrum) {
  require_matching(basis, spectrum.size(), "hamiltonian_from");
  const Eigen::MatrixXcd& rows = basis.rows();
  Eigen::MatrixXcd h =
      rows.adjoint() * spectrum.energies().cast<Complex>().asDiagonal() * rows;
  // Symmetrize away rounding so downstream code sees an exactly Hermitian
  // matrix.
  h = 0.5 * (h + h.adjoint()).eval();
  return Hamiltonian{std::move(h)};
}

UnitaryOperator unitary(const OrthonormalBasis& basis, const Spectrum& spectrum,
                        double t) {
  require_matching(basis, spectrum.size(), "unitary");
  if (!(t >= 0.0)) throw ParameterError("unitary: t must be >= 0");
  const auto n = static_cast<Eigen::Index>(basis.size());
  Eigen::VectorXcd phases(n);
  for (Eigen::Index k = 0; k < n; ++k) {
    phases(k) = std::polar(1.0, -spectrum.energies()(k) * t);
  }
  const Eigen::MatrixXcd& rows = basis.rows();
  return UnitaryOperator{rows.adjoint() * phases.asDiagonal() * rows, t};
}

Eigen::MatrixXcd exponential_propagator(const Hamiltonian& hamiltonian,
                                        double t) {
  const Eigen::MatrixXcd generator = Complex(0.0, -t) * hamiltonian.matrix;
  return generator.exp();
}

double unitarity_defect(const Eigen::MatrixXcd& u) {
  const auto n = u.rows();
  return (u * u.adjoint() - Eigen::MatrixXcd::Identity(n, n))
      .cwiseAbs()
      .maxCoeff();
}

double transition_probability(const UnitaryOperator& u, std::size_t to,
                              std::size_t from) {
  const auto n = static_cast<std::size_t>(u.matrix.rows());
  require_site(to, n, "transition_probability");
  require_site(from, n, "transition_probability");
  return std::norm(
      u.matrix(static_cast<Eigen::Index>(to), static_cast<Eigen::Index>(from)));
}

AveragedTransition averaged_transition(const OrthonormalBasis& basis,
                                       const EigenvalueEnsemble& ensemble,
                                       double t, std::size_t to,
                                       std::size_t from) {
  require_matching(basis, ensemble.size(), "averaged_transition");
  require_site(to, basis.size(), "averaged_transition");
  require_site(from, basis.size(), "averaged_transition");
  if (!(t >= 0.0)) throw ParameterError("averaged_transition: t must be >= 0");

  const Eigen::VectorXcd a = pair_weights(basis, to, from);
  const auto n = a.size();

  Complex total{0.0, 0.0};
  for (Eigen::Index k = 0; k < n; ++k) {
    for (Eigen::Index l = 0; l < n; ++l) {
      total += dephasing_factor(ensemble, static_cast<std::size_t>(k),
                                static_cast<std::size_t>(l), t) *
               a(k) * std::conj(a(l));
    }
  }
  if (std::abs(total.imag()) > 1e-12) {
    throw NumericalError("averaged_transition: imaginary residue " +
                         std::to_string(total.imag()));
  }

  AveragedTransition out;
  out.classical_part = a.squaredNorm();
  out.quantum_part = phase_sum_probability(a, ensemble.means(), t);
  out.weight = weight_function(ensemble, t);
  out.value = total.real();
  return out;
}

double asymptotic_transition(const OrthonormalBasis& basis, std::size_t to,
                             std::size_t from) {
  require_site(to, basis.size(), "asymptotic_transition");
  require_site(from, basis.size(), "asymptotic_transition");
  return pair_weights(basis, to, from).squaredNorm();
}

double localized_asymptotic_closed_form(std::size_t n, std::size_t to,
                                        std::size_t from) {
  if (n < 2) throw InvalidSizeError("localized_asymptotic_closed_form: n < 2");
  require_site(to, n, "localized_asymptotic_closed_form");
  require_site(from, n, "localized_asymptotic_closed_form");
  // One-based M >= M'.
  const std::size_t m = std::max(to, from) + 1;
  const double md = static_cast<double>(m);
  const double nd = static_cast<double>(n);
  double value = 1.0 / (nd * nd) + 1.0 / (md * md);
  if (to == from) value += ((md - 1.0) * (md - 1.0) - 1.0) / (md * md);
  for (std::size_t k = m + 1; k <= n; ++k) {
    const double kd = static_cast<double>(k);
    value += 1.0 / (kd * kd * (kd - 1.0) * (kd - 1.0));
  }
  return value;
}

double cyclic_asymptotic_transition(const OrthonormalBasis& basis,
                                    std::size_t to, std::size_t from) {
  const std::size_t n = basis.size();
  require_site(to, n, "cyclic_asymptotic_transition");
  require_site(from, n, "cyclic_asymptotic_transition");
  const double sum = pairwise_sum<double>(0, n, [&](std::size_t s) {
    return asymptotic_transition(basis, (to + s) % n, (from + s) % n);
  });
  return sum / static_cast<double>(n);
}

std::uint64_t sample_seed(std::uint64_t seed, std::uint64_t index) {
  // splitmix64 finalizer over a golden-ratio stride.
  std::uint64_t z = seed + 0x9E3779B97F4A7C15ULL * (index + 1);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

MonteCarloEstimate monte_carlo_transition(const OrthonormalBasis& basis,
                                          const EigenvalueEnsemble& ensemble,
                                          std::span<const double> times,
                                          std::size_t to, std::size_t from,
                                          std::size_t samples,
                                          std::uint64_t seed,
                                          unsigned threads) {
  require_matching(basis, ensemble.size(), "monte_carlo_transition");
  require_site(to, basis.size(), "monte_carlo_transition");
  require_site(from, basis.size(), "monte_carlo_transition");
  if (samples < 2) {
    throw ParameterError("monte_carlo_transition: need at least 2 samples");
  }

  const Eigen::VectorXcd a = pair_weights(basis, to, from);
  const SpectrumSampler prototype(ensemble, seed);
  const std::size_t nt = times.size();
  const std::size_t chunks = (samples + kMonteCarloChunk - 1) / kMonteCarloChunk;

  // Per chunk: sums and sums of squares for every time point.
  std::vector<std::vector<double>> sums(chunks), squares(chunks);
  parallel_for(chunks, threads, [&](std::size_t c) {
    SpectrumSampler sampler = prototype;
    std::vector<double> s(nt, 0.0), q(nt, 0.0);
    const std::size_t end = std::min(samples, (c + 1) * kMonteCarloChunk);
    for (std::size_t i = c * kMonteCarloChunk; i < end; ++i) {
      sampler.seed(sample_seed(seed, i));
      const Spectrum drawn = sampler();
      for (std::size_t j = 0; j < nt; ++j) {
        const double p = phase_sum_probability(a, drawn.energies(), times[j]);
        s[j] += p;
        q[j] += p * p;
      }
    }
    sums[c] = std::move(s);
    squares[c] = std::move(q);
  });

  MonteCarloEstimate out;
  out.mean.resize(nt);
  out.standard_error.resize(nt);
  const double count = static_cast<double>(samples);
  for (std::size_t j = 0; j < nt; ++j) {
    const double s =
        pairwise_sum<double>(0, chunks, [&](std::size_t c) { return sums[c][j]; });
    const double q = pairwise_sum<double>(
        0, chunks, [&](std::size_t c) { return squares[c][j]; });
    const double mean = s / count;
    const double variance = std::max(0.0, (q - count * mean * mean) / (count - 1.0));
    out.mean[j] = mean;
    out.standard_error[j] = std::sqrt(variance / count);
  }
  return out;
}

}  // namespace qwalk
