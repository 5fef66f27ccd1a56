#pragma once

// Spectra and Gaussian eigenvalue ensembles.
//
// Fluctuations x = E - mean have density proportional to exp(-x^T gamma x),
// i.e. covariance gamma^{-1} / 2. Under this convention the off-diagonal
// dephasing <exp(-i (x_k - x_l) t)> equals exp(-sigma t^2 / 2) with
// sigma = gamma^{-1}_kk - gamma^{-1}_kl for all three shipped models.

#include <complex>
#include <cstddef>
#include <cstdint>
#include <random>
#include <variant>

#include <Eigen/Dense>

namespace qwalk {

class Spectrum {
 public:
  // Throws ParameterError for non-finite entries, InvalidSizeError for
  // n < 2, and ParameterError if `detailed_balance` is requested while
  // energies[0] != 0.
  explicit Spectrum(Eigen::VectorXd energies, bool detailed_balance = false);

  std::size_t size() const { return static_cast<std::size_t>(energies_.size()); }
  const Eigen::VectorXd& energies() const { return energies_; }
  double operator[](std::size_t k) const {
    return energies_(static_cast<Eigen::Index>(k));
  }
  bool detailed_balance() const { return detailed_balance_; }

 private:
  Eigen::VectorXd energies_;
  bool detailed_balance_;
};

// (0, 1, 1, ..., 1), detailed-balance pinned.
Spectrum ideal_spectrum(std::size_t n);
// E_k = k (zero-based), detailed-balance pinned.
Spectrum linear_spectrum(std::size_t n);

struct Uncorrelated {
  double kappa;
};
struct Attractive {
  double kappa;
  double a;
};
struct Repulsive {
  double kappa;
  double b;
};

using FluctuationModel = std::variant<Uncorrelated, Attractive, Repulsive>;

class EigenvalueEnsemble {
 public:
  // Throws ParameterError for kappa <= 0, a <= 0 or b <= 1.
  EigenvalueEnsemble(Eigen::VectorXd means, FluctuationModel model);
  EigenvalueEnsemble(const Spectrum& means, FluctuationModel model)
      : EigenvalueEnsemble(means.energies(), model) {}

  std::size_t size() const { return static_cast<std::size_t>(means_.size()); }
  const Eigen::VectorXd& means() const { return means_; }
  const FluctuationModel& model() const { return model_; }

  // Variance of x_k - x_l for k != l: kappa, kappa/(1+a) or kappa/(b-1).
  double dephasing_rate() const;

 private:
  Eigen::VectorXd means_;
  FluctuationModel model_;
};

struct CorrelationMatrices {
  Eigen::MatrixXd gamma;
  Eigen::MatrixXd gamma_inv;
};

CorrelationMatrices correlation_matrices(const EigenvalueEnsemble& ensemble);

// p_kl(t) = <exp(-i (E_k - E_l) t)>; exactly 1 for k == l.
std::complex<double> dephasing_factor(const EigenvalueEnsemble& ensemble,
                                      std::size_t k, std::size_t l, double t);

// w(t) = exp(-sigma t^2 / 2).
double weight_function(const EigenvalueEnsemble& ensemble, double t);

// Draws spectra E = mean + S z with S the symmetric square root of
// gamma^{-1}/2 and z i.i.d. standard normal.
class SpectrumSampler {
 public:
  SpectrumSampler(const EigenvalueEnsemble& ensemble, std::uint64_t seed);

  Spectrum operator()();
  // Restarts the underlying stream.
  void seed(std::uint64_t seed);
  const Eigen::MatrixXd& covariance_root() const { return root_; }

 private:
  Eigen::VectorXd means_;
  Eigen::MatrixXd root_;
  std::mt19937_64 engine_;
  std::normal_distribution<double> normal_{0.0, 1.0};
};

Spectrum sample_spectrum(const EigenvalueEnsemble& ensemble,
                         std::uint64_t seed);

}  // namespace qwalk
