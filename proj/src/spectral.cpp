#include "qwalk/spectral.hpp"

#include <cmath>
#include <string>

#include "qwalk/errors.hpp"

namespace qwalk {

namespace {

template <class... Ts>
struct Overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

void validate_model(const FluctuationModel& model) {
  std::visit(Overloaded{
                 [](const Uncorrelated& m) {
                   if (!(m.kappa > 0.0))
                     throw ParameterError("uncorrelated: kappa must be > 0");
                 },
                 [](const Attractive& m) {
                   if (!(m.kappa > 0.0))
                     throw ParameterError("attractive: kappa must be > 0");
                   if (!(m.a > 0.0))
                     throw ParameterError("attractive: a must be > 0");
                 },
                 [](const Repulsive& m) {
                   if (!(m.kappa > 0.0))
                     throw ParameterError("repulsive: kappa must be > 0");
                   if (!(m.b > 1.0))
                     throw ParameterError("repulsive: b must be > 1");
                 },
             },
             model);
}

}  // namespace

Spectrum::Spectrum(Eigen::VectorXd energies, bool detailed_balance)
    : energies_(std::move(energies)), detailed_balance_(detailed_balance) {
  if (energies_.size() < 2) {
    throw InvalidSizeError("Spectrum: need at least 2 levels");
  }
  if (!energies_.allFinite()) {
    throw ParameterError("Spectrum: energies must be finite");
  }
  if (detailed_balance_ && energies_(0) != 0.0) {
    throw ParameterError("Spectrum: detailed balance requires E_1 = 0");
  }
}

Spectrum ideal_spectrum(std::size_t n) {
  if (n < 2) throw InvalidSizeError("ideal_spectrum: n must be >= 2");
  Eigen::VectorXd e = Eigen::VectorXd::Ones(static_cast<Eigen::Index>(n));
  e(0) = 0.0;
  return Spectrum(std::move(e), true);
}

Spectrum linear_spectrum(std::size_t n) {
  if (n < 2) throw InvalidSizeError("linear_spectrum: n must be >= 2");
  return Spectrum(Eigen::VectorXd::LinSpaced(static_cast<Eigen::Index>(n), 0.0,
                                             static_cast<double>(n - 1)),
                  true);
}

EigenvalueEnsemble::EigenvalueEnsemble(Eigen::VectorXd means,
                                       FluctuationModel model)
    : means_(std::move(means)), model_(model) {
  if (means_.size() < 2) {
    throw InvalidSizeError("EigenvalueEnsemble: need at least 2 levels");
  }
  if (!means_.allFinite()) {
    throw ParameterError("EigenvalueEnsemble: means must be finite");
  }
  validate_model(model_);
}

double EigenvalueEnsemble::dephasing_rate() const {
  return std::visit(
      Overloaded{
          [](const Uncorrelated& m) { return m.kappa; },
          [](const Attractive& m) { return m.kappa / (1.0 + m.a); },
          [](const Repulsive& m) { return m.kappa / (m.b - 1.0); },
      },
      model_);
}

CorrelationMatrices correlation_matrices(const EigenvalueEnsemble& ensemble) {
  const auto n = static_cast<Eigen::Index>(ensemble.size());
  const double nd = static_cast<double>(n);
  const Eigen::MatrixXd eye = Eigen::MatrixXd::Identity(n, n);
  const Eigen::MatrixXd ones = Eigen::MatrixXd::Ones(n, n);
  return std::visit(
      Overloaded{
          [&](const Uncorrelated& m) {
            return CorrelationMatrices{eye / m.kappa, eye * m.kappa};
          },
          [&](const Attractive& m) {
            return CorrelationMatrices{
                ((1.0 + m.a) * eye - ones / nd) / m.kappa,
                m.kappa / (1.0 + m.a) * (eye + ones / (m.a * nd))};
          },
          [&](const Repulsive& m) {
            return CorrelationMatrices{
                ((m.b - 1.0) * eye + ones / nd) / m.kappa,
                m.kappa / (m.b - 1.0) * (eye - ones / (nd * m.b))};
          },
      },
      ensemble.model());
}

std::complex<double> dephasing_factor(const EigenvalueEnsemble& ensemble,
                                      std::size_t k, std::size_t l, double t) {
  if (k >= ensemble.size() || l >= ensemble.size()) {
    throw IndexError("dephasing_factor: level index out of range");
  }
  if (k == l) return {1.0, 0.0};
  const double gap = ensemble.means()(static_cast<Eigen::Index>(k)) -
                     ensemble.means()(static_cast<Eigen::Index>(l));
  return std::polar(weight_function(ensemble, t), -gap * t);
}

double weight_function(const EigenvalueEnsemble& ensemble, double t) {
  return std::exp(-0.5 * ensemble.dephasing_rate() * t * t);
}

SpectrumSampler::SpectrumSampler(const EigenvalueEnsemble& ensemble,
                                 std::uint64_t seed)
    : means_(ensemble.means()), engine_(seed) {
  const Eigen::MatrixXd covariance =
      0.5 * correlation_matrices(ensemble).gamma_inv;
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(covariance);
  if (solver.info() != Eigen::Success ||
      !(solver.eigenvalues().minCoeff() > 0.0)) {
    throw NumericalError("SpectrumSampler: covariance is not positive definite");
  }
  root_ = solver.operatorSqrt();
}

Spectrum SpectrumSampler::operator()() {
  Eigen::VectorXd z(means_.size());
  for (Eigen::Index i = 0; i < z.size(); ++i) z(i) = normal_(engine_);
  return Spectrum(means_ + root_ * z);
}

void SpectrumSampler::seed(std::uint64_t seed) {
  engine_.seed(seed);
  normal_.reset();
}

Spectrum sample_spectrum(const EigenvalueEnsemble& ensemble,
                         std::uint64_t seed) {
  SpectrumSampler sampler(ensemble, seed);
  return sampler();
}

}  // namespace qwalk
