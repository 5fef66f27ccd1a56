#include "qwalk/basis.hpp"

#include <cmath>
#include <numbers>
#include <random>
#include <string>

#include "qwalk/errors.hpp"

namespace qwalk {

namespace {

constexpr double kDependenceThreshold = 1e-10;
// Kahan-Parlett "twice is enough" trigger.
const double kReorthogonalizeThreshold = 1.0 / std::numbers::sqrt2;

void require_size(std::size_t n, const char* who) {
  if (n < 2) {
    throw InvalidSizeError(std::string(who) + ": graph size must be >= 2, got " +
                           std::to_string(n));
  }
}

// Non-uniform rows of the size-(length+1) pure basis, each of length+1
// components.
Eigen::MatrixXcd block_rows(std::size_t length, BlockKind kind) {
  const std::size_t m = length + 1;
  const Eigen::MatrixXcd full = kind == BlockKind::Localized
                                    ? localized_basis(m).rows()
                                    : plane_wave_basis(m).rows();
  return full.bottomRows(static_cast<Eigen::Index>(length));
}

}  // namespace

const char* to_string(BasisKind kind) {
  switch (kind) {
    case BasisKind::Localized: return "localized";
    case BasisKind::PlaneWave: return "plane_wave";
    case BasisKind::Mixed: return "mixed";
  }
  return "unknown";
}

const char* to_string(VectorLocalization tag) {
  switch (tag) {
    case VectorLocalization::Localized: return "localized";
    case VectorLocalization::Delocalized: return "delocalized";
    case VectorLocalization::Intermediate: return "intermediate";
  }
  return "unknown";
}

OrthonormalBasis::OrthonormalBasis(Eigen::MatrixXcd rows, BasisKind kind,
                                   double tolerance)
    : rows_(std::move(rows)), kind_(kind) {
  if (rows_.rows() != rows_.cols()) {
    throw InvalidSizeError("OrthonormalBasis: matrix must be square");
  }
  require_size(size(), "OrthonormalBasis");
  const double defect = orthonormality_defect();
  if (!(defect <= tolerance)) {
    throw NumericalError("OrthonormalBasis: rows not orthonormal (defect " +
                         std::to_string(defect) + ")");
  }
}

Eigen::VectorXcd OrthonormalBasis::site_overlaps(std::size_t site) const {
  if (site >= size()) {
    throw IndexError("site index " + std::to_string(site) + " out of range");
  }
  return rows_.col(static_cast<Eigen::Index>(site)).conjugate();
}

double OrthonormalBasis::orthonormality_defect() const {
  const auto n = rows_.rows();
  const Eigen::MatrixXcd gram = rows_ * rows_.adjoint();
  return (gram - Eigen::MatrixXcd::Identity(n, n)).cwiseAbs().maxCoeff();
}

OrthonormalBasis localized_basis(std::size_t n) {
  require_size(n, "localized_basis");
  const auto size = static_cast<Eigen::Index>(n);
  Eigen::MatrixXcd rows = Eigen::MatrixXcd::Zero(size, size);
  rows.row(0).setConstant(1.0 / std::sqrt(static_cast<double>(n)));
  for (Eigen::Index k = 1; k < size; ++k) {
    const double kk = static_cast<double>(k);
    const double norm = 1.0 / std::sqrt(kk * (kk + 1.0));
    rows.row(k).head(k).setConstant(norm);
    rows(k, k) = -kk * norm;
  }
  return OrthonormalBasis(std::move(rows), BasisKind::Localized);
}

OrthonormalBasis plane_wave_basis(std::size_t n) {
  require_size(n, "plane_wave_basis");
  const auto size = static_cast<Eigen::Index>(n);
  const double scale = 1.0 / std::sqrt(static_cast<double>(n));
  Eigen::MatrixXcd rows(size, size);
  for (Eigen::Index j = 0; j < size; ++j) {
    for (Eigen::Index k = 0; k < size; ++k) {
      // Reduce the exponent mod n so the phase argument stays in [0, 2 pi).
      const auto r = static_cast<double>((j * k) % size);
      rows(j, k) = std::polar(scale, 2.0 * std::numbers::pi * r /
                                         static_cast<double>(n));
    }
  }
  return OrthonormalBasis(std::move(rows), BasisKind::PlaneWave);
}

void BasisPartition::validate(std::size_t n) const {
  require_size(n, "BasisPartition");
  if (blocks_.empty()) throw PartitionError("partition has no blocks");
  std::size_t next = 1;
  for (std::size_t b = 0; b < blocks_.size(); ++b) {
    const auto& block = blocks_[b];
    if (block.length == 0) {
      throw PartitionError("block " + std::to_string(b) + " has zero length");
    }
    if (block.start != next) {
      throw PartitionError("block " + std::to_string(b) + " starts at " +
                           std::to_string(block.start) + ", expected " +
                           std::to_string(next));
    }
    next += block.length;
  }
  if (next != n) {
    throw PartitionError("blocks cover levels 1.." + std::to_string(next - 1) +
                         ", expected 1.." + std::to_string(n - 1));
  }
}

BasisPartition BasisPartition::single(std::size_t n, BlockKind kind) {
  require_size(n, "BasisPartition::single");
  return BasisPartition({PartitionBlock{1, n - 1, kind}});
}

BasisPartition random_partition(std::size_t n, std::uint64_t seed,
                                std::size_t max_block) {
  require_size(n, "random_partition");
  if (max_block == 0) throw PartitionError("max_block must be >= 1");
  std::mt19937_64 engine(seed);
  std::vector<PartitionBlock> blocks;
  std::size_t start = 1;
  while (start < n) {
    std::uniform_int_distribution<std::size_t> length_dist(
        1, std::min(max_block, n - start));
    std::bernoulli_distribution coin(0.5);
    const std::size_t length = length_dist(engine);
    const BlockKind kind =
        coin(engine) ? BlockKind::Localized : BlockKind::PlaneWave;
    blocks.push_back({start, length, kind});
    start += length;
  }
  return BasisPartition(std::move(blocks));
}

OrthonormalBasis mixed_basis(std::size_t n, const BasisPartition& partition) {
  partition.validate(n);
  const auto size = static_cast<Eigen::Index>(n);
  std::vector<Eigen::VectorXcd> vectors;
  vectors.reserve(n);
  vectors.push_back(Eigen::VectorXcd::Constant(
      size, 1.0 / std::sqrt(static_cast<double>(n))));
  for (const auto& block : partition.blocks()) {
    const Eigen::MatrixXcd local = block_rows(block.length, block.kind);
    const auto first_site = static_cast<Eigen::Index>(block.start - 1);
    for (Eigen::Index r = 0; r < local.rows(); ++r) {
      Eigen::VectorXcd v = Eigen::VectorXcd::Zero(size);
      v.segment(first_site, local.cols()) = local.row(r).transpose();
      vectors.push_back(std::move(v));
    }
  }
  const auto orthonormal = gram_schmidt(vectors);
  Eigen::MatrixXcd rows(size, size);
  for (Eigen::Index k = 0; k < size; ++k) {
    rows.row(k) = orthonormal[static_cast<std::size_t>(k)].transpose();
  }
  return OrthonormalBasis(std::move(rows), BasisKind::Mixed);
}

std::vector<Eigen::VectorXcd> gram_schmidt(
    const std::vector<Eigen::VectorXcd>& vectors) {
  std::vector<Eigen::VectorXcd> out;
  out.reserve(vectors.size());
  for (std::size_t i = 0; i < vectors.size(); ++i) {
    const double input_norm = vectors[i].norm();
    if (i > 0 && vectors[i].size() != vectors[0].size()) {
      throw InvalidSizeError("gram_schmidt: vector " + std::to_string(i) +
                             " has mismatched length");
    }
    if (!(input_norm > 0.0)) throw LinearDependenceError(i, 0.0);

    Eigen::VectorXcd v = vectors[i];
    auto sweep = [&] {
      for (const auto& q : out) v -= q.dot(v) * q;
    };
    sweep();
    if (v.norm() < kReorthogonalizeThreshold * input_norm) sweep();

    const double relative = v.norm() / input_norm;
    if (relative < kDependenceThreshold) {
      throw LinearDependenceError(i, relative);
    }
    out.push_back(v / v.norm());
  }
  return out;
}

double localization_coefficient(const OrthonormalBasis& basis,
                                std::size_t level) {
  if (level >= basis.size()) {
    throw IndexError("level index " + std::to_string(level) + " out of range");
  }
  return basis.rows()
      .row(static_cast<Eigen::Index>(level))
      .cwiseAbs2()
      .cwiseAbs2()
      .sum();
}

VectorLocalization classify_vector(double c, std::size_t n) {
  // Rounding slack: the k = 2 localized vector sits exactly on the boundary.
  constexpr double kSlack = 1e-12;
  if (c >= 0.5 - kSlack) return VectorLocalization::Localized;
  if (c <= 2.0 / static_cast<double>(n) + kSlack) return VectorLocalization::Delocalized;
  return VectorLocalization::Intermediate;
}

}  // namespace qwalk
