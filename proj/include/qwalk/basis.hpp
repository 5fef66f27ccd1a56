#pragma once

// Orthonormal eigenbases on a graph of n sites.
//
// All indices are zero-based: eigenvector ("level") k and site l run over
// 0..n-1. Row k of an OrthonormalBasis is eigenvector k written in position
// coordinates, so the overlap <r_M|E_k> is conj(rows(k, M)).

#include <complex>
#include <cstddef>
#include <cstdint>
#include <vector>

#include <Eigen/Dense>

namespace qwalk {

using Complex = std::complex<double>;

enum class BasisKind { Localized, PlaneWave, Mixed };

const char* to_string(BasisKind kind);

class OrthonormalBasis {
 public:
  // Throws NumericalError if the rows are not orthonormal to `tolerance`.
  OrthonormalBasis(Eigen::MatrixXcd rows, BasisKind kind,
                   double tolerance = 1e-12);

  std::size_t size() const { return static_cast<std::size_t>(rows_.rows()); }
  BasisKind kind() const { return kind_; }
  const Eigen::MatrixXcd& rows() const { return rows_; }

  Complex component(std::size_t level, std::size_t site) const {
    return rows_(static_cast<Eigen::Index>(level),
                 static_cast<Eigen::Index>(site));
  }

  // q_{site,level} = <r_site|E_level>.
  Complex overlap(std::size_t site, std::size_t level) const {
    return std::conj(component(level, site));
  }

  // Overlaps of one site with every level: (q_{site,0}, ..., q_{site,n-1}).
  Eigen::VectorXcd site_overlaps(std::size_t site) const;

  // Largest entry of |B B^dagger - 1|.
  double orthonormality_defect() const;

 private:
  Eigen::MatrixXcd rows_;
  BasisKind kind_;
};

// Gram-Schmidt localized basis: row 0 uniform, row k (k >= 1) equal to
// (1, ..., 1, -k, 0, ..., 0) / sqrt(k (k+1)) with k leading ones.
OrthonormalBasis localized_basis(std::size_t n);

// Discrete Fourier basis: component (j, k) = exp(2 pi i j k / n) / sqrt(n).
OrthonormalBasis plane_wave_basis(std::size_t n);

enum class BlockKind { Localized, PlaneWave };

struct PartitionBlock {
  std::size_t start;   // first level index covered (>= 1)
  std::size_t length;  // number of levels covered (>= 1)
  BlockKind kind;
};

// Ordered blocks that tile levels 1..n-1 exactly once; level 0 is always the
// uniform vector.
class BasisPartition {
 public:
  BasisPartition() = default;
  explicit BasisPartition(std::vector<PartitionBlock> blocks)
      : blocks_(std::move(blocks)) {}

  const std::vector<PartitionBlock>& blocks() const { return blocks_; }

  // Throws PartitionError unless the blocks tile 1..n-1 contiguously.
  void validate(std::size_t n) const;

  static BasisPartition single(std::size_t n, BlockKind kind);

 private:
  std::vector<PartitionBlock> blocks_;
};

// Random tiling of 1..n-1 into blocks of length 1..max_block, each tagged
// localized or plane-wave with equal probability. Deterministic in `seed`.
BasisPartition random_partition(std::size_t n, std::uint64_t seed,
                                std::size_t max_block = 4);

// Block covering levels [s, s+L) contributes the non-uniform rows 1..L of the
// size-(L+1) localized or plane-wave basis, placed on sites s-1..s+L-1.
// The whole set is then re-orthonormalized in ascending level order.
OrthonormalBasis mixed_basis(std::size_t n, const BasisPartition& partition);

// Modified Gram-Schmidt in input order, with one re-orthogonalization pass
// for vectors that lose most of their norm. Throws LinearDependenceError
// (carrying the zero-based offending index) when the rejection norm falls
// below 1e-10 of the input norm.
std::vector<Eigen::VectorXcd> gram_schmidt(
    const std::vector<Eigen::VectorXcd>& vectors);

// c_k = sum_l |component(k, l)|^4 (inverse participation ratio).
double localization_coefficient(const OrthonormalBasis& basis,
                                std::size_t level);

enum class VectorLocalization { Localized, Delocalized, Intermediate };

const char* to_string(VectorLocalization tag);

// Localized for c >= 1/2, delocalized for c <= 2/n, intermediate otherwise.
VectorLocalization classify_vector(double c, std::size_t n);

}  // namespace qwalk
