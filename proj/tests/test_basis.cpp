#include <cmath>

#include <gtest/gtest.h>

#include "oracle.hpp"
#include "qwalk/basis.hpp"
#include "qwalk/errors.hpp"

using namespace qwalk;

TEST(LocalizedBasis, TwoSites) {
  const auto b = localized_basis(2);
  const double s = 1.0 / std::sqrt(2.0);
  EXPECT_NEAR(b.component(0, 0).real(), s, 1e-15);
  EXPECT_NEAR(b.component(0, 1).real(), s, 1e-15);
  EXPECT_NEAR(b.component(1, 0).real(), s, 1e-15);
  EXPECT_NEAR(b.component(1, 1).real(), -s, 1e-15);
}

TEST(LocalizedBasis, FourSitesThirdRow) {
  const auto b = localized_basis(4);
  const double s = 1.0 / std::sqrt(6.0);
  EXPECT_NEAR(std::abs(b.component(2, 0) - s), 0.0, 1e-15);
  EXPECT_NEAR(std::abs(b.component(2, 1) - s), 0.0, 1e-15);
  EXPECT_NEAR(std::abs(b.component(2, 2) + 2.0 * s), 0.0, 1e-15);
  EXPECT_EQ(b.component(2, 3), Complex(0.0));
}

TEST(LocalizedBasis, MatchesHandWrittenRows) {
  for (int n : {3, 10, 64}) {
    const auto b = localized_basis(n);
    EXPECT_LT((b.rows() - oracle::localized_rows(n)).cwiseAbs().maxCoeff(), 1e-14);
    EXPECT_LT(b.orthonormality_defect(), 1e-12);
  }
}

TEST(LocalizedBasis, RejectsTinySize) {
  EXPECT_THROW(localized_basis(1), InvalidSizeError);
  EXPECT_THROW(localized_basis(0), InvalidSizeError);
}

TEST(PlaneWaveBasis, TwoSites) {
  const auto b = plane_wave_basis(2);
  const double s = 1.0 / std::sqrt(2.0);
  EXPECT_NEAR(std::abs(b.component(1, 0) - s), 0.0, 1e-15);
  EXPECT_NEAR(std::abs(b.component(1, 1) + s), 0.0, 1e-15);
}

TEST(PlaneWaveBasis, FourSitesEntry) {
  // one-based component (2,3): exp(2 pi i * 2 / 4) / 2
  EXPECT_NEAR(std::abs(plane_wave_basis(4).component(1, 2) - Complex(-0.5, 0.0)),
              0.0, 1e-15);
}

TEST(PlaneWaveBasis, UniformFirstRowAndOrthonormal) {
  for (int n : {2, 7, 10, 64}) {
    const auto b = plane_wave_basis(n);
    for (int l = 0; l < n; ++l)
      EXPECT_NEAR(std::abs(b.component(0, l) - 1.0 / std::sqrt(double(n))), 0.0, 1e-15);
    EXPECT_LT(b.orthonormality_defect(), 1e-12);
    EXPECT_LT((b.rows() - oracle::plane_wave_rows(n)).cwiseAbs().maxCoeff(), 1e-13);
  }
  EXPECT_THROW(plane_wave_basis(1), InvalidSizeError);
}

TEST(OrthonormalBasis, RejectsNonOrthonormalRows) {
  Eigen::MatrixXcd m = Eigen::MatrixXcd::Identity(3, 3);
  m(0, 1) = 0.1;
  EXPECT_THROW(OrthonormalBasis(m, BasisKind::Mixed), NumericalError);
  EXPECT_THROW(OrthonormalBasis(Eigen::MatrixXcd::Identity(3, 2), BasisKind::Mixed),
               InvalidSizeError);
}

TEST(MixedBasis, SingleLocalizedBlockIsLocalizedBasis) {
  for (std::size_t n : {2, 5, 10, 33}) {
    const auto b = mixed_basis(n, BasisPartition::single(n, BlockKind::Localized));
    EXPECT_LT((b.rows() - localized_basis(n).rows()).cwiseAbs().maxCoeff(), 1e-12);
  }
}

TEST(MixedBasis, SinglePlaneWaveBlockIsOrthogonalToUniform) {
  const std::size_t n = 10;
  const auto b = mixed_basis(n, BasisPartition::single(n, BlockKind::PlaneWave));
  const Eigen::VectorXcd uniform =
      Eigen::VectorXcd::Constant(n, 1.0 / std::sqrt(double(n)));
  for (std::size_t k = 1; k < n; ++k)
    EXPECT_LT(std::abs(b.rows().row(k).dot(uniform.transpose())), 1e-12);
  EXPECT_LT(b.orthonormality_defect(), 1e-12);
}

TEST(MixedBasis, RandomPartitionsAreOrthonormal) {
  for (std::uint64_t seed = 0; seed < 40; ++seed) {
    const std::size_t n = 5 + seed % 40;
    const auto partition = random_partition(n, seed);
    EXPECT_NO_THROW(partition.validate(n));
    const auto b = mixed_basis(n, partition);
    EXPECT_LT(b.orthonormality_defect(), 1e-12) << "seed " << seed;
    EXPECT_EQ(b.kind(), BasisKind::Mixed);
  }
}

TEST(MixedBasis, RandomPartitionIsDeterministic) {
  const auto a = random_partition(50, 99);
  const auto b = random_partition(50, 99);
  ASSERT_EQ(a.blocks().size(), b.blocks().size());
  for (std::size_t i = 0; i < a.blocks().size(); ++i) {
    EXPECT_EQ(a.blocks()[i].start, b.blocks()[i].start);
    EXPECT_EQ(a.blocks()[i].length, b.blocks()[i].length);
    EXPECT_EQ(a.blocks()[i].kind, b.blocks()[i].kind);
  }
}

TEST(BasisPartition, InvalidTilingsThrow) {
  using B = PartitionBlock;
  EXPECT_THROW(BasisPartition({B{1, 3, BlockKind::Localized}}).validate(5),
               PartitionError);  // leaves level 4 uncovered
  EXPECT_THROW(BasisPartition({B{1, 2, BlockKind::Localized},
                               B{2, 3, BlockKind::PlaneWave}})
                   .validate(5),
               PartitionError);  // overlap
  EXPECT_THROW(BasisPartition({B{0, 5, BlockKind::Localized}}).validate(5),
               PartitionError);  // touches the uniform level
  EXPECT_THROW(BasisPartition({B{1, 0, BlockKind::Localized},
                               B{1, 4, BlockKind::Localized}})
                   .validate(5),
               PartitionError);  // empty block
  EXPECT_THROW(mixed_basis(5, BasisPartition{}), PartitionError);
  EXPECT_NO_THROW(BasisPartition({B{1, 2, BlockKind::Localized},
                                  B{3, 2, BlockKind::PlaneWave}})
                      .validate(5));
}

TEST(GramSchmidt, DifferenceVectorsGiveLocalizedBasis) {
  const int n = 12;
  std::vector<Eigen::VectorXcd> input;
  input.push_back(Eigen::VectorXcd::Ones(n));
  for (int l = 1; l < n; ++l) {
    Eigen::VectorXcd u = Eigen::VectorXcd::Zero(n);
    u(0) = 1.0;
    u(l) = -1.0;
    input.push_back(u);
  }
  const auto out = gram_schmidt(input);
  const auto expected = oracle::localized_rows(n);
  // Gram-Schmidt of u_l yields (1,...,1,-l,0,...)/norm up to a global sign
  // determined by u_l's own orientation; compare through |<out_k, row_k>| = 1.
  for (int k = 0; k < n; ++k) {
    const Complex ip = expected.row(k).conjugate().dot(out[k].transpose().conjugate());
    EXPECT_NEAR(std::abs(ip), 1.0, 1e-12) << k;
  }
}

TEST(GramSchmidt, OrthonormalInputUnchanged) {
  const auto b = plane_wave_basis(9);
  std::vector<Eigen::VectorXcd> input;
  for (int k = 0; k < 9; ++k) input.push_back(b.rows().row(k).transpose());
  const auto out = gram_schmidt(input);
  for (int k = 0; k < 9; ++k)
    EXPECT_LT((out[k] - input[k]).cwiseAbs().maxCoeff(), 1e-12);
}

TEST(GramSchmidt, RepeatedVectorThrowsWithIndex) {
  std::vector<Eigen::VectorXcd> input{Eigen::VectorXcd::Ones(4),
                                      Eigen::VectorXcd::Unit(4, 1),
                                      Eigen::VectorXcd::Unit(4, 1)};
  try {
    gram_schmidt(input);
    FAIL() << "expected LinearDependenceError";
  } catch (const LinearDependenceError& e) {
    EXPECT_EQ(e.index(), 2u);
  }
  EXPECT_THROW(gram_schmidt({Eigen::VectorXcd::Zero(3)}), LinearDependenceError);
}

TEST(GramSchmidt, NearlyDependentInputStaysOrthonormal) {
  const int n = 30;
  std::vector<Eigen::VectorXcd> input;
  for (int k = 0; k < n; ++k) {
    Eigen::VectorXcd v = Eigen::VectorXcd::Ones(n);
    v(k) += 1e-6;
    input.push_back(v);
  }
  const auto out = gram_schmidt(input);
  Eigen::MatrixXcd m(n, n);
  for (int k = 0; k < n; ++k) m.row(k) = out[k].transpose();
  EXPECT_LT((m * m.adjoint() - Eigen::MatrixXcd::Identity(n, n)).cwiseAbs().maxCoeff(),
            1e-12);
}

TEST(Localization, LocalizedCoefficients) {
  const std::size_t n = 10;
  const auto b = localized_basis(n);
  EXPECT_NEAR(localization_coefficient(b, 0), 0.1, 1e-15);
  EXPECT_NEAR(localization_coefficient(b, 1), 0.5, 1e-15);
  for (std::size_t level = 1; level < n; ++level) {
    const double k = double(level) + 1.0;  // one-based
    const double expected = std::pow(1.0 - 1.0 / k, 2) + 1.0 / (k * k * (k - 1.0));
    EXPECT_NEAR(localization_coefficient(b, level), expected, 1e-14);
    EXPECT_GE(localization_coefficient(b, level), 0.5 - 1e-15);
    EXPECT_LE(localization_coefficient(b, level), 1.0);
  }
  EXPECT_THROW(localization_coefficient(b, n), IndexError);
}

TEST(Localization, PlaneWaveCoefficients) {
  const auto b = plane_wave_basis(16);
  for (std::size_t k = 0; k < 16; ++k)
    EXPECT_NEAR(localization_coefficient(b, k), 1.0 / 16, 1e-14);
}

TEST(Localization, Classification) {
  EXPECT_EQ(classify_vector(0.5, 8), VectorLocalization::Localized);
  EXPECT_EQ(classify_vector(0.5, 1000), VectorLocalization::Localized);
  EXPECT_EQ(classify_vector(0.01, 100), VectorLocalization::Delocalized);
  EXPECT_EQ(classify_vector(0.1, 100), VectorLocalization::Intermediate);
  const double c2 = localization_coefficient(localized_basis(10), 1);
  EXPECT_EQ(classify_vector(c2, 10), VectorLocalization::Localized);
}
