#include <gtest/gtest.h>

#include "membrane/material.hpp"
#include "oracles.hpp"

#include <Eigen/Eigenvalues>

using namespace membrane;

TEST(Isotropic, MatchesLameForm) {
    const double E = 70e9, nu = 0.3;
    const double lambda = E * nu / ((1 + nu) * (1 - 2 * nu));
    const double mu = E / (2 * (1 + nu));
    const Mat6 D = isotropic(E, nu).matrix();
    for (int i = 0; i < 3; ++i) {
        for (int j = 0; j < 3; ++j) EXPECT_NEAR(D(i, j), i == j ? lambda + 2 * mu : lambda, 1e-6 * E);
        EXPECT_NEAR(D(3 + i, 3 + i), mu, 1e-6 * E);
    }
    EXPECT_EQ((D.block<3, 3>(0, 3).array() != 0.0).count(), 0);
}

TEST(Isotropic, RejectsNonPhysicalConstants) {
    EXPECT_THROW(isotropic(0.0, 0.3), MaterialError);
    EXPECT_THROW(isotropic(1e9, 0.5), MaterialError);
    EXPECT_THROW(isotropic(1e9, -1.0), MaterialError);
}

TEST(ReferenceComposite, EntriesSymmetryAndDefiniteness) {
    const Mat6 D = reference_composite().matrix();
    const double G = 1e9;
    EXPECT_EQ(D(0, 0), 150 * G);
    EXPECT_EQ(D(1, 1), 150 * G);
    EXPECT_EQ(D(2, 2), 150 * G);
    EXPECT_EQ(D(0, 1), 40 * G);
    EXPECT_EQ(D(0, 2), 10 * G);
    EXPECT_EQ(D(1, 2), 80 * G);
    EXPECT_EQ(D(3, 3), 80 * G);
    EXPECT_EQ(D(4, 4), 20 * G);
    EXPECT_EQ(D(5, 5), 30 * G);
    EXPECT_TRUE(D.isApprox(D.transpose(), 0.0));
    // Nine distinct non-zero moduli, 12 non-zero entries by symmetry.
    EXPECT_EQ((D.array() != 0.0).count(), 12);
    Eigen::SelfAdjointEigenSolver<Mat6> eig(D);
    EXPECT_GT(eig.eigenvalues().minCoeff(), 0.0);
}

TEST(ElasticMatrix, RejectsAsymmetricIndefiniteAndNonFinite) {
    Mat6 d = Mat6::Identity();
    d(0, 1) = 0.1;
    EXPECT_THROW(ElasticMatrix{d}, MaterialError);

    d = Mat6::Identity();
    d(2, 2) = -1.0;
    try {
        ElasticMatrix bad(d);
        FAIL();
    } catch (const MaterialError& e) {
        EXPECT_NE(std::string(e.what()).find("eigenvalue"), std::string::npos);
    }

    d = Mat6::Identity();
    d(3, 3) = std::nan("");
    EXPECT_THROW(ElasticMatrix{d}, MaterialError);
}

TEST(ElasticMatrix, AcceptsRandomSpd) {
    std::mt19937_64 rng(7);
    for (int n = 0; n < 20; ++n) {
        const Mat6 s = oracle::random_spd(rng, 1e10);
        EXPECT_NO_THROW(ElasticMatrix{s});
    }
}

TEST(Anisotropic, UpperTriangleOrdering) {
    std::array<double, 21> up{};
    for (int k = 0; k < 21; ++k) up[k] = (k == 0 || k == 6 || k == 11 || k == 15 || k == 18 || k == 20) ? 100.0 + k : 0.5;
    const Mat6 D = anisotropic(up).matrix();
    EXPECT_EQ(D(0, 0), 100.0);
    EXPECT_EQ(D(1, 1), 106.0);
    EXPECT_EQ(D(2, 2), 111.0);
    EXPECT_EQ(D(5, 5), 120.0);
    EXPECT_EQ(D(4, 0), 0.5);
}

TEST(AnisotropicFromEntries, DuplicatesAndRange) {
    const ModulusEntry dup[] = {{1, 1, 1.0}, {2, 2, 1.0}, {3, 3, 1.0}, {4, 4, 1.0},
                                {5, 5, 1.0}, {6, 6, 1.0}, {1, 2, 0.1}, {2, 1, 0.1}};
    EXPECT_THROW(anisotropic_from_entries(dup), MaterialError);
    const ModulusEntry range[] = {{0, 1, 1.0}};
    EXPECT_THROW(anisotropic_from_entries(range), MaterialError);
}

TEST(MaterialParams, ValidationAndWaveSpeed) {
    MaterialParams p;
    p.rho = 1600;
    p.h = 1e-3;
    p.D = isotropic(70e9, 0.3);
    EXPECT_NO_THROW(p.validate());
    EXPECT_NEAR(p.max_wave_speed(), std::sqrt(p.D(0, 0) / 1600.0), 1e-9);
    p.rho = 0.0;
    EXPECT_THROW(p.validate(), MaterialError);
    p.rho = 1600;
    p.h = -1.0;
    EXPECT_THROW(p.validate(), MaterialError);
    p.h = 1e-3;
    p.stress_threshold = -5.0;
    EXPECT_THROW(p.validate(), MaterialError);
}
