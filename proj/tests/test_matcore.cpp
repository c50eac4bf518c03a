// Copyright 2026 The RetroOp Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <cmath>

#include <gtest/gtest.h>

#include "retroop/matcore.hpp"
#include "support/generators.hpp"

using namespace retroop;
using namespace retroop::testing;

namespace {

/// Closed form for a 2x2 Hermitian [[a, b], [conj b, d]].
std::pair<double, double> eig2x2(const Matrix &m) {
    const double a = m(0, 0).real(), d = m(1, 1).real();
    const double r = std::sqrt(0.25 * (a - d) * (a - d) + std::norm(m(0, 1)));
    return {0.5 * (a + d) - r, 0.5 * (a + d) + r};
}

void expect_valid_eig(const Matrix &m, const EigSystem &es) {
    const Index n = m.rows();
    const double scale = std::max(1.0, svd_norm(m));
    const Matrix rec = es.eigenvectors * es.eigenvalues.cast<Complex>().asDiagonal() *
                       es.eigenvectors.adjoint();
    EXPECT_LE((rec - m).cwiseAbs().maxCoeff(), 1e-10 * scale);
    EXPECT_LE((es.eigenvectors.adjoint() * es.eigenvectors - Matrix::Identity(n, n))
                  .cwiseAbs()
                  .maxCoeff(),
              1e-10);
    for (Index k = 1; k < n; ++k) EXPECT_LE(es.eigenvalues[k - 1], es.eigenvalues[k]);
}

} // namespace

TEST(HermitianEig, DiagonalInput) {
    const Matrix m = qubit(2, 0, 0, 1);
    const EigSystem es = hermitian_eig(m);
    EXPECT_DOUBLE_EQ(es.eigenvalues[0], 1.0);
    EXPECT_DOUBLE_EQ(es.eigenvalues[1], 2.0);
}

TEST(HermitianEig, PauliXMatchesClosedForm) {
    const Matrix m = qubit(0, 1, 1, 0);
    const auto [lo, hi] = eig2x2(m);
    EXPECT_DOUBLE_EQ(lo, -1.0);
    EXPECT_DOUBLE_EQ(hi, 1.0);
    const EigSystem es = hermitian_eig(m);
    EXPECT_NEAR(es.eigenvalues[0], -1.0, 1e-14);
    EXPECT_NEAR(es.eigenvalues[1], 1.0, 1e-14);
    expect_valid_eig(m, es);
}

TEST(HermitianEig, IdentityAnyDimension) {
    for (Index n = 1; n <= 6; ++n) {
        const EigSystem es = hermitian_eig(identity(n));
        for (Index k = 0; k < n; ++k) EXPECT_DOUBLE_EQ(es.eigenvalues[k], 1.0);
        expect_valid_eig(identity(n), es);
    }
}

TEST(HermitianEig, ZeroMatrix) {
    const EigSystem es = hermitian_eig(Matrix::Zero(3, 3));
    EXPECT_EQ(es.eigenvalues.cwiseAbs().maxCoeff(), 0.0);
}

TEST(HermitianEig, RejectsNonHermitian) {
    EXPECT_THROW(hermitian_eig(qubit(0, 1, 0, 0)), NotHermitian);
    EXPECT_THROW(hermitian_eig(Matrix(2, 3)), DimensionMismatch);
    Matrix bad = identity(2);
    bad(0, 0) = std::nan("");
    EXPECT_THROW(hermitian_eig(bad), NotFinite);
}

TEST(HermitianEig, AcceptsRoundoffAsymmetry) {
    Matrix m = qubit(1, 0.5, 0.5, 2);
    m(0, 1) += Complex(0, 1e-13);
    EXPECT_NO_THROW(hermitian_eig(m));
}

TEST(HermitianEig, ClosedFormOracleOnRandomQubits) {
    Rng rng(7);
    for (int t = 0; t < 200; ++t) {
        const Matrix m = random_hermitian(rng, 2);
        const auto [lo, hi] = eig2x2(m);
        const EigSystem es = hermitian_eig(m);
        EXPECT_NEAR(es.eigenvalues[0], lo, 1e-12 * std::max(1.0, std::abs(hi)));
        EXPECT_NEAR(es.eigenvalues[1], hi, 1e-12 * std::max(1.0, std::abs(hi)));
    }
}

TEST(HermitianEig, ThousandRandomMatricesAgainstEigen) {
    Rng rng(11);
    std::uniform_int_distribution<int> dim(2, 8);
    for (int t = 0; t < 1000; ++t) {
        const Index n = dim(rng);
        const Matrix m = random_hermitian(rng, n);
        const EigSystem es = hermitian_eig(m);
        expect_valid_eig(m, es);
        Eigen::SelfAdjointEigenSolver<Matrix> ref(m);
        const double scale = std::max(1.0, svd_norm(m));
        EXPECT_LE((es.eigenvalues - ref.eigenvalues()).cwiseAbs().maxCoeff(), 1e-10 * scale);
    }
}

TEST(HermitianEig, DegenerateSpectrum) {
    Rng rng(3);
    const Matrix u = random_unitary(rng, 4);
    Eigen::VectorXd d(4);
    d << 1, 1, 1, 3;
    const Matrix m = u * d.cast<Complex>().asDiagonal() * u.adjoint();
    const EigSystem es = hermitian_eig(m);
    expect_valid_eig(m, es);
    EXPECT_NEAR(es.eigenvalues[3], 3.0, 1e-12);
}

TEST(IsPsd, Examples) {
    EXPECT_TRUE(is_psd(identity(3)));
    EXPECT_FALSE(is_psd(qubit(1, 0, 0, -0.5)));
    EXPECT_TRUE(is_psd(pz_plus()));
    EXPECT_THROW(is_psd(qubit(0, 1, 0, 0)), NotHermitian);
}

TEST(IsPsd, ToleranceIsRelativeToTopEigenvalue) {
    EXPECT_TRUE(is_psd(qubit(1e6, 0, 0, -1e-4), 1e-9 * 1e3));
    EXPECT_FALSE(is_psd(qubit(1, 0, 0, -1e-6)));
    EXPECT_TRUE(is_psd(qubit(1, 0, 0, -1e-10)));
}

TEST(LoewnerLeq, Examples) {
    EXPECT_TRUE(loewner_leq(0.5 * identity(2), identity(2)));
    const double gamma = 0.3;
    EXPECT_FALSE(loewner_leq(qubit(1 + gamma, 0, 0, 1 - gamma), identity(2)));
    EXPECT_TRUE(loewner_leq(pz_plus(), identity(2)));
    EXPECT_THROW(loewner_leq(identity(2), identity(3)), DimensionMismatch);
    EXPECT_THROW(loewner_leq(qubit(0, 1, 0, 0), identity(2)), NotHermitian);
}

TEST(LoewnerLeq, TransitiveOnRandomTriples) {
    Rng rng(5);
    int chains = 0;
    for (int t = 0; t < 300; ++t) {
        const Index n = 3;
        const Matrix a = random_hermitian(rng, n);
        // Half the triples are ordered by construction, half are random.
        const Matrix b = (t % 2 == 0) ? Matrix(a + random_psd(rng, n)) : random_hermitian(rng, n);
        const Matrix c = (t % 2 == 0) ? Matrix(b + random_psd(rng, n)) : random_hermitian(rng, n);
        if (loewner_leq(a, b) && loewner_leq(b, c)) {
            ++chains;
            EXPECT_TRUE(loewner_leq(a, c, 3 * kDefaultTol));
        }
    }
    EXPECT_GE(chains, 150);
}

TEST(Traces, Examples) {
    EXPECT_EQ(trace(identity(2)), Complex(2.0));
    EXPECT_EQ(normalized_trace(identity(2)), Complex(1.0));
    EXPECT_NEAR(std::abs(hs_inner(identity(2), pz_plus()) - Complex(0.5)), 0.0, 1e-15);
    EXPECT_NEAR(op_norm(qubit(3, 0, 0, -4)), 4.0, 1e-12);
    EXPECT_THROW(hs_inner(identity(2), identity(3)), DimensionMismatch);
}

TEST(Traces, HsInnerIsNormalizedTrInner) {
    Rng rng(9);
    const Matrix a = random_matrix(rng, 4), b = random_matrix(rng, 4);
    EXPECT_NEAR(std::abs(4.0 * hs_inner(a, b) - tr_inner(a, b)), 0.0, 1e-12);
}

TEST(Traces, CyclicOnRandomPairs) {
    Rng rng(13);
    for (int t = 0; t < 200; ++t) {
        const Index n = 2 + t % 5;
        const Matrix a = random_matrix(rng, n), b = random_matrix(rng, n);
        const double scale = std::max(1.0, a.norm() * b.norm());
        EXPECT_LE(std::abs(trace(a * b) - trace(b * a)), 1e-12 * scale);
    }
}

TEST(OpNorm, MatchesSvd) {
    Rng rng(17);
    for (int t = 0; t < 200; ++t) {
        const Matrix m = random_matrix(rng, 2 + t % 6);
        EXPECT_NEAR(op_norm(m), svd_norm(m), 1e-10 * svd_norm(m));
    }
}
