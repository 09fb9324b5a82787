// Copyright 2026 The ctclab Authors
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

#include <gtest/gtest.h>

#include <random>

#include "ctclab/errors.hpp"
#include "ctclab/linalg.hpp"
#include "support.hpp"

using namespace ctclab;

namespace {

ComplexMatrix sx() { return ComplexMatrix::from_rows({{0, 1}, {1, 0}}); }

}  // namespace

TEST(Linalg, TensorOfPauliXSquaresToIdentity) {
    ComplexMatrix xx = tensor(sx(), sx());
    EXPECT_EQ(xx * xx, ComplexMatrix::identity(4));
}

TEST(Linalg, TensorIndexingIsRowMajorKronecker) {
    std::mt19937_64 rng(1);
    ComplexMatrix a = fixtures::gaussian_matrix(2, rng);
    ComplexMatrix b = fixtures::gaussian_matrix(3, rng);
    ComplexMatrix k = tensor(a, b);
    ASSERT_EQ(k.rows(), 6u);
    for (std::size_t i = 0; i < 2; ++i) {
        for (std::size_t j = 0; j < 2; ++j) {
            for (std::size_t p = 0; p < 3; ++p) {
                for (std::size_t q = 0; q < 3; ++q) {
                    EXPECT_EQ(k(i * 3 + p, j * 3 + q), a(i, j) * b(p, q));
                }
            }
        }
    }
}

TEST(Linalg, ShapeMismatchThrows) {
    EXPECT_THROW(ComplexMatrix::identity(2) + ComplexMatrix::identity(3), DimensionError);
    EXPECT_THROW(ComplexMatrix(2, 3) * ComplexMatrix(2, 3), DimensionError);
}

TEST(Linalg, PartialTraceMatchesIndexOracle) {
    std::mt19937_64 rng(7);
    for (int trial = 0; trial < 20; ++trial) {
        ComplexMatrix m = fixtures::gaussian_matrix(6, rng);
        std::array<std::size_t, 2> dims{2, 3};
        std::array<std::size_t, 1> keep_a{0};
        std::array<std::size_t, 1> keep_b{1};
        EXPECT_LE(max_abs_diff(partial_trace(m, dims, keep_a), fixtures::naive_trace_b(m, 2, 3)), 1e-12);
        EXPECT_LE(max_abs_diff(partial_trace(m, dims, keep_b), fixtures::naive_trace_a(m, 2, 3)), 1e-12);
    }
}

TEST(Linalg, PartialTraceOfProductRecoversFactor) {
    std::mt19937_64 rng(3);
    ComplexMatrix a = fixtures::random_density(2, rng);
    ComplexMatrix b = fixtures::random_density(3, rng);
    ComplexMatrix c = fixtures::random_density(2, rng);
    std::array<std::size_t, 3> dims{2, 3, 2};
    std::array<std::size_t, 2> keep{0, 2};
    EXPECT_LE(max_abs_diff(partial_trace(tensor(tensor(a, b), c), dims, keep), tensor(a, c)), 1e-12);
}

TEST(Linalg, EigenvaluesOfClosedFormQubit) {
    ComplexMatrix m = ComplexMatrix::identity(2) * Complex{0.5, 0.0} + sx() * Complex{0.3, 0.0};
    auto eig = hermitian_eigendecomposition(m);
    ASSERT_EQ(eig.values.size(), 2u);
    EXPECT_NEAR(eig.values[0], 0.2, 1e-12);
    EXPECT_NEAR(eig.values[1], 0.8, 1e-12);
}

TEST(Linalg, EigendecompositionReconstructsRandomHermitian) {
    std::mt19937_64 rng(11);
    for (std::size_t n : {1u, 2u, 3u, 4u, 8u}) {
        for (int trial = 0; trial < 10; ++trial) {
            ComplexMatrix h = fixtures::random_hermitian(n, rng);
            auto eig = hermitian_eigendecomposition(h);
            ComplexMatrix v = eig.vectors;
            EXPECT_LE(max_abs_diff(v * v.adjoint(), ComplexMatrix::identity(n)), 1e-10);
            ComplexMatrix rebuilt = v * ComplexMatrix::diagonal(eig.values) * v.adjoint();
            EXPECT_LE(max_abs_diff(rebuilt, h), 1e-10);
            for (std::size_t k = 1; k < n; ++k) {
                EXPECT_LE(eig.values[k - 1], eig.values[k]);
            }
        }
    }
}

TEST(Linalg, EigendecompositionRejectsNonHermitian) {
    EXPECT_THROW(hermitian_eigendecomposition(ComplexMatrix::from_rows({{0, 1}, {0, 0}})), InvalidValueError);
}

TEST(Linalg, TraceDistanceOfOrthogonalPureStatesIsOne) {
    ComplexMatrix p0 = ComplexMatrix::from_rows({{1, 0}, {0, 0}});
    ComplexMatrix p1 = ComplexMatrix::from_rows({{0, 0}, {0, 1}});
    EXPECT_NEAR(trace_distance(p0, p1), 1.0, 1e-12);
    EXPECT_NEAR(trace_distance(p0, p0), 0.0, 1e-12);
}

TEST(Linalg, VecRoundTrip) {
    std::mt19937_64 rng(5);
    ComplexMatrix m = fixtures::gaussian_matrix(3, rng);
    EXPECT_EQ(unvec(vec(m), 3, 3), m);
    EXPECT_EQ(vec(m)[1], m(0, 1));
}

TEST(Linalg, HilbertSchmidtInnerProduct) {
    ComplexMatrix sz = ComplexMatrix::from_rows({{1, 0}, {0, -1}});
    EXPECT_NEAR(std::abs(hs_inner(sx(), sz)), 0.0, 1e-15);
    EXPECT_NEAR(hs_inner(sx(), sx()).real(), 2.0, 1e-15);
}
