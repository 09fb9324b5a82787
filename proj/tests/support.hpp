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

#pragma once

#include <cmath>
#include <complex>
#include <random>
#include <vector>

#include "ctclab/linalg.hpp"
#include "ctclab/quantum.hpp"

namespace ctclab::fixtures {

inline ComplexMatrix gaussian_matrix(std::size_t n, std::mt19937_64 &rng) {
    std::normal_distribution<double> g(0.0, 1.0);
    ComplexMatrix m(n, n);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) {
            m(i, j) = Complex{g(rng), g(rng)};
        }
    }
    return m;
}

/// Haar-ish unitary from Gram-Schmidt on the columns of a Ginibre matrix.
inline ComplexMatrix random_unitary(std::size_t n, std::mt19937_64 &rng) {
    ComplexMatrix g = gaussian_matrix(n, rng);
    ComplexMatrix q(n, n);
    for (std::size_t c = 0; c < n; ++c) {
        std::vector<Complex> v(n);
        for (std::size_t i = 0; i < n; ++i) {
            v[i] = g(i, c);
        }
        for (std::size_t p = 0; p < c; ++p) {
            Complex dot{0.0, 0.0};
            for (std::size_t i = 0; i < n; ++i) {
                dot += std::conj(q(i, p)) * v[i];
            }
            for (std::size_t i = 0; i < n; ++i) {
                v[i] -= dot * q(i, p);
            }
        }
        double norm = 0.0;
        for (const auto &z : v) {
            norm += std::norm(z);
        }
        norm = std::sqrt(norm);
        for (std::size_t i = 0; i < n; ++i) {
            q(i, c) = v[i] / norm;
        }
    }
    return q;
}

/// G G† / Tr(G G†) for a Ginibre G: full rank with probability one.
inline ComplexMatrix random_density(std::size_t n, std::mt19937_64 &rng) {
    ComplexMatrix g = gaussian_matrix(n, rng);
    ComplexMatrix rho = g * g.adjoint();
    rho *= 1.0 / rho.trace().real();
    return hermitian_part(rho);
}

inline ComplexMatrix random_hermitian(std::size_t n, std::mt19937_64 &rng) {
    ComplexMatrix g = gaussian_matrix(n, rng);
    return hermitian_part(g);
}

/// Tr_B of an operator on C^da ⊗ C^db, written out index by index.
inline ComplexMatrix naive_trace_b(const ComplexMatrix &m, std::size_t da, std::size_t db) {
    ComplexMatrix out(da, da);
    for (std::size_t a = 0; a < da; ++a) {
        for (std::size_t a2 = 0; a2 < da; ++a2) {
            for (std::size_t b = 0; b < db; ++b) {
                out(a, a2) += m(a * db + b, a2 * db + b);
            }
        }
    }
    return out;
}

inline ComplexMatrix naive_trace_a(const ComplexMatrix &m, std::size_t da, std::size_t db) {
    ComplexMatrix out(db, db);
    for (std::size_t b = 0; b < db; ++b) {
        for (std::size_t b2 = 0; b2 < db; ++b2) {
            for (std::size_t a = 0; a < da; ++a) {
                out(b, b2) += m(a * db + b, a * db + b2);
            }
        }
    }
    return out;
}

/// Entropy of a 2×2 density matrix from its closed-form eigenvalues.
inline double qubit_entropy(const ComplexMatrix &rho) {
    double a = rho(0, 0).real();
    double d = rho(1, 1).real();
    double r = std::sqrt((a - d) * (a - d) / 4.0 + std::norm(rho(0, 1)));
    double s = 0.0;
    for (double l : {(a + d) / 2.0 + r, (a + d) / 2.0 - r}) {
        if (l > 0.0) {
            s -= l * std::log2(l);
        }
    }
    return s;
}

/// Nearest density matrix in the eigenbasis: clip negative eigenvalues, renormalize.
inline ComplexMatrix project_to_states(const ComplexMatrix &h) {
    auto eig = hermitian_eigendecomposition(hermitian_part(h));
    double total = 0.0;
    for (double &l : eig.values) {
        l = std::max(l, 0.0);
        total += l;
    }
    for (double &l : eig.values) {
        l /= total;
    }
    return hermitian_part(hermitian_function(eig, [](double x) { return x; }));
}

}  // namespace ctclab::fixtures
