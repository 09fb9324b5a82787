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

#include <array>
#include <cmath>
#include <cstddef>
#include <string>
#include <utility>
#include <vector>

#include "ctclab/errors.hpp"
#include "ctclab/linalg.hpp"

namespace ctclab {

/// Acceptance thresholds for the quantum value types. All overridable per call.
struct Tolerances {
    double hermitian = 1e-9;
    double trace = 1e-9;
    double psd = 1e-9;
    double unitary = 1e-9;
};

/// Bipartite split (d_A, d_B) of a composite system; index = a·d_B + b.
using BipartiteDims = std::array<std::size_t, 2>;

/// Hermitian, unit-trace, positive semidefinite operator.
class DensityMatrix {
  public:
    explicit DensityMatrix(ComplexMatrix mat, const Tolerances &tol = {}) : mat_(std::move(mat)) {
        if (!mat_.is_square() || mat_.rows() == 0) {
            throw DimensionError("DensityMatrix: matrix must be square and non-empty, got " + mat_.shape_string());
        }
        double herm = hermiticity_defect(mat_);
        if (herm > tol.hermitian) {
            throw InvalidValueError("DensityMatrix: not Hermitian (defect " + std::to_string(herm) + ")");
        }
        double tr_err = std::abs(mat_.trace() - Complex{1.0, 0.0});
        if (tr_err > tol.trace) {
            throw InvalidValueError("DensityMatrix: trace deviates from 1 by " + std::to_string(tr_err));
        }
        double min_eig = hermitian_eigendecomposition(mat_, tol.hermitian).values.front();
        if (min_eig < -tol.psd) {
            throw InvalidValueError("DensityMatrix: smallest eigenvalue " + std::to_string(min_eig) + " is negative");
        }
    }

    static DensityMatrix maximally_mixed(std::size_t dim) {
        ComplexMatrix m = ComplexMatrix::identity(dim);
        m *= 1.0 / static_cast<double>(dim);
        return DensityMatrix(std::move(m));
    }

    /// |ψ><ψ| for a normalized ψ.
    static DensityMatrix pure(std::span<const Complex> psi, const Tolerances &tol = {}) {
        return DensityMatrix(ComplexMatrix::outer(psi, psi), tol);
    }

    static DensityMatrix basis_state(std::size_t dim, std::size_t index) {
        ComplexMatrix m(dim, dim);
        m(index, index) = 1.0;
        return DensityMatrix(std::move(m));
    }

    std::size_t dim() const { return mat_.rows(); }
    const ComplexMatrix &matrix() const { return mat_; }

  private:
    ComplexMatrix mat_;
};

class Unitary {
  public:
    explicit Unitary(ComplexMatrix mat, const Tolerances &tol = {}) : mat_(std::move(mat)) {
        if (!mat_.is_square() || mat_.rows() == 0) {
            throw DimensionError("Unitary: matrix must be square and non-empty, got " + mat_.shape_string());
        }
        double defect = max_abs_diff(mat_ * mat_.adjoint(), ComplexMatrix::identity(mat_.rows()));
        if (defect > tol.unitary) {
            throw InvalidValueError("Unitary: ‖U·U† − I‖_max = " + std::to_string(defect));
        }
    }

    std::size_t dim() const { return mat_.rows(); }
    const ComplexMatrix &matrix() const { return mat_; }

    /// U ρ U†.
    ComplexMatrix conjugate(const ComplexMatrix &rho) const { return mat_ * rho * mat_.adjoint(); }

  private:
    ComplexMatrix mat_;
};

inline Unitary tensor(const Unitary &a, const Unitary &b) { return Unitary(tensor(a.matrix(), b.matrix())); }

/// Reduced state of subsystem `keep` (0 or 1) of a bipartite state.
inline DensityMatrix partial_trace(const DensityMatrix &rho, BipartiteDims dims, std::size_t keep,
                                   const Tolerances &tol = {}) {
    if (dims[0] == 0 || dims[1] == 0 || rho.dim() != dims[0] * dims[1]) {
        throw DimensionError("partial_trace: state of dimension " + std::to_string(rho.dim()) + " does not split as " +
                             std::to_string(dims[0]) + "x" + std::to_string(dims[1]));
    }
    if (keep > 1) {
        throw DimensionError("partial_trace: subsystem index must be 0 or 1");
    }
    std::array<std::size_t, 1> kept{keep};
    return DensityMatrix(partial_trace(rho.matrix(), dims, kept), tol);
}

inline DensityMatrix tensor(const DensityMatrix &a, const DensityMatrix &b) {
    return DensityMatrix(tensor(a.matrix(), b.matrix()));
}

/// −Σ λ log₂ λ over the spectrum, with 0·log 0 = 0.
inline double entropy_of_spectrum(std::span<const double> eigenvalues) {
    double s = 0.0;
    for (double l : eigenvalues) {
        if (l > 0.0) {
            s -= l * std::log2(l);
        }
    }
    return s;
}

/// Von Neumann entropy in bits, clamped to [0, log₂ dim].
inline double von_neumann_entropy(const DensityMatrix &rho) {
    auto eig = hermitian_eigendecomposition(rho.matrix());
    double s = entropy_of_spectrum(eig.values);
    return std::clamp(s, 0.0, std::log2(static_cast<double>(rho.dim())));
}

/// S(A) + S(B) − S(AB) in bits.
inline double mutual_information(const DensityMatrix &rho, BipartiteDims dims) {
    auto a = partial_trace(rho, dims, 0);
    auto b = partial_trace(rho, dims, 1);
    return von_neumann_entropy(a) + von_neumann_entropy(b) - von_neumann_entropy(rho);
}

namespace gates {

inline Unitary identity(std::size_t dim = 2) { return Unitary(ComplexMatrix::identity(dim)); }

inline Unitary pauli_x() { return Unitary(ComplexMatrix::from_rows({{0, 1}, {1, 0}})); }

inline Unitary pauli_y() {
    const Complex i{0.0, 1.0};
    return Unitary(ComplexMatrix::from_rows({{0, -i}, {i, 0}}));
}

inline Unitary pauli_z() { return Unitary(ComplexMatrix::from_rows({{1, 0}, {0, -1}})); }

/// Exchanges two systems of dimension `dim`: |a⟩|b⟩ ↦ |b⟩|a⟩.
inline Unitary swap(std::size_t dim = 2) {
    ComplexMatrix m(dim * dim, dim * dim);
    for (std::size_t a = 0; a < dim; ++a) {
        for (std::size_t b = 0; b < dim; ++b) {
            m(b * dim + a, a * dim + b) = 1.0;
        }
    }
    return Unitary(std::move(m));
}

/// Controlled-NOT with the first qubit as control.
inline Unitary cnot() {
    return Unitary(ComplexMatrix::from_rows({{1, 0, 0, 0}, {0, 1, 0, 0}, {0, 0, 0, 1}, {0, 0, 1, 0}}));
}

/// Controlled-NOT with the second qubit as control.
inline Unitary cnot_reversed() {
    return Unitary(ComplexMatrix::from_rows({{1, 0, 0, 0}, {0, 0, 0, 1}, {0, 0, 1, 0}, {0, 1, 0, 0}}));
}

/// cos θ·I + i sin θ·SWAP on two qubits; θ = π/2 is SWAP up to phase.
inline Unitary partial_swap(double theta) {
    ComplexMatrix m = ComplexMatrix::identity(4) * Complex{std::cos(theta), 0.0};
    m += swap(2).matrix() * Complex{0.0, std::sin(theta)};
    return Unitary(std::move(m));
}

/// (|00⟩ + |11⟩)/√2.
inline std::vector<Complex> bell_phi_plus() {
    const double r = 1.0 / std::sqrt(2.0);
    return {r, 0.0, 0.0, r};
}

inline std::vector<Complex> ket(std::size_t dim, std::size_t index) {
    std::vector<Complex> v(dim, Complex{0.0, 0.0});
    v.at(index) = 1.0;
    return v;
}

struct NamedGate {
    std::string name;
    Unitary gate;
};

inline std::vector<NamedGate> standard_gates() {
    return {
        {"identity", identity(2)}, {"x", pauli_x()},  {"y", pauli_y()},
        {"z", pauli_z()},          {"swap", swap(2)}, {"cnot", cnot()},
    };
}

}  // namespace gates

}  // namespace ctclab
