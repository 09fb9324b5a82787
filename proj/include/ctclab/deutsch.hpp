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

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <cstddef>
#include <limits>
#include <numeric>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "ctclab/errors.hpp"
#include "ctclab/linalg.hpp"
#include "ctclab/quantum.hpp"

namespace ctclab {

/// Interaction U on CR ⊗ CTC together with the chronology-respecting input state.
/// Tensor-factor order is always CR first, CTC second.
class DeutschChannel {
  public:
    DeutschChannel(Unitary u, DensityMatrix rho_cr_in) : u_(std::move(u)), rho_cr_in_(std::move(rho_cr_in)) {
        d_cr_ = rho_cr_in_.dim();
        if (u_.dim() % d_cr_ != 0) {
            throw DimensionError("DeutschChannel: unitary dimension " + std::to_string(u_.dim()) +
                                 " is not a multiple of the CR dimension " + std::to_string(d_cr_));
        }
        d_ctc_ = u_.dim() / d_cr_;
    }

    const Unitary &unitary() const { return u_; }
    const DensityMatrix &rho_cr_in() const { return rho_cr_in_; }
    std::size_t d_cr() const { return d_cr_; }
    std::size_t d_ctc() const { return d_ctc_; }
    BipartiteDims dims() const { return {d_cr_, d_ctc_}; }

  private:
    Unitary u_;
    DensityMatrix rho_cr_in_;
    std::size_t d_cr_ = 0;
    std::size_t d_ctc_ = 0;
};

/// The induced map σ ↦ Tr_CR[U(ρ_CR ⊗ σ)U†], extended linearly to any d_ctc × d_ctc matrix.
inline ComplexMatrix apply_channel_linear(const DeutschChannel &ch, const ComplexMatrix &sigma) {
    if (!sigma.is_square() || sigma.rows() != ch.d_ctc()) {
        throw DimensionError("apply_channel: expected a " + std::to_string(ch.d_ctc()) + "x" +
                             std::to_string(ch.d_ctc()) + " operator, got " + sigma.shape_string());
    }
    ComplexMatrix joint = ch.unitary().conjugate(tensor(ch.rho_cr_in().matrix(), sigma));
    auto dims = ch.dims();
    std::array<std::size_t, 1> keep{1};
    return partial_trace(joint, dims, keep);
}

inline DensityMatrix apply_channel(const DeutschChannel &ch, const DensityMatrix &sigma) {
    return DensityMatrix(apply_channel_linear(ch, sigma.matrix()));
}

/// Matrix S with S·vec(σ) = vec(Φ(σ)) under row-major vectorization.
inline ComplexMatrix superoperator_matrix(const DeutschChannel &ch) {
    const std::size_t d = ch.d_ctc();
    ComplexMatrix s(d * d, d * d);
    for (std::size_t i = 0; i < d; ++i) {
        for (std::size_t j = 0; j < d; ++j) {
            ComplexMatrix unit(d, d);
            unit(i, j) = 1.0;
            auto column = vec(apply_channel_linear(ch, unit));
            for (std::size_t r = 0; r < d * d; ++r) {
                s(r, i * d + j) = column[r];
            }
        }
    }
    return s;
}

/// Orthonormal (Hilbert-Schmidt) basis of the d×d Hermitian matrices: diagonal units first,
/// then (E_jk + E_kj)/√2 and i(E_jk − E_kj)/√2 for j < k.
inline std::vector<ComplexMatrix> hermitian_basis(std::size_t d) {
    std::vector<ComplexMatrix> basis;
    basis.reserve(d * d);
    for (std::size_t j = 0; j < d; ++j) {
        ComplexMatrix m(d, d);
        m(j, j) = 1.0;
        basis.push_back(std::move(m));
    }
    const double r = 1.0 / std::sqrt(2.0);
    for (std::size_t j = 0; j < d; ++j) {
        for (std::size_t k = j + 1; k < d; ++k) {
            ComplexMatrix sym(d, d);
            sym(j, k) = r;
            sym(k, j) = r;
            basis.push_back(std::move(sym));
            ComplexMatrix anti(d, d);
            anti(j, k) = Complex{0.0, r};
            anti(k, j) = Complex{0.0, -r};
            basis.push_back(std::move(anti));
        }
    }
    return basis;
}

namespace detail {

/// Null space of a real row-major matrix by Gauss-Jordan elimination with partial pivoting.
/// Returned vectors are orthonormal.
inline std::vector<std::vector<double>> real_null_space(std::vector<double> m, std::size_t rows, std::size_t cols,
                                                        double tol) {
    auto at = [&](std::size_t r, std::size_t c) -> double & { return m[r * cols + c]; };
    std::vector<std::size_t> pivot_cols;
    std::vector<bool> is_pivot(cols, false);
    std::size_t row = 0;
    for (std::size_t col = 0; col < cols && row < rows; ++col) {
        std::size_t best = row;
        for (std::size_t r = row + 1; r < rows; ++r) {
            if (std::abs(at(r, col)) > std::abs(at(best, col))) {
                best = r;
            }
        }
        if (std::abs(at(best, col)) <= tol) {
            continue;
        }
        if (best != row) {
            for (std::size_t c = 0; c < cols; ++c) {
                std::swap(at(row, c), at(best, c));
            }
        }
        double inv = 1.0 / at(row, col);
        for (std::size_t c = 0; c < cols; ++c) {
            at(row, c) *= inv;
        }
        for (std::size_t r = 0; r < rows; ++r) {
            if (r == row || at(r, col) == 0.0) {
                continue;
            }
            double f = at(r, col);
            for (std::size_t c = 0; c < cols; ++c) {
                at(r, c) -= f * at(row, c);
            }
        }
        pivot_cols.push_back(col);
        is_pivot[col] = true;
        ++row;
    }

    std::vector<std::vector<double>> null;
    for (std::size_t free = 0; free < cols; ++free) {
        if (is_pivot[free]) {
            continue;
        }
        std::vector<double> v(cols, 0.0);
        v[free] = 1.0;
        for (std::size_t p = 0; p < pivot_cols.size(); ++p) {
            v[pivot_cols[p]] = -at(p, free);
        }
        null.push_back(std::move(v));
    }

    // Modified Gram-Schmidt.
    std::vector<std::vector<double>> ortho;
    for (auto &v : null) {
        for (const auto &q : ortho) {
            double dot = std::inner_product(v.begin(), v.end(), q.begin(), 0.0);
            for (std::size_t i = 0; i < cols; ++i) {
                v[i] -= dot * q[i];
            }
        }
        double norm = std::sqrt(std::inner_product(v.begin(), v.end(), v.begin(), 0.0));
        if (norm <= tol) {
            continue;
        }
        for (auto &x : v) {
            x /= norm;
        }
        ortho.push_back(std::move(v));
    }
    return ortho;
}

}  // namespace detail

/// The convex set of consistent CTC states: {particular + Σ cᵢ basisᵢ} ∩ PSD.
struct FixedPointSet {
    DensityMatrix particular;
    /// Orthonormal traceless Hermitian directions spanning the fixed subspace.
    std::vector<ComplexMatrix> basis;
    /// ‖Φ(particular) − particular‖_max.
    double residual = 0.0;
    std::size_t iterations = 0;

    std::size_t dimension() const { return basis.size(); }

    ComplexMatrix point(std::span<const double> coefficients) const {
        ComplexMatrix m = particular.matrix();
        for (std::size_t i = 0; i < basis.size(); ++i) {
            m += basis[i] * Complex{coefficients[i], 0.0};
        }
        return hermitian_part(m);
    }
};

struct FixedPointOptions {
    double tol = 1e-10;
    std::size_t max_iter = 1'000'000;
    double null_tol = 1e-10;
    /// Length of each Cesàro averaging window.
    std::size_t window = 32;
};

inline double fixed_point_residual(const DeutschChannel &ch, const ComplexMatrix &sigma) {
    return max_abs_diff(apply_channel_linear(ch, sigma), sigma);
}

/// Solves Φ(σ) = σ. The particular solution is the Cesàro mean of Φᵏ(I/d), computed as
/// repeated windowed averages σ ← (1/N)Σ_{k<N} Φᵏ(σ); each window keeps the fixed-space
/// component and damps the rest, so the iteration converges to the same limit.
/// Throws SolverError when `max_iter` channel applications do not reach `tol`.
inline FixedPointSet fixed_point_set(const DeutschChannel &ch, const FixedPointOptions &opts = {}) {
    const std::size_t d = ch.d_ctc();
    const ComplexMatrix s = superoperator_matrix(ch);

    std::vector<Complex> x = vec(DensityMatrix::maximally_mixed(d).matrix());
    auto residual_of = [&](const std::vector<Complex> &v) {
        auto fv = matvec(s, v);
        double r = 0.0;
        for (std::size_t i = 0; i < v.size(); ++i) {
            r = std::max(r, std::abs(fv[i] - v[i]));
        }
        return r;
    };

    std::size_t iterations = 0;
    double residual = residual_of(x);
    const std::size_t window = std::max<std::size_t>(1, opts.window);
    while (residual > opts.tol) {
        if (iterations >= opts.max_iter) {
            char buf[128];
            std::snprintf(buf, sizeof buf, "residual %.3g within %zu iterations (last residual %.3g)", opts.tol,
                          opts.max_iter, residual);
            throw SolverError(std::string("fixed_point_set: Cesàro averaging did not reach ") + buf);
        }
        std::vector<Complex> sum(x.size(), Complex{0.0, 0.0});
        std::vector<Complex> y = x;
        for (std::size_t k = 0; k < window; ++k) {
            for (std::size_t i = 0; i < y.size(); ++i) {
                sum[i] += y[i];
            }
            y = matvec(s, y);
        }
        iterations += window;
        ComplexMatrix avg = hermitian_part(unvec(sum, d, d) * Complex{1.0 / static_cast<double>(window), 0.0});
        avg *= 1.0 / avg.trace().real();
        x = vec(avg);
        residual = residual_of(x);
    }

    ComplexMatrix particular = unvec(x, d, d);

    // Real coordinates xₖ = Tr(Hₖ σ) in an orthonormal Hermitian basis; Φ is Hermiticity-preserving,
    // so it acts as a real matrix R there. Fixed traceless directions solve [R − I; trᵀ] x = 0.
    auto herm = hermitian_basis(d);
    const std::size_t n = herm.size();
    std::vector<double> system((n + 1) * n, 0.0);
    for (std::size_t k = 0; k < n; ++k) {
        ComplexMatrix image = apply_channel_linear(ch, herm[k]);
        for (std::size_t l = 0; l < n; ++l) {
            system[l * n + k] = hs_inner(herm[l], image).real() - (l == k ? 1.0 : 0.0);
        }
        system[n * n + k] = herm[k].trace().real();
    }
    auto null = detail::real_null_space(std::move(system), n + 1, n, opts.null_tol);

    std::vector<ComplexMatrix> basis;
    basis.reserve(null.size());
    for (const auto &v : null) {
        ComplexMatrix b(d, d);
        for (std::size_t k = 0; k < n; ++k) {
            b += herm[k] * Complex{v[k], 0.0};
        }
        basis.push_back(std::move(b));
    }

    return FixedPointSet{DensityMatrix(particular), std::move(basis), fixed_point_residual(ch, particular), iterations};
}

struct MaxEntropyOptions {
    /// Starting coefficients along the basis; zeros (the particular solution) when empty.
    std::vector<double> start;
    std::size_t max_iter = 10'000;
    double grad_tol = 1e-10;
    /// Candidates with a smaller eigenvalue are rejected as outside the state space.
    double psd_tol = 1e-12;
};

struct MaxEntropyResult {
    DensityMatrix state;
    std::vector<double> coefficients;
    double entropy = 0.0;
    double gradient_norm = 0.0;
    std::size_t iterations = 0;
};

namespace detail {

struct EntropyProbe {
    bool feasible = false;
    double entropy = 0.0;
    std::vector<double> gradient;
    double min_eigenvalue = 0.0;
};

inline EntropyProbe probe_entropy(const FixedPointSet &fps, std::span<const double> c, double psd_tol) {
    ComplexMatrix sigma = fps.point(c);
    auto eig = hermitian_eigendecomposition(sigma, INFINITY);
    EntropyProbe p;
    p.min_eigenvalue = eig.values.front();
    p.feasible = p.min_eigenvalue >= -psd_tol;
    p.entropy = entropy_of_spectrum(eig.values);
    // ∂S/∂cᵢ = −Tr(log₂σ · bᵢ); the I/ln 2 term drops because every bᵢ is traceless.
    ComplexMatrix log_sigma =
        hermitian_function(eig, [](double l) { return std::log2(std::max(l, std::numeric_limits<double>::min())); });
    p.gradient.resize(fps.basis.size());
    for (std::size_t i = 0; i < fps.basis.size(); ++i) {
        p.gradient[i] = -hs_inner(fps.basis[i], log_sigma).real();
    }
    return p;
}

inline double norm2(std::span<const double> v) { return std::sqrt(std::inner_product(v.begin(), v.end(), v.begin(), 0.0)); }

}  // namespace detail

/// Entropy maximizer over the fixed-point set by projected gradient ascent on the basis
/// coefficients (Barzilai-Borwein step, halved until the step stays PSD and does not lose entropy).
inline MaxEntropyResult maximize_entropy(const FixedPointSet &fps, const MaxEntropyOptions &opts = {}) {
    const std::size_t k = fps.dimension();
    std::vector<double> c(k, 0.0);
    if (!opts.start.empty()) {
        if (opts.start.size() != k) {
            throw DimensionError("maximize_entropy: start has " + std::to_string(opts.start.size()) +
                                 " coefficients, fixed set has dimension " + std::to_string(k));
        }
        if (detail::probe_entropy(fps, opts.start, opts.psd_tol).feasible) {
            c = opts.start;
        }
    }
    if (k == 0) {
        return MaxEntropyResult{fps.particular, {}, von_neumann_entropy(fps.particular), 0.0, 0};
    }

    auto current = detail::probe_entropy(fps, c, opts.psd_tol);

    // Rank-deficient start: blend 1% toward the projection of I/d onto the fixed set.
    if (current.min_eigenvalue <= 1e-12) {
        const std::size_t d = fps.particular.dim();
        ComplexMatrix towards = DensityMatrix::maximally_mixed(d).matrix() - fps.particular.matrix();
        std::vector<double> nudged(k);
        for (std::size_t i = 0; i < k; ++i) {
            nudged[i] = 0.99 * c[i] + 0.01 * hs_inner(fps.basis[i], towards).real();
        }
        auto p = detail::probe_entropy(fps, nudged, opts.psd_tol);
        if (p.feasible && p.entropy >= current.entropy) {
            c = std::move(nudged);
            current = std::move(p);
        }
    }

    const double slack = 4.0 * std::numeric_limits<double>::epsilon();
    double alpha = 1.0;
    std::size_t it = 0;
    for (; it < opts.max_iter; ++it) {
        if (detail::norm2(current.gradient) <= opts.grad_tol) {
            break;
        }
        bool accepted = false;
        std::vector<double> next(k);
        detail::EntropyProbe p;
        for (int halving = 0; halving < 80; ++halving) {
            for (std::size_t i = 0; i < k; ++i) {
                next[i] = c[i] + alpha * current.gradient[i];
            }
            p = detail::probe_entropy(fps, next, opts.psd_tol);
            if (p.feasible && p.entropy >= current.entropy - slack * std::max(1.0, current.entropy)) {
                accepted = true;
                break;
            }
            alpha *= 0.5;
        }
        if (!accepted) {
            break;
        }
        double ss = 0.0;
        double sy = 0.0;
        for (std::size_t i = 0; i < k; ++i) {
            double si = next[i] - c[i];
            double yi = p.gradient[i] - current.gradient[i];
            ss += si * si;
            sy += si * yi;
        }
        alpha = sy < 0.0 ? ss / -sy : 2.0 * alpha;
        alpha = std::clamp(alpha, 1e-16, 1e8);
        c = std::move(next);
        current = std::move(p);
    }

    ComplexMatrix sigma = fps.point(c);
    double gnorm = detail::norm2(current.gradient);
    return MaxEntropyResult{DensityMatrix(std::move(sigma)), std::move(c), current.entropy, gnorm, it};
}

inline DensityMatrix max_entropy_fixed_point(const FixedPointSet &fps) { return maximize_entropy(fps).state; }

/// Outcome of one CR ⊗ CTC interaction under the maximum-entropy consistent CTC state.
struct DeutschRun {
    FixedPointSet fixed_points;
    MaxEntropyResult selection;
    DensityMatrix rho_ctc;
    DensityMatrix rho_cr_out;
    /// U(ρ_CR ⊗ ρ_CTC)U†.
    DensityMatrix joint_out;
    double residual = 0.0;
    double entropy_cr_in = 0.0;
    double entropy_ctc = 0.0;
    double entropy_cr_out = 0.0;
    /// CR–CTC mutual information of the joint output.
    double mutual_information_out = 0.0;
};

inline DeutschRun run_deutsch_circuit(const DeutschChannel &ch, const FixedPointOptions &fp_opts = {},
                                      const MaxEntropyOptions &me_opts = {}) {
    FixedPointSet fps = fixed_point_set(ch, fp_opts);
    MaxEntropyResult sel = maximize_entropy(fps, me_opts);
    DensityMatrix rho_ctc = sel.state;
    DensityMatrix joint(ch.unitary().conjugate(tensor(ch.rho_cr_in().matrix(), rho_ctc.matrix())));
    DensityMatrix cr_out = partial_trace(joint, ch.dims(), 0);
    double residual = fixed_point_residual(ch, rho_ctc.matrix());
    double s_in = von_neumann_entropy(ch.rho_cr_in());
    double s_ctc = von_neumann_entropy(rho_ctc);
    double s_out = von_neumann_entropy(cr_out);
    double mi = mutual_information(joint, ch.dims());
    return DeutschRun{std::move(fps), std::move(sel), std::move(rho_ctc), std::move(cr_out), std::move(joint),
                      residual,       s_in,           s_ctc,              s_out,             mi};
}

/// Joint output of a reference system R and the CR system when CR is one half of the
/// state `eta` on R ⊗ CR: Tr_CTC[(I_R ⊗ U)(η ⊗ ρ_CTC)(I_R ⊗ U)†].
inline DensityMatrix reference_output(const DeutschChannel &ch, const DensityMatrix &eta, std::size_t d_ref,
                                      const DensityMatrix &rho_ctc) {
    if (eta.dim() != d_ref * ch.d_cr()) {
        throw DimensionError("reference_output: η has dimension " + std::to_string(eta.dim()) + ", expected " +
                             std::to_string(d_ref * ch.d_cr()));
    }
    ComplexMatrix u = tensor(ComplexMatrix::identity(d_ref), ch.unitary().matrix());
    ComplexMatrix joint = u * tensor(eta.matrix(), rho_ctc.matrix()) * u.adjoint();
    std::array<std::size_t, 3> dims{d_ref, ch.d_cr(), ch.d_ctc()};
    std::array<std::size_t, 2> keep{0, 1};
    return DensityMatrix(partial_trace(joint, dims, keep));
}

struct BellSwapReport {
    DensityMatrix rho_ab_in;
    DensityMatrix rho_ctc;
    DensityMatrix rho_ab_out;
    double residual = 0.0;
    double mutual_information_before = 0.0;
    double mutual_information_after = 0.0;
    /// Trace distance of the AB output from I₄/4.
    double distance_from_maximally_mixed = 0.0;
    std::size_t fixed_set_dimension = 0;
};

/// One half (B) of |Φ⁺⟩_AB enters a SWAP with a qubit on a CTC; A is a bystander.
inline BellSwapReport bell_swap_scenario(const FixedPointOptions &fp_opts = {}) {
    DensityMatrix eta = DensityMatrix::pure(gates::bell_phi_plus());
    DeutschChannel ch(gates::swap(2), partial_trace(eta, {2, 2}, 1));
    DeutschRun run = run_deutsch_circuit(ch, fp_opts);
    DensityMatrix ab_out = reference_output(ch, eta, 2, run.rho_ctc);
    double mi_before = mutual_information(eta, {2, 2});
    double mi_after = mutual_information(ab_out, {2, 2});
    double dist = trace_distance(ab_out.matrix(), DensityMatrix::maximally_mixed(4).matrix());
    return BellSwapReport{eta,       run.rho_ctc, ab_out, run.residual, mi_before,
                          mi_after, dist,        run.fixed_points.dimension()};
}

}  // namespace ctclab
