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
#include <cmath>
#include <complex>
#include <cstddef>
#include <functional>
#include <initializer_list>
#include <numeric>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "ctclab/errors.hpp"

namespace ctclab {

using Complex = std::complex<double>;

/// Dense complex matrix with row-major storage.
class ComplexMatrix {
  public:
    ComplexMatrix() = default;

    ComplexMatrix(std::size_t rows, std::size_t cols)
        : rows_(rows), cols_(cols), entries_(rows * cols, Complex{0.0, 0.0}) {}

    ComplexMatrix(std::size_t rows, std::size_t cols, std::vector<Complex> entries)
        : rows_(rows), cols_(cols), entries_(std::move(entries)) {
        if (entries_.size() != rows_ * cols_) {
            throw DimensionError("ComplexMatrix: expected " + std::to_string(rows_ * cols_) +
                                 " entries, got " + std::to_string(entries_.size()));
        }
    }

    /// Row-by-row literal, e.g. `ComplexMatrix::from_rows({{1, 0}, {0, 1}})`.
    static ComplexMatrix from_rows(std::initializer_list<std::initializer_list<Complex>> rows) {
        std::size_t n_rows = rows.size();
        std::size_t n_cols = n_rows == 0 ? 0 : rows.begin()->size();
        std::vector<Complex> entries;
        entries.reserve(n_rows * n_cols);
        for (const auto &row : rows) {
            if (row.size() != n_cols) {
                throw DimensionError("ComplexMatrix::from_rows: ragged rows");
            }
            entries.insert(entries.end(), row.begin(), row.end());
        }
        return ComplexMatrix(n_rows, n_cols, std::move(entries));
    }

    static ComplexMatrix identity(std::size_t n) {
        ComplexMatrix m(n, n);
        for (std::size_t i = 0; i < n; ++i) {
            m(i, i) = 1.0;
        }
        return m;
    }

    static ComplexMatrix diagonal(std::span<const double> values) {
        ComplexMatrix m(values.size(), values.size());
        for (std::size_t i = 0; i < values.size(); ++i) {
            m(i, i) = values[i];
        }
        return m;
    }

    static ComplexMatrix diagonal(std::initializer_list<double> values) {
        std::vector<double> v(values);
        return diagonal(std::span<const double>(v));
    }

    /// |v><w| for column vectors v, w.
    static ComplexMatrix outer(std::span<const Complex> v, std::span<const Complex> w) {
        ComplexMatrix m(v.size(), w.size());
        for (std::size_t i = 0; i < v.size(); ++i) {
            for (std::size_t j = 0; j < w.size(); ++j) {
                m(i, j) = v[i] * std::conj(w[j]);
            }
        }
        return m;
    }

    std::size_t rows() const { return rows_; }
    std::size_t cols() const { return cols_; }
    bool is_square() const { return rows_ == cols_; }

    Complex &operator()(std::size_t r, std::size_t c) { return entries_[r * cols_ + c]; }
    const Complex &operator()(std::size_t r, std::size_t c) const { return entries_[r * cols_ + c]; }

    std::span<const Complex> entries() const { return entries_; }
    std::span<Complex> entries() { return entries_; }

    ComplexMatrix adjoint() const {
        ComplexMatrix out(cols_, rows_);
        for (std::size_t r = 0; r < rows_; ++r) {
            for (std::size_t c = 0; c < cols_; ++c) {
                out(c, r) = std::conj((*this)(r, c));
            }
        }
        return out;
    }

    Complex trace() const {
        Complex t{0.0, 0.0};
        for (std::size_t i = 0; i < std::min(rows_, cols_); ++i) {
            t += (*this)(i, i);
        }
        return t;
    }

    /// Largest entry magnitude.
    double max_abs() const {
        double m = 0.0;
        for (const auto &z : entries_) {
            m = std::max(m, std::abs(z));
        }
        return m;
    }

    ComplexMatrix &operator+=(const ComplexMatrix &other) {
        require_same_shape(other, "+=");
        for (std::size_t i = 0; i < entries_.size(); ++i) {
            entries_[i] += other.entries_[i];
        }
        return *this;
    }

    ComplexMatrix &operator-=(const ComplexMatrix &other) {
        require_same_shape(other, "-=");
        for (std::size_t i = 0; i < entries_.size(); ++i) {
            entries_[i] -= other.entries_[i];
        }
        return *this;
    }

    ComplexMatrix &operator*=(Complex s) {
        for (auto &z : entries_) {
            z *= s;
        }
        return *this;
    }

    friend ComplexMatrix operator+(ComplexMatrix a, const ComplexMatrix &b) { return a += b; }
    friend ComplexMatrix operator-(ComplexMatrix a, const ComplexMatrix &b) { return a -= b; }
    friend ComplexMatrix operator*(ComplexMatrix a, Complex s) { return a *= s; }
    friend ComplexMatrix operator*(Complex s, ComplexMatrix a) { return a *= s; }

    friend ComplexMatrix operator*(const ComplexMatrix &a, const ComplexMatrix &b) {
        if (a.cols_ != b.rows_) {
            throw DimensionError("matrix product: " + a.shape_string() + " * " + b.shape_string());
        }
        ComplexMatrix out(a.rows_, b.cols_);
        for (std::size_t i = 0; i < a.rows_; ++i) {
            for (std::size_t k = 0; k < a.cols_; ++k) {
                Complex aik = a(i, k);
                if (aik == Complex{0.0, 0.0}) {
                    continue;
                }
                for (std::size_t j = 0; j < b.cols_; ++j) {
                    out(i, j) += aik * b(k, j);
                }
            }
        }
        return out;
    }

    friend bool operator==(const ComplexMatrix &, const ComplexMatrix &) = default;

    std::string shape_string() const { return std::to_string(rows_) + "x" + std::to_string(cols_); }

  private:
    void require_same_shape(const ComplexMatrix &other, const char *op) const {
        if (rows_ != other.rows_ || cols_ != other.cols_) {
            throw DimensionError(std::string("matrix ") + op + ": " + shape_string() + " vs " +
                                 other.shape_string());
        }
    }

    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    std::vector<Complex> entries_;
};

/// ‖a − b‖_max.
inline double max_abs_diff(const ComplexMatrix &a, const ComplexMatrix &b) { return (a - b).max_abs(); }

/// Matrix-vector product.
inline std::vector<Complex> matvec(const ComplexMatrix &m, std::span<const Complex> v) {
    if (m.cols() != v.size()) {
        throw DimensionError("matrix-vector product: " + m.shape_string() + " * " +
                             std::to_string(v.size()));
    }
    std::vector<Complex> out(m.rows(), Complex{0.0, 0.0});
    for (std::size_t i = 0; i < m.rows(); ++i) {
        Complex acc{0.0, 0.0};
        for (std::size_t j = 0; j < m.cols(); ++j) {
            acc += m(i, j) * v[j];
        }
        out[i] = acc;
    }
    return out;
}

/// Kronecker product a ⊗ b.
inline ComplexMatrix tensor(const ComplexMatrix &a, const ComplexMatrix &b) {
    ComplexMatrix out(a.rows() * b.rows(), a.cols() * b.cols());
    for (std::size_t i = 0; i < a.rows(); ++i) {
        for (std::size_t j = 0; j < a.cols(); ++j) {
            Complex aij = a(i, j);
            for (std::size_t k = 0; k < b.rows(); ++k) {
                for (std::size_t l = 0; l < b.cols(); ++l) {
                    out(i * b.rows() + k, j * b.cols() + l) = aij * b(k, l);
                }
            }
        }
    }
    return out;
}

inline std::vector<Complex> tensor(std::span<const Complex> a, std::span<const Complex> b) {
    std::vector<Complex> out;
    out.reserve(a.size() * b.size());
    for (const auto &x : a) {
        for (const auto &y : b) {
            out.push_back(x * y);
        }
    }
    return out;
}

/// ‖m − m†‖_max.
inline double hermiticity_defect(const ComplexMatrix &m) {
    if (!m.is_square()) {
        return INFINITY;
    }
    double d = 0.0;
    for (std::size_t i = 0; i < m.rows(); ++i) {
        for (std::size_t j = i; j < m.cols(); ++j) {
            d = std::max(d, std::abs(m(i, j) - std::conj(m(j, i))));
        }
    }
    return d;
}

inline bool is_hermitian(const ComplexMatrix &m, double tol = 1e-9) { return hermiticity_defect(m) <= tol; }

/// (m + m†)/2.
inline ComplexMatrix hermitian_part(const ComplexMatrix &m) {
    ComplexMatrix out = m + m.adjoint();
    out *= 0.5;
    return out;
}

/// Partial trace of a square operator on ⊗ₖ C^{dims[k]}, keeping the listed subsystems in
/// their original order. The first subsystem is the most significant index digit.
inline ComplexMatrix partial_trace(const ComplexMatrix &m, std::span<const std::size_t> dims,
                                   std::span<const std::size_t> keep) {
    std::size_t total = std::accumulate(dims.begin(), dims.end(), std::size_t{1}, std::multiplies<>());
    if (!m.is_square() || m.rows() != total) {
        throw DimensionError("partial_trace: operator is " + m.shape_string() + " but subsystem dims multiply to " +
                             std::to_string(total));
    }
    std::vector<bool> kept(dims.size(), false);
    for (auto k : keep) {
        if (k >= dims.size() || kept[k]) {
            throw DimensionError("partial_trace: bad kept subsystem index " + std::to_string(k));
        }
        kept[k] = true;
    }
    std::size_t n = dims.size();
    std::vector<std::size_t> keep_dims;
    std::vector<std::size_t> trace_dims;
    for (std::size_t k = 0; k < n; ++k) {
        (kept[k] ? keep_dims : trace_dims).push_back(dims[k]);
    }
    auto product = [](const std::vector<std::size_t> &v) {
        return std::accumulate(v.begin(), v.end(), std::size_t{1}, std::multiplies<>());
    };
    std::size_t d_keep = product(keep_dims);
    std::size_t d_trace = product(trace_dims);

    // Splits kept/traced multi-indices back into a full index.
    auto compose = [&](std::size_t keep_idx, std::size_t trace_idx) {
        std::vector<std::size_t> digits(n);
        for (std::size_t k = n; k-- > 0;) {
            if (kept[k]) {
                digits[k] = keep_idx % dims[k];
                keep_idx /= dims[k];
            } else {
                digits[k] = trace_idx % dims[k];
                trace_idx /= dims[k];
            }
        }
        std::size_t idx = 0;
        for (std::size_t k = 0; k < n; ++k) {
            idx = idx * dims[k] + digits[k];
        }
        return idx;
    };

    std::vector<std::size_t> index_table(d_keep * d_trace);
    for (std::size_t a = 0; a < d_keep; ++a) {
        for (std::size_t t = 0; t < d_trace; ++t) {
            index_table[a * d_trace + t] = compose(a, t);
        }
    }

    ComplexMatrix out(d_keep, d_keep);
    for (std::size_t a = 0; a < d_keep; ++a) {
        for (std::size_t b = 0; b < d_keep; ++b) {
            Complex acc{0.0, 0.0};
            for (std::size_t t = 0; t < d_trace; ++t) {
                acc += m(index_table[a * d_trace + t], index_table[b * d_trace + t]);
            }
            out(a, b) = acc;
        }
    }
    return out;
}

struct EigenDecomposition {
    /// Ascending.
    std::vector<double> values;
    /// Column k is the eigenvector of values[k].
    ComplexMatrix vectors;
};

/// Eigendecomposition of a Hermitian matrix by cyclic complex Jacobi rotations.
/// Throws InvalidValueError when `m` is not Hermitian within `hermitian_tol`.
inline EigenDecomposition hermitian_eigendecomposition(const ComplexMatrix &m, double hermitian_tol = 1e-9) {
    if (!m.is_square()) {
        throw DimensionError("hermitian_eigendecomposition: matrix is " + m.shape_string());
    }
    double defect = hermiticity_defect(m);
    if (defect > hermitian_tol) {
        throw InvalidValueError("hermitian_eigendecomposition: matrix is not Hermitian (defect " +
                                std::to_string(defect) + ")");
    }
    const std::size_t n = m.rows();
    ComplexMatrix a = hermitian_part(m);
    ComplexMatrix v = ComplexMatrix::identity(n);

    double scale = 0.0;
    for (const auto &z : a.entries()) {
        scale += std::norm(z);
    }
    scale = std::sqrt(scale);

    auto off_norm = [&] {
        double s = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            for (std::size_t j = i + 1; j < n; ++j) {
                s += std::norm(a(i, j));
            }
        }
        return std::sqrt(2.0 * s);
    };

    constexpr int kMaxSweeps = 100;
    for (int sweep = 0; sweep < kMaxSweeps; ++sweep) {
        if (off_norm() <= 1e-15 * scale || scale == 0.0) {
            break;
        }
        for (std::size_t p = 0; p < n; ++p) {
            for (std::size_t q = p + 1; q < n; ++q) {
                Complex apq = a(p, q);
                double mag = std::abs(apq);
                if (mag == 0.0) {
                    continue;
                }
                // Phase-rotate column q so the (p, q) entry is real, then apply a real rotation.
                Complex phase = std::conj(apq) / mag;
                double app = a(p, p).real();
                double aqq = a(q, q).real();
                double theta = (aqq - app) / (2.0 * mag);
                double t = (theta >= 0 ? 1.0 : -1.0) / (std::abs(theta) + std::sqrt(theta * theta + 1.0));
                double c = 1.0 / std::sqrt(t * t + 1.0);
                double s = t * c;

                const Complex jpp = c;
                const Complex jpq = s;
                const Complex jqp = -s * phase;
                const Complex jqq = c * phase;

                for (std::size_t k = 0; k < n; ++k) {
                    Complex akp = a(k, p);
                    Complex akq = a(k, q);
                    a(k, p) = akp * jpp + akq * jqp;
                    a(k, q) = akp * jpq + akq * jqq;
                }
                for (std::size_t k = 0; k < n; ++k) {
                    Complex apk = a(p, k);
                    Complex aqk = a(q, k);
                    a(p, k) = std::conj(jpp) * apk + std::conj(jqp) * aqk;
                    a(q, k) = std::conj(jpq) * apk + std::conj(jqq) * aqk;
                }
                a(p, q) = 0.0;
                a(q, p) = 0.0;
                a(p, p) = a(p, p).real();
                a(q, q) = a(q, q).real();
                for (std::size_t k = 0; k < n; ++k) {
                    Complex vkp = v(k, p);
                    Complex vkq = v(k, q);
                    v(k, p) = vkp * jpp + vkq * jqp;
                    v(k, q) = vkp * jpq + vkq * jqq;
                }
            }
        }
    }

    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::sort(order.begin(), order.end(), [&](std::size_t i, std::size_t j) { return a(i, i).real() < a(j, j).real(); });

    EigenDecomposition result{std::vector<double>(n), ComplexMatrix(n, n)};
    for (std::size_t k = 0; k < n; ++k) {
        result.values[k] = a(order[k], order[k]).real();
        for (std::size_t r = 0; r < n; ++r) {
            result.vectors(r, k) = v(r, order[k]);
        }
    }
    return result;
}

/// V diag(f(λ)) V† for a Hermitian matrix.
inline ComplexMatrix hermitian_function(const EigenDecomposition &eig, const std::function<double(double)> &f) {
    const std::size_t n = eig.values.size();
    ComplexMatrix out(n, n);
    for (std::size_t k = 0; k < n; ++k) {
        double fk = f(eig.values[k]);
        if (fk == 0.0) {
            continue;
        }
        for (std::size_t i = 0; i < n; ++i) {
            Complex vik = eig.vectors(i, k) * fk;
            for (std::size_t j = 0; j < n; ++j) {
                out(i, j) += vik * std::conj(eig.vectors(j, k));
            }
        }
    }
    return out;
}

/// ½‖a − b‖₁ for Hermitian a, b.
inline double trace_distance(const ComplexMatrix &a, const ComplexMatrix &b) {
    auto eig = hermitian_eigendecomposition(a - b, INFINITY);
    double s = 0.0;
    for (double l : eig.values) {
        s += std::abs(l);
    }
    return 0.5 * s;
}

/// Tr(a† b), the Hilbert-Schmidt inner product.
inline Complex hs_inner(const ComplexMatrix &a, const ComplexMatrix &b) {
    if (a.rows() != b.rows() || a.cols() != b.cols()) {
        throw DimensionError("hs_inner: " + a.shape_string() + " vs " + b.shape_string());
    }
    Complex acc{0.0, 0.0};
    auto ea = a.entries();
    auto eb = b.entries();
    for (std::size_t i = 0; i < ea.size(); ++i) {
        acc += std::conj(ea[i]) * eb[i];
    }
    return acc;
}

/// Row-major vectorization: vec(m)[i·cols + j] = m(i, j).
inline std::vector<Complex> vec(const ComplexMatrix &m) { return {m.entries().begin(), m.entries().end()}; }

inline ComplexMatrix unvec(std::span<const Complex> v, std::size_t rows, std::size_t cols) {
    return ComplexMatrix(rows, cols, std::vector<Complex>(v.begin(), v.end()));
}

}  // namespace ctclab
