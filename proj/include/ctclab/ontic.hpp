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
#include <cctype>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <map>
#include <numeric>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include <boost/rational.hpp>

#include "ctclab/errors.hpp"

namespace ctclab {

using Rational = boost::rational<std::int64_t>;

inline std::string to_string(const Rational &r) {
    return r.denominator() == 1 ? std::to_string(r.numerator())
                                : std::to_string(r.numerator()) + "/" + std::to_string(r.denominator());
}

}  // namespace ctclab

namespace ctclab::ontic {

/// Bijection on {0, …, size−1}, stored as its image array.
class Permutation {
  public:
    Permutation() = default;

    explicit Permutation(std::vector<std::size_t> image) : image_(std::move(image)) {
        std::vector<bool> hit(image_.size(), false);
        for (auto v : image_) {
            if (v >= image_.size() || hit[v]) {
                throw InvalidValueError("Permutation: image is not a bijection on 0.." +
                                        std::to_string(image_.size() == 0 ? 0 : image_.size() - 1));
            }
            hit[v] = true;
        }
    }

    static Permutation identity(std::size_t size) {
        std::vector<std::size_t> image(size);
        std::iota(image.begin(), image.end(), std::size_t{0});
        return Permutation(std::move(image));
    }

    /// Parses 1-based cycle notation such as "(1 2 3)(4)" or "(12)(34)" on `size` points.
    /// Points not mentioned are fixed. Compact digit runs are only accepted when size ≤ 9.
    static Permutation from_cycles(std::string_view text, std::size_t size) {
        std::vector<std::size_t> image(size);
        std::iota(image.begin(), image.end(), std::size_t{0});
        std::vector<bool> seen(size, false);
        std::size_t pos = 0;
        auto skip_space = [&] {
            while (pos < text.size() && std::isspace(static_cast<unsigned char>(text[pos]))) {
                ++pos;
            }
        };
        skip_space();
        while (pos < text.size()) {
            if (text[pos] != '(') {
                throw ParseError("cycle notation: expected '(' at position " + std::to_string(pos) + " in \"" +
                                 std::string(text) + "\"");
            }
            ++pos;
            std::vector<std::size_t> cycle;
            while (true) {
                skip_space();
                if (pos >= text.size()) {
                    throw ParseError("cycle notation: unterminated cycle in \"" + std::string(text) + "\"");
                }
                if (text[pos] == ')') {
                    ++pos;
                    break;
                }
                if (text[pos] == ',') {
                    ++pos;
                    continue;
                }
                if (!std::isdigit(static_cast<unsigned char>(text[pos]))) {
                    throw ParseError("cycle notation: unexpected '" + std::string(1, text[pos]) + "' in \"" +
                                     std::string(text) + "\"");
                }
                std::size_t start = pos;
                while (pos < text.size() && std::isdigit(static_cast<unsigned char>(text[pos]))) {
                    ++pos;
                }
                std::string_view token = text.substr(start, pos - start);
                if (token.size() > 1 && size <= 9) {
                    for (char ch : token) {
                        cycle.push_back(static_cast<std::size_t>(ch - '0'));
                    }
                } else {
                    cycle.push_back(std::stoul(std::string(token)));
                }
            }
            for (auto label : cycle) {
                if (label == 0 || label > size) {
                    throw ParseError("cycle notation: label " + std::to_string(label) + " outside 1.." +
                                     std::to_string(size));
                }
                if (seen[label - 1]) {
                    throw ParseError("cycle notation: label " + std::to_string(label) + " appears twice");
                }
                seen[label - 1] = true;
            }
            for (std::size_t i = 0; i < cycle.size(); ++i) {
                image[cycle[i] - 1] = cycle[(i + 1) % cycle.size()] - 1;
            }
            skip_space();
        }
        return Permutation(std::move(image));
    }

    std::size_t size() const { return image_.size(); }
    std::size_t operator()(std::size_t i) const { return image_.at(i); }
    std::span<const std::size_t> image() const { return image_; }

    Permutation inverse() const {
        std::vector<std::size_t> inv(image_.size());
        for (std::size_t i = 0; i < image_.size(); ++i) {
            inv[image_[i]] = i;
        }
        return Permutation(std::move(inv));
    }

    bool is_identity() const {
        for (std::size_t i = 0; i < image_.size(); ++i) {
            if (image_[i] != i) {
                return false;
            }
        }
        return true;
    }

    /// Disjoint cycles in order of their smallest element, fixed points included.
    std::vector<std::vector<std::size_t>> cycles() const {
        std::vector<std::vector<std::size_t>> out;
        std::vector<bool> done(image_.size(), false);
        for (std::size_t i = 0; i < image_.size(); ++i) {
            if (done[i]) {
                continue;
            }
            std::vector<std::size_t> cycle;
            for (std::size_t j = i; !done[j]; j = image_[j]) {
                done[j] = true;
                cycle.push_back(j);
            }
            out.push_back(std::move(cycle));
        }
        return out;
    }

    /// 1-based cycle notation; fixed points are written as 1-cycles.
    std::string to_cycle_string() const {
        std::string s;
        for (const auto &cycle : cycles()) {
            s += '(';
            for (std::size_t k = 0; k < cycle.size(); ++k) {
                if (k) {
                    s += ' ';
                }
                s += std::to_string(cycle[k] + 1);
            }
            s += ')';
        }
        return s;
    }

    friend bool operator==(const Permutation &, const Permutation &) = default;
    friend auto operator<=>(const Permutation &a, const Permutation &b) { return a.image_ <=> b.image_; }

  private:
    std::vector<std::size_t> image_;
};

/// (a ∘ b)(i) = a(b(i)): apply `b` first.
inline Permutation compose(const Permutation &a, const Permutation &b) {
    if (a.size() != b.size()) {
        throw DimensionError("compose: permutations on " + std::to_string(a.size()) + " and " +
                             std::to_string(b.size()) + " points");
    }
    std::vector<std::size_t> image(a.size());
    for (std::size_t i = 0; i < a.size(); ++i) {
        image[i] = a(b(i));
    }
    return Permutation(std::move(image));
}

/// a × b on the product space, index = i·b.size() + j.
inline Permutation product(const Permutation &a, const Permutation &b) {
    std::vector<std::size_t> image(a.size() * b.size());
    for (std::size_t i = 0; i < a.size(); ++i) {
        for (std::size_t j = 0; j < b.size(); ++j) {
            image[i * b.size() + j] = a(i) * b.size() + b(j);
        }
    }
    return Permutation(std::move(image));
}

/// Probability distribution over a finite ontic space. `T` is double or Rational.
template <typename T>
class BasicDistribution {
  public:
    explicit BasicDistribution(std::vector<T> probs) : probs_(std::move(probs)) {
        if (probs_.empty()) {
            throw InvalidValueError("distribution over an empty ontic space");
        }
        T total{0};
        for (const auto &p : probs_) {
            if (p < T{0}) {
                throw InvalidValueError("distribution has a negative probability");
            }
            total += p;
        }
        if (!normalized(total)) {
            throw InvalidValueError("distribution does not sum to 1");
        }
    }

    static BasicDistribution uniform(std::size_t size) { return uniform_on(size, all_states(size)); }

    static BasicDistribution point_mass(std::size_t size, std::size_t state) {
        return uniform_on(size, std::vector<std::size_t>{state});
    }

    static BasicDistribution uniform_on(std::size_t size, std::span<const std::size_t> states) {
        if (states.empty()) {
            throw InvalidValueError("uniform_on: empty support");
        }
        std::vector<T> p(size, T{0});
        T w = T{1} / T(static_cast<std::int64_t>(states.size()));
        for (auto s : states) {
            p.at(s) = w;
        }
        return BasicDistribution(std::move(p));
    }

    std::size_t size() const { return probs_.size(); }
    const T &operator[](std::size_t i) const { return probs_[i]; }
    std::span<const T> probs() const { return probs_; }

    std::vector<std::size_t> support() const {
        std::vector<std::size_t> s;
        for (std::size_t i = 0; i < probs_.size(); ++i) {
            if (probs_[i] != T{0}) {
                s.push_back(i);
            }
        }
        return s;
    }

    friend bool operator==(const BasicDistribution &, const BasicDistribution &) = default;

  private:
    static std::vector<std::size_t> all_states(std::size_t size) {
        std::vector<std::size_t> s(size);
        std::iota(s.begin(), s.end(), std::size_t{0});
        return s;
    }

    static bool normalized(const T &total) {
        if constexpr (std::is_floating_point_v<T>) {
            return std::abs(total - T{1}) <= 1e-12;
        } else {
            return total == T{1};
        }
    }

    std::vector<T> probs_;
};

using Distribution = BasicDistribution<double>;
using ExactDistribution = BasicDistribution<Rational>;

/// {i : p(i) = i}, ascending.
inline std::vector<std::size_t> fixed_points(const Permutation &p) {
    std::vector<std::size_t> out;
    for (std::size_t i = 0; i < p.size(); ++i) {
        if (p(i) == i) {
            out.push_back(i);
        }
    }
    return out;
}

/// probs'[p(i)] = probs[i].
template <typename T>
BasicDistribution<T> pushforward(const BasicDistribution<T> &d, const Permutation &p) {
    if (d.size() != p.size()) {
        throw DimensionError("pushforward: distribution over " + std::to_string(d.size()) +
                             " states, permutation over " + std::to_string(p.size()));
    }
    std::vector<T> out(d.size(), T{0});
    for (std::size_t i = 0; i < d.size(); ++i) {
        out[p(i)] = d[i];
    }
    return BasicDistribution<T>(std::move(out));
}

template <typename T>
bool is_stationary(const BasicDistribution<T> &d, const Permutation &p) {
    return pushforward(d, p) == d;
}

/// Stationary distributions of a permutation: exactly the convex mixtures of `basis`,
/// one uniform distribution per cycle.
template <typename T = Rational>
struct StationarySet {
    std::vector<std::vector<std::size_t>> cycles;
    std::vector<BasicDistribution<T>> basis;

    std::string description() const {
        return "convex hull of " + std::to_string(basis.size()) + " per-cycle uniform distribution" +
               (basis.size() == 1 ? "" : "s");
    }
};

template <typename T = Rational>
StationarySet<T> stationary_distributions(const Permutation &p) {
    StationarySet<T> out;
    out.cycles = p.cycles();
    for (const auto &cycle : out.cycles) {
        out.basis.push_back(BasicDistribution<T>::uniform_on(p.size(), cycle));
    }
    return out;
}

struct ConcealmentReport {
    std::vector<std::size_t> fixed_points;
    bool paradox = false;
    /// No consistent ontic state, yet a consistent epistemic state exists.
    bool concealed_paradox = false;
    std::vector<ExactDistribution> witnesses;
};

inline ConcealmentReport concealment_report(const Permutation &p) {
    ConcealmentReport r;
    r.fixed_points = fixed_points(p);
    r.paradox = r.fixed_points.empty();
    r.witnesses = stationary_distributions<Rational>(p).basis;
    r.concealed_paradox = r.paradox && !r.witnesses.empty();
    return r;
}

using StatePair = std::pair<std::size_t, std::size_t>;

/// Consistency of a CR ⊗ CTC interaction under c_out = c_in.
struct JointConsistencyResult {
    std::size_t cr_size = 0;
    std::size_t ctc_size = 0;
    /// (cr, ctc) input pairs whose CTC output equals the CTC input.
    std::set<StatePair> consistent_pairs;
    std::set<std::size_t> boundary_cr_states;
    std::set<std::size_t> ctc_states;
    bool paradox = true;
    /// CR output state for every consistent pair.
    std::map<StatePair, std::size_t> cr_outputs;
};

/// `t` acts on the product space with index = cr·ctc_size + ctc.
inline JointConsistencyResult joint_consistency(const Permutation &t, std::size_t cr_size, std::size_t ctc_size,
                                                const std::optional<std::set<std::size_t>> &cr_constraint = {}) {
    if (cr_size == 0 || ctc_size == 0 || t.size() != cr_size * ctc_size) {
        throw DimensionError("joint_consistency: permutation on " + std::to_string(t.size()) +
                             " points does not act on " + std::to_string(cr_size) + " x " + std::to_string(ctc_size));
    }
    JointConsistencyResult r;
    r.cr_size = cr_size;
    r.ctc_size = ctc_size;
    for (std::size_t a = 0; a < cr_size; ++a) {
        if (cr_constraint && !cr_constraint->contains(a)) {
            continue;
        }
        for (std::size_t c = 0; c < ctc_size; ++c) {
            std::size_t out = t(a * ctc_size + c);
            if (out % ctc_size == c) {
                r.consistent_pairs.insert({a, c});
                r.boundary_cr_states.insert(a);
                r.ctc_states.insert(c);
                r.cr_outputs[{a, c}] = out / ctc_size;
            }
        }
    }
    r.paradox = r.consistent_pairs.empty();
    return r;
}

/// Markov matrix of the CTC marginal when the CR input is drawn from `cr_dist`:
/// m[c_out][c_in] = P(CTC out = c_out | CTC in = c_in).
inline std::vector<std::vector<Rational>> induced_ctc_chain(const Permutation &t, const ExactDistribution &cr_dist,
                                                            std::size_t ctc_size) {
    std::size_t cr_size = cr_dist.size();
    if (t.size() != cr_size * ctc_size) {
        throw DimensionError("induced_ctc_chain: size mismatch");
    }
    std::vector<std::vector<Rational>> m(ctc_size, std::vector<Rational>(ctc_size, Rational{0}));
    for (std::size_t a = 0; a < cr_size; ++a) {
        for (std::size_t c = 0; c < ctc_size; ++c) {
            m[t(a * ctc_size + c) % ctc_size][c] += cr_dist[a];
        }
    }
    return m;
}

/// A stationary distribution of a column-stochastic matrix: the unique stationary
/// distribution of its first closed communicating class, solved exactly.
inline ExactDistribution stationary_of_chain(const std::vector<std::vector<Rational>> &m) {
    const std::size_t n = m.size();
    std::vector<std::vector<bool>> reach(n, std::vector<bool>(n, false));
    for (std::size_t i = 0; i < n; ++i) {
        std::vector<std::size_t> stack{i};
        reach[i][i] = true;
        while (!stack.empty()) {
            std::size_t u = stack.back();
            stack.pop_back();
            for (std::size_t v = 0; v < n; ++v) {
                if (m[v][u] != Rational{0} && !reach[i][v]) {
                    reach[i][v] = true;
                    stack.push_back(v);
                }
            }
        }
    }
    std::vector<std::size_t> cls;
    for (std::size_t i = 0; i < n && cls.empty(); ++i) {
        bool closed = true;
        for (std::size_t j = 0; j < n; ++j) {
            if (reach[i][j] && !reach[j][i]) {
                closed = false;
                break;
            }
        }
        if (closed) {
            for (std::size_t j = 0; j < n; ++j) {
                if (reach[i][j]) {
                    cls.push_back(j);
                }
            }
        }
    }

    // Irreducible block: (M_C − I) q = 0 with Σ q = 1 has a unique solution.
    const std::size_t k = cls.size();
    std::vector<std::vector<Rational>> a(k + 1, std::vector<Rational>(k + 1, Rational{0}));
    for (std::size_t r = 0; r < k; ++r) {
        for (std::size_t c = 0; c < k; ++c) {
            a[r][c] = m[cls[r]][cls[c]] - (r == c ? Rational{1} : Rational{0});
        }
    }
    for (std::size_t c = 0; c <= k; ++c) {
        a[k][c] = 1;
    }
    std::size_t row = 0;
    std::vector<std::size_t> pivot_row(k, k + 1);
    for (std::size_t col = 0; col < k; ++col) {
        std::size_t piv = row;
        while (piv <= k && a[piv][col] == Rational{0}) {
            ++piv;
        }
        if (piv > k) {
            continue;
        }
        std::swap(a[piv], a[row]);
        Rational inv = Rational{1} / a[row][col];
        for (auto &x : a[row]) {
            x *= inv;
        }
        for (std::size_t r = 0; r <= k; ++r) {
            if (r != row && a[r][col] != Rational{0}) {
                Rational f = a[r][col];
                for (std::size_t c = 0; c <= k; ++c) {
                    a[r][c] -= f * a[row][c];
                }
            }
        }
        pivot_row[col] = row++;
    }
    std::vector<Rational> q(n, Rational{0});
    for (std::size_t c = 0; c < k; ++c) {
        if (pivot_row[c] > k) {
            throw SolverError("stationary_of_chain: closed class has no unique stationary distribution");
        }
        q[cls[c]] = a[pivot_row[c]][k];
    }
    return ExactDistribution(std::move(q));
}

}  // namespace ctclab::ontic
