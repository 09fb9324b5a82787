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
#include <bit>
#include <cstddef>
#include <cstdint>
#include <deque>
#include <map>
#include <optional>
#include <random>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <unordered_set>
#include <utility>
#include <vector>

#include "ctclab/deutsch.hpp"
#include "ctclab/errors.hpp"
#include "ctclab/ontic.hpp"

namespace ctclab::toy {

using ontic::Permutation;

/// Ontic states per toybit, labeled 1..4 for display.
inline constexpr std::size_t kToybitStates = 4;

inline std::size_t space_size(int n_toybits) { return n_toybits == 1 ? 4 : 16; }

inline void require_toybit_count(int n_toybits) {
    if (n_toybits != 1 && n_toybits != 2) {
        throw InvalidValueError("toy theory: only 1 or 2 toybits are supported, got " + std::to_string(n_toybits));
    }
}

/// Bit pair (z, x) of a single-toybit label: 1→(0,0), 2→(0,1), 3→(1,0), 4→(1,1).
/// The z-partition is {1,2}|{3,4}, the x-partition {1,3}|{2,4} and the y-partition
/// (level sets of z⊕x) {1,4}|{2,3}.
struct ZX {
    int z = 0;
    int x = 0;
    friend bool operator==(const ZX &, const ZX &) = default;
};

inline ZX zx_encoding(int label) {
    if (label < 1 || label > 4) {
        throw InvalidValueError("toybit label must be in 1..4, got " + std::to_string(label));
    }
    int i = label - 1;
    return ZX{i >> 1, i & 1};
}

inline int label_from_zx(ZX zx) { return 1 + ((zx.z & 1) << 1) + (zx.x & 1); }

/// Labels of one or two toybits; point index = Σ (label − 1)·4^(n−1−k), first toybit most significant.
class OnticState {
  public:
    explicit OnticState(std::vector<int> labels) : labels_(std::move(labels)) {
        require_toybit_count(static_cast<int>(labels_.size()));
        for (int l : labels_) {
            zx_encoding(l);
        }
    }

    static OnticState from_index(int n_toybits, std::size_t index) {
        require_toybit_count(n_toybits);
        if (index >= space_size(n_toybits)) {
            throw InvalidValueError("ontic index out of range");
        }
        if (n_toybits == 1) {
            return OnticState({static_cast<int>(index) + 1});
        }
        return OnticState({static_cast<int>(index / 4) + 1, static_cast<int>(index % 4) + 1});
    }

    int n_toybits() const { return static_cast<int>(labels_.size()); }
    int label(std::size_t k) const { return labels_.at(k); }
    std::span<const int> labels() const { return labels_; }

    std::size_t index() const {
        std::size_t idx = 0;
        for (int l : labels_) {
            idx = idx * 4 + static_cast<std::size_t>(l - 1);
        }
        return idx;
    }

    std::string to_string() const {
        std::string s;
        for (std::size_t k = 0; k < labels_.size(); ++k) {
            if (k) {
                s += '.';
            }
            s += std::to_string(labels_[k]);
        }
        return s;
    }

    friend bool operator==(const OnticState &, const OnticState &) = default;

  private:
    std::vector<int> labels_;
};

/// A candidate subset of the ontic space (bit i set ⇔ point index i included).
struct Support {
    int n_toybits = 1;
    std::uint32_t mask = 0;

    static Support of_labels(std::initializer_list<int> labels) {
        Support s{1, 0};
        for (int l : labels) {
            zx_encoding(l);
            s.mask |= 1u << (l - 1);
        }
        return s;
    }

    static Support of_pairs(std::initializer_list<std::pair<int, int>> pairs) {
        Support s{2, 0};
        for (auto [a, b] : pairs) {
            s.mask |= 1u << OnticState({a, b}).index();
        }
        return s;
    }

    static Support full(int n_toybits) {
        return Support{n_toybits, n_toybits == 1 ? 0xFu : 0xFFFFu};
    }

    std::size_t size() const { return static_cast<std::size_t>(std::popcount(mask)); }
    bool contains(std::size_t index) const { return (mask >> index) & 1u; }
    bool empty() const { return mask == 0; }

    std::vector<std::size_t> points() const {
        std::vector<std::size_t> out;
        for (std::size_t i = 0; i < space_size(n_toybits); ++i) {
            if (contains(i)) {
                out.push_back(i);
            }
        }
        return out;
    }

    std::vector<OnticState> states() const {
        std::vector<OnticState> out;
        for (auto i : points()) {
            out.push_back(OnticState::from_index(n_toybits, i));
        }
        return out;
    }

    /// ∨-notation, e.g. "1∨2" or "1.1∨2.2".
    std::string to_string() const {
        if (empty()) {
            return "∅";
        }
        std::string s;
        for (const auto &o : states()) {
            if (!s.empty()) {
                s += "∨";
            }
            s += o.to_string();
        }
        return s;
    }

    friend bool operator==(const Support &, const Support &) = default;
    friend auto operator<=>(const Support &, const Support &) = default;
};

namespace detail {

/// Phase-space vector in F₂^{2n}: bits (z₀, x₀, z₁, x₁) from most to least significant.
inline std::uint32_t phase_point(int n_toybits, std::size_t index) {
    std::uint32_t v = 0;
    for (int k = 0; k < n_toybits; ++k) {
        std::size_t digit = (index >> (2 * (n_toybits - 1 - k))) & 3u;
        ZX zx = zx_encoding(static_cast<int>(digit) + 1);
        v = (v << 2) | static_cast<std::uint32_t>((zx.z << 1) | zx.x);
    }
    return v;
}

inline int parity(std::uint32_t v) { return std::popcount(v) & 1; }

/// Symplectic form Σₖ (f_zₖ g_xₖ + f_xₖ g_zₖ) mod 2.
inline int symplectic(std::uint32_t f, std::uint32_t g, int n_toybits) {
    int s = 0;
    for (int k = 0; k < n_toybits; ++k) {
        std::uint32_t fk = (f >> (2 * k)) & 3u;
        std::uint32_t gk = (g >> (2 * k)) & 3u;
        s += static_cast<int>(((fk >> 1) & (gk & 1u)) ^ ((fk & 1u) & (gk >> 1)));
    }
    return s & 1;
}

}  // namespace detail

/// Knowledge-balance validity: the support is the solution set of a collection of known
/// canonical variables that pairwise can be known together, answering at most n of the 2n
/// questions that fix the ontic state of n toybits. Concretely the support is an affine
/// subspace of the (z, x) phase space of size ≥ 2ⁿ whose known linear functionals are
/// pairwise symplectically orthogonal.
inline bool is_valid_epistemic(const Support &s) {
    require_toybit_count(s.n_toybits);
    const int n = s.n_toybits;
    const std::size_t total = space_size(n);
    const std::size_t size = s.size();
    if (size < (std::size_t{1} << n) || !std::has_single_bit(size)) {
        return false;
    }
    auto pts = s.points();
    std::uint32_t origin = detail::phase_point(n, pts.front());
    std::vector<bool> in_dir(total, false);
    std::vector<std::uint32_t> directions;
    for (auto p : pts) {
        std::uint32_t w = detail::phase_point(n, p) ^ origin;
        in_dir[w] = true;
        directions.push_back(w);
    }
    for (auto a : directions) {
        for (auto b : directions) {
            if (!in_dir[a ^ b]) {
                return false;
            }
        }
    }
    std::vector<std::uint32_t> known;
    for (std::uint32_t f = 1; f < total; ++f) {
        bool annihilates = true;
        for (auto w : directions) {
            if (detail::parity(f & w)) {
                annihilates = false;
                break;
            }
        }
        if (annihilates) {
            known.push_back(f);
        }
    }
    for (auto f : known) {
        for (auto g : known) {
            if (detail::symplectic(f, g, n)) {
                return false;
            }
        }
    }
    return true;
}

enum class EpistemicKind {
    /// Zero knowledge: the whole ontic space.
    Full,
    /// One toybit, one question answered.
    Single,
    /// E_A × E_B of valid single-toybit states.
    Product,
    /// Graph {(o, π(o))} of a permutation π of 1..4.
    PermutationGraph,
    /// Eight points fixed by one joint question such as z_A ⊕ z_B.
    CorrelatedHalf,
};

inline std::string to_string(EpistemicKind k) {
    switch (k) {
        case EpistemicKind::Full: return "full";
        case EpistemicKind::Single: return "single";
        case EpistemicKind::Product: return "product";
        case EpistemicKind::PermutationGraph: return "permutation-graph";
        case EpistemicKind::CorrelatedHalf: return "correlated-half";
    }
    return "?";
}

/// A support that satisfies the knowledge-balance principle.
class EpistemicState {
  public:
    explicit EpistemicState(Support s) : support_(s) {
        if (!is_valid_epistemic(s)) {
            throw InvalidValueError("epistemic state " + s.to_string() + " violates the knowledge balance principle");
        }
    }

    static EpistemicState full(int n_toybits) { return EpistemicState(Support::full(n_toybits)); }

    const Support &support() const { return support_; }
    int n_toybits() const { return support_.n_toybits; }
    std::string to_string() const { return support_.to_string(); }

    /// Marginal support on toybit k of a two-toybit state.
    Support marginal(std::size_t k) const {
        Support m{1, 0};
        for (auto i : support_.points()) {
            std::size_t digit = k == 0 ? i / 4 : i % 4;
            m.mask |= 1u << digit;
        }
        return m;
    }

    EpistemicKind kind() const {
        if (support_ == Support::full(n_toybits())) {
            return EpistemicKind::Full;
        }
        if (n_toybits() == 1) {
            return EpistemicKind::Single;
        }
        Support a = marginal(0);
        Support b = marginal(1);
        if (a.size() * b.size() == support_.size()) {
            return EpistemicKind::Product;
        }
        return support_.size() == 4 ? EpistemicKind::PermutationGraph : EpistemicKind::CorrelatedHalf;
    }

    friend bool operator==(const EpistemicState &, const EpistemicState &) = default;
    friend auto operator<=>(const EpistemicState &a, const EpistemicState &b) { return a.support_ <=> b.support_; }

  private:
    Support support_;
};

/// Every valid epistemic state on `n_toybits`, ordered by support size then mask.
inline std::vector<EpistemicState> valid_epistemic_states(int n_toybits) {
    require_toybit_count(n_toybits);
    std::vector<EpistemicState> out;
    const std::uint32_t limit = 1u << space_size(n_toybits);
    for (std::uint32_t mask = 1; mask < limit; ++mask) {
        Support s{n_toybits, mask};
        if (is_valid_epistemic(s)) {
            out.emplace_back(s);
        }
    }
    std::stable_sort(out.begin(), out.end(), [](const EpistemicState &a, const EpistemicState &b) {
        return a.support().size() < b.support().size();
    });
    return out;
}

class ToyGroup;
const ToyGroup &two_toybit_group();

/// A valid reversible transformation: any element of S₄ on one toybit, or an element of the
/// group generated by local S₄ × S₄ and T_CN on two toybits.
class ToyTransformation {
  public:
    ToyTransformation(Permutation perm, int n_toybits);

    static ToyTransformation identity(int n_toybits) {
        return ToyTransformation(Permutation::identity(space_size(n_toybits)), n_toybits);
    }

    /// Single-toybit transformation from 1-based cycle notation, e.g. "(12)(34)".
    static ToyTransformation single(std::string_view cycles) {
        return ToyTransformation(Permutation::from_cycles(cycles, 4), 1);
    }

    /// first ⊗ second on two toybits.
    static ToyTransformation local(const Permutation &first, const Permutation &second) {
        return ToyTransformation(ontic::product(first, second), 2);
    }

    /// `p` on toybit `factor`, identity on the other.
    static ToyTransformation local_on(std::size_t factor, const Permutation &p) {
        auto id = Permutation::identity(4);
        return factor == 0 ? local(p, id) : local(id, p);
    }

    /// Toy controlled-NOT on the (z, x) encoding: z_target ⊕= z_control, x_control ⊕= x_target.
    static ToyTransformation tcn(std::size_t control, std::size_t target);

    /// (a, b) ↦ (b, a).
    static ToyTransformation swap();

    const Permutation &perm() const { return perm_; }
    int n_toybits() const { return n_toybits_; }

    OnticState operator()(const OnticState &o) const {
        return OnticState::from_index(n_toybits_, perm_(o.index()));
    }

    Support operator()(const Support &s) const {
        Support out{s.n_toybits, 0};
        for (auto i : s.points()) {
            out.mask |= 1u << perm_(i);
        }
        return out;
    }

    EpistemicState operator()(const EpistemicState &e) const { return EpistemicState((*this)(e.support())); }

    /// Apply `this` first, then `next`.
    ToyTransformation then(const ToyTransformation &next) const {
        if (next.n_toybits_ != n_toybits_) {
            throw DimensionError("ToyTransformation::then: toybit counts differ");
        }
        return ToyTransformation(ontic::compose(next.perm_, perm_), n_toybits_);
    }

    friend bool operator==(const ToyTransformation &, const ToyTransformation &) = default;

  private:
    struct Unchecked {};
    ToyTransformation(Permutation perm, int n_toybits, Unchecked) : perm_(std::move(perm)), n_toybits_(n_toybits) {}

    Permutation perm_;
    int n_toybits_ = 1;
};

/// Group of two-toybit transformations, closed by breadth-first composition with the generators.
class ToyGroup {
  public:
    static std::uint64_t pack(const Permutation &p) {
        if (p.size() != 16) {
            throw DimensionError("ToyGroup::pack: expected a permutation of 16 points");
        }
        std::uint64_t key = 0;
        for (std::size_t i = 0; i < 16; ++i) {
            key |= static_cast<std::uint64_t>(p(i)) << (4 * i);
        }
        return key;
    }

    static Permutation unpack(std::uint64_t key) {
        std::vector<std::size_t> image(16);
        for (std::size_t i = 0; i < 16; ++i) {
            image[i] = (key >> (4 * i)) & 0xFu;
        }
        return Permutation(std::move(image));
    }

    /// Closure of `generators` under composition.
    static ToyGroup generate(const std::vector<Permutation> &generators) {
        ToyGroup g;
        g.generators_ = generators;
        std::deque<std::uint64_t> frontier;
        std::uint64_t id = pack(Permutation::identity(16));
        g.elements_.insert(id);
        frontier.push_back(id);
        while (!frontier.empty()) {
            ++g.rounds_;
            Permutation current = unpack(frontier.front());
            frontier.pop_front();
            for (const auto &gen : g.generators_) {
                std::uint64_t next = pack(ontic::compose(gen, current));
                if (g.elements_.insert(next).second) {
                    frontier.push_back(next);
                }
            }
        }
        return g;
    }

    std::size_t order() const { return elements_.size(); }
    bool contains(const Permutation &p) const { return p.size() == 16 && elements_.contains(pack(p)); }
    const std::vector<Permutation> &generators() const { return generators_; }
    const std::unordered_set<std::uint64_t> &elements() const { return elements_; }
    /// Number of elements expanded before the frontier emptied.
    std::size_t rounds() const { return rounds_; }

    /// True when g∘e is already an element for every element e and generator g.
    bool is_closed() const {
        for (auto key : elements_) {
            Permutation e = unpack(key);
            for (const auto &gen : generators_) {
                if (!contains(ontic::compose(gen, e))) {
                    return false;
                }
            }
        }
        return true;
    }

  private:
    std::unordered_set<std::uint64_t> elements_;
    std::vector<Permutation> generators_;
    std::size_t rounds_ = 0;
};

namespace detail {

inline Permutation tcn_permutation(std::size_t control, std::size_t target) {
    if (control > 1 || target > 1 || control == target) {
        throw InvalidValueError("T_CN: control and target must be the distinct toybits 0 and 1");
    }
    std::vector<std::size_t> image(16);
    for (std::size_t i = 0; i < 16; ++i) {
        std::array<ZX, 2> zx{zx_encoding(static_cast<int>(i / 4) + 1), zx_encoding(static_cast<int>(i % 4) + 1)};
        zx[target].z ^= zx[control].z;
        zx[control].x ^= zx[target].x;
        image[i] = static_cast<std::size_t>(label_from_zx(zx[0]) - 1) * 4 +
                   static_cast<std::size_t>(label_from_zx(zx[1]) - 1);
    }
    return Permutation(std::move(image));
}

inline Permutation swap_permutation() {
    std::vector<std::size_t> image(16);
    for (std::size_t i = 0; i < 16; ++i) {
        image[i] = (i % 4) * 4 + i / 4;
    }
    return Permutation(std::move(image));
}

}  // namespace detail

/// Generators: (12) and (1234) on each toybit, and T_CN with toybit 0 as control.
inline std::vector<Permutation> two_toybit_generators() {
    auto id = Permutation::identity(4);
    auto transposition = Permutation::from_cycles("(1 2)", 4);
    auto four_cycle = Permutation::from_cycles("(1 2 3 4)", 4);
    return {
        ontic::product(transposition, id), ontic::product(four_cycle, id),
        ontic::product(id, transposition), ontic::product(id, four_cycle),
        detail::tcn_permutation(0, 1),
    };
}

inline ToyGroup generate_two_toybit_group() { return ToyGroup::generate(two_toybit_generators()); }

inline const ToyGroup &two_toybit_group() {
    static const ToyGroup group = generate_two_toybit_group();
    return group;
}

inline ToyTransformation::ToyTransformation(Permutation perm, int n_toybits)
    : perm_(std::move(perm)), n_toybits_(n_toybits) {
    require_toybit_count(n_toybits);
    if (perm_.size() != space_size(n_toybits)) {
        throw DimensionError("ToyTransformation: permutation on " + std::to_string(perm_.size()) +
                             " points for " + std::to_string(n_toybits) + " toybit(s)");
    }
    if (n_toybits == 2 && !two_toybit_group().contains(perm_)) {
        throw InvalidValueError("ToyTransformation: permutation is not a valid two-toybit transformation");
    }
}

inline ToyTransformation ToyTransformation::tcn(std::size_t control, std::size_t target) {
    return ToyTransformation(detail::tcn_permutation(control, target), 2, Unchecked{});
}

inline ToyTransformation ToyTransformation::swap() {
    return ToyTransformation(detail::swap_permutation(), 2);
}

struct StandardTransformations {
    /// (12)(34), the σ_z analog: preserves each z-block, flips x.
    ToyTransformation sigma_z;
    /// (13)(24), the σ_x analog: flips z, preserves x.
    ToyTransformation sigma_x;
    /// (14)(23), the σ_y analog.
    ToyTransformation sigma_y;
    ToyTransformation swap;
    /// T_CN with toybit 0 as control.
    ToyTransformation tcn;
    /// T_CN with toybit 1 as control.
    ToyTransformation tcn_reversed;
};

inline StandardTransformations standard_transformations() {
    return StandardTransformations{
        ToyTransformation::single("(1 2)(3 4)"), ToyTransformation::single("(1 3)(2 4)"),
        ToyTransformation::single("(1 4)(2 3)"), ToyTransformation::swap(),
        ToyTransformation::tcn(0, 1),            ToyTransformation::tcn(1, 0),
    };
}

/// A single-question measurement: disjoint valid blocks covering the ontic space.
class ToyMeasurement {
  public:
    explicit ToyMeasurement(std::vector<EpistemicState> blocks) : blocks_(std::move(blocks)) {
        if (blocks_.empty()) {
            throw InvalidValueError("ToyMeasurement: no blocks");
        }
        int n = blocks_.front().n_toybits();
        std::uint32_t covered = 0;
        for (const auto &b : blocks_) {
            if (b.n_toybits() != n) {
                throw InvalidValueError("ToyMeasurement: blocks over different toybit counts");
            }
            if (covered & b.support().mask) {
                throw InvalidValueError("ToyMeasurement: blocks overlap");
            }
            covered |= b.support().mask;
        }
        if (covered != Support::full(n).mask) {
            throw InvalidValueError("ToyMeasurement: blocks do not cover the ontic space");
        }
    }

    /// {1,2} | {3,4}.
    static ToyMeasurement z() { return two_blocks({1, 2}, {3, 4}); }
    /// {1,3} | {2,4}.
    static ToyMeasurement x() { return two_blocks({1, 3}, {2, 4}); }
    /// {1,4} | {2,3}.
    static ToyMeasurement y() { return two_blocks({1, 4}, {2, 3}); }

    /// "z", "x" or "y".
    static ToyMeasurement by_name(std::string_view name) {
        if (name == "z") {
            return z();
        }
        if (name == "x") {
            return x();
        }
        if (name == "y") {
            return y();
        }
        throw ParseError("unknown toy measurement \"" + std::string(name) + "\" (expected z, x or y)");
    }

    int n_toybits() const { return blocks_.front().n_toybits(); }
    const std::vector<EpistemicState> &blocks() const { return blocks_; }

    std::size_t block_of(std::size_t index) const {
        for (std::size_t b = 0; b < blocks_.size(); ++b) {
            if (blocks_[b].support().contains(index)) {
                return b;
            }
        }
        throw InvalidValueError("ToyMeasurement: point outside every block");
    }

  private:
    static ToyMeasurement two_blocks(std::initializer_list<int> a, std::initializer_list<int> b) {
        return ToyMeasurement({EpistemicState(Support::of_labels(a)), EpistemicState(Support::of_labels(b))});
    }

    std::vector<EpistemicState> blocks_;
};

struct MeasurementOutcome {
    std::size_t outcome = 0;
    OnticState new_ontic;
    /// The observed block (for the measured toybit).
    EpistemicState updated;
};

/// Measures `ontic` (or toybit `factor` of a pair with a single-toybit measurement). The
/// measured toybit is redrawn uniformly from the observed block.
inline MeasurementOutcome measure(const OnticState &ontic, const ToyMeasurement &m, std::mt19937_64 &rng,
                                  std::size_t factor = 0) {
    if (m.n_toybits() == ontic.n_toybits()) {
        std::size_t b = m.block_of(ontic.index());
        auto pts = m.blocks()[b].support().points();
        std::size_t pick = pts[static_cast<std::size_t>(rng() % pts.size())];
        return MeasurementOutcome{b, OnticState::from_index(ontic.n_toybits(), pick), m.blocks()[b]};
    }
    if (m.n_toybits() != 1 || ontic.n_toybits() != 2 || factor > 1) {
        throw DimensionError("measure: measurement and ontic state do not fit");
    }
    OnticState local({ontic.label(factor)});
    auto r = measure(local, m, rng);
    std::vector<int> labels(ontic.labels().begin(), ontic.labels().end());
    labels[factor] = r.new_ontic.label(0);
    return MeasurementOutcome{r.outcome, OnticState(std::move(labels)), r.updated};
}

/// p(block | E) for an observer holding E, uniform over the support.
inline std::vector<Rational> outcome_probabilities(const EpistemicState &e, const ToyMeasurement &m) {
    if (e.n_toybits() != m.n_toybits()) {
        throw DimensionError("outcome_probabilities: toybit counts differ");
    }
    std::vector<Rational> out;
    auto total = static_cast<std::int64_t>(e.support().size());
    for (const auto &b : m.blocks()) {
        auto overlap = static_cast<std::int64_t>(std::popcount(e.support().mask & b.support().mask));
        out.emplace_back(overlap, total);
    }
    return out;
}

/// Consistency of a toy CTC circuit. Labels are 1-based; with one toybit there is no CR system.
struct ConsistencyReport {
    int n_toybits = 1;
    std::size_t ctc_factor = 0;
    /// Internal 0-based (cr, ctc) analysis, constraint applied.
    ontic::JointConsistencyResult joint;
    std::set<int> ctc_states;
    /// CR states admitting a consistent CTC state, ignoring any pre-measurement.
    std::set<int> boundary_cr_states;
    /// CR states still allowed once the pre-measurement constraint is applied.
    std::set<int> forced_cr_states;
    /// Consistent CTC state ↦ CR outputs it produces.
    std::map<int, std::set<int>> cr_output_by_ctc;
    std::set<int> cr_output_states;
    bool paradox = true;
    bool kb_violation_ctc = false;
    bool kb_violation_cr = false;
    bool kb_violation = false;
};

namespace detail {

inline Support single_support(const std::set<int> &labels) {
    Support s{1, 0};
    for (int l : labels) {
        s.mask |= 1u << (l - 1);
    }
    return s;
}

inline bool violates_balance(const std::set<int> &labels) {
    return !labels.empty() && !is_valid_epistemic(single_support(labels));
}

}  // namespace detail

/// Applies c_out = c_in to the CTC toybit. For two toybits `ctc_factor` picks the CTC toybit
/// and `cr_constraint` (a single-toybit state) restricts the CR input.
inline ConsistencyReport ctc_consistent_states(const ToyTransformation &t, std::size_t ctc_factor = 1,
                                               const std::optional<EpistemicState> &cr_constraint = {}) {
    ConsistencyReport r;
    r.n_toybits = t.n_toybits();
    if (t.n_toybits() == 1) {
        if (cr_constraint) {
            throw InvalidValueError("ctc_consistent_states: a single toybit has no CR system to constrain");
        }
        r.ctc_factor = 0;
        r.joint = ontic::joint_consistency(t.perm(), 1, 4);
        for (auto [a, c] : r.joint.consistent_pairs) {
            r.ctc_states.insert(static_cast<int>(c) + 1);
        }
        r.paradox = r.joint.paradox;
        r.kb_violation_ctc = detail::violates_balance(r.ctc_states);
        r.kb_violation = r.kb_violation_ctc;
        return r;
    }
    if (ctc_factor > 1) {
        throw InvalidValueError("ctc_consistent_states: ctc_factor must be 0 or 1");
    }
    if (cr_constraint && cr_constraint->n_toybits() != 1) {
        throw DimensionError("ctc_consistent_states: the CR constraint must be a single-toybit state");
    }
    r.ctc_factor = ctc_factor;
    // Reorder to (cr, ctc) so index = cr·4 + ctc.
    Permutation ordered = t.perm();
    if (ctc_factor == 0) {
        auto sw = detail::swap_permutation();
        ordered = ontic::compose(sw, ontic::compose(ordered, sw));
    }
    auto unconstrained = ontic::joint_consistency(ordered, 4, 4);
    for (auto a : unconstrained.boundary_cr_states) {
        r.boundary_cr_states.insert(static_cast<int>(a) + 1);
    }
    std::optional<std::set<std::size_t>> allowed;
    if (cr_constraint) {
        allowed.emplace();
        for (auto p : cr_constraint->support().points()) {
            allowed->insert(p);
        }
    }
    r.joint = ontic::joint_consistency(ordered, 4, 4, allowed);
    for (auto [pair, out] : r.joint.cr_outputs) {
        int cr = static_cast<int>(pair.first) + 1;
        int ctc = static_cast<int>(pair.second) + 1;
        r.forced_cr_states.insert(cr);
        r.ctc_states.insert(ctc);
        r.cr_output_by_ctc[ctc].insert(static_cast<int>(out) + 1);
        r.cr_output_states.insert(static_cast<int>(out) + 1);
    }
    r.paradox = r.joint.paradox;
    r.kb_violation_ctc = detail::violates_balance(r.ctc_states);
    r.kb_violation_cr = detail::violates_balance(r.forced_cr_states);
    r.kb_violation = r.kb_violation_ctc || r.kb_violation_cr;
    return r;
}

/// Equal-weight mixture over interactions the observer cannot tell apart:
/// p(o) = Σ_T p(T) p(o | T) with p(o | T) uniform on the CR states T forces.
struct InteractionMixture {
    std::vector<ConsistencyReport> branches;
    /// Probability of each CR label 1..4.
    std::array<Rational, 4> probabilities{};
    Support support;
    bool valid = false;
};

inline InteractionMixture mix_interactions(std::span<const ToyTransformation> alternatives, std::size_t ctc_factor,
                                           const std::optional<EpistemicState> &cr_constraint) {
    if (alternatives.empty()) {
        throw InvalidValueError("mix_interactions: no alternatives");
    }
    InteractionMixture m;
    m.probabilities.fill(Rational{0});
    Rational weight(1, static_cast<std::int64_t>(alternatives.size()));
    for (const auto &t : alternatives) {
        auto r = ctc_consistent_states(t, ctc_factor, cr_constraint);
        if (!r.forced_cr_states.empty()) {
            Rational each = weight / Rational(static_cast<std::int64_t>(r.forced_cr_states.size()));
            for (int o : r.forced_cr_states) {
                m.probabilities[static_cast<std::size_t>(o - 1)] += each;
            }
        }
        m.branches.push_back(std::move(r));
    }
    m.support = Support{1, 0};
    for (std::size_t o = 0; o < 4; ++o) {
        if (m.probabilities[o] != Rational{0}) {
            m.support.mask |= 1u << o;
        }
    }
    m.valid = is_valid_epistemic(m.support);
    return m;
}

/// T₂ = T_CN (CTC toybit 1 controls CR toybit 0) and T′₂ = (12) on CR followed by T_CN,
/// each after the CR toybit was found in 1∨2, mixed with p(T₂) = p(T′₂) = ½.
struct PrimedInteractionReport {
    ConsistencyReport t2;
    ConsistencyReport t2_primed;
    InteractionMixture mixture;
};

inline ToyTransformation primed_tcn() {
    return ToyTransformation::local_on(0, Permutation::from_cycles("(1 2)", 4)).then(ToyTransformation::tcn(1, 0));
}

inline PrimedInteractionReport primed_interaction_analysis() {
    EpistemicState observed(Support::of_labels({1, 2}));
    std::vector<ToyTransformation> alts{ToyTransformation::tcn(1, 0), primed_tcn()};
    auto mixture = mix_interactions(alts, 1, observed);
    return PrimedInteractionReport{mixture.branches[0], mixture.branches[1], mixture};
}

/// Post-selection table for E and a future measurement M.
struct RetrodictionTable {
    /// p(M = m | E).
    std::vector<Rational> outcome_probabilities;
    /// conditional[m][o − 1] = p(o | M = m, E); all zero when the outcome is impossible.
    std::vector<std::array<Rational, 4>> conditional;
    /// Σ_m p(o | m, E) p(m | E).
    std::array<Rational, 4> marginal{};
};

inline RetrodictionTable retrodiction(const EpistemicState &e, const ToyMeasurement &m) {
    if (e.n_toybits() != 1 || m.n_toybits() != 1) {
        throw DimensionError("retrodiction: single toybit only");
    }
    RetrodictionTable t;
    t.outcome_probabilities = outcome_probabilities(e, m);
    t.marginal.fill(Rational{0});
    for (std::size_t b = 0; b < m.blocks().size(); ++b) {
        std::array<Rational, 4> cond;
        cond.fill(Rational{0});
        std::uint32_t overlap = e.support().mask & m.blocks()[b].support().mask;
        auto count = std::popcount(overlap);
        for (std::size_t o = 0; o < 4; ++o) {
            if ((overlap >> o) & 1u) {
                cond[o] = Rational(1, count);
                t.marginal[o] += cond[o] * t.outcome_probabilities[b];
            }
        }
        t.conditional.push_back(cond);
    }
    return t;
}

/// Valid epistemic states E with t(E) = E.
inline std::vector<EpistemicState> invariant_epistemic_states(const ToyTransformation &t) {
    std::vector<EpistemicState> out;
    for (const auto &e : valid_epistemic_states(t.n_toybits())) {
        if (t(e.support()) == e.support()) {
            out.push_back(e);
        }
    }
    return out;
}

struct EpistemicConcealmentReport {
    /// Ontic fixed points as labels.
    std::vector<OnticState> fixed_points;
    bool paradox = false;
    /// Paradox on the ontic level while some valid epistemic state is self-consistent.
    bool concealed = false;
    std::vector<EpistemicState> witnesses;
    /// The minimum-knowledge (full-support) state, the analog of maximum entropy; always invariant.
    EpistemicState minimum_knowledge;
    bool minimum_knowledge_invariant = false;
};

inline EpistemicConcealmentReport epistemic_concealment_report(const ToyTransformation &t) {
    auto full = EpistemicState::full(t.n_toybits());
    EpistemicConcealmentReport r{{}, false, false, invariant_epistemic_states(t), full, false};
    for (auto i : ontic::fixed_points(t.perm())) {
        r.fixed_points.push_back(OnticState::from_index(t.n_toybits(), i));
    }
    r.paradox = r.fixed_points.empty();
    r.concealed = r.paradox && !r.witnesses.empty();
    r.minimum_knowledge_invariant = t(full.support()) == full.support();
    return r;
}

/// Graph {(o, π(o))} of a permutation of one toybit's labels.
inline EpistemicState prepare_correlated(const Permutation &pi) {
    if (pi.size() != 4) {
        throw DimensionError("prepare_correlated: expected a permutation of 4 labels");
    }
    Support s{2, 0};
    for (std::size_t o = 0; o < 4; ++o) {
        s.mask |= 1u << (o * 4 + pi(o));
    }
    return EpistemicState(s);
}

/// Joint support of a spectator toybit A and the CR toybit after the interaction, given
/// their correlated state before it: {(a, cr_out(b, c)) : (a, b) ∈ before, (b, c) consistent}.
inline Support propagate_correlated(const EpistemicState &before, const ConsistencyReport &consistency) {
    if (before.n_toybits() != 2 || consistency.n_toybits != 2) {
        throw DimensionError("propagate_correlated: expected two-toybit states and interactions");
    }
    Support after{2, 0};
    for (auto i : before.support().points()) {
        std::size_t a = i / 4;
        std::size_t b = i % 4;
        for (const auto &[pair, out] : consistency.joint.cr_outputs) {
            if (pair.first == b) {
                after.mask |= 1u << (a * 4 + out);
            }
        }
    }
    return after;
}

/// A and B share the correlated state 1.1∨2.2∨3.3∨4.4; B swaps with a CTC toybit C.
/// Contrasted with the Deutsch Bell-pair SWAP.
struct SwapCorrelationReport {
    ConsistencyReport consistency;
    EpistemicState ab_before;
    EpistemicState ab_after;
    bool consistency_forces_equal = false;
    bool correlation_preserved = false;
    BellSwapReport deutsch;
    bool deutsch_information_destroyed = false;
    /// Toy correlations survive while the Deutsch model loses them.
    bool contrast_holds = false;
};

inline SwapCorrelationReport swap_correlation_scenario() {
    auto before = prepare_correlated(Permutation::identity(4));
    // CR = B (toybit 0 of the interaction), CTC = C (toybit 1).
    auto consistency = ctc_consistent_states(ToyTransformation::swap(), 1);

    bool forces_equal = !consistency.joint.consistent_pairs.empty();
    for (auto [b, c] : consistency.joint.consistent_pairs) {
        forces_equal = forces_equal && b == c;
    }
    forces_equal = forces_equal && consistency.joint.consistent_pairs.size() == 4;

    Support after = propagate_correlated(before, consistency);
    EpistemicState ab_after(after);
    bool preserved = ab_after == before;

    auto deutsch = bell_swap_scenario();
    bool destroyed = deutsch.mutual_information_before > 2.0 - 1e-9 && deutsch.mutual_information_after < 1e-9;
    return SwapCorrelationReport{consistency, before,   ab_after, forces_equal,
                                 preserved,   deutsch, destroyed, preserved && destroyed};
}

}  // namespace ctclab::toy
