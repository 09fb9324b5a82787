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

#include <algorithm>
#include <random>
#include <set>

#include "ctclab/errors.hpp"
#include "ctclab/toy.hpp"

using namespace ctclab;
using namespace ctclab::toy;

namespace {

Permutation cyc(const char *c) { return Permutation::from_cycles(c, 4); }

std::set<std::string> names(const std::vector<EpistemicState> &states) {
    std::set<std::string> out;
    for (const auto &s : states) {
        out.insert(s.to_string());
    }
    return out;
}

/// Supports reached from a few seed states under every element of the two-toybit group.
std::set<std::uint32_t> orbit_catalog() {
    std::vector<Support> seeds{Support::of_pairs({{1, 1}, {1, 2}, {2, 1}, {2, 2}}),
                               Support::of_pairs({{1, 1}, {1, 2}, {1, 3}, {1, 4}, {2, 1}, {2, 2}, {2, 3}, {2, 4}}),
                               Support::full(2)};
    std::set<std::uint32_t> out;
    for (auto key : two_toybit_group().elements()) {
        Permutation p = ToyGroup::unpack(key);
        for (const auto &s : seeds) {
            Support img{2, 0};
            for (auto i : s.points()) {
                img.mask |= 1u << p(i);
            }
            out.insert(img.mask);
        }
    }
    return out;
}

}  // namespace

TEST(ZxEncoding, LabelsMapToPhaseSpacePoints) {
    EXPECT_EQ(zx_encoding(1).z, 0);
    EXPECT_EQ(zx_encoding(1).x, 0);
    EXPECT_EQ(zx_encoding(2).x, 1);
    EXPECT_EQ(zx_encoding(3).z, 1);
    EXPECT_EQ(zx_encoding(4).z + zx_encoding(4).x, 2);
    for (int l = 1; l <= 4; ++l) {
        EXPECT_EQ(label_from_zx(zx_encoding(l)), l);
    }
    EXPECT_THROW(zx_encoding(5), InvalidValueError);
}

TEST(OnticState, IndexPutsTheFirstToybitFirst) {
    EXPECT_EQ(OnticState({2, 3}).index(), 6u);
    EXPECT_EQ(OnticState::from_index(2, 6).to_string(), "2.3");
}

TEST(Validity, SingleToybitExamples) {
    EXPECT_TRUE(is_valid_epistemic(Support::of_labels({1, 2})));
    EXPECT_TRUE(is_valid_epistemic(Support::of_labels({1, 4})));
    EXPECT_FALSE(is_valid_epistemic(Support::of_labels({1})));
    EXPECT_FALSE(is_valid_epistemic(Support::of_labels({1, 2, 3})));
    EXPECT_TRUE(is_valid_epistemic(Support::full(1)));
    EXPECT_THROW(EpistemicState(Support::of_labels({4})), InvalidValueError);
}

TEST(Validity, SingleToybitCatalogIsTheSixPairsPlusFull) {
    EXPECT_EQ(names(valid_epistemic_states(1)),
              (std::set<std::string>{"1∨2", "3∨4", "1∨3", "2∨4", "1∨4", "2∨3", "1∨2∨3∨4"}));
}

TEST(Validity, TwoToybitCatalogMatchesTheGroupOrbitOfSeedStates) {
    auto catalog = valid_epistemic_states(2);
    // 15 Lagrangian planes × 4 cosets, 15 functionals × 2 half-spaces, the full space.
    EXPECT_EQ(catalog.size(), 15u * 4 + 15u * 2 + 1);
    std::set<std::uint32_t> masks;
    for (const auto &e : catalog) {
        masks.insert(e.support().mask);
    }
    EXPECT_EQ(masks, orbit_catalog());
}

TEST(Validity, CorrelatedGraphsAreAllValid) {
    EXPECT_TRUE(is_valid_epistemic(Support::of_pairs({{1, 1}, {2, 2}, {3, 3}, {4, 4}})));
    std::vector<std::size_t> image{0, 1, 2, 3};
    int count = 0;
    do {
        EXPECT_NO_THROW(prepare_correlated(Permutation(image)));
        ++count;
    } while (std::next_permutation(image.begin(), image.end()));
    EXPECT_EQ(count, 24);
    EXPECT_EQ(prepare_correlated(Permutation::identity(4)).to_string(), "1.1∨2.2∨3.3∨4.4");
}

TEST(Validity, ProductOfAPointAndAPairViolatesBalance) {
    EXPECT_FALSE(is_valid_epistemic(Support::of_pairs({{1, 1}, {1, 2}})));
    EXPECT_FALSE(is_valid_epistemic(Support::of_pairs({{1, 1}, {2, 2}, {3, 3}})));
}

TEST(Transformations, PauliAnalogsActOnZx) {
    auto std_t = standard_transformations();
    for (int l = 1; l <= 4; ++l) {
        ZX in = zx_encoding(l);
        ZX after_z = zx_encoding(static_cast<int>(std_t.sigma_z.perm()(l - 1)) + 1);
        ZX after_x = zx_encoding(static_cast<int>(std_t.sigma_x.perm()(l - 1)) + 1);
        EXPECT_EQ(after_z.z, in.z);
        EXPECT_NE(after_z.x, in.x);
        EXPECT_NE(after_x.z, in.z);
        EXPECT_EQ(after_x.x, in.x);
    }
}

TEST(Transformations, TcnFollowsTheZxRuleAndIsAnInvolution) {
    auto t = ToyTransformation::tcn(0, 1);
    for (std::size_t i = 0; i < 16; ++i) {
        OnticState o = OnticState::from_index(2, i);
        ZX c = zx_encoding(o.label(0));
        ZX g = zx_encoding(o.label(1));
        OnticState out = t(o);
        ZX c2 = zx_encoding(out.label(0));
        ZX g2 = zx_encoding(out.label(1));
        EXPECT_EQ(c2.z, c.z);
        EXPECT_EQ(c2.x, c.x ^ g.x);
        EXPECT_EQ(g2.z, g.z ^ c.z);
        EXPECT_EQ(g2.x, g.x);
    }
    EXPECT_TRUE(ontic::compose(t.perm(), t.perm()).is_identity());
}

TEST(Transformations, ThenAppliesTheReceiverFirst) {
    auto a = ToyTransformation::local_on(0, cyc("(1 2)"));
    auto b = ToyTransformation::tcn(1, 0);
    auto ab = a.then(b);
    for (std::size_t i = 0; i < 16; ++i) {
        OnticState o = OnticState::from_index(2, i);
        EXPECT_EQ(ab(o).index(), b(a(o)).index());
    }
}

TEST(Transformations, NonGroupPermutationIsRejected) {
    std::vector<std::size_t> image(16);
    for (std::size_t i = 0; i < 16; ++i) {
        image[i] = i;
    }
    std::swap(image[0], image[1]);
    EXPECT_THROW(ToyTransformation(Permutation(image), 2), InvalidValueError);
}

TEST(Group, ClosureOrderAndMembership) {
    const ToyGroup &g = two_toybit_group();
    EXPECT_EQ(g.order(), 11520u);
    EXPECT_TRUE(g.is_closed());
    EXPECT_TRUE(g.contains(ToyTransformation::swap().perm()));
    EXPECT_TRUE(g.contains(ToyTransformation::tcn(1, 0).perm()));
}

TEST(Group, SwapIsAProductOfThreeTcns) {
    auto a = ToyTransformation::tcn(0, 1);
    auto b = ToyTransformation::tcn(1, 0);
    EXPECT_EQ(a.then(b).then(a).perm(), ToyTransformation::swap().perm());
}

TEST(Group, EveryElementPreservesValidity) {
    auto catalog = valid_epistemic_states(2);
    std::set<std::uint32_t> masks;
    for (const auto &e : catalog) {
        masks.insert(e.support().mask);
    }
    for (auto key : two_toybit_group().elements()) {
        ToyTransformation t(ToyGroup::unpack(key), 2);
        for (const auto &e : catalog) {
            ASSERT_TRUE(masks.contains(t(e.support()).mask));
        }
    }
}

TEST(Measurement, PartitionsAreValidated) {
    EXPECT_THROW(ToyMeasurement({EpistemicState(Support::of_labels({1, 2})), EpistemicState(Support::of_labels({1, 3}))}),
                 InvalidValueError);
    EXPECT_THROW(ToyMeasurement::by_name("w"), ParseError);
}

TEST(Measurement, UpdateRedrawsWithinTheObservedBlock) {
    std::mt19937_64 rng(301);
    int ones = 0;
    const int draws = 4000;
    for (int k = 0; k < draws; ++k) {
        auto r = measure(OnticState({1}), ToyMeasurement::z(), rng);
        EXPECT_EQ(r.outcome, 0u);
        EXPECT_EQ(r.updated.to_string(), "1∨2");
        int l = r.new_ontic.label(0);
        ASSERT_TRUE(l == 1 || l == 2);
        ones += l == 1 ? 1 : 0;
    }
    EXPECT_NEAR(static_cast<double>(ones) / draws, 0.5, 0.05);
}

TEST(Measurement, OutcomeProbabilitiesCountSupportOverlap) {
    auto p = outcome_probabilities(EpistemicState(Support::of_labels({1, 2})), ToyMeasurement::x());
    EXPECT_EQ(p[0], Rational(1, 2));
    EXPECT_EQ(p[1], Rational(1, 2));
    auto q = outcome_probabilities(EpistemicState(Support::of_labels({1, 2})), ToyMeasurement::z());
    EXPECT_EQ(q[0], Rational{1});
}

TEST(Retrodiction, OutcomeSinglesOutTheOnticState) {
    auto t = retrodiction(EpistemicState(Support::of_labels({1, 2})), ToyMeasurement::x());
    EXPECT_EQ(t.conditional[0][0], Rational{1});
    EXPECT_EQ(t.conditional[1][1], Rational{1});
    EXPECT_EQ(t.marginal[0], Rational(1, 2));
    EXPECT_EQ(t.marginal[1], Rational(1, 2));
    EXPECT_EQ(t.marginal[2], Rational{0});
}

TEST(Consistency, FourCycleIsAParadox) {
    auto r = ctc_consistent_states(ToyTransformation::single("(1 2 3 4)"));
    EXPECT_TRUE(r.paradox);
    EXPECT_TRUE(r.ctc_states.empty());
}

TEST(Consistency, ThreeCycleForcesStateFour) {
    auto r = ctc_consistent_states(ToyTransformation::single("(1 2 3)(4)"));
    EXPECT_FALSE(r.paradox);
    EXPECT_EQ(r.ctc_states, std::set<int>{4});
    EXPECT_TRUE(r.kb_violation);
}

TEST(Consistency, LocalFourCycleOnTheCtcToybitIsAParadox) {
    auto r = ctc_consistent_states(ToyTransformation::local_on(1, cyc("(1 2 3 4)")), 1);
    EXPECT_TRUE(r.paradox);
}

TEST(Consistency, TcnBoundaryAndForcedStates) {
    auto t = ToyTransformation::tcn(1, 0);
    auto free = ctc_consistent_states(t, 1);
    EXPECT_EQ(free.boundary_cr_states, (std::set<int>{1, 3}));
    auto obs = ctc_consistent_states(t, 1, EpistemicState(Support::of_labels({1, 2})));
    EXPECT_EQ(obs.forced_cr_states, std::set<int>{1});
    EXPECT_EQ(obs.cr_output_states, (std::set<int>{1, 3}));
    EXPECT_EQ(obs.cr_output_by_ctc.at(1), std::set<int>{1});
    EXPECT_EQ(obs.cr_output_by_ctc.at(2), std::set<int>{1});
    EXPECT_EQ(obs.cr_output_by_ctc.at(3), std::set<int>{3});
    EXPECT_EQ(obs.cr_output_by_ctc.at(4), std::set<int>{3});
}

TEST(Consistency, CtcFactorZeroMirrorsFactorOne) {
    auto a = ctc_consistent_states(ToyTransformation::tcn(1, 0), 1);
    auto b = ctc_consistent_states(ToyTransformation::tcn(0, 1), 0);
    EXPECT_EQ(a.boundary_cr_states, b.boundary_cr_states);
    EXPECT_EQ(a.ctc_states, b.ctc_states);
}

TEST(Consistency, SwapForcesTheCtcToMatchTheCr) {
    auto r = ctc_consistent_states(ToyTransformation::swap(), 1);
    std::set<ontic::StatePair> expected{{0, 0}, {1, 1}, {2, 2}, {3, 3}};
    EXPECT_EQ(r.joint.consistent_pairs, expected);
}

TEST(Mixture, PrimedAndUnprimedInteractionsAverageToTheObservedState) {
    auto r = primed_interaction_analysis();
    EXPECT_EQ(r.t2.forced_cr_states, std::set<int>{1});
    EXPECT_EQ(r.t2_primed.forced_cr_states, std::set<int>{2});
    EXPECT_EQ(r.mixture.probabilities[0], Rational(1, 2));
    EXPECT_EQ(r.mixture.probabilities[1], Rational(1, 2));
    EXPECT_EQ(r.mixture.probabilities[2], Rational{0});
    EXPECT_EQ(r.mixture.support.to_string(), "1∨2");
    EXPECT_TRUE(r.mixture.valid);
}

TEST(Invariants, SigmaXAnalogHasThreeInvariantStates) {
    EXPECT_EQ(names(invariant_epistemic_states(ToyTransformation::single("(1 3)(2 4)"))),
              (std::set<std::string>{"1∨3", "2∨4", "1∨2∨3∨4"}));
}

TEST(Invariants, FourCycleKeepsOnlyTheFullState) {
    EXPECT_EQ(names(invariant_epistemic_states(ToyTransformation::single("(1 2 3 4)"))),
              (std::set<std::string>{"1∨2∨3∨4"}));
}

TEST(Invariants, FullStateIsInvariantUnderAllOfS4) {
    std::vector<std::size_t> image{0, 1, 2, 3};
    do {
        ToyTransformation t(Permutation(image), 1);
        EXPECT_EQ(t(Support::full(1)), Support::full(1));
    } while (std::next_permutation(image.begin(), image.end()));
}

TEST(Concealment, EpistemicReportsForSingleToybits) {
    auto sx = epistemic_concealment_report(ToyTransformation::single("(1 3)(2 4)"));
    EXPECT_TRUE(sx.concealed);
    auto sz = epistemic_concealment_report(ToyTransformation::single("(1 2)(3 4)"));
    EXPECT_TRUE(sz.concealed);
    EXPECT_EQ(names(sz.witnesses), (std::set<std::string>{"1∨2", "3∨4", "1∨2∨3∨4"}));
    auto three = epistemic_concealment_report(ToyTransformation::single("(1 2 3)(4)"));
    EXPECT_FALSE(three.paradox);
    EXPECT_FALSE(three.concealed);
    EXPECT_TRUE(three.minimum_knowledge_invariant);
}

TEST(SwapCorrelation, ToyModelKeepsWhatTheDeutschModelLoses) {
    auto r = swap_correlation_scenario();
    EXPECT_TRUE(r.consistency_forces_equal);
    EXPECT_EQ(r.ab_before.support(), r.ab_after.support());
    EXPECT_EQ(r.ab_after.to_string(), "1.1∨2.2∨3.3∨4.4");
    EXPECT_TRUE(r.correlation_preserved);
    EXPECT_TRUE(r.deutsch_information_destroyed);
    EXPECT_TRUE(r.contrast_holds);
}

TEST(SwapCorrelation, EveryCorrelatedGraphSurvivesTheSwap) {
    auto consistency = ctc_consistent_states(ToyTransformation::swap(), 1);
    std::vector<std::size_t> image{0, 1, 2, 3};
    do {
        auto before = prepare_correlated(Permutation(image));
        EXPECT_EQ(propagate_correlated(before, consistency), before.support());
    } while (std::next_permutation(image.begin(), image.end()));
}

namespace {

std::vector<Permutation> s4() {
    std::vector<std::size_t> image{0, 1, 2, 3};
    std::vector<Permutation> out;
    do {
        out.emplace_back(image);
    } while (std::next_permutation(image.begin(), image.end()));
    return out;
}

}  // namespace

TEST(ZxEncoding, PartitionsAreLevelSets) {
    std::set<std::pair<int, int>> seen;
    for (int l = 1; l <= 4; ++l) {
        ZX p = zx_encoding(l);
        seen.insert({p.z, p.x});
        std::size_t i = static_cast<std::size_t>(l - 1);
        EXPECT_EQ(ToyMeasurement::z().block_of(i), static_cast<std::size_t>(p.z));
        EXPECT_EQ(ToyMeasurement::x().block_of(i), static_cast<std::size_t>(p.x));
        EXPECT_EQ(ToyMeasurement::y().block_of(i), static_cast<std::size_t>(p.z ^ p.x));
    }
    EXPECT_EQ(seen.size(), 4u);
}

TEST(Transformations, SingleToybitPermutationsPermuteTheValidStates) {
    std::set<std::uint32_t> valid;
    for (const auto &e : valid_epistemic_states(1)) {
        valid.insert(e.support().mask);
    }
    for (const auto &p : s4()) {
        ToyTransformation t(p, 1);
        std::set<std::uint32_t> images;
        for (auto m : valid) {
            images.insert(t(Support{1, m}).mask);
        }
        EXPECT_EQ(images, valid);
    }
}

TEST(Invariants, FullStateInvariantAcrossTheTwoToybitGroup) {
    std::size_t k = 0;
    for (auto key : two_toybit_group().elements()) {
        if (k++ % 37 != 0) {
            continue;
        }
        ToyTransformation t(ToyGroup::unpack(key), 2);
        EXPECT_EQ(t(Support::full(2)), Support::full(2));
    }
}

TEST(Measurement, OutcomeContainsTheOnticStateAndRepeats) {
    std::mt19937_64 rng(307);
    for (const char *basis : {"z", "x", "y"}) {
        auto m = ToyMeasurement::by_name(basis);
        for (int l = 1; l <= 4; ++l) {
            for (int k = 0; k < 20; ++k) {
                auto first = measure(OnticState({l}), m, rng);
                EXPECT_TRUE(first.updated.support().contains(static_cast<std::size_t>(l - 1)));
                EXPECT_TRUE(first.updated.support().contains(first.new_ontic.index()));
                auto second = measure(first.new_ontic, m, rng);
                EXPECT_EQ(second.outcome, first.outcome);
            }
        }
    }
}

TEST(Concealment, NoFixedPointMeansConcealed) {
    for (const auto &p : s4()) {
        auto r = epistemic_concealment_report(ToyTransformation(p, 1));
        EXPECT_EQ(r.concealed, r.fixed_points.empty());
        EXPECT_TRUE(r.minimum_knowledge_invariant);
    }
    std::size_t k = 0;
    for (auto key : two_toybit_group().elements()) {
        if (k++ % 53 != 0) {
            continue;
        }
        auto r = epistemic_concealment_report(ToyTransformation(ToyGroup::unpack(key), 2));
        EXPECT_EQ(r.concealed, r.fixed_points.empty());
    }
}

TEST(Consistency, LocalProductsAgreeWithSingleToybitAnalysis) {
    for (const auto &a : s4()) {
        for (const auto &b : s4()) {
            auto joint = ctc_consistent_states(ToyTransformation::local(a, b), 1);
            auto single = ctc_consistent_states(ToyTransformation(b, 1));
            ASSERT_EQ(joint.ctc_states, single.ctc_states);
            ASSERT_EQ(joint.paradox, single.paradox);
        }
    }
}

TEST(Retrodiction, MarginalIsUniformOnTheSupport) {
    for (const auto &e : valid_epistemic_states(1)) {
        Rational each(1, static_cast<std::int64_t>(e.support().size()));
        for (const char *basis : {"z", "x", "y"}) {
            auto t = retrodiction(e, ToyMeasurement::by_name(basis));
            for (std::size_t o = 0; o < 4; ++o) {
                EXPECT_EQ(t.marginal[o], e.support().contains(o) ? each : Rational{0});
            }
        }
    }
}
