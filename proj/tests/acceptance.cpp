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

// Acceptance checks: one PASS/FAIL line per criterion, nonzero exit when any fails.

#include <sys/wait.h>

#include <algorithm>
#include <array>
#include <chrono>
#include <cstdio>
#include <functional>
#include <iostream>
#include <random>
#include <set>
#include <sstream>
#include <string>

#include "ctclab/ctclab.hpp"
#include "support.hpp"

using namespace ctclab;

namespace {

struct Verdict {
    bool pass = true;
    std::string detail;

    void require(bool ok, const std::string &what) {
        if (!ok) {
            pass = false;
            detail += (detail.empty() ? "" : "; ") + what;
        }
    }
};

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

std::string fmt(double x) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.3g", x);
    return buf;
}

Verdict bell_swap() {
    Verdict v;
    auto t0 = Clock::now();
    BellSwapReport r = bell_swap_scenario();
    double elapsed = seconds_since(t0);
    double sigma_err = max_abs_diff(r.rho_ctc.matrix(), DensityMatrix::maximally_mixed(2).matrix());
    v.require(sigma_err <= 1e-9, "CTC state differs from I/2 by " + fmt(sigma_err));
    v.require(r.residual <= 1e-9, "residual " + fmt(r.residual));
    v.require(r.distance_from_maximally_mixed <= 1e-9, "AB output trace distance " + fmt(r.distance_from_maximally_mixed));
    v.require(std::abs(r.mutual_information_before - 2.0) <= 1e-9, "MI before " + fmt(r.mutual_information_before));
    v.require(std::abs(r.mutual_information_after) <= 1e-9, "MI after " + fmt(r.mutual_information_after));
    v.require(elapsed < 1.0, "took " + fmt(elapsed) + " s");
    if (v.pass) {
        v.detail = "residual " + fmt(r.residual) + ", MI " + fmt(r.mutual_information_before) + " -> " +
                   fmt(r.mutual_information_after) + ", " + fmt(elapsed) + " s";
    }
    return v;
}

Verdict random_unitaries() {
    Verdict v;
    std::mt19937_64 rng(20260101);
    auto t0 = Clock::now();
    double worst = 0.0;
    int failures = 0;
    for (int k = 0; k < 200; ++k) {
        Unitary u(fixtures::random_unitary(4, rng));
        ComplexMatrix rho = fixtures::random_density(2, rng);
        if (k % 2 == 1) {
            // Alternate with pure CR states.
            auto eig = hermitian_eigendecomposition(rho);
            std::vector<Complex> psi{eig.vectors(0, 1), eig.vectors(1, 1)};
            rho = ComplexMatrix::outer(psi, psi);
        }
        DeutschChannel ch(u, DensityMatrix(rho));
        try {
            DeutschRun run = run_deutsch_circuit(ch);
            worst = std::max(worst, run.residual);
            failures += run.residual <= 1e-8 ? 0 : 1;
        } catch (const std::exception &e) {
            ++failures;
            v.require(false, std::string("case ") + std::to_string(k) + ": " + e.what());
        }
    }
    double elapsed = seconds_since(t0);
    v.require(failures == 0, std::to_string(failures) + " cases above 1e-8");
    v.require(elapsed < 30.0, "took " + fmt(elapsed) + " s");
    if (v.pass) {
        v.detail = "worst residual " + fmt(worst) + ", " + fmt(elapsed) + " s";
    }
    return v;
}

Verdict cnot_max_entropy() {
    Verdict v;
    DeutschChannel ch(gates::cnot(), DensityMatrix::basis_state(2, 1));
    FixedPointSet fps = fixed_point_set(ch);
    MaxEntropyResult best = maximize_entropy(fps);
    double dist = trace_distance(best.state.matrix(), DensityMatrix::maximally_mixed(2).matrix());
    v.require(dist <= 1e-9, "trace distance from I/2 " + fmt(dist));
    double worst_gain = -1.0;
    std::vector<ComplexMatrix> directions = fps.basis;
    for (const auto &b : hermitian_basis(2)) {
        directions.push_back(b);
    }
    for (const auto &dir : directions) {
        for (double step : {1e-3, -1e-3}) {
            ComplexMatrix moved = fixtures::project_to_states(best.state.matrix() + dir * Complex{step, 0.0});
            double gain = von_neumann_entropy(DensityMatrix(moved)) - best.entropy;
            worst_gain = std::max(worst_gain, gain);
        }
    }
    v.require(worst_gain <= 1e-9, "a perturbation raised entropy by " + fmt(worst_gain));
    if (v.pass) {
        v.detail = "distance " + fmt(dist) + ", largest entropy change " + fmt(worst_gain) + " over " +
                   std::to_string(2 * directions.size()) + " perturbations";
    }
    return v;
}

Verdict classical_bitflip() {
    Verdict v;
    auto flip = ontic::Permutation::from_cycles("(1 2)", 2);
    auto report = ontic::concealment_report(flip);
    auto uniform = ontic::ExactDistribution::uniform(2);
    v.require(report.paradox, "no paradox");
    v.require(ontic::pushforward(uniform, flip) == uniform, "uniform(2) not exactly stationary");
    v.require(report.concealed_paradox, "not concealed");
    return v;
}

Verdict toy_single_cycles() {
    Verdict v;
    auto four = toy::ctc_consistent_states(toy::ToyTransformation::single("(1 2 3 4)"));
    v.require(four.paradox, "(1234) admits a consistent state");
    auto three = toy::ctc_consistent_states(toy::ToyTransformation::single("(1 2 3)(4)"));
    v.require(three.ctc_states == std::set<int>{4}, "(123)(4) consistent set is not {4}");
    v.require(three.kb_violation, "(123)(4) knowledge-balance violation not flagged");
    return v;
}

Verdict tcn_family() {
    Verdict v;
    auto tcn = toy::ToyTransformation::tcn(1, 0);
    toy::EpistemicState observed(toy::Support::of_labels({1, 2}));
    auto free = toy::ctc_consistent_states(tcn, 1);
    v.require(free.boundary_cr_states == std::set<int>{1, 3}, "boundary CR states are not {1,3}");
    auto forced = toy::ctc_consistent_states(tcn, 1, observed);
    v.require(forced.forced_cr_states == std::set<int>{1}, "forced state under 1∨2 is not {1}");
    auto primed = toy::ctc_consistent_states(toy::primed_tcn(), 1, observed);
    v.require(primed.forced_cr_states == std::set<int>{2}, "primed interaction does not force {2}");
    auto mix = toy::primed_interaction_analysis().mixture;
    bool half_half = mix.probabilities[0] == Rational(1, 2) && mix.probabilities[1] == Rational(1, 2) &&
                     mix.probabilities[2] == Rational{0} && mix.probabilities[3] == Rational{0};
    v.require(half_half && mix.support.to_string() == "1∨2" && mix.valid, "mixture is not exactly 1∨2");
    v.require(forced.cr_output_states == std::set<int>{1, 3}, "post-interaction CR states are not {1,3}");
    bool partition = forced.cr_output_by_ctc.at(1) == std::set<int>{1} && forced.cr_output_by_ctc.at(2) == std::set<int>{1} &&
                     forced.cr_output_by_ctc.at(3) == std::set<int>{3} && forced.cr_output_by_ctc.at(4) == std::set<int>{3};
    v.require(partition, "CR output does not follow the CTC partition 1∨2 | 3∨4");
    return v;
}

Verdict sigma_x_invariants() {
    Verdict v;
    std::set<std::string> got;
    for (const auto &e : toy::invariant_epistemic_states(toy::ToyTransformation::single("(1 3)(2 4)"))) {
        got.insert(e.to_string());
    }
    v.require(got == std::set<std::string>{"1∨3", "2∨4", "1∨2∨3∨4"}, "invariant states differ");
    std::vector<std::size_t> image{0, 1, 2, 3};
    int invariant = 0;
    do {
        toy::ToyTransformation t(ontic::Permutation(image), 1);
        invariant += t(toy::Support::full(1)) == toy::Support::full(1) ? 1 : 0;
    } while (std::next_permutation(image.begin(), image.end()));
    v.require(invariant == 24, "full state invariant under only " + std::to_string(invariant) + " of 24");
    return v;
}

Verdict swap_contrast() {
    Verdict v;
    auto r = toy::swap_correlation_scenario();
    v.require(r.ab_after.support() == r.ab_before.support(), "toy SWAP changed the correlated state");
    v.require(r.deutsch.mutual_information_after <= 1e-9 && r.deutsch.distance_from_maximally_mixed <= 1e-9,
              "Deutsch Bell-swap kept correlation");
    v.require(r.contrast_holds, "contrast flag not set");
    return v;
}

Verdict group_closure() {
    Verdict v;
    auto t0 = Clock::now();
    toy::ToyGroup g = toy::generate_two_toybit_group();
    v.require(g.is_closed(), "group not closed");
    auto catalog = toy::valid_epistemic_states(2);
    std::set<std::uint32_t> valid;
    for (const auto &e : catalog) {
        valid.insert(e.support().mask);
    }
    std::size_t bad = 0;
    for (auto key : g.elements()) {
        ontic::Permutation p = toy::ToyGroup::unpack(key);
        for (const auto &e : catalog) {
            toy::Support img{2, 0};
            for (auto i : e.support().points()) {
                img.mask |= 1u << p(i);
            }
            bad += valid.contains(img.mask) && toy::is_valid_epistemic(img) ? 0 : 1;
        }
    }
    v.require(bad == 0, std::to_string(bad) + " images of valid states are invalid");
    auto tcn = toy::ToyTransformation::tcn(0, 1).perm();
    v.require(ontic::compose(tcn, tcn).is_identity(), "T_CN is not an involution");
    double elapsed = seconds_since(t0);
    v.require(elapsed < 60.0, "took " + fmt(elapsed) + " s");
    if (v.pass) {
        v.detail = "order " + std::to_string(g.order()) + ", " + std::to_string(catalog.size()) + " valid states, " +
                   fmt(elapsed) + " s";
    }
    return v;
}

std::pair<int, std::string> run_cli(const std::string &args) {
    std::string cmd = std::string("'") + CTCLAB_CLI + "' " + args + " 2>/dev/null";
    std::string out;
    FILE *pipe = popen(cmd.c_str(), "r");
    if (!pipe) {
        return {-1, out};
    }
    std::array<char, 4096> buf;
    std::size_t n;
    while ((n = fread(buf.data(), 1, buf.size(), pipe)) > 0) {
        out.append(buf.data(), n);
    }
    int status = pclose(pipe);
    return {WIFEXITED(status) ? WEXITSTATUS(status) : -1, out};
}

Verdict repro_all() {
    Verdict v;
    auto [code_a, out_a] = run_cli("repro all --format json");
    auto [code_b, out_b] = run_cli("repro all --format json");
    v.require(code_a == 0 && code_b == 0, "exit codes " + std::to_string(code_a) + ", " + std::to_string(code_b));
    v.require(!out_a.empty() && out_a == out_b, "JSON differs between runs");
    try {
        auto j = nlohmann::json::parse(out_a);
        v.require(io::canonical_dump(j) + "\n" == out_a, "output is not canonical JSON");
    } catch (const std::exception &e) {
        v.require(false, std::string("unparseable output: ") + e.what());
    }
    if (v.pass) {
        v.detail = std::to_string(out_a.size()) + " identical bytes, hash " + io::content_hash(out_a);
    }
    return v;
}

}  // namespace

int main() {
    const std::vector<std::pair<std::string, std::function<Verdict()>>> criteria{
        {"Bell pair half swapped onto a CTC loses all correlation", bell_swap},
        {"200 random unitaries reach a fixed point within 1e-8", random_unitaries},
        {"CNOT with CR in |1> selects I/2 and no perturbation gains entropy", cnot_max_entropy},
        {"classical bit flip is a concealed paradox", classical_bitflip},
        {"toy (1234) paradox and (123)(4) forced state 4", toy_single_cycles},
        {"T_CN boundary, forced, primed and mixed states", tcn_family},
        {"(13)(24) invariant states and S4 invariance of the full state", sigma_x_invariants},
        {"toy SWAP keeps correlation the Deutsch SWAP destroys", swap_contrast},
        {"two-toybit group closure preserves validity", group_closure},
        {"repro all succeeds with byte-stable canonical JSON", repro_all},
    };
    int failed = 0;
    for (std::size_t i = 0; i < criteria.size(); ++i) {
        Verdict v;
        try {
            v = criteria[i].second();
        } catch (const std::exception &e) {
            v.pass = false;
            v.detail = std::string("exception: ") + e.what();
        }
        failed += v.pass ? 0 : 1;
        std::cout << (v.pass ? "PASS" : "FAIL") << " criterion " << (i + 1) << ": " << criteria[i].first;
        if (!v.detail.empty()) {
            std::cout << " (" << v.detail << ")";
        }
        std::cout << "\n";
    }
    std::cout << (criteria.size() - failed) << "/" << criteria.size() << " acceptance criteria passed\n";
    return failed == 0 ? 0 : 1;
}
