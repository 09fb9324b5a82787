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

#include <chrono>
#include <cmath>
#include <cstdint>
#include <functional>
#include <future>
#include <optional>
#include <random>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include <nlohmann/json.hpp>

#include "ctclab/deutsch.hpp"
#include "ctclab/errors.hpp"
#include "ctclab/json_io.hpp"
#include "ctclab/ontic.hpp"
#include "ctclab/quantum.hpp"
#include "ctclab/toy.hpp"

namespace ctclab::scenario {

using nlohmann::json;

enum class Model { Classical, Deutsch, Toy };

inline std::string to_string(Model m) {
    switch (m) {
        case Model::Classical: return "classical";
        case Model::Deutsch: return "deutsch";
        case Model::Toy: return "toy";
    }
    return "?";
}

struct ClassicalSetup {
    std::size_t cr_size = 1;
    std::size_t ctc_size = 1;
    ontic::Permutation interaction;
    /// 0-based CR states allowed as input.
    std::optional<std::set<std::size_t>> cr_constraint;
    /// Optional CTC distribution to push through the dynamics (cr_size = 1 only).
    std::optional<ontic::Distribution> distribution;
};

/// Unitary family for parameter sweeps.
struct DeutschSweep {
    std::string family;  // "partial_swap"
    std::string parameter = "theta";
    std::vector<double> values;
};

struct DeutschSetup {
    Unitary unitary;
    DensityMatrix rho_cr_in;
    /// State on R ⊗ CR when the CR system is entangled with a bystander R.
    std::optional<DensityMatrix> reference_state;
    std::size_t d_ref = 0;
    FixedPointOptions fixed_point;
    std::optional<DeutschSweep> sweep;
};

struct PreMeasurement {
    std::string basis;
    /// Observed block; the analysis covers every outcome when empty.
    std::optional<std::size_t> block;
};

struct ToySetup {
    int n_toybits = 1;
    std::size_t ctc_factor = 1;
    toy::ToyTransformation transform = toy::ToyTransformation::identity(1);
    /// Interactions the observer cannot distinguish, mixed with equal weight.
    std::vector<toy::ToyTransformation> alternatives;
    std::optional<PreMeasurement> pre_measurement;
    /// π for the spectator correlation {(o, π(o))} between toybit A and the CR toybit.
    std::optional<ontic::Permutation> correlated_with;
};

/// A single CR wire, a single CTC wire and one interaction, in one of the three models.
struct Scenario {
    Model model = Model::Classical;
    std::string id;
    /// The document the scenario was parsed from; its canonical form is hashed.
    json source;
    std::variant<ClassicalSetup, DeutschSetup, ToySetup> setup;
};

struct Provenance {
    std::string scenario_hash;
    std::uint64_t seed = 0;
    json tolerances = json::object();
};

/// Structured verdict of one scenario run.
struct AnalysisReport {
    Model model = Model::Classical;
    std::string id;
    json consistent_set = json::array();
    bool paradox = false;
    bool concealed_paradox = false;
    /// Toy model only.
    std::optional<bool> kb_violation;
    json concealment_witnesses = json::array();
    json boundary_conditions = json::object();
    json forced_states = json::array();
    json output_states = json::object();
    /// Deutsch model only.
    json entropy = json::object();
    json mutual_information = json::object();
    json details = json::object();
    Provenance provenance;

    json to_json() const {
        json j{
            {"model", to_string(model)},
            {"consistent_set", consistent_set},
            {"paradox", paradox},
            {"concealed_paradox", concealed_paradox},
            {"concealment_witnesses", concealment_witnesses},
            {"boundary_conditions", boundary_conditions},
            {"forced_states", forced_states},
            {"output_states", output_states},
            {"details", details},
            {"provenance",
             {{"scenario_hash", provenance.scenario_hash},
              {"seed", provenance.seed},
              {"tolerances", provenance.tolerances}}},
        };
        if (!id.empty()) {
            j["id"] = id;
        }
        if (kb_violation) {
            j["kb_violation"] = *kb_violation;
        }
        if (!entropy.empty()) {
            j["entropy"] = entropy;
        }
        if (!mutual_information.empty()) {
            j["mutual_information"] = mutual_information;
        }
        return j;
    }
};

/// paradox ⇒ empty consistent set; concealed ⇒ paradox with a listed witness.
inline std::vector<std::string> invariant_violations(const AnalysisReport &r) {
    std::vector<std::string> v;
    bool empty_set = r.consistent_set.is_array() && r.consistent_set.empty();
    if (r.paradox && !empty_set) {
        v.emplace_back("paradox reported with a non-empty consistent set");
    }
    if (!r.paradox && empty_set) {
        v.emplace_back("empty consistent set without a paradox flag");
    }
    if (r.concealed_paradox && !r.paradox) {
        v.emplace_back("concealed paradox without a paradox");
    }
    if (r.concealed_paradox && r.concealment_witnesses.empty()) {
        v.emplace_back("concealed paradox without a witness");
    }
    return v;
}

// ---------------------------------------------------------------------------
// Parsing

namespace detail {

inline const json &require(const json &j, const char *key, const char *where) {
    if (!j.is_object() || !j.contains(key)) {
        throw ParseError(std::string(where) + ": missing \"" + key + "\"");
    }
    return j.at(key);
}

inline std::size_t require_size(const json &j, const char *key, const char *where) {
    const json &v = require(j, key, where);
    if (!v.is_number_integer() || v.get<std::int64_t>() <= 0) {
        throw ParseError(std::string(where) + ": \"" + key + "\" must be a positive integer");
    }
    return v.get<std::size_t>();
}

/// Gate name or matrix object.
inline Unitary unitary_from_json(const json &j, std::size_t expected_dim) {
    if (j.is_string()) {
        auto name = j.get<std::string>();
        if (name == "swap") {
            return gates::swap(2);
        }
        if (name == "cnot") {
            return gates::cnot();
        }
        if (name == "cnot_reversed") {
            return gates::cnot_reversed();
        }
        if (name == "identity") {
            return gates::identity(expected_dim);
        }
        throw ParseError("unknown unitary \"" + name + "\" (expected swap, cnot, cnot_reversed, identity or a matrix)");
    }
    try {
        return Unitary(io::matrix_from_json(j));
    } catch (const InvalidValueError &e) {
        throw ParseError(e.what());
    } catch (const DimensionError &e) {
        throw ParseError(e.what());
    }
}

/// "maximally_mixed", "ket:<i>" or a matrix object.
inline DensityMatrix state_from_json(const json &j, std::size_t dim) {
    if (j.is_string()) {
        auto name = j.get<std::string>();
        if (name == "maximally_mixed") {
            return DensityMatrix::maximally_mixed(dim);
        }
        if (name.rfind("ket:", 0) == 0) {
            std::size_t idx = std::stoul(name.substr(4));
            if (idx >= dim) {
                throw ParseError("state \"" + name + "\" outside dimension " + std::to_string(dim));
            }
            return DensityMatrix::basis_state(dim, idx);
        }
        throw ParseError("unknown state \"" + name + "\"");
    }
    try {
        return DensityMatrix(io::matrix_from_json(j));
    } catch (const InvalidValueError &e) {
        throw ParseError(e.what());
    } catch (const DimensionError &e) {
        throw ParseError(e.what());
    }
}

inline Unitary sweep_unitary(const DeutschSweep &s, double value) {
    if (s.family == "partial_swap") {
        return gates::partial_swap(value);
    }
    throw ParseError("unknown sweep family \"" + s.family + "\"");
}

inline ClassicalSetup parse_classical(const json &j) {
    ClassicalSetup s;
    s.ctc_size = require_size(j, "ctc_size", "classical scenario");
    s.cr_size = j.contains("cr_size") ? require_size(j, "cr_size", "classical scenario") : 1;
    s.interaction = io::permutation_from_json(require(j, "permutation", "classical scenario"));
    if (s.interaction.size() != s.cr_size * s.ctc_size) {
        throw ParseError("classical scenario: permutation acts on " + std::to_string(s.interaction.size()) +
                         " states, expected cr_size × ctc_size = " + std::to_string(s.cr_size * s.ctc_size));
    }
    if (j.contains("cr_constraint")) {
        std::set<std::size_t> allowed;
        for (const auto &x : j["cr_constraint"]) {
            if (!x.is_number_integer() || x.get<std::int64_t>() < 0 || x.get<std::size_t>() >= s.cr_size) {
                throw ParseError("classical scenario: cr_constraint entries must be CR states 0.." +
                                 std::to_string(s.cr_size - 1));
            }
            allowed.insert(x.get<std::size_t>());
        }
        s.cr_constraint = std::move(allowed);
    }
    if (j.contains("distribution")) {
        if (s.cr_size != 1) {
            throw ParseError("classical scenario: distribution requires cr_size = 1");
        }
        std::vector<double> probs;
        for (const auto &x : j["distribution"]) {
            if (!x.is_number()) {
                throw ParseError("classical scenario: distribution entries must be numbers");
            }
            probs.push_back(x.get<double>());
        }
        if (probs.size() != s.ctc_size) {
            throw ParseError("classical scenario: distribution must have ctc_size entries");
        }
        try {
            s.distribution.emplace(std::move(probs));
        } catch (const InvalidValueError &e) {
            throw ParseError(e.what());
        }
    }
    return s;
}

inline DeutschSetup parse_deutsch(const json &j) {
    const json &ch = require(j, "channel", "deutsch scenario");
    std::size_t d_cr = require_size(ch, "d_cr", "deutsch channel");
    std::size_t d_ctc = require_size(ch, "d_ctc", "deutsch channel");
    std::optional<DeutschSweep> sweep;
    if (j.contains("sweep")) {
        const json &sw = j["sweep"];
        DeutschSweep s;
        s.family = require(sw, "family", "sweep").get<std::string>();
        if (sw.contains("parameter")) {
            s.parameter = sw["parameter"].get<std::string>();
        }
        if (sw.contains("values")) {
            s.values = sw["values"].get<std::vector<double>>();
        } else {
            double from = require(sw, "from", "sweep").get<double>();
            double to = require(sw, "to", "sweep").get<double>();
            std::size_t steps = require_size(sw, "steps", "sweep");
            for (std::size_t k = 0; k < steps; ++k) {
                s.values.push_back(steps == 1 ? from : from + (to - from) * static_cast<double>(k) / (steps - 1));
            }
        }
        if (s.values.empty()) {
            throw ParseError("sweep: no parameter values");
        }
        sweep = std::move(s);
    }

    Unitary u = sweep ? sweep_unitary(*sweep, sweep->values.front())
                      : unitary_from_json(require(ch, "unitary", "deutsch channel"), d_cr * d_ctc);
    if (u.dim() != d_cr * d_ctc) {
        throw ParseError("deutsch channel: unitary has dimension " + std::to_string(u.dim()) + ", expected d_cr·d_ctc = " +
                         std::to_string(d_cr * d_ctc));
    }

    std::optional<DensityMatrix> reference;
    std::size_t d_ref = 0;
    if (j.contains("reference")) {
        if (j["reference"] != "bell" || d_cr != 2) {
            throw ParseError("deutsch scenario: only reference \"bell\" with d_cr = 2 is supported");
        }
        reference = DensityMatrix::pure(gates::bell_phi_plus());
        d_ref = 2;
    }
    DensityMatrix rho = reference ? partial_trace(*reference, {2, 2}, 1)
                                  : state_from_json(require(ch, "rho_cr_in", "deutsch channel"), d_cr);
    if (rho.dim() != d_cr) {
        throw ParseError("deutsch channel: rho_cr_in has dimension " + std::to_string(rho.dim()) + ", expected " +
                         std::to_string(d_cr));
    }
    FixedPointOptions fp;
    if (j.contains("tolerance")) {
        fp.tol = j["tolerance"].get<double>();
    }
    if (j.contains("max_iterations")) {
        fp.max_iter = require_size(j, "max_iterations", "deutsch scenario");
    }
    return DeutschSetup{std::move(u), std::move(rho), std::move(reference), d_ref, fp, std::move(sweep)};
}

/// "(1 2 3 4)", "identity", "tcn", "swap", {"compose": [...]}, {"local": [c0, c1]},
/// {"tcn": {"control": i, "target": j}}. A cycle string on two toybits acts on the CTC toybit;
/// plain "tcn" uses the CTC toybit as control. Compose lists apply left to right.
inline toy::ToyTransformation toy_transform_from_json(const json &j, int n_toybits, std::size_t ctc_factor) {
    using toy::ToyTransformation;
    auto cycles = [](const json &c) {
        if (!c.is_string()) {
            throw ParseError("toy transform: cycle notation must be a string");
        }
        return ontic::Permutation::from_cycles(c.get<std::string>(), 4);
    };
    try {
        if (j.is_string()) {
            auto s = j.get<std::string>();
            if (s == "identity") {
                return ToyTransformation::identity(n_toybits);
            }
            if (s == "tcn" || s == "swap") {
                if (n_toybits != 2) {
                    throw ParseError("toy transform \"" + s + "\" needs two toybits");
                }
                return s == "swap" ? ToyTransformation::swap() : ToyTransformation::tcn(ctc_factor, 1 - ctc_factor);
            }
            auto p = cycles(j);
            return n_toybits == 1 ? ToyTransformation(p, 1) : ToyTransformation::local_on(ctc_factor, p);
        }
        if (j.is_object() && j.contains("compose")) {
            const json &list = j["compose"];
            if (!list.is_array() || list.empty()) {
                throw ParseError("toy transform: compose needs a non-empty list");
            }
            ToyTransformation t = toy_transform_from_json(list[0], n_toybits, ctc_factor);
            for (std::size_t k = 1; k < list.size(); ++k) {
                t = t.then(toy_transform_from_json(list[k], n_toybits, ctc_factor));
            }
            return t;
        }
        if (j.is_object() && j.contains("local")) {
            const json &pair = j["local"];
            if (n_toybits != 2 || !pair.is_array() || pair.size() != 2) {
                throw ParseError("toy transform: local needs two cycle strings on two toybits");
            }
            return ToyTransformation::local(cycles(pair[0]), cycles(pair[1]));
        }
        if (j.is_object() && j.contains("tcn")) {
            if (n_toybits != 2) {
                throw ParseError("toy transform: tcn needs two toybits");
            }
            const json &t = j["tcn"];
            return ToyTransformation::tcn(require(t, "control", "tcn").get<std::size_t>(),
                                          require(t, "target", "tcn").get<std::size_t>());
        }
    } catch (const InvalidValueError &e) {
        throw ParseError(std::string("toy transform: ") + e.what());
    }
    throw ParseError("toy transform: unrecognized form " + j.dump());
}

/// "z", "z:first", "z:second", "z:0", "z:1" or {"basis": "z", "block": 0}.
inline PreMeasurement pre_measurement_from_json(const json &j) {
    PreMeasurement pm;
    if (j.is_object()) {
        pm.basis = require(j, "basis", "pre_measurement").get<std::string>();
        if (j.contains("block")) {
            pm.block = j["block"].get<std::size_t>();
        }
    } else if (j.is_string()) {
        auto s = j.get<std::string>();
        auto colon = s.find(':');
        pm.basis = s.substr(0, colon);
        if (colon != std::string::npos) {
            auto b = s.substr(colon + 1);
            if (b == "first" || b == "0") {
                pm.block = 0;
            } else if (b == "second" || b == "1") {
                pm.block = 1;
            } else {
                throw ParseError("pre_measurement: unknown block \"" + b + "\" (expected first or second)");
            }
        }
    } else {
        throw ParseError("pre_measurement: expected a string or object");
    }
    toy::ToyMeasurement::by_name(pm.basis);
    if (pm.block && *pm.block > 1) {
        throw ParseError("pre_measurement: block must be 0 or 1");
    }
    return pm;
}

inline ToySetup parse_toy(const json &j) {
    ToySetup s;
    s.n_toybits = j.contains("n_toybits") ? static_cast<int>(require_size(j, "n_toybits", "toy scenario")) : 1;
    if (s.n_toybits != 1 && s.n_toybits != 2) {
        throw ParseError("toy scenario: n_toybits must be 1 or 2");
    }
    s.ctc_factor = s.n_toybits == 1 ? 0 : 1;
    if (j.contains("ctc_factor")) {
        s.ctc_factor = j["ctc_factor"].get<std::size_t>();
        if (s.ctc_factor > static_cast<std::size_t>(s.n_toybits - 1)) {
            throw ParseError("toy scenario: ctc_factor out of range");
        }
    }
    if (j.contains("alternatives")) {
        for (const auto &t : j["alternatives"]) {
            s.alternatives.push_back(toy_transform_from_json(t, s.n_toybits, s.ctc_factor));
        }
        if (s.alternatives.empty()) {
            throw ParseError("toy scenario: alternatives must be non-empty");
        }
        s.transform = j.contains("transform") ? toy_transform_from_json(j["transform"], s.n_toybits, s.ctc_factor)
                                              : s.alternatives.front();
    } else {
        s.transform = toy_transform_from_json(require(j, "transform", "toy scenario"), s.n_toybits, s.ctc_factor);
    }
    if (j.contains("pre_measurement")) {
        if (s.n_toybits != 2) {
            throw ParseError("toy scenario: pre_measurement needs a chronology-respecting toybit (n_toybits = 2)");
        }
        s.pre_measurement = pre_measurement_from_json(j["pre_measurement"]);
    }
    if (j.contains("prepare")) {
        const json &prep = j["prepare"];
        if (s.n_toybits != 2) {
            throw ParseError("toy scenario: prepare needs n_toybits = 2");
        }
        auto pi = require(prep, "correlated", "prepare").get<std::string>();
        s.correlated_with = (pi == "(identity)" || pi == "identity") ? ontic::Permutation::identity(4)
                                                                     : ontic::Permutation::from_cycles(pi, 4);
    }
    return s;
}

}  // namespace detail

/// Parses one scenario document. Throws ParseError on malformed input.
inline Scenario parse_scenario(const json &j) {
    if (!j.is_object()) {
        throw ParseError("scenario: expected a JSON object");
    }
    const json &model = detail::require(j, "model", "scenario");
    if (!model.is_string()) {
        throw ParseError("scenario: model must be a string");
    }
    Scenario s;
    s.source = j;
    if (j.contains("id")) {
        s.id = j["id"].get<std::string>();
    }
    try {
        auto m = model.get<std::string>();
        if (m == "classical") {
            s.model = Model::Classical;
            s.setup = detail::parse_classical(j);
        } else if (m == "deutsch") {
            s.model = Model::Deutsch;
            s.setup = detail::parse_deutsch(j);
        } else if (m == "toy") {
            s.model = Model::Toy;
            s.setup = detail::parse_toy(j);
        } else {
            throw ParseError("scenario: unknown model \"" + m + "\" (expected classical, deutsch or toy)");
        }
    } catch (const json::exception &e) {
        throw ParseError(std::string("scenario: ") + e.what());
    } catch (const std::out_of_range &e) {
        throw ParseError(std::string("scenario: ") + e.what());
    }
    return s;
}

inline Scenario parse_scenario(std::string_view text) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::parse_error &e) {
        throw ParseError(std::string("scenario: invalid JSON: ") + e.what());
    }
    return parse_scenario(j);
}

// ---------------------------------------------------------------------------
// Running

struct RunOptions {
    std::uint64_t seed = 0;
    /// Overrides the scenario's fixed-point tolerance when set.
    std::optional<double> tolerance;
};

namespace detail {

inline json labels_json(const std::set<int> &labels) { return json(std::vector<int>(labels.begin(), labels.end())); }

inline json distribution_json(const ontic::ExactDistribution &d) {
    json a = json::array();
    for (const auto &p : d.probs()) {
        a.push_back(ctclab::to_string(p));
    }
    return a;
}

inline void run_classical(const ClassicalSetup &s, AnalysisReport &r) {
    auto joint = ontic::joint_consistency(s.interaction, s.cr_size, s.ctc_size, s.cr_constraint);
    auto unconstrained = ontic::joint_consistency(s.interaction, s.cr_size, s.ctc_size);
    for (auto [a, c] : joint.consistent_pairs) {
        r.consistent_set.push_back({{"cr", a}, {"ctc", c}});
    }
    r.paradox = joint.paradox;
    r.boundary_conditions = {{"cr_states", unconstrained.boundary_cr_states}};
    r.forced_states = json(std::vector<std::size_t>(joint.boundary_cr_states.begin(), joint.boundary_cr_states.end()));
    json outputs = json::array();
    for (const auto &[pair, out] : joint.cr_outputs) {
        outputs.push_back({{"cr", pair.first}, {"ctc", pair.second}, {"cr_out", out}});
    }
    r.output_states = {{"cr_by_pair", outputs}};

    if (s.cr_size == 1) {
        auto report = ontic::concealment_report(s.interaction);
        auto stationary = ontic::stationary_distributions<Rational>(s.interaction);
        for (const auto &w : report.witnesses) {
            r.concealment_witnesses.push_back(distribution_json(w));
        }
        r.concealed_paradox = report.concealed_paradox;
        json cycles = json::array();
        for (const auto &c : stationary.cycles) {
            cycles.push_back(c);
        }
        r.details["cycles"] = cycles;
        r.details["stationary"] = stationary.description();
        r.details["fixed_points"] = report.fixed_points;
    } else {
        std::vector<std::size_t> allowed;
        for (std::size_t a = 0; a < s.cr_size; ++a) {
            if (!s.cr_constraint || s.cr_constraint->contains(a)) {
                allowed.push_back(a);
            }
        }
        auto cr_dist = ontic::ExactDistribution::uniform_on(s.cr_size, allowed);
        auto chain = ontic::induced_ctc_chain(s.interaction, cr_dist, s.ctc_size);
        auto witness = ontic::stationary_of_chain(chain);
        r.concealment_witnesses.push_back(distribution_json(witness));
        r.concealed_paradox = r.paradox;
        r.details["cr_input_distribution"] = distribution_json(cr_dist);
    }
    if (s.distribution) {
        auto pushed = ontic::pushforward(*s.distribution, s.interaction);
        r.details["distribution_in"] = std::vector<double>(s.distribution->probs().begin(), s.distribution->probs().end());
        r.details["distribution_out"] = std::vector<double>(pushed.probs().begin(), pushed.probs().end());
        double gap = 0.0;
        for (std::size_t i = 0; i < pushed.size(); ++i) {
            gap = std::max(gap, std::abs(pushed[i] - (*s.distribution)[i]));
        }
        r.details["distribution_stationary"] = gap <= 1e-12;
    }
}

struct DeutschNumbers {
    double entropy_ctc = 0.0;
    double mutual_information = 0.0;
};

inline DeutschNumbers run_deutsch_once(const DeutschSetup &s, const Unitary &u, AnalysisReport *r) {
    DeutschChannel ch(u, s.rho_cr_in);
    DeutschRun run = run_deutsch_circuit(ch, s.fixed_point);
    DeutschNumbers n{run.entropy_ctc, run.mutual_information_out};
    if (s.reference_state) {
        DensityMatrix ref_out = reference_output(ch, *s.reference_state, s.d_ref, run.rho_ctc);
        n.mutual_information = mutual_information(ref_out, {s.d_ref, ch.d_cr()});
        if (r) {
            r->output_states["rho_ref_cr_out"] = io::matrix_to_json(ref_out.matrix());
            r->mutual_information["before"] = mutual_information(*s.reference_state, {s.d_ref, ch.d_cr()});
            r->mutual_information["after"] = n.mutual_information;
            r->details["ref_cr_out_distance_from_maximally_mixed"] =
                trace_distance(ref_out.matrix(), DensityMatrix::maximally_mixed(ref_out.dim()).matrix());
        }
    }
    if (r) {
        r->consistent_set = {
            {"dimension", run.fixed_points.dimension()},
            {"particular", io::matrix_to_json(run.fixed_points.particular.matrix())},
            {"max_entropy_state", io::matrix_to_json(run.rho_ctc.matrix())},
            {"residual", run.residual},
        };
        r->paradox = false;
        r->concealed_paradox = false;
        r->output_states["rho_ctc"] = io::matrix_to_json(run.rho_ctc.matrix());
        r->output_states["rho_cr_out"] = io::matrix_to_json(run.rho_cr_out.matrix());
        r->entropy = {{"cr_in", run.entropy_cr_in}, {"ctc", run.entropy_ctc}, {"cr_out", run.entropy_cr_out}};
        r->mutual_information["cr_ctc_out"] = run.mutual_information_out;
        r->details["cesaro_iterations"] = run.fixed_points.iterations;
        r->details["optimizer_iterations"] = run.selection.iterations;
        r->details["gradient_norm"] = run.selection.gradient_norm;
    }
    return n;
}

inline void run_deutsch(const DeutschSetup &s, AnalysisReport &r) {
    run_deutsch_once(s, s.unitary, &r);
    if (s.sweep) {
        json rows = json::array();
        for (double v : s.sweep->values) {
            auto n = run_deutsch_once(s, sweep_unitary(*s.sweep, v), nullptr);
            rows.push_back({{"parameter", v},
                            {"entropy", n.entropy_ctc},
                            {"mutual_information", n.mutual_information},
                            {"paradox", false}});
        }
        r.details["sweep"] = {{"family", s.sweep->family}, {"parameter", s.sweep->parameter}, {"rows", rows}};
    }
}

inline json consistency_json(const toy::ConsistencyReport &c) {
    json pairs = json::array();
    for (auto [a, b] : c.joint.consistent_pairs) {
        if (c.n_toybits == 1) {
            pairs.push_back({{"ctc", b + 1}});
        } else {
            pairs.push_back({{"cr", a + 1}, {"ctc", b + 1}});
        }
    }
    return pairs;
}

inline void run_toy(const ToySetup &s, const RunOptions &opts, AnalysisReport &r) {
    std::optional<toy::EpistemicState> constraint;
    std::optional<toy::ToyMeasurement> measurement;
    if (s.pre_measurement) {
        measurement = toy::ToyMeasurement::by_name(s.pre_measurement->basis);
        if (s.pre_measurement->block) {
            constraint = measurement->blocks()[*s.pre_measurement->block];
        }
    }
    auto c = toy::ctc_consistent_states(s.transform, s.ctc_factor, constraint);
    r.consistent_set = consistency_json(c);
    r.paradox = c.paradox;
    r.kb_violation = c.kb_violation;
    r.details["transformation"] = s.transform.perm().to_cycle_string();
    r.details["ctc_states"] = labels_json(c.ctc_states);
    r.details["kb_violation_ctc"] = c.kb_violation_ctc;

    if (s.n_toybits == 2) {
        r.boundary_conditions = {{"cr_states", labels_json(c.boundary_cr_states)}};
        r.forced_states = labels_json(c.forced_cr_states);
        json by_ctc = json::object();
        for (const auto &[ctc, outs] : c.cr_output_by_ctc) {
            by_ctc[std::to_string(ctc)] = labels_json(outs);
        }
        r.output_states = {{"cr", labels_json(c.cr_output_states)}, {"cr_by_ctc", by_ctc}};
        r.details["kb_violation_cr"] = c.kb_violation_cr;
        if (constraint) {
            r.details["observed"] = constraint->to_string();
        }
        if (measurement && !s.pre_measurement->block) {
            json per_outcome = json::array();
            for (const auto &block : measurement->blocks()) {
                auto branch = toy::ctc_consistent_states(s.transform, s.ctc_factor, block);
                per_outcome.push_back({{"observed", block.to_string()},
                                       {"forced_states", labels_json(branch.forced_cr_states)},
                                       {"kb_violation", branch.kb_violation}});
            }
            r.details["per_outcome"] = per_outcome;
        }
        if (!c.joint.consistent_pairs.empty()) {
            // One history drawn uniformly from the consistent joint states.
            std::mt19937_64 rng(opts.seed);
            std::vector<std::pair<std::size_t, std::size_t>> pairs(c.joint.consistent_pairs.begin(),
                                                                   c.joint.consistent_pairs.end());
            auto [cr, ctc] = pairs[static_cast<std::size_t>(rng() % pairs.size())];
            r.details["sampled_history"] = {
                {"cr_in", cr + 1},
                {"ctc", ctc + 1},
                {"cr_out", c.joint.cr_outputs.at({cr, ctc}) + 1},
            };
        }
    }

    auto witnesses = toy::invariant_epistemic_states(s.transform);
    for (const auto &w : witnesses) {
        r.concealment_witnesses.push_back(w.to_string());
    }
    if (s.n_toybits == 1) {
        auto concealment = toy::epistemic_concealment_report(s.transform);
        r.concealed_paradox = concealment.concealed;
        r.details["minimum_knowledge_invariant"] = concealment.minimum_knowledge_invariant;
    } else {
        r.concealed_paradox = c.paradox && !witnesses.empty();
    }
    if (!r.concealed_paradox && !r.paradox) {
        // Witnesses are only meaningful next to a paradox; keep them as invariants.
        r.details["invariant_states"] = r.concealment_witnesses;
        r.concealment_witnesses = json::array();
    }

    if (!s.alternatives.empty()) {
        auto mixture = toy::mix_interactions(s.alternatives, s.ctc_factor, constraint);
        json probs = json::array();
        for (const auto &p : mixture.probabilities) {
            probs.push_back(ctclab::to_string(p));
        }
        json branches = json::array();
        for (const auto &b : mixture.branches) {
            branches.push_back({{"forced_states", labels_json(b.forced_cr_states)}, {"paradox", b.paradox}});
        }
        r.details["mixture"] = {{"branches", branches},
                                {"probabilities", probs},
                                {"state", mixture.support.to_string()},
                                {"valid", mixture.valid}};
    }

    if (s.correlated_with) {
        auto before = toy::prepare_correlated(*s.correlated_with);
        auto after = toy::propagate_correlated(before, c);
        bool valid = !after.empty() && toy::is_valid_epistemic(after);
        r.details["correlations"] = {{"before", before.to_string()},
                                     {"after", after.to_string()},
                                     {"after_valid", valid},
                                     {"preserved", after == before.support()}};
    }
}

}  // namespace detail

/// Deterministic in (scenario, seed, tolerance).
inline AnalysisReport run(const Scenario &s, const RunOptions &opts = {}) {
    AnalysisReport r;
    r.model = s.model;
    r.id = s.id;
    r.provenance.scenario_hash = io::content_hash(io::canonical_dump(s.source));
    r.provenance.seed = opts.seed;
    try {
        std::visit(
            [&](const auto &setup) {
                using T = std::decay_t<decltype(setup)>;
                if constexpr (std::is_same_v<T, ClassicalSetup>) {
                    detail::run_classical(setup, r);
                } else if constexpr (std::is_same_v<T, DeutschSetup>) {
                    DeutschSetup local = setup;
                    if (opts.tolerance) {
                        local.fixed_point.tol = *opts.tolerance;
                    }
                    r.provenance.tolerances = {{"fixed_point", local.fixed_point.tol},
                                               {"null_space", local.fixed_point.null_tol}};
                    detail::run_deutsch(local, r);
                } else {
                    detail::run_toy(setup, opts, r);
                }
            },
            s.setup);
    } catch (const SolverError &e) {
        throw SolverError((s.id.empty() ? std::string("scenario") : s.id) + ": " + e.what());
    }
    return r;
}

// ---------------------------------------------------------------------------
// Registry of reproductions

/// A scenario with expectations: keys are JSON pointers into the report; values are exact
/// JSON or {"approx": x, "tol": t} (x may be a nested array of numbers).
struct RegistryEntry {
    std::string id;
    std::string description;
    json scenario;
    json expected;
};

namespace detail {

inline bool approx_equal(const json &actual, const json &expected, double tol) {
    if (expected.is_number()) {
        return actual.is_number() && std::abs(actual.get<double>() - expected.get<double>()) <= tol;
    }
    if (expected.is_array()) {
        if (!actual.is_array() || actual.size() != expected.size()) {
            return false;
        }
        for (std::size_t i = 0; i < expected.size(); ++i) {
            if (!approx_equal(actual[i], expected[i], tol)) {
                return false;
            }
        }
        return true;
    }
    if (expected.is_object()) {
        if (!actual.is_object()) {
            return false;
        }
        for (auto it = expected.begin(); it != expected.end(); ++it) {
            if (!actual.contains(it.key()) || !approx_equal(actual[it.key()], it.value(), tol)) {
                return false;
            }
        }
        return true;
    }
    return actual == expected;
}

inline json matrix_entries(const ComplexMatrix &m) { return io::matrix_to_json(m); }

}  // namespace detail

/// Failed expectations, empty when the report satisfies every one.
inline std::vector<std::string> check_expectations(const json &report, const json &expected) {
    std::vector<std::string> failures;
    for (auto it = expected.begin(); it != expected.end(); ++it) {
        json::json_pointer ptr(it.key());
        if (!report.contains(ptr)) {
            failures.push_back(it.key() + ": missing from report");
            continue;
        }
        const json &actual = report.at(ptr);
        const json &want = it.value();
        bool ok = want.is_object() && want.contains("approx")
                      ? detail::approx_equal(actual, want["approx"], want.value("tol", 0.0))
                      : actual == want;
        if (!ok) {
            failures.push_back(it.key() + ": expected " + io::canonical_dump(want) + ", got " +
                               io::canonical_dump(actual));
        }
    }
    return failures;
}

inline std::vector<RegistryEntry> reproductions() {
    const json half_identity = detail::matrix_entries(DensityMatrix::maximally_mixed(2).matrix());
    const json quarter_identity = detail::matrix_entries(DensityMatrix::maximally_mixed(4).matrix());
    json primed = {{"compose", json::array({json{{"local", {"(1 2)", "()"}}}, "tcn"})}};
    return {
        {"bell-swap",
         "half of a Bell pair swaps with a qubit on a CTC: the consistent state is I/2 and all AB correlation is lost",
         {{"model", "deutsch"},
          {"id", "bell-swap"},
          {"channel", {{"d_cr", 2}, {"d_ctc", 2}, {"unitary", "swap"}}},
          {"reference", "bell"}},
         {{"/paradox", false},
          {"/consistent_set/dimension", 0},
          {"/consistent_set/max_entropy_state", {{"approx", half_identity}, {"tol", 1e-9}}},
          {"/consistent_set/residual", {{"approx", 0.0}, {"tol", 1e-9}}},
          {"/output_states/rho_ref_cr_out", {{"approx", quarter_identity}, {"tol", 1e-9}}},
          {"/details/ref_cr_out_distance_from_maximally_mixed", {{"approx", 0.0}, {"tol", 1e-9}}},
          {"/mutual_information/before", {{"approx", 2.0}, {"tol", 1e-9}}},
          {"/mutual_information/after", {{"approx", 0.0}, {"tol", 1e-9}}}}},
        {"classical-bitflip",
         "a bit flipped on a CTC has no consistent value, but the uniform distribution is self-consistent",
         {{"model", "classical"},
          {"id", "classical-bitflip"},
          {"ctc_size", 2},
          {"permutation", {{"size", 2}, {"cycles", "(1 2)"}}},
          {"distribution", {0.5, 0.5}}},
         {{"/paradox", true},
          {"/concealed_paradox", true},
          {"/consistent_set", json::array()},
          {"/concealment_witnesses", json::array({json::array({"1/2", "1/2"})})},
          {"/details/distribution_stationary", true}}},
        {"toy-4cycle",
         "(1234) on a CTC toybit has no consistent ontic state",
         {{"model", "toy"}, {"id", "toy-4cycle"}, {"n_toybits", 1}, {"transform", "(1 2 3 4)"}},
         {{"/paradox", true}, {"/consistent_set", json::array()}, {"/concealment_witnesses", json::array({"1∨2∨3∨4"})}}},
        {"toy-123cycle",
         "(123)(4) forces the CTC toybit into ontic state 4, beyond the knowledge balance",
         {{"model", "toy"}, {"id", "toy-123cycle"}, {"n_toybits", 1}, {"transform", "(1 2 3)(4)"}},
         {{"/paradox", false},
          {"/consistent_set", json::array({json{{"ctc", 4}}})},
          {"/kb_violation", true},
          {"/concealed_paradox", false}}},
        {"toy-tcn",
         "T_CN with the CTC toybit as control only admits CR toybits in 1 or 3",
         {{"model", "toy"}, {"id", "toy-tcn"}, {"n_toybits", 2}, {"ctc_factor", 1}, {"transform", "tcn"}},
         {{"/paradox", false},
          {"/boundary_conditions/cr_states", {1, 3}},
          {"/forced_states", {1, 3}},
          {"/kb_violation", false}}},
        {"toy-tcn-premeasured",
         "after observing 1∨2 the CR toybit must be in 1; afterwards it is 1 or 3 depending on the CTC toybit",
         {{"model", "toy"},
          {"id", "toy-tcn-premeasured"},
          {"n_toybits", 2},
          {"ctc_factor", 1},
          {"transform", "tcn"},
          {"pre_measurement", "z:first"}},
         {{"/forced_states", {1}},
          {"/boundary_conditions/cr_states", {1, 3}},
          {"/output_states/cr", {1, 3}},
          {"/output_states/cr_by_ctc", {{"1", {1}}, {"2", {1}}, {"3", {3}}, {"4", {3}}}},
          {"/kb_violation", true}}},
        {"toy-tcn-primed",
         "(12) on the CR toybit followed by T_CN forces the observed 1∨2 toybit into 2",
         {{"model", "toy"},
          {"id", "toy-tcn-primed"},
          {"n_toybits", 2},
          {"ctc_factor", 1},
          {"transform", primed},
          {"pre_measurement", "z:first"}},
         {{"/forced_states", {2}}, {"/paradox", false}}},
        {"toy-mixture",
         "not knowing which of T_CN and its primed variant acts, the observer keeps the epistemic state 1∨2",
         {{"model", "toy"},
          {"id", "toy-mixture"},
          {"n_toybits", 2},
          {"ctc_factor", 1},
          {"alternatives", json::array({"tcn", primed})},
          {"pre_measurement", "z:first"}},
         {{"/details/mixture/probabilities", {"1/2", "1/2", "0", "0"}},
          {"/details/mixture/state", "1∨2"},
          {"/details/mixture/valid", true},
          {"/details/mixture/branches/0/forced_states", {1}},
          {"/details/mixture/branches/1/forced_states", {2}}}},
        {"toy-invariants-sx",
         "(13)(24) has no ontic fixed point, yet 1∨3, 2∨4 and 1∨2∨3∨4 are invariant",
         {{"model", "toy"}, {"id", "toy-invariants-sx"}, {"n_toybits", 1}, {"transform", "(1 3)(2 4)"}},
         {{"/paradox", true},
          {"/concealed_paradox", true},
          {"/concealment_witnesses", {"1∨3", "2∨4", "1∨2∨3∨4"}}}},
        {"toy-swap-correlated",
         "swapping B with a CTC toybit forces c = b and keeps A and B maximally correlated",
         {{"model", "toy"},
          {"id", "toy-swap-correlated"},
          {"n_toybits", 2},
          {"ctc_factor", 1},
          {"transform", "swap"},
          {"prepare", {{"correlated", "(identity)"}}}},
         {{"/consistent_set",
           json::array({json{{"cr", 1}, {"ctc", 1}}, json{{"cr", 2}, {"ctc", 2}}, json{{"cr", 3}, {"ctc", 3}},
                        json{{"cr", 4}, {"ctc", 4}}})},
          {"/details/correlations/before", "1.1∨2.2∨3.3∨4.4"},
          {"/details/correlations/after", "1.1∨2.2∨3.3∨4.4"},
          {"/details/correlations/preserved", true}}},
    };
}

struct VerifyOutcome {
    std::string id;
    bool passed = false;
    std::vector<std::string> failures;
    json report;
    double millis = 0.0;
};

struct VerifySummary {
    std::vector<VerifyOutcome> outcomes;
    bool all_passed = false;

    /// Timing is left out so the document is reproducible byte for byte.
    json to_json() const {
        json results = json::array();
        for (const auto &o : outcomes) {
            results.push_back({{"id", o.id}, {"passed", o.passed}, {"failures", o.failures}, {"report", o.report}});
        }
        return json{{"all_passed", all_passed}, {"results", results}};
    }
};

inline VerifyOutcome verify_entry(const RegistryEntry &e, const RunOptions &opts) {
    VerifyOutcome o;
    o.id = e.id;
    auto start = std::chrono::steady_clock::now();
    try {
        AnalysisReport report = run(parse_scenario(e.scenario), opts);
        o.report = report.to_json();
        o.failures = check_expectations(o.report, e.expected);
        for (auto &v : invariant_violations(report)) {
            o.failures.push_back("report invariant: " + v);
        }
    } catch (const std::exception &ex) {
        o.failures.push_back(std::string("error: ") + ex.what());
    }
    o.passed = o.failures.empty();
    o.millis = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
    return o;
}

/// Runs every entry concurrently; outcomes keep registry order.
inline VerifySummary verify_all(const std::vector<RegistryEntry> &entries, const RunOptions &opts = {}) {
    std::vector<std::future<VerifyOutcome>> futures;
    futures.reserve(entries.size());
    for (const auto &e : entries) {
        futures.push_back(std::async(std::launch::async, [&e, &opts] { return verify_entry(e, opts); }));
    }
    VerifySummary s;
    s.all_passed = true;
    for (auto &f : futures) {
        s.outcomes.push_back(f.get());
        s.all_passed = s.all_passed && s.outcomes.back().passed;
    }
    return s;
}

inline VerifySummary verify_all(const RunOptions &opts = {}) { return verify_all(reproductions(), opts); }

}  // namespace ctclab::scenario
