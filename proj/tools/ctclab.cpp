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

#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "ctclab/ctclab.hpp"

namespace {

using nlohmann::json;
using ctclab::ParseError;

constexpr int kExitOk = 0;
constexpr int kExitUsage = 2;
constexpr int kExitNumerical = 3;

struct Globals {
    std::string format = "human";
    std::uint64_t seed = 0;
    std::optional<double> tol;
};

json read_json_file(const std::string &path) {
    std::ifstream in(path);
    if (!in) {
        throw ParseError("cannot read " + path);
    }
    std::stringstream buf;
    buf << in.rdbuf();
    try {
        return json::parse(buf.str());
    } catch (const json::parse_error &e) {
        throw ParseError(path + ": invalid JSON: " + e.what());
    }
}

/// Cycle notation, or an inline permutation JSON object.
json permutation_arg(const std::string &text, std::size_t size) {
    if (!text.empty() && text.front() == '{') {
        try {
            return json::parse(text);
        } catch (const json::parse_error &e) {
            throw ParseError(std::string("--perm: invalid JSON: ") + e.what());
        }
    }
    return json{{"size", size}, {"cycles", text}};
}

json transform_arg(const std::string &text) {
    if (!text.empty() && text.front() == '{') {
        try {
            return json::parse(text);
        } catch (const json::parse_error &e) {
            throw ParseError(std::string("--transform: invalid JSON: ") + e.what());
        }
    }
    return text;
}

std::vector<double> distribution_arg(const std::string &text) {
    std::vector<double> out;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
        try {
            std::size_t used = 0;
            out.push_back(std::stod(item, &used));
            if (item.find_first_not_of(" \t", used) != std::string::npos) {
                throw std::invalid_argument(item);
            }
        } catch (const std::exception &) {
            throw ParseError("--dist: \"" + item + "\" is not a number");
        }
    }
    return out;
}

void emit_report(const ctclab::scenario::AnalysisReport &report, const Globals &g) {
    json j = report.to_json();
    if (g.format == "json") {
        std::cout << ctclab::io::canonical_dump(j) << "\n";
    } else if (g.format == "csv") {
        std::cout << ctclab::render::csv(j);
    } else {
        std::cout << ctclab::render::human(j);
    }
}

int run_scenario_json(const json &doc, const Globals &g) {
    auto scenario = ctclab::scenario::parse_scenario(doc);
    ctclab::scenario::RunOptions opts{g.seed, g.tol};
    emit_report(ctclab::scenario::run(scenario, opts), g);
    return kExitOk;
}

int cmd_repro(const std::string &id, const Globals &g) {
    auto registry = ctclab::scenario::reproductions();
    std::vector<ctclab::scenario::RegistryEntry> selected;
    for (const auto &e : registry) {
        if (id == "all" || e.id == id) {
            selected.push_back(e);
        }
    }
    if (selected.empty()) {
        std::string known;
        for (const auto &e : registry) {
            known += " " + e.id;
        }
        std::cerr << "error: unknown reproduction id \"" << id << "\"; known ids:" << known << " all\n";
        return kExitUsage;
    }
    auto summary = ctclab::scenario::verify_all(selected, {g.seed, g.tol});
    if (g.format == "json") {
        std::cout << ctclab::io::canonical_dump(summary.to_json()) << "\n";
    } else if (g.format == "csv") {
        std::cout << "id,passed\n";
        for (const auto &o : summary.outcomes) {
            std::cout << o.id << "," << (o.passed ? "true" : "false") << "\n";
        }
    } else {
        std::cout << ctclab::render::repro_human(summary);
    }
    return summary.all_passed ? kExitOk : kExitNumerical;
}

int cmd_deutsch(const std::optional<std::string> &channel_path, const std::optional<std::string> &unitary_path,
                const std::optional<std::string> &state_path, const Globals &g) {
    json channel;
    if (channel_path) {
        channel = read_json_file(*channel_path);
    } else {
        if (!unitary_path || !state_path) {
            throw ParseError("deutsch solve needs --unitary and --cr-state, or --channel");
        }
        json u = read_json_file(*unitary_path);
        json rho = read_json_file(*state_path);
        auto d_cr = rho.value("rows", std::size_t{0});
        auto d = u.value("rows", std::size_t{0});
        if (d_cr == 0 || d == 0 || d % d_cr != 0) {
            throw ParseError("unitary dimension " + std::to_string(d) + " is not a multiple of CR dimension " +
                             std::to_string(d_cr));
        }
        channel = {{"d_cr", d_cr}, {"d_ctc", d / d_cr}, {"unitary", u}, {"rho_cr_in", rho}};
    }
    json doc{{"model", "deutsch"}, {"channel", channel}};
    return run_scenario_json(doc, g);
}

int cmd_classical(const std::string &perm, std::size_t states, const std::optional<std::string> &dist,
                  const Globals &g) {
    json doc{{"model", "classical"}, {"ctc_size", states}, {"permutation", permutation_arg(perm, states)}};
    if (dist) {
        doc["distribution"] = distribution_arg(*dist);
    }
    return run_scenario_json(doc, g);
}

int cmd_toy(const std::string &transform, std::optional<int> toybits, std::optional<std::size_t> ctc_factor,
            const std::optional<std::string> &pre_measure, const Globals &g) {
    json t = transform_arg(transform);
    bool two = t.is_object() || transform == "tcn" || transform == "swap" || pre_measure.has_value() ||
               ctc_factor.has_value();
    json doc{{"model", "toy"}, {"n_toybits", toybits.value_or(two ? 2 : 1)}, {"transform", t}};
    if (ctc_factor) {
        doc["ctc_factor"] = *ctc_factor;
    }
    if (pre_measure) {
        doc["pre_measurement"] = *pre_measure;
    }
    return run_scenario_json(doc, g);
}

}  // namespace

int main(int argc, char **argv) {
    CLI::App app{"ctclab: consistency analysis for closed timelike curves"};
    app.require_subcommand(1);
    Globals g;
    app.add_option("--format", g.format, "Output format")
        ->check(CLI::IsMember({"human", "json", "csv"}))
        ->envname("CTCLAB_FORMAT");
    app.add_option("--seed", g.seed, "Seed for sampled histories")->envname("CTCLAB_SEED");
    app.add_option("--tol", g.tol, "Fixed-point residual tolerance")
        ->check(CLI::PositiveNumber)
        ->envname("CTCLAB_TOL");

    std::string repro_id;
    auto *repro = app.add_subcommand("repro", "Re-run the built-in reproductions")->fallthrough();
    repro->add_option("id", repro_id, "Reproduction id or \"all\"")->required();

    auto *deutsch = app.add_subcommand("deutsch", "Deutsch fixed-point model")->require_subcommand(1)->fallthrough();
    auto *solve = deutsch->add_subcommand("solve", "Solve the consistency condition for one interaction")->fallthrough();
    std::optional<std::string> unitary_path, state_path, channel_path;
    solve->add_option("--unitary", unitary_path, "Unitary matrix JSON file")->check(CLI::ExistingFile);
    solve->add_option("--cr-state", state_path, "CR input state JSON file")->check(CLI::ExistingFile);
    solve->add_option("--channel", channel_path, "Channel JSON file")->check(CLI::ExistingFile);

    auto *classical = app.add_subcommand("classical", "Classical finite-state model")->require_subcommand(1)->fallthrough();
    auto *analyze_c = classical->add_subcommand("analyze", "Fixed points and concealment of a permutation")->fallthrough();
    std::string perm;
    std::size_t states = 0;
    std::optional<std::string> dist;
    analyze_c->add_option("--perm", perm, "Permutation in cycle notation, or permutation JSON")->required();
    analyze_c->add_option("--states", states, "Number of CTC states")->required()->check(CLI::PositiveNumber);
    analyze_c->add_option("--dist", dist, "Comma-separated CTC distribution");

    auto *toy = app.add_subcommand("toy", "Toy theory model")->require_subcommand(1)->fallthrough();
    auto *analyze_t = toy->add_subcommand("analyze", "Consistency, knowledge balance and invariants")->fallthrough();
    std::string transform;
    std::optional<int> toybits;
    std::optional<std::size_t> ctc_factor;
    std::optional<std::string> pre_measure;
    analyze_t->add_option("--transform", transform, "Cycle notation, tcn, swap, identity or transform JSON")->required();
    analyze_t->add_option("--toybits", toybits, "Number of toybits (1 or 2)")->check(CLI::Range(1, 2));
    analyze_t->add_option("--ctc-factor", ctc_factor, "Index of the CTC toybit")->check(CLI::Range(0, 1));
    analyze_t->add_option("--pre-measure", pre_measure, "Measurement of the CR toybit, e.g. z:first");

    auto *scenario = app.add_subcommand("scenario", "Scenario files")->require_subcommand(1)->fallthrough();
    auto *run = scenario->add_subcommand("run", "Run a scenario file")->fallthrough();
    std::string path;
    run->add_option("path", path, "Scenario JSON file")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp &e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp &e) {
        return app.exit(e);
    } catch (const CLI::ParseError &e) {
        app.exit(e);
        return kExitUsage;
    }

    try {
        if (*repro) {
            return cmd_repro(repro_id, g);
        }
        if (*solve) {
            return cmd_deutsch(channel_path, unitary_path, state_path, g);
        }
        if (*analyze_c) {
            return cmd_classical(perm, states, dist, g);
        }
        if (*analyze_t) {
            return cmd_toy(transform, toybits, ctc_factor, pre_measure, g);
        }
        if (*run) {
            return run_scenario_json(read_json_file(path), g);
        }
    } catch (const ctclab::SolverError &e) {
        std::cerr << "numerical failure: " << e.what() << "\n";
        return kExitNumerical;
    } catch (const std::invalid_argument &e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitUsage;
    } catch (const std::exception &e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitUsage;
    }
    return kExitUsage;
}
