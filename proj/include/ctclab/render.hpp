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
#include <cstdio>
#include <sstream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "ctclab/json_io.hpp"
#include "ctclab/scenario.hpp"

namespace ctclab::render {

using nlohmann::json;

/// Shortest fraction n/d (d ≤ max_den) within tol of x, else %.17g.
inline std::string exact_number(double x, int max_den = 256, double tol = 1e-9) {
    if (std::abs(x) <= tol) {
        return "0";
    }
    for (int d = 1; d <= max_den; ++d) {
        double n = std::round(x * d);
        if (std::abs(x - n / d) <= tol) {
            std::ostringstream os;
            os << static_cast<long long>(n);
            if (d != 1) {
                os << "/" << d;
            }
            return os.str();
        }
    }
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

inline std::string fixed2(double x) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.2f", std::abs(x) < 0.005 ? 0.0 : x);
    return buf;
}

inline std::string complex2(double re, double im) {
    if (std::abs(im) < 0.005) {
        return fixed2(re);
    }
    return fixed2(re) + (im < 0 ? "-" : "+") + fixed2(std::abs(im)) + "i";
}

inline std::string complex_exact(double re, double im) {
    if (std::abs(im) <= 1e-9) {
        return exact_number(re);
    }
    if (std::abs(re) <= 1e-9) {
        return exact_number(im) + "i";
    }
    std::string s = exact_number(re) + (im < 0 ? "-" : "+") + exact_number(std::abs(im)) + "i";
    return s;
}

/// Collects footnotes as matrices are printed.
class Footnotes {
public:
    std::size_t add(std::string text) {
        notes_.push_back(std::move(text));
        return notes_.size();
    }
    bool empty() const { return notes_.empty(); }
    std::string str() const {
        std::string out;
        for (std::size_t i = 0; i < notes_.size(); ++i) {
            out += "  [" + std::to_string(i + 1) + "] " + notes_[i] + "\n";
        }
        return out;
    }

private:
    std::vector<std::string> notes_;
};

/// 2-decimal rendering of a matrix JSON object; exact entries go to a footnote.
inline std::string matrix_block(const json &m, const std::string &name, Footnotes &notes) {
    auto rows = m.at("rows").get<std::size_t>();
    auto cols = m.at("cols").get<std::size_t>();
    const json &e = m.at("entries");
    std::vector<std::string> cells;
    std::size_t width = 0;
    std::string exact;
    for (std::size_t k = 0; k < rows * cols; ++k) {
        double re = e[k][0].get<double>();
        double im = e[k][1].get<double>();
        cells.push_back(complex2(re, im));
        width = std::max(width, cells.back().size());
        if (std::abs(re) > 1e-12 || std::abs(im) > 1e-12) {
            if (!exact.empty()) {
                exact += ", ";
            }
            exact += "(" + std::to_string(k / cols + 1) + "," + std::to_string(k % cols + 1) + ") = " + complex_exact(re, im);
        }
    }
    std::size_t ref = notes.add(name + " exact nonzero entries: " + (exact.empty() ? "none" : exact));
    std::string out;
    for (std::size_t r = 0; r < rows; ++r) {
        out += "    [";
        for (std::size_t c = 0; c < cols; ++c) {
            const auto &cell = cells[r * cols + c];
            out += " " + std::string(width - cell.size(), ' ') + cell;
        }
        out += " ]";
        if (r == 0) {
            out += " [" + std::to_string(ref) + "]";
        }
        out += "\n";
    }
    return out;
}

/// Labels joined in ∨-notation; ∅ when empty.
inline std::string vee(const json &labels) {
    if (!labels.is_array() || labels.empty()) {
        return "∅";
    }
    std::string out;
    for (const auto &l : labels) {
        if (!out.empty()) {
            out += "∨";
        }
        out += l.is_string() ? l.get<std::string>() : l.dump();
    }
    return out;
}

inline std::string yes_no(const json &b) { return b.is_boolean() && b.get<bool>() ? "yes" : "no"; }

inline std::string join_strings(const json &items, const std::string &sep) {
    std::string out;
    for (const auto &x : items) {
        if (!out.empty()) {
            out += sep;
        }
        out += x.is_string() ? x.get<std::string>() : x.dump();
    }
    return out;
}

namespace detail {

inline std::string classical_human(const json &r) {
    std::ostringstream os;
    const json &d = r.at("details");
    json pairs = json::array();
    for (const auto &p : r.at("consistent_set")) {
        pairs.push_back(std::to_string(p["cr"].get<int>()) + "." + std::to_string(p["ctc"].get<int>()));
    }
    if (d.contains("fixed_points")) {
        os << "  fixed points (0-based): " << (d["fixed_points"].empty() ? "none" : join_strings(d["fixed_points"], ", "))
           << "\n";
    } else {
        os << "  consistent (cr.ctc, 0-based): " << (pairs.empty() ? "none" : join_strings(pairs, ", ")) << "\n";
    }
    if (d.contains("cycles")) {
        json cycles = json::array();
        for (const auto &c : d["cycles"]) {
            cycles.push_back("(" + join_strings(c, " ") + ")");
        }
        os << "  cycles: " << join_strings(cycles, "") << "\n";
        os << "  stationary distributions: " << d["stationary"].get<std::string>() << " (basis of "
           << d["cycles"].size() << ")\n";
    }
    if (d.contains("distribution_out")) {
        os << "  pushforward of given distribution: " << join_strings(d["distribution_out"], ", ")
           << (d["distribution_stationary"].get<bool>() ? "  (stationary)" : "  (not stationary)") << "\n";
    }
    json witnesses = json::array();
    for (const auto &w : r.at("concealment_witnesses")) {
        witnesses.push_back("(" + join_strings(w, ", ") + ")");
    }
    os << "  self-consistent distributions: " << (witnesses.empty() ? "none" : join_strings(witnesses, " ")) << "\n";
    return os.str();
}

inline std::string deutsch_human(const json &r) {
    std::ostringstream os;
    Footnotes notes;
    const json &cs = r.at("consistent_set");
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.3g", cs.at("residual").get<double>());
    os << "  fixed-point set: affine dimension " << cs.at("dimension").get<int>() << ", residual " << buf << "\n";
    os << "  max-entropy CTC state:\n" << matrix_block(cs.at("max_entropy_state"), "CTC state", notes);
    os << "  CR output state:\n" << matrix_block(r.at("output_states").at("rho_cr_out"), "CR output", notes);
    if (r.at("output_states").contains("rho_ref_cr_out")) {
        os << "  reference ⊗ CR output state:\n"
           << matrix_block(r.at("output_states").at("rho_ref_cr_out"), "reference ⊗ CR output", notes);
    }
    const json &e = r.at("entropy");
    os << "  entropy (bits): CR in " << fixed2(e.at("cr_in").get<double>()) << ", CTC " << fixed2(e.at("ctc").get<double>())
       << ", CR out " << fixed2(e.at("cr_out").get<double>()) << "\n";
    const json &mi = r.at("mutual_information");
    os << "  mutual information CR:CTC after interaction: " << fixed2(mi.at("cr_ctc_out").get<double>()) << "\n";
    if (mi.contains("before")) {
        os << "  mutual information reference:CR: " << fixed2(mi["before"].get<double>()) << " → "
           << fixed2(mi["after"].get<double>()) << "\n";
    }
    if (r.at("details").contains("sweep")) {
        const json &sw = r["details"]["sweep"];
        os << "  sweep over " << sw["parameter"].get<std::string>() << " (" << sw["family"].get<std::string>() << "):\n";
        for (const auto &row : sw["rows"]) {
            std::snprintf(buf, sizeof buf, "%.4f", row["parameter"].get<double>());
            os << "    " << buf << "  entropy " << fixed2(row["entropy"].get<double>()) << "  mutual information "
               << fixed2(row["mutual_information"].get<double>()) << "\n";
        }
    }
    os << "  notes:\n" << notes.str();
    return os.str();
}

inline std::string toy_human(const json &r) {
    std::ostringstream os;
    const json &d = r.at("details");
    json pairs = json::array();
    for (const auto &p : r.at("consistent_set")) {
        pairs.push_back(p.contains("cr") ? std::to_string(p["cr"].get<int>()) + "." + std::to_string(p["ctc"].get<int>())
                                         : std::to_string(p["ctc"].get<int>()));
    }
    os << "  consistent ontic states" << (pairs.empty() || pairs[0].get<std::string>().find('.') == std::string::npos
                                              ? ""
                                              : " (cr.ctc)")
       << ": " << vee(pairs) << "\n";
    os << "  CTC ontic states: " << vee(d.at("ctc_states")) << "\n";
    if (r.at("boundary_conditions").contains("cr_states")) {
        os << "  allowed CR boundary states: " << vee(r["boundary_conditions"]["cr_states"]) << "\n";
        if (d.contains("observed")) {
            os << "  observed CR epistemic state: " << d["observed"].get<std::string>() << "\n";
        }
        os << "  forced CR states: " << vee(r.at("forced_states")) << "\n";
        os << "  CR output states: " << vee(r.at("output_states").at("cr")) << "\n";
        for (auto it = r["output_states"]["cr_by_ctc"].begin(); it != r["output_states"]["cr_by_ctc"].end(); ++it) {
            os << "    CTC in " << it.key() << " → CR out " << vee(it.value()) << "\n";
        }
    }
    os << "  knowledge-balance violation: " << yes_no(r.at("kb_violation")) << "\n";
    if (d.contains("per_outcome")) {
        for (const auto &o : d["per_outcome"]) {
            os << "    outcome " << o["observed"].get<std::string>() << " → forced " << vee(o["forced_states"]) << "\n";
        }
    }
    if (!r.at("concealment_witnesses").empty()) {
        os << "  concealment witnesses: " << join_strings(r["concealment_witnesses"], ", ") << "\n";
    } else if (d.contains("invariant_states")) {
        os << "  invariant epistemic states: "
           << (d["invariant_states"].empty() ? "none" : join_strings(d["invariant_states"], ", ")) << "\n";
    }
    if (d.contains("mixture")) {
        const json &m = d["mixture"];
        os << "  mixture of " << m["branches"].size() << " interactions: " << m["state"].get<std::string>()
           << " (probabilities " << join_strings(m["probabilities"], ", ") << ")\n";
    }
    if (d.contains("correlations")) {
        const json &c = d["correlations"];
        os << "  correlation A:CR " << c["before"].get<std::string>() << " → " << c["after"].get<std::string>()
           << (c["preserved"].get<bool>() ? "  (preserved)" : "") << "\n";
    }
    if (d.contains("sampled_history")) {
        const json &h = d["sampled_history"];
        os << "  sampled history: CR " << h["cr_in"].get<int>() << ", CTC " << h["ctc"].get<int>() << " → CR out "
           << h["cr_out"].get<int>() << "\n";
    }
    return os.str();
}

}  // namespace detail

/// Human-readable rendering of a report JSON object.
inline std::string human(const json &r) {
    std::ostringstream os;
    os << r.at("model").get<std::string>();
    if (r.contains("id")) {
        os << " scenario " << r["id"].get<std::string>();
    }
    os << "\n  paradox: " << yes_no(r.at("paradox")) << "\n  concealed paradox: " << yes_no(r.at("concealed_paradox"))
       << "\n";
    auto model = r["model"].get<std::string>();
    if (model == "classical") {
        os << detail::classical_human(r);
    } else if (model == "deutsch") {
        os << detail::deutsch_human(r);
    } else {
        os << detail::toy_human(r);
    }
    return os.str();
}

inline std::string csv_number(const json &x) {
    if (!x.is_number()) {
        return "";
    }
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", x.get<double>());
    return buf;
}

/// parameter,entropy,mutual_information,paradox; one row per sweep value, else a single row.
inline std::string csv(const json &r) {
    std::string out = "parameter,entropy,mutual_information,paradox\n";
    const json &d = r.at("details");
    if (d.contains("sweep")) {
        for (const auto &row : d["sweep"]["rows"]) {
            out += csv_number(row["parameter"]) + "," + csv_number(row["entropy"]) + "," +
                   csv_number(row["mutual_information"]) + "," + (row["paradox"].get<bool>() ? "true" : "false") + "\n";
        }
        return out;
    }
    json entropy = r.contains("entropy") ? r["entropy"].value("ctc", json()) : json();
    json mi;
    if (r.contains("mutual_information")) {
        mi = r["mutual_information"].contains("after") ? r["mutual_information"]["after"]
                                                        : r["mutual_information"].value("cr_ctc_out", json());
    }
    out += "," + csv_number(entropy) + "," + csv_number(mi) + "," + (r.at("paradox").get<bool>() ? "true" : "false") +
           "\n";
    return out;
}

/// One verdict line per registry entry, with a short summary.
inline std::string repro_human(const scenario::VerifySummary &s) {
    std::ostringstream os;
    for (const auto &o : s.outcomes) {
        os << (o.passed ? "PASS " : "FAIL ") << o.id << "\n";
        const json &r = o.report;
        if (r.is_object() && r.contains("model")) {
            if (r.contains("mutual_information") && r["mutual_information"].contains("before")) {
                os << "     mutual information " << fixed2(r["mutual_information"]["before"].get<double>()) << " → "
                   << fixed2(r["mutual_information"]["after"].get<double>()) << "\n";
            } else {
                os << "     paradox " << yes_no(r["paradox"]) << ", concealed " << yes_no(r["concealed_paradox"]);
                if (r.contains("forced_states") && !r["forced_states"].empty()) {
                    os << ", forced " << vee(r["forced_states"]);
                }
                os << "\n";
            }
        }
        for (const auto &f : o.failures) {
            os << "     " << f << "\n";
        }
    }
    std::size_t passed = 0;
    for (const auto &o : s.outcomes) {
        passed += o.passed ? 1 : 0;
    }
    os << passed << "/" << s.outcomes.size() << " reproductions passed\n";
    return os.str();
}

}  // namespace ctclab::render
