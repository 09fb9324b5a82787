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
#include <cstdint>
#include <cstdio>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "ctclab/errors.hpp"
#include "ctclab/linalg.hpp"
#include "ctclab/ontic.hpp"
#include "ctclab/quantum.hpp"

namespace ctclab::io {

using nlohmann::json;

/// {"rows": n, "cols": m, "entries": [[re, im], …]} in row-major order.
inline json matrix_to_json(const ComplexMatrix &m) {
    json entries = json::array();
    for (const auto &z : m.entries()) {
        entries.push_back(json::array({z.real(), z.imag()}));
    }
    return json{{"rows", m.rows()}, {"cols", m.cols()}, {"entries", std::move(entries)}};
}

/// Non-negative integer, whether parsed as signed or unsigned.
inline bool is_index(const json &j) { return j.is_number_integer() && j.get<std::int64_t>() >= 0; }

inline ComplexMatrix matrix_from_json(const json &j) {
    if (!j.is_object() || !j.contains("rows") || !j.contains("cols") || !j.contains("entries")) {
        throw ParseError("matrix: expected an object with rows, cols and entries");
    }
    if (!is_index(j["rows"]) || !is_index(j["cols"])) {
        throw ParseError("matrix: rows and cols must be positive integers");
    }
    auto rows = j["rows"].get<std::size_t>();
    auto cols = j["cols"].get<std::size_t>();
    if (rows == 0 || cols == 0) {
        throw ParseError("matrix: rows and cols must be positive");
    }
    const json &entries = j["entries"];
    if (!entries.is_array() || entries.size() != rows * cols) {
        throw ParseError("matrix: expected " + std::to_string(rows * cols) + " entries");
    }
    std::vector<Complex> values;
    values.reserve(entries.size());
    for (const auto &e : entries) {
        if (e.is_number()) {
            values.emplace_back(e.get<double>(), 0.0);
        } else if (e.is_array() && e.size() == 2 && e[0].is_number() && e[1].is_number()) {
            values.emplace_back(e[0].get<double>(), e[1].get<double>());
        } else {
            throw ParseError("matrix: each entry must be [re, im]");
        }
    }
    return ComplexMatrix(rows, cols, std::move(values));
}

/// {"size": n, "cycles": "(1 2)(3 4)"} (1-based) or {"size": n, "image": [...]} (0-based).
inline ontic::Permutation permutation_from_json(const json &j) {
    if (!j.is_object() || !j.contains("size") || !is_index(j["size"])) {
        throw ParseError("permutation: expected an object with a positive integer size");
    }
    auto size = j["size"].get<std::size_t>();
    if (size == 0) {
        throw ParseError("permutation: size must be at least 1");
    }
    if (j.contains("cycles")) {
        if (!j["cycles"].is_string()) {
            throw ParseError("permutation: cycles must be a string");
        }
        return ontic::Permutation::from_cycles(j["cycles"].get<std::string>(), size);
    }
    if (j.contains("image")) {
        const json &image = j["image"];
        if (!image.is_array() || image.size() != size) {
            throw ParseError("permutation: image must list " + std::to_string(size) + " states");
        }
        std::vector<std::size_t> v;
        for (const auto &x : image) {
            if (!is_index(x)) {
                throw ParseError("permutation: image entries must be non-negative integers");
            }
            v.push_back(x.get<std::size_t>());
        }
        try {
            return ontic::Permutation(std::move(v));
        } catch (const InvalidValueError &e) {
            throw ParseError(e.what());
        }
    }
    throw ParseError("permutation: expected \"cycles\" or \"image\"");
}

inline json permutation_to_json(const ontic::Permutation &p) {
    return json{{"size", p.size()}, {"cycles", p.to_cycle_string()}};
}

inline json rational_to_json(const Rational &r) { return to_string(r); }

namespace detail {

inline void dump_canonical(const json &j, std::string &out) {
    switch (j.type()) {
        case json::value_t::object: {
            out += '{';
            bool first = true;
            // nlohmann::json objects are std::map-backed, so iteration is key-sorted.
            for (auto it = j.begin(); it != j.end(); ++it) {
                if (!first) {
                    out += ',';
                }
                first = false;
                out += json(it.key()).dump();
                out += ':';
                dump_canonical(it.value(), out);
            }
            out += '}';
            break;
        }
        case json::value_t::array: {
            out += '[';
            for (std::size_t i = 0; i < j.size(); ++i) {
                if (i) {
                    out += ',';
                }
                dump_canonical(j[i], out);
            }
            out += ']';
            break;
        }
        case json::value_t::number_float: {
            double v = j.get<double>();
            if (!std::isfinite(v)) {
                out += "null";
                break;
            }
            if (v == 0.0) {
                v = 0.0;  // folds −0
            }
            char buf[40];
            std::snprintf(buf, sizeof buf, "%.17g", v);
            out += buf;
            break;
        }
        default:
            out += j.dump();
    }
}

}  // namespace detail

/// Sorted keys, no whitespace, floats with 17 significant digits.
inline std::string canonical_dump(const json &j) {
    std::string out;
    detail::dump_canonical(j, out);
    return out;
}

/// 64-bit FNV-1a, rendered as 16 hex digits.
inline std::string content_hash(std::string_view bytes) {
    std::uint64_t h = 0xcbf29ce484222325ull;
    for (unsigned char c : bytes) {
        h ^= c;
        h *= 0x100000001b3ull;
    }
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

}  // namespace ctclab::io
