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

#include <stdexcept>
#include <string>

namespace ctclab {

/// Operand shapes do not fit together (sizes, dimensions, subsystem splits).
struct DimensionError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

/// A value violates the invariants of its type (non-Hermitian state, non-bijective map, ...).
struct InvalidValueError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

/// Malformed textual or JSON input.
struct ParseError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

/// An iterative numerical routine failed to meet its tolerance.
struct SolverError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

}  // namespace ctclab
