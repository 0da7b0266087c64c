// Copyright 2026 The DecompRC Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <optional>
#include <string>
#include <string_view>

#include "decomprc/types.hpp"

namespace decomprc {

enum class ValueKind { Numeric, Boolean, Text };

std::string_view to_string(ValueKind k);

/// A sub-question answer interpreted for a comparison. Only the member
/// matching `kind` is meaningful.
struct ComparableValue {
    ValueKind kind = ValueKind::Text;
    double numeric = 0.0;
    bool boolean = false;
    std::string text;
    std::string source;
};

/// Numeric: a standalone 4-digit year wins, else the first number.
/// Boolean: case-insensitive yes/no. Text: normalize_answer().
/// Throws ValueParseError when the expected kind cannot be read.
ComparableValue parse_value(std::string_view answer, ValueKind expected);

/// The operand kind an operation consumes.
ValueKind value_kind(DiscreteOp op);

/// True for the Which* operations, whose result is one of the entities.
bool returns_entity(DiscreteOp op);

/// Evaluates op (ent1, v1) (ent2, v2). Returns "yes"/"no", an entity name,
/// or (for Intersection) the shared text; Intersection yields an empty
/// string when the two texts share no token.
///
/// Throws TypeMismatch when operand kinds do not fit the op, and
/// AmbiguousComparison for numeric ties under Which* or for WhichIsTrue when
/// both or neither operand is yes.
std::string apply(DiscreteOp op, std::string_view ent1, const ComparableValue& v1,
                  std::string_view ent2, const ComparableValue& v2);

/// The operation answering the inverted question, for the seven invertible
/// operations; empty for And, Or and Intersection.
std::optional<DiscreteOp> dual(DiscreteOp op);

/// Longest common contiguous run of normalized tokens; ties go to the
/// earliest run in `a`.
std::string longest_common_run(std::string_view a, std::string_view b);

}  // namespace decomprc
