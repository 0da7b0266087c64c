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

// Turning pointer indices into sub-questions.
//
// Bridging and intersection are pure slicing. Comparison runs three rule
// passes over the question and two entity spans: parse the coordination
// structure, pick one of the ten discrete operations, and rewrite the
// question into one value question per entity.

#pragma once

#include <array>
#include <cstddef>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "decomprc/encoder.hpp"
#include "decomprc/pointer.hpp"
#include "decomprc/types.hpp"

namespace decomprc {

/// Splits q at ind1 <= ind2 < ind3: hop 1 is Q[ind1:ind3] with the nearest
/// article in the five tokens before ind2 turned into "which" (or "which"
/// inserted before ind2), hop 2 is Q[:ind1] ANS Q[ind3:]. Throws SpanError
/// on invalid indices.
Decomposition generate_bridging(const TokenizedQuestion& q, std::size_t ind1, std::size_t ind2,
                                std::size_t ind3);

/// Splits q into s1 = Q[:ind1], s2 = Q[ind1:ind2], s3 = Q[ind2:]. Requires
/// 0 < ind1 < ind2 < n; throws SpanError otherwise.
Decomposition generate_intersection(const TokenizedQuestion& q, std::size_t ind1,
                                    std::size_t ind2);

struct ComparisonParse {
    TokenSpan entity1;
    TokenSpan entity2;
    /// "or"/"and" between the entities, or the comparative connective
    /// ("before", "than", ...) when no conjunction is present.
    std::size_t coordination = 0;
    std::optional<std::size_t> preconjunct;
    std::optional<TokenSpan> head_entity;
    bool is_yes_no = false;

    /// Either-question vs both-question, from the preconjunct if present,
    /// else from the coordination word.
    bool is_either(const TokenizedQuestion& q) const;
    bool is_both(const TokenizedQuestion& q) const;
};

/// Requires 0 <= ind1 < ind2 <= ind3 < ind4 <= n (SpanError). Throws
/// NotComparison when nothing links the two entities.
ComparisonParse parse_comparison(const TokenizedQuestion& q, std::array<std::size_t, 4> ind);

/// Position of the comparative keyword that selects a numeric operation,
/// searched outside the entity spans. `greater` says which direction.
struct ComparativeTrigger {
    std::size_t position = 0;
    bool greater = false;
};
std::optional<ComparativeTrigger> find_trigger(const TokenizedQuestion& q,
                                               const ComparisonParse& parse);

bool is_greater_keyword(std::string_view lowered);
bool is_smaller_keyword(std::string_view lowered);

/// Chooses the discrete operation. Throws UnsupportedComparison when no
/// branch applies.
DiscreteOp find_op(const ComparisonParse& parse, const TokenizedQuestion& q);

/// One entity-scoped sub-question per entity. Throws RewriteError naming
/// the pattern that could not be rewritten.
std::pair<SubQuestion, SubQuestion> form_subq(const TokenizedQuestion& q,
                                              const ComparisonParse& parse, DiscreteOp op);

/// parse_comparison, find_op and form_subq in sequence.
Decomposition generate_comparison(const TokenizedQuestion& q, std::array<std::size_t, 4> ind);

/// Rule-based entity spans for bootstrapping comparison annotations:
/// capitalized runs flanking "or"/"and", else the first two capitalized runs.
std::optional<std::array<std::size_t, 4>> propose_entities(const TokenizedQuestion& q);

struct PointerHeads {
    std::optional<PointerHead> bridging;
    std::optional<PointerHead> intersection;
    /// When absent, comparison entities come from propose_entities().
    std::optional<PointerHead> comparison;
};

struct SkippedType {
    ReasoningType type;
    std::string reason;
};

struct DecompositionSet {
    std::vector<Decomposition> candidates;
    std::vector<SkippedType> skipped;
};

/// Every reasoning type the question supports, always ending with Original.
/// Per-type failures are recorded in `skipped`, never thrown.
DecompositionSet decompose_all(const TokenizedQuestion& q, const PointerHeads& heads,
                               const Encoder& encoder);

}  // namespace decomprc
