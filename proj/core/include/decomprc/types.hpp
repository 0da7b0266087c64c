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

#include <array>
#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "decomprc/text.hpp"

namespace decomprc {

struct Paragraph {
    std::string title;
    std::vector<std::string> sentences;

    /// Sentences concatenated, inserting a space only where neither side
    /// already carries one.
    std::string text() const;
};

enum class HotpotType { Bridge, Comparison };
enum class Level { Easy, Medium, Hard };

struct SupportingFact {
    std::string title;
    std::size_t sentence_index = 0;
};

struct QAExample {
    std::string id;
    TokenizedQuestion question;
    std::vector<Paragraph> paragraphs;
    std::string gold_answer;
    std::vector<SupportingFact> supporting_facts;
    HotpotType hotpot_type = HotpotType::Bridge;
    Level level = Level::Medium;
};

/// Fixed order doubles as the arbitration tie-break order.
enum class ReasoningType { Bridging = 0, Intersection = 1, Comparison = 2, Original = 3 };

inline constexpr std::array<ReasoningType, 4> kAllReasoningTypes = {
    ReasoningType::Bridging, ReasoningType::Intersection, ReasoningType::Comparison,
    ReasoningType::Original};

std::string_view to_string(ReasoningType t);
ReasoningType reasoning_type_from_string(std::string_view s);

enum class DiscreteOp {
    IsGreater,
    IsSmaller,
    WhichIsGreater,
    WhichIsSmaller,
    And,
    Or,
    WhichIsTrue,
    IsEqual,
    NotEqual,
    Intersection,
};

std::string_view to_string(DiscreteOp op);
DiscreteOp discrete_op_from_string(std::string_view s);

/// Token positions [begin, end) in a question.
struct TokenSpan {
    std::size_t begin = 0;
    std::size_t end = 0;

    std::size_t length() const noexcept { return end - begin; }
    bool contains(std::size_t i) const noexcept { return i >= begin && i < end; }
    friend bool operator==(const TokenSpan&, const TokenSpan&) = default;
};

struct EntityPair {
    TokenSpan first;
    TokenSpan second;
    std::string first_text;
    std::string second_text;
};

/// A single-hop question produced by decomposition. At most one token may be
/// the ANS placeholder.
class SubQuestion {
public:
    SubQuestion() = default;
    SubQuestion(std::vector<Token> tokens, std::string source);

    static SubQuestion from_question(const TokenizedQuestion& q);

    std::span<const Token> tokens() const noexcept { return tokens_; }
    const std::string& source() const noexcept { return source_; }
    bool has_placeholder() const noexcept { return has_placeholder_; }

    /// Rendered text with the sentence-initial letter capitalized.
    std::string render() const;

    /// Replaces the placeholder with `answer` as one synthetic token.
    SubQuestion substitute(std::string_view answer) const;

private:
    std::vector<Token> tokens_;
    std::string source_;
    bool has_placeholder_ = false;
};

/// One candidate decomposition. The named constructors enforce the
/// per-type arity rules and throw ArityError on violation.
class Decomposition {
public:
    static Decomposition bridging(SubQuestion q1, SubQuestion q2);
    static Decomposition intersection(SubQuestion q1, SubQuestion q2);
    static Decomposition comparison(SubQuestion q1, SubQuestion q2, DiscreteOp op,
                                    EntityPair entities);
    static Decomposition original(SubQuestion q);

    ReasoningType type() const noexcept { return type_; }
    const std::vector<SubQuestion>& sub_questions() const noexcept { return sub_questions_; }
    std::optional<DiscreteOp> op() const noexcept { return op_; }
    const std::optional<EntityPair>& entities() const noexcept { return entities_; }

private:
    Decomposition(ReasoningType type, std::vector<SubQuestion> sub_questions,
                  std::optional<DiscreteOp> op, std::optional<EntityPair> entities);

    ReasoningType type_;
    std::vector<SubQuestion> sub_questions_;
    std::optional<DiscreteOp> op_;
    std::optional<EntityPair> entities_;
};

}  // namespace decomprc
