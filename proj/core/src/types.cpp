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

#include "decomprc/types.hpp"

#include <algorithm>
#include <cctype>

#include "decomprc/errors.hpp"

namespace decomprc {

namespace {

bool space_at(std::string_view s, std::size_t i) {
    return std::isspace(static_cast<unsigned char>(s[i])) != 0;
}

constexpr std::array<std::pair<DiscreteOp, std::string_view>, 10> kOpNames = {{
    {DiscreteOp::IsGreater, "is_greater"},
    {DiscreteOp::IsSmaller, "is_smaller"},
    {DiscreteOp::WhichIsGreater, "which_is_greater"},
    {DiscreteOp::WhichIsSmaller, "which_is_smaller"},
    {DiscreteOp::And, "and"},
    {DiscreteOp::Or, "or"},
    {DiscreteOp::WhichIsTrue, "which_is_true"},
    {DiscreteOp::IsEqual, "is_equal"},
    {DiscreteOp::NotEqual, "not_equal"},
    {DiscreteOp::Intersection, "intersection"},
}};

}  // namespace

std::string Paragraph::text() const {
    std::string out;
    for (const std::string& s : sentences) {
        if (!out.empty() && !s.empty() && !space_at(out, out.size() - 1) && !space_at(s, 0)) {
            out += ' ';
        }
        out += s;
    }
    return out;
}

std::string_view to_string(ReasoningType t) {
    switch (t) {
        case ReasoningType::Bridging: return "bridging";
        case ReasoningType::Intersection: return "intersection";
        case ReasoningType::Comparison: return "comparison";
        case ReasoningType::Original: return "original";
    }
    return "original";
}

ReasoningType reasoning_type_from_string(std::string_view s) {
    for (ReasoningType t : kAllReasoningTypes) {
        if (to_string(t) == s) return t;
    }
    throw ParseError("unknown reasoning type '" + std::string(s) + "'");
}

std::string_view to_string(DiscreteOp op) {
    for (const auto& [value, name] : kOpNames) {
        if (value == op) return name;
    }
    return "unknown";
}

DiscreteOp discrete_op_from_string(std::string_view s) {
    for (const auto& [value, name] : kOpNames) {
        if (name == s) return value;
    }
    throw ParseError("unknown discrete operation '" + std::string(s) + "'");
}

SubQuestion::SubQuestion(std::vector<Token> tokens, std::string source)
    : tokens_(std::move(tokens)), source_(std::move(source)) {
    const auto slots = std::count_if(tokens_.begin(), tokens_.end(), [](const Token& t) {
        return t.kind == TokenKind::Placeholder;
    });
    if (slots > 1) throw ArityError("sub-question has more than one ANS placeholder");
    has_placeholder_ = slots == 1;
}

SubQuestion SubQuestion::from_question(const TokenizedQuestion& q) {
    return SubQuestion({q.tokens().begin(), q.tokens().end()}, q.raw());
}

std::string SubQuestion::render() const { return capitalize_first(detokenize(tokens_, source_)); }

SubQuestion SubQuestion::substitute(std::string_view answer) const {
    if (!has_placeholder_) throw ArityError("sub-question has no ANS placeholder to fill");
    std::vector<Token> out;
    out.reserve(tokens_.size());
    for (const Token& t : tokens_) {
        out.push_back(t.kind == TokenKind::Placeholder ? Token::synthetic(std::string(answer)) : t);
    }
    return SubQuestion(std::move(out), source_);
}

Decomposition::Decomposition(ReasoningType type, std::vector<SubQuestion> sub_questions,
                             std::optional<DiscreteOp> op, std::optional<EntityPair> entities)
    : type_(type),
      sub_questions_(std::move(sub_questions)),
      op_(op),
      entities_(std::move(entities)) {}

Decomposition Decomposition::bridging(SubQuestion q1, SubQuestion q2) {
    if (q1.has_placeholder()) throw ArityError("bridging hop 1 must not contain ANS");
    if (!q2.has_placeholder()) throw ArityError("bridging hop 2 must contain ANS");
    return Decomposition(ReasoningType::Bridging, {std::move(q1), std::move(q2)}, std::nullopt,
                         std::nullopt);
}

Decomposition Decomposition::intersection(SubQuestion q1, SubQuestion q2) {
    if (q1.has_placeholder() || q2.has_placeholder()) {
        throw ArityError("intersection sub-questions must not contain ANS");
    }
    return Decomposition(ReasoningType::Intersection, {std::move(q1), std::move(q2)},
                         std::nullopt, std::nullopt);
}

Decomposition Decomposition::comparison(SubQuestion q1, SubQuestion q2, DiscreteOp op,
                                        EntityPair entities) {
    if (q1.has_placeholder() || q2.has_placeholder()) {
        throw ArityError("comparison sub-questions must not contain ANS");
    }
    if (entities.first_text.empty() || entities.second_text.empty()) {
        throw ArityError("comparison requires two named entities");
    }
    return Decomposition(ReasoningType::Comparison, {std::move(q1), std::move(q2)}, op,
                         std::move(entities));
}

Decomposition Decomposition::original(SubQuestion q) {
    if (q.has_placeholder()) throw ArityError("original question must not contain ANS");
    return Decomposition(ReasoningType::Original, {std::move(q)}, std::nullopt, std::nullopt);
}

}  // namespace decomprc
