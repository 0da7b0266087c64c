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

#include "decomprc/discrete_ops.hpp"

#include <cmath>
#include <regex>
#include <vector>

#include "decomprc/errors.hpp"

namespace decomprc {

namespace {

std::string yes_no(bool b) { return b ? "yes" : "no"; }

void require_kind(DiscreteOp op, const ComparableValue& v) {
    if (v.kind != value_kind(op)) {
        throw TypeMismatch(std::string(to_string(op)) + " expects " +
                           std::string(to_string(value_kind(op))) + " operands, got " +
                           std::string(to_string(v.kind)));
    }
}

}  // namespace

std::string_view to_string(ValueKind k) {
    switch (k) {
        case ValueKind::Numeric: return "numeric";
        case ValueKind::Boolean: return "boolean";
        case ValueKind::Text: return "text";
    }
    return "text";
}

ComparableValue parse_value(std::string_view answer, ValueKind expected) {
    ComparableValue v;
    v.kind = expected;
    v.source = std::string(answer);
    switch (expected) {
        case ValueKind::Numeric: {
            static const std::regex number(R"(-?\d+(?:,\d{3})*(?:\.\d+)?)");
            std::optional<double> first;
            std::optional<double> year;
            const std::string s(answer);
            for (auto it = std::sregex_iterator(s.begin(), s.end(), number);
                 it != std::sregex_iterator(); ++it) {
                std::string m = it->str();
                const bool four_digits = m.size() == 4 && m.find_first_not_of("0123456789") == std::string::npos;
                std::erase(m, ',');
                const double value = std::stod(m);
                if (!first) first = value;
                if (four_digits && !year) year = value;
            }
            if (!first) throw ValueParseError("no number in '" + v.source + "'");
            v.numeric = year.value_or(*first);
            if (!std::isfinite(v.numeric)) throw ValueParseError("number out of range in '" + v.source + "'");
            break;
        }
        case ValueKind::Boolean: {
            const std::string norm = normalize_answer(answer);
            if (norm == "yes") {
                v.boolean = true;
            } else if (norm == "no") {
                v.boolean = false;
            } else {
                throw ValueParseError("'" + v.source + "' is neither yes nor no");
            }
            break;
        }
        case ValueKind::Text:
            v.text = normalize_answer(answer);
            break;
    }
    return v;
}

ValueKind value_kind(DiscreteOp op) {
    switch (op) {
        case DiscreteOp::IsGreater:
        case DiscreteOp::IsSmaller:
        case DiscreteOp::WhichIsGreater:
        case DiscreteOp::WhichIsSmaller:
            return ValueKind::Numeric;
        case DiscreteOp::And:
        case DiscreteOp::Or:
        case DiscreteOp::WhichIsTrue:
            return ValueKind::Boolean;
        case DiscreteOp::IsEqual:
        case DiscreteOp::NotEqual:
        case DiscreteOp::Intersection:
            return ValueKind::Text;
    }
    return ValueKind::Text;
}

bool returns_entity(DiscreteOp op) {
    return op == DiscreteOp::WhichIsGreater || op == DiscreteOp::WhichIsSmaller ||
           op == DiscreteOp::WhichIsTrue;
}

std::string longest_common_run(std::string_view a, std::string_view b) {
    const auto ta = normalized_tokens(a);
    const auto tb = normalized_tokens(b);
    // run[i][j]: length of the common run ending at ta[i-1], tb[j-1].
    std::vector<std::vector<std::size_t>> run(ta.size() + 1, std::vector<std::size_t>(tb.size() + 1, 0));
    std::size_t best_len = 0;
    std::size_t best_end = 0;
    for (std::size_t i = 1; i <= ta.size(); ++i) {
        for (std::size_t j = 1; j <= tb.size(); ++j) {
            if (ta[i - 1] != tb[j - 1]) continue;
            run[i][j] = run[i - 1][j - 1] + 1;
            // Strictly longer only, so the earliest end in `a` wins ties.
            if (run[i][j] > best_len) {
                best_len = run[i][j];
                best_end = i;
            }
        }
    }
    std::string out;
    for (std::size_t i = best_end - best_len; i < best_end; ++i) {
        if (!out.empty()) out += ' ';
        out += ta[i];
    }
    return out;
}

std::string apply(DiscreteOp op, std::string_view ent1, const ComparableValue& v1,
                  std::string_view ent2, const ComparableValue& v2) {
    require_kind(op, v1);
    require_kind(op, v2);
    switch (op) {
        case DiscreteOp::IsGreater:
        case DiscreteOp::IsSmaller:
            if (v1.numeric == v2.numeric) {
                throw AmbiguousComparison("both values equal " + std::to_string(v1.numeric));
            }
            return yes_no(op == DiscreteOp::IsGreater ? v1.numeric > v2.numeric
                                                      : v1.numeric < v2.numeric);
        case DiscreteOp::WhichIsGreater:
        case DiscreteOp::WhichIsSmaller: {
            if (v1.numeric == v2.numeric) {
                throw AmbiguousComparison("both entities have value " + std::to_string(v1.numeric));
            }
            const bool first_greater = v1.numeric > v2.numeric;
            const bool pick_first = op == DiscreteOp::WhichIsGreater ? first_greater : !first_greater;
            return std::string(pick_first ? ent1 : ent2);
        }
        case DiscreteOp::And:
            return yes_no(v1.boolean && v2.boolean);
        case DiscreteOp::Or:
            return yes_no(v1.boolean || v2.boolean);
        case DiscreteOp::WhichIsTrue:
            if (v1.boolean == v2.boolean) {
                throw AmbiguousComparison(v1.boolean ? "both entities satisfy the predicate"
                                                     : "neither entity satisfies the predicate");
            }
            return std::string(v1.boolean ? ent1 : ent2);
        case DiscreteOp::IsEqual:
            return yes_no(v1.text == v2.text);
        case DiscreteOp::NotEqual:
            return yes_no(v1.text != v2.text);
        case DiscreteOp::Intersection:
            return longest_common_run(v1.source, v2.source);
    }
    return {};
}

std::optional<DiscreteOp> dual(DiscreteOp op) {
    switch (op) {
        case DiscreteOp::IsGreater: return DiscreteOp::IsSmaller;
        case DiscreteOp::IsSmaller: return DiscreteOp::IsGreater;
        case DiscreteOp::WhichIsGreater: return DiscreteOp::WhichIsSmaller;
        case DiscreteOp::WhichIsSmaller: return DiscreteOp::WhichIsGreater;
        case DiscreteOp::WhichIsTrue: return DiscreteOp::WhichIsTrue;
        case DiscreteOp::IsEqual: return DiscreteOp::NotEqual;
        case DiscreteOp::NotEqual: return DiscreteOp::IsEqual;
        case DiscreteOp::And:
        case DiscreteOp::Or:
        case DiscreteOp::Intersection:
            return std::nullopt;
    }
    return std::nullopt;
}

}  // namespace decomprc
