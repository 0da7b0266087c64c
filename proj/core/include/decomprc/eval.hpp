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

// Answer metrics, dataset splits and adversarial comparison inversion.

#pragma once

#include <array>
#include <cstddef>
#include <filesystem>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "decomprc/decompose.hpp"
#include "decomprc/types.hpp"

namespace decomprc {

/// SQuAD-style token F1 over normalize_answer() tokens. A yes/no/noanswer
/// prediction or gold scores 0 unless both normalize identically. Two empty
/// strings score 1.
double token_f1(std::string_view prediction, std::string_view gold);

/// 1 when the normalized strings are equal.
double exact_match(std::string_view prediction, std::string_view gold);

/// Example-wise joint score of an original/inverted pair.
double joint_f1(double original_f1, double inverted_f1);

/// Per-example F1 of three single-hop models: id -> [f1, f1, f1].
using PerModelF1 = std::map<std::string, std::array<double, 3>>;

/// A JSON object of id -> [three numbers]. Throws ParseError otherwise.
PerModelF1 load_per_model_f1(const std::filesystem::path& path);
PerModelF1 parse_per_model_f1(std::string_view json_text);

/// Solvable by one hop: all three F1 > 0.
bool is_single_hop(const std::array<double, 3>& f1);

struct SingleMultiSplit {
    std::vector<std::string> single;
    std::vector<std::string> multi;
};

/// Throws ParseError naming the first example without a row.
SingleMultiSplit split_single_multi(std::span<const QAExample> examples, const PerModelF1& table);

struct InvertedQuestion {
    TokenizedQuestion question;
    DiscreteOp op;
    /// The input parse with spans shifted to the new token positions.
    ComparisonParse parse;
    /// Set for WhichIsTrue, whose inversion negates the predicate.
    bool low_confidence = false;
};

/// Swaps the comparative keyword for its antonym (or, for WhichIsTrue,
/// toggles "not" after the predicate's auxiliary) and returns dual(op).
/// Empty for And, Or and Intersection. Throws InversionError when the
/// keyword has no antonym or cannot be found.
std::optional<InvertedQuestion> invert_comparison(const TokenizedQuestion& q,
                                                  const ComparisonParse& parse, DiscreteOp op);

/// The antonym used by invert_comparison(), if any.
std::optional<std::string_view> antonym(std::string_view lowered);

struct SplitScore {
    double f1 = 0.0;
    double em = 0.0;
    std::size_t count = 0;
};

struct ExampleScore {
    std::string id;
    double f1 = 0.0;
    double em = 0.0;
    bool missing = false;
    HotpotType hotpot_type = HotpotType::Bridge;
    std::optional<bool> single_hop;
    std::optional<std::string> chosen_type;
};

struct EvalReport {
    SplitScore overall;
    SplitScore bridge;
    SplitScore comparison;
    std::optional<SplitScore> single;
    std::optional<SplitScore> multi;
    std::size_t missing = 0;
    std::vector<ExampleScore> examples;

    std::string to_json(int indent = 2) const;
};

/// Scores every gold example; a missing prediction scores 0 and is flagged.
/// `table` adds the single/multi split; `chosen_types` (id -> type name)
/// is copied into the per-example records.
EvalReport evaluate(const std::map<std::string, std::string>& predictions,
                    std::span<const QAExample> gold, const PerModelF1* table = nullptr,
                    const std::map<std::string, std::string>* chosen_types = nullptr);

}  // namespace decomprc
