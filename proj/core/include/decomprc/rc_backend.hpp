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

// Single-hop reading comprehension contract.
//
// A backend scores every paragraph with four class scores (span, yes, no,
// none) and start/end distributions over the paragraph's tokens. The answer
// comes from the paragraph with the lowest none-score.

#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <memory>
#include <mutex>
#include <ostream>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include "decomprc/types.hpp"

namespace decomprc {

struct ParagraphScores {
    double y_span = 0.0;
    double y_yes = 0.0;
    double y_no = 0.0;
    double y_none = 0.0;
    std::vector<double> p_start;
    std::vector<double> p_end;
    std::size_t paragraph_index = 0;
};

enum class AnswerKind { Span, Yes, No };

std::string_view to_string(AnswerKind k);

struct AnswerCandidate {
    AnswerKind kind = AnswerKind::Span;
    std::string text;
    /// Inclusive token range in the paragraph; meaningful for spans only.
    std::size_t start = 0;
    std::size_t end = 0;
    double confidence = 0.0;
    std::size_t paragraph_index = 0;
};

/// Tokens the span distributions index into.
std::vector<Token> paragraph_tokens(const Paragraph& p);

/// Throws ParseError unless p_start and p_end are non-negative, finite and
/// sum to 1 within 1e-6.
void validate_distributions(const ParagraphScores& s);

struct SpanChoice {
    std::size_t start = 0;
    std::size_t end = 0;
    double probability = 0.0;
};

/// argmax over j <= k of p_start[j] * p_end[k] in one pass; ties go to the
/// smallest (j, k). Requires equal, non-zero lengths.
SpanChoice best_span(std::span<const double> p_start, std::span<const double> p_end);

/// The answer one paragraph would give: kind by argmax of the three answer
/// scores (ties span > yes > no), span by best_span(), confidence as the
/// chosen class's softmax weight over all four scores, times the joint span
/// probability for spans.
AnswerCandidate paragraph_answer(const ParagraphScores& s, const Paragraph& p);

/// Answer from the paragraph with the lowest y_none (ties: lowest index).
/// Throws NoContext when there are no paragraphs or no scores.
AnswerCandidate select_answer(std::span<const ParagraphScores> scores,
                              std::span<const Paragraph> paragraphs);

/// paragraph_answer() for every scored paragraph, in score order.
std::vector<AnswerCandidate> per_paragraph_answers(std::span<const ParagraphScores> scores,
                                                   std::span<const Paragraph> paragraphs);

class RCBackend {
public:
    virtual ~RCBackend() = default;
    virtual std::string name() const = 0;
    /// Backends returning false are wrapped in a SerializedBackend by the
    /// orchestrator.
    virtual bool concurrent_safe() const { return true; }
    /// Exactly one ParagraphScores per paragraph, paragraph_index set.
    virtual std::vector<ParagraphScores> score(const SubQuestion& q,
                                               std::span<const Paragraph> paragraphs) const = 0;
};

/// Scores then selects. Throws NoContext for an empty paragraph list and
/// Error if q still carries the ANS placeholder.
AnswerCandidate answer(const RCBackend& backend, const SubQuestion& q,
                       std::span<const Paragraph> paragraphs);

/// Funnels every call to `inner` through one mutex.
class SerializedBackend final : public RCBackend {
public:
    explicit SerializedBackend(std::shared_ptr<const RCBackend> inner);
    std::string name() const override;
    std::vector<ParagraphScores> score(const SubQuestion& q,
                                       std::span<const Paragraph> paragraphs) const override;

private:
    std::shared_ptr<const RCBackend> inner_;
    mutable std::mutex mu_;
};

/// Hex SHA-256 of the UTF-8 bytes.
std::string sha256_hex(std::string_view text);

/// Serves scores recorded from an external model, keyed by
/// (SHA-256 of the rendered sub-question, paragraph index).
class ReplayBackend final : public RCBackend {
public:
    ReplayBackend() = default;
    /// One {"subq_sha256", "paragraph_index", "y", "p_start", "p_end"} per line.
    static ReplayBackend load(const std::filesystem::path& path);
    static ReplayBackend parse(std::istream& in, const std::string& name = "<replay>");

    void add(const std::string& subq_sha256, ParagraphScores s);
    std::size_t size() const noexcept { return table_.size(); }

    std::string name() const override { return "replay"; }
    /// Throws MissingScores for an unknown (sub-question, paragraph) key.
    std::vector<ParagraphScores> score(const SubQuestion& q,
                                       std::span<const Paragraph> paragraphs) const override;

private:
    std::unordered_map<std::string, ParagraphScores> table_;
};

void write_replay_record(std::ostream& out, std::string_view rendered_subq,
                         const ParagraphScores& s);

struct LexicalConfig {
    /// Question terms within this many tokens of a candidate count towards it.
    std::size_t window = 8;
    /// Mass on the chosen start/end token; the rest is spread uniformly.
    double peak = 0.9;
};

/// TF-IDF overlap stand-in for a neural reader. y_none is 1 - cosine between
/// question and paragraph; the span is the wh-typed candidate closest to
/// question terms ("when"/"how many" take numbers, others take capitalized
/// runs); questions without a wh-word get yes/no scores from term coverage
/// and negation cues.
class LexicalBackend final : public RCBackend {
public:
    explicit LexicalBackend(LexicalConfig config = {});
    std::string name() const override { return "lexical"; }
    std::vector<ParagraphScores> score(const SubQuestion& q,
                                       std::span<const Paragraph> paragraphs) const override;

private:
    LexicalConfig config_;
};

/// Answers from a fixed question -> answer table, pointing the span at the
/// first paragraph that contains the answer tokens. Questions match after
/// normalize_answer(). Unknown questions, or answers found in no paragraph,
/// throw MissingScores. yes/no answers are served from paragraph 0.
class FixtureBackend final : public RCBackend {
public:
    explicit FixtureBackend(std::unordered_map<std::string, std::string> answers);
    /// A JSON object mapping question text to answer text.
    static FixtureBackend load(const std::filesystem::path& path);

    std::string name() const override { return "oracle-fixture"; }
    std::vector<ParagraphScores> score(const SubQuestion& q,
                                       std::span<const Paragraph> paragraphs) const override;

private:
    std::unordered_map<std::string, std::string> answers_;
};

struct AugmentConfig {
    double drop_probability = 0.05;
    double wh_replace_probability = 0.05;
};

/// Noise for training a reader on ungrammatical sub-questions: each token is
/// dropped with drop_probability; each surviving wh-word becomes "the" with
/// wh_replace_probability. Deterministic for a given seed.
std::vector<Token> augment_question(std::span<const Token> tokens, std::uint64_t seed,
                                    const AugmentConfig& config = {});

}  // namespace decomprc
