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

// TF-IDF paragraph retrieval and distractor regeneration.
//
// Weights are sublinear tf (1 + log count) times smoothed idf
// (log((1 + D) / (1 + df)) + 1), L2-normalized. Terms are lowercased
// non-punctuation unigrams plus adjacent bigrams hashed into 2^20 buckets.

#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

#include "decomprc/types.hpp"

namespace decomprc {

/// (term id, weight), sorted by term id.
using SparseVector = std::vector<std::pair<std::uint64_t, double>>;

inline constexpr std::uint64_t kBigramBuckets = std::uint64_t{1} << 20;
inline constexpr std::uint64_t kBigramOffset = std::uint64_t{1} << 32;

struct RetrievalHit {
    std::size_t document = 0;
    double score = 0.0;
};

class TfIdfIndex {
public:
    /// Throws EmptyCorpus for an empty corpus.
    static TfIdfIndex build(std::vector<Paragraph> corpus);

    const std::vector<Paragraph>& documents() const noexcept { return documents_; }
    std::size_t vocabulary_size() const noexcept { return vocabulary_.size(); }

    /// Unigram id, or nullopt for out-of-vocabulary words.
    std::optional<std::uint64_t> unigram_id(std::string_view lowered) const;
    static std::uint64_t bigram_id(std::string_view first, std::string_view second);
    double idf(std::uint64_t term) const;

    const SparseVector& document_vector(std::size_t i) const { return vectors_.at(i); }
    /// Query-side vector: out-of-index terms are dropped.
    SparseVector vectorize(std::string_view text) const;

    /// Top-k by cosine, ties by document index. k larger than the corpus
    /// returns everything.
    std::vector<RetrievalHit> query(std::string_view text, std::size_t k) const;

private:
    std::vector<Paragraph> documents_;
    std::unordered_map<std::string, std::uint64_t> vocabulary_;
    std::unordered_map<std::uint64_t, double> idf_;
    std::vector<SparseVector> vectors_;
};

/// The lowercased non-punctuation words the index sees.
std::vector<std::string> index_words(std::string_view text);

double cosine(const SparseVector& a, const SparseVector& b);

/// Replaces the distractors of `example` with the top-k retrieved paragraphs
/// that are neither original paragraphs (by title or text) nor gold, and do
/// not contain the normalized gold answer. Gold paragraphs are those named by
/// supporting facts. The result is shuffled with `seed`.
///
/// Throws InsufficientDistractors when fewer than k paragraphs qualify and
/// NoContext when no gold paragraph is identifiable.
QAExample regenerate_distractors(const QAExample& example, const TfIdfIndex& index,
                                 std::size_t k = 8, std::uint64_t seed = 0);

}  // namespace decomprc
