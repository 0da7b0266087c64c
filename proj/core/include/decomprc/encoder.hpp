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

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <memory>
#include <string>
#include <string_view>
#include <unordered_map>

#include <Eigen/Dense>

#include "decomprc/text.hpp"

namespace decomprc {

/// Per-token encoding, one row per token (n x h).
using Embedding = Eigen::MatrixXd;

/// Maps a token sequence to an n x h matrix. Implementations must be
/// deterministic and safe to call concurrently.
class Encoder {
public:
    virtual ~Encoder() = default;
    virtual std::string name() const = 0;
    virtual std::size_t width() const = 0;
    virtual Embedding encode(const TokenizedQuestion& q) const = 0;
};

/// Deterministic hand-built features standing in for a neural encoder.
///
/// Columns [0, k) one-hot the FNV-1a hash of the lowercased token. The eight
/// trailing columns are flags: wh-word, article, capitalized, comma or
/// conjunction, relative position, previous token is an article or wh-word,
/// contains a digit, terminal punctuation.
class FeatureEncoder final : public Encoder {
public:
    static constexpr std::size_t kFlagCount = 8;

    enum Flag : std::size_t {
        kWhWord = 0,
        kArticle,
        kCapitalized,
        kCommaOrConjunction,
        kRelativePosition,
        kAfterArticleOrWh,
        kNumeric,
        kTerminalPunctuation,
    };

    explicit FeatureEncoder(std::size_t buckets = 64);

    std::string name() const override;
    std::size_t width() const override { return buckets_ + kFlagCount; }
    Embedding encode(const TokenizedQuestion& q) const override;

    std::size_t buckets() const noexcept { return buckets_; }
    std::size_t bucket_of(std::string_view lowered) const;
    std::size_t flag_column(Flag f) const noexcept { return buckets_ + f; }

private:
    std::size_t buckets_;
};

/// Serves precomputed matrices keyed by question id; lets a real neural
/// encoder feed the pipeline. encode() throws MissingEmbedding for unknown
/// ids and ShapeError when the row count disagrees with the tokenization.
class StoredEmbeddings final : public Encoder {
public:
    StoredEmbeddings(std::size_t width, std::unordered_map<std::string, Embedding> rows);

    std::string name() const override { return "stored"; }
    std::size_t width() const override { return width_; }
    Embedding encode(const TokenizedQuestion& q) const override;

private:
    std::size_t width_;
    std::unordered_map<std::string, Embedding> rows_;
};

/// Embedding file: one {"question_id", "h", "rows"} object per line.
std::shared_ptr<const Encoder> load_external_embeddings(const std::filesystem::path& path);

std::uint64_t fnv1a(std::string_view s) noexcept;

}  // namespace decomprc
