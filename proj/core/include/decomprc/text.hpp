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
#include <limits>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace decomprc {

inline constexpr std::size_t kNoOffset = std::numeric_limits<std::size_t>::max();

enum class TokenKind : std::uint8_t {
    Word,         // copied from source text, carries offsets
    Placeholder,  // the reserved ANS slot of a hop-2 sub-question
    Synthetic,    // inserted by a rewrite rule ("which", "when", a spliced answer)
    Sentinel,     // field separator in serialized scorer input
};

/// One word or punctuation mark. `text` is the lowercased form used for
/// matching and hashing; `surface` keeps the source casing.
struct Token {
    std::string text;
    std::string surface;
    std::size_t char_start = kNoOffset;
    std::size_t char_end = kNoOffset;
    bool capitalized = false;
    TokenKind kind = TokenKind::Word;

    bool has_offsets() const noexcept { return char_start != kNoOffset; }
    bool is_synthetic() const noexcept { return kind != TokenKind::Word; }

    static Token placeholder();
    static Token synthetic(std::string surface);
    static Token sentinel(std::string surface);
};

/// A question as an offset-preserving token sequence.
class TokenizedQuestion {
public:
    TokenizedQuestion() = default;
    /// Tokenizes `raw`; throws EmptyQuestion when it is blank.
    TokenizedQuestion(std::string id, std::string raw);

    /// Lays out arbitrary tokens (including sentinels) as a single-spaced
    /// sequence with fresh offsets. Used for scorer inputs.
    static TokenizedQuestion from_tokens(std::string id, std::span<const Token> tokens);

    const std::string& id() const noexcept { return id_; }
    const std::string& raw() const noexcept { return raw_; }
    std::span<const Token> tokens() const noexcept { return tokens_; }
    std::size_t size() const noexcept { return tokens_.size(); }
    const Token& operator[](std::size_t i) const { return tokens_[i]; }

    /// Copies tokens [begin, end).
    std::vector<Token> slice(std::size_t begin, std::size_t end) const;
    bool ends_with_question_mark() const;

private:
    std::string id_;
    std::string raw_;
    std::vector<Token> tokens_;
};

/// Whitespace split, then leading/trailing punctuation peeled into separate
/// tokens. Internal apostrophes stay ("Classic's" is one token). Returns an
/// empty vector for blank input.
std::vector<Token> tokenize_text(std::string_view raw);

/// Throws EmptyQuestion for blank input.
TokenizedQuestion tokenize(std::string_view raw);
TokenizedQuestion tokenize(std::string id, std::string_view raw);

/// Renders tokens back to text. Runs of tokens adjacent in `raw` keep the
/// original spacing; synthetic tokens get single spaces; closing punctuation
/// never gets a leading space.
std::string detokenize(std::span<const Token> tokens, std::string_view raw);

/// Uppercases the first ASCII letter when it is the first character.
std::string capitalize_first(std::string s);

std::string to_lower(std::string_view s);

bool is_wh_word(std::string_view lowered);
bool is_article(std::string_view lowered);
bool is_auxiliary(std::string_view lowered);
bool is_punctuation(std::string_view text);
bool is_closing_punctuation(std::string_view text);
bool has_digit(std::string_view text);

/// SQuAD-style answer normalization: lowercase, strip punctuation and the
/// articles a/an/the, collapse whitespace.
std::string normalize_answer(std::string_view s);

/// Whitespace tokens of normalize_answer(s).
std::vector<std::string> normalized_tokens(std::string_view s);

}  // namespace decomprc
