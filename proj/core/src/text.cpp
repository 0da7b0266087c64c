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

#include "decomprc/text.hpp"

#include <algorithm>
#include <array>
#include <cctype>

#include "decomprc/errors.hpp"

namespace decomprc {

namespace {

constexpr std::string_view kPeelable = ".,?!'\"():;";

bool is_space(char c) { return std::isspace(static_cast<unsigned char>(c)) != 0; }

bool peelable(char c) { return kPeelable.find(c) != std::string_view::npos; }

Token make_word(std::string_view raw, std::size_t begin, std::size_t end) {
    Token t;
    t.surface = std::string(raw.substr(begin, end - begin));
    t.text = to_lower(t.surface);
    t.char_start = begin;
    t.char_end = end;
    t.capitalized = !t.surface.empty() && std::isupper(static_cast<unsigned char>(t.surface[0]));
    return t;
}

template <std::size_t N>
bool contains(const std::array<std::string_view, N>& set, std::string_view w) {
    return std::find(set.begin(), set.end(), w) != set.end();
}

constexpr std::array<std::string_view, 9> kWhWords = {
    "what", "which", "who", "whom", "whose", "where", "when", "why", "how"};
constexpr std::array<std::string_view, 3> kArticles = {"the", "a", "an"};
constexpr std::array<std::string_view, 14> kAuxiliaries = {
    "is", "are", "was", "were", "do", "does", "did",
    "has", "have", "had", "can", "could", "will", "would"};

}  // namespace

Token Token::placeholder() {
    Token t;
    t.text = "ans";
    t.surface = "ANS";
    t.kind = TokenKind::Placeholder;
    return t;
}

Token Token::synthetic(std::string surface) {
    Token t;
    t.text = to_lower(surface);
    t.capitalized = !surface.empty() && std::isupper(static_cast<unsigned char>(surface[0]));
    t.surface = std::move(surface);
    t.kind = TokenKind::Synthetic;
    return t;
}

Token Token::sentinel(std::string surface) {
    Token t = synthetic(std::move(surface));
    t.kind = TokenKind::Sentinel;
    return t;
}

std::string to_lower(std::string_view s) {
    std::string out(s);
    std::transform(out.begin(), out.end(), out.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    return out;
}

bool is_wh_word(std::string_view w) { return contains(kWhWords, w); }
bool is_article(std::string_view w) { return contains(kArticles, w); }
bool is_auxiliary(std::string_view w) { return contains(kAuxiliaries, w); }

bool is_punctuation(std::string_view text) {
    return !text.empty() && std::all_of(text.begin(), text.end(), [](unsigned char c) {
        return std::ispunct(c) != 0;
    });
}

bool is_closing_punctuation(std::string_view text) {
    return text == "?" || text == "." || text == "!" || text == "," || text == ";" ||
           text == ":" || text == ")";
}

bool has_digit(std::string_view text) {
    return std::any_of(text.begin(), text.end(),
                       [](unsigned char c) { return std::isdigit(c) != 0; });
}

std::vector<Token> tokenize_text(std::string_view raw) {
    std::vector<Token> tokens;
    std::size_t i = 0;
    while (i < raw.size()) {
        while (i < raw.size() && is_space(raw[i])) ++i;
        if (i >= raw.size()) break;
        std::size_t j = i;
        while (j < raw.size() && !is_space(raw[j])) ++j;

        // [i, j) is one whitespace chunk; peel punctuation off both ends.
        std::size_t lo = i;
        std::size_t hi = j;
        while (lo < hi && peelable(raw[lo])) {
            tokens.push_back(make_word(raw, lo, lo + 1));
            ++lo;
        }
        std::vector<Token> trailing;
        while (hi > lo && peelable(raw[hi - 1])) {
            trailing.push_back(make_word(raw, hi - 1, hi));
            --hi;
        }
        if (lo < hi) tokens.push_back(make_word(raw, lo, hi));
        tokens.insert(tokens.end(), trailing.rbegin(), trailing.rend());
        i = j;
    }
    return tokens;
}

TokenizedQuestion::TokenizedQuestion(std::string id, std::string raw)
    : id_(std::move(id)), raw_(std::move(raw)), tokens_(tokenize_text(raw_)) {
    if (tokens_.empty()) throw EmptyQuestion("question is empty");
}

TokenizedQuestion TokenizedQuestion::from_tokens(std::string id, std::span<const Token> tokens) {
    TokenizedQuestion q;
    q.id_ = std::move(id);
    for (const Token& src : tokens) {
        if (!q.raw_.empty()) q.raw_ += ' ';
        Token t = src;
        t.char_start = q.raw_.size();
        q.raw_ += t.surface;
        t.char_end = q.raw_.size();
        q.tokens_.push_back(std::move(t));
    }
    if (q.tokens_.empty()) throw EmptyQuestion("token sequence is empty");
    return q;
}

std::vector<Token> TokenizedQuestion::slice(std::size_t begin, std::size_t end) const {
    begin = std::min(begin, tokens_.size());
    end = std::clamp(end, begin, tokens_.size());
    return {tokens_.begin() + static_cast<std::ptrdiff_t>(begin),
            tokens_.begin() + static_cast<std::ptrdiff_t>(end)};
}

bool TokenizedQuestion::ends_with_question_mark() const {
    return !tokens_.empty() && tokens_.back().text == "?";
}

TokenizedQuestion tokenize(std::string_view raw) { return TokenizedQuestion("", std::string(raw)); }

TokenizedQuestion tokenize(std::string id, std::string_view raw) {
    return TokenizedQuestion(std::move(id), std::string(raw));
}

std::string detokenize(std::span<const Token> tokens, std::string_view raw) {
    std::string out;
    for (std::size_t i = 0; i < tokens.size(); ++i) {
        const Token& tok = tokens[i];
        const bool from_raw = tok.has_offsets() && tok.kind == TokenKind::Word &&
                              tok.char_end <= raw.size();
        if (i > 0) {
            const Token& prev = tokens[i - 1];
            bool adjacent = false;
            if (from_raw && prev.has_offsets() && prev.kind == TokenKind::Word &&
                prev.char_end <= tok.char_start) {
                std::string_view gap = raw.substr(prev.char_end, tok.char_start - prev.char_end);
                adjacent = std::all_of(gap.begin(), gap.end(), is_space);
                if (adjacent) out += gap;
            }
            if (!adjacent && !is_closing_punctuation(tok.surface)) out += ' ';
        }
        if (from_raw) {
            out += raw.substr(tok.char_start, tok.char_end - tok.char_start);
        } else {
            out += tok.surface;
        }
    }
    return out;
}

std::string capitalize_first(std::string s) {
    if (!s.empty() && std::islower(static_cast<unsigned char>(s[0]))) {
        s[0] = static_cast<char>(std::toupper(static_cast<unsigned char>(s[0])));
    }
    return s;
}

std::vector<std::string> normalized_tokens(std::string_view s) {
    std::string cleaned;
    cleaned.reserve(s.size());
    for (unsigned char c : s) {
        if (std::ispunct(c)) continue;
        cleaned += static_cast<char>(std::tolower(c));
    }
    std::vector<std::string> out;
    std::size_t i = 0;
    while (i < cleaned.size()) {
        while (i < cleaned.size() && is_space(cleaned[i])) ++i;
        std::size_t j = i;
        while (j < cleaned.size() && !is_space(cleaned[j])) ++j;
        if (j > i) {
            std::string w = cleaned.substr(i, j - i);
            if (!is_article(w)) out.push_back(std::move(w));
        }
        i = j;
    }
    return out;
}

std::string normalize_answer(std::string_view s) {
    std::string out;
    for (const std::string& w : normalized_tokens(s)) {
        if (!out.empty()) out += ' ';
        out += w;
    }
    return out;
}

}  // namespace decomprc
