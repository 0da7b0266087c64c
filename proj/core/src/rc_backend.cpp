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

#include "decomprc/rc_backend.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <iomanip>
#include <map>
#include <random>
#include <sstream>
#include <unordered_set>

#include <nlohmann/json.hpp>
#include <openssl/evp.h>

#include "decomprc/errors.hpp"
#include "json_util.hpp"

namespace decomprc {

using nlohmann::json;

namespace {

std::string replay_key(const std::string& hash, std::size_t paragraph) {
    return hash + "#" + std::to_string(paragraph);
}

void check_distribution(const std::vector<double>& p, const char* name) {
    if (p.empty()) throw ParseError(std::string(name) + " is empty");
    double sum = 0.0;
    for (double v : p) {
        if (!std::isfinite(v) || v < 0.0) throw ParseError(std::string(name) + " has a negative or non-finite entry");
        sum += v;
    }
    if (std::abs(sum - 1.0) > 1e-6) {
        throw ParseError(std::string(name) + " sums to " + std::to_string(sum) + ", not 1");
    }
}

std::vector<double> peaked(std::size_t n, std::size_t at, double peak) {
    std::vector<double> p(n, (1.0 - peak) / static_cast<double>(n));
    p[at] += peak;
    return p;
}

std::vector<double> uniform(std::size_t n) {
    return std::vector<double>(n, 1.0 / static_cast<double>(n));
}

constexpr std::array<std::string_view, 30> kStopwords = {
    "the", "a",   "an",  "of",   "in",   "on",   "at",    "to",   "for",  "by",
    "and", "or",  "is",  "are",  "was",  "were", "do",    "does", "did",  "has",
    "have", "had", "with", "from", "as",  "that", "this",  "it",   "its",  "be"};

bool is_stopword(std::string_view w) {
    return std::find(kStopwords.begin(), kStopwords.end(), w) != kStopwords.end() ||
           is_wh_word(w);
}

std::vector<std::string> content_terms(std::span<const Token> toks) {
    std::vector<std::string> out;
    for (const auto& t : toks) {
        if (t.kind == TokenKind::Word || t.kind == TokenKind::Synthetic) {
            if (!is_punctuation(t.text) && !is_stopword(t.text)) out.push_back(t.text);
        }
    }
    return out;
}

bool is_negation(std::string_view w) { return w == "not" || w == "never" || w == "no" || w == "n't"; }

enum class WantedType { Number, Name, Any };

WantedType wanted_type(std::span<const Token> toks) {
    for (std::size_t i = 0; i < toks.size(); ++i) {
        const auto& w = toks[i].text;
        if (w == "when") return WantedType::Number;
        if (w == "how" && i + 1 < toks.size() &&
            (toks[i + 1].text == "many" || toks[i + 1].text == "much" || toks[i + 1].text == "old")) {
            return WantedType::Number;
        }
        if (w == "who" || w == "whom" || w == "whose" || w == "which" || w == "what" || w == "where") {
            return WantedType::Name;
        }
    }
    return WantedType::Any;
}

bool asks_wh(std::span<const Token> toks) {
    return std::any_of(toks.begin(), toks.end(), [](const Token& t) { return is_wh_word(t.text); });
}

struct Candidate {
    std::size_t start;
    std::size_t end;  // inclusive
};

std::vector<Candidate> candidates(const std::vector<Token>& ptoks, WantedType type) {
    std::vector<Candidate> out;
    if (type == WantedType::Number) {
        for (std::size_t i = 0; i < ptoks.size(); ++i) {
            if (has_digit(ptoks[i].text)) out.push_back({i, i});
        }
        return out;
    }
    for (std::size_t i = 0; i < ptoks.size();) {
        if (!ptoks[i].capitalized) {
            ++i;
            continue;
        }
        std::size_t j = i;
        while (j + 1 < ptoks.size() &&
               (ptoks[j + 1].capitalized ||
                (ptoks[j + 1].text == "of" && j + 2 < ptoks.size() && ptoks[j + 2].capitalized))) {
            ++j;
        }
        out.push_back({i, j});
        i = j + 1;
    }
    if (type == WantedType::Any && out.empty()) {
        for (std::size_t i = 0; i < ptoks.size(); ++i) {
            if (!is_punctuation(ptoks[i].text) && !is_stopword(ptoks[i].text)) out.push_back({i, i});
        }
    }
    return out;
}

}  // namespace

std::string_view to_string(AnswerKind k) {
    switch (k) {
        case AnswerKind::Span: return "span";
        case AnswerKind::Yes: return "yes";
        case AnswerKind::No: return "no";
    }
    return "span";
}

std::vector<Token> paragraph_tokens(const Paragraph& p) { return tokenize_text(p.text()); }

void validate_distributions(const ParagraphScores& s) {
    check_distribution(s.p_start, "p_start");
    check_distribution(s.p_end, "p_end");
    if (s.p_start.size() != s.p_end.size()) throw ParseError("p_start and p_end differ in length");
    for (double y : {s.y_span, s.y_yes, s.y_no, s.y_none}) {
        if (!std::isfinite(y)) throw ParseError("non-finite class score");
    }
}

SpanChoice best_span(std::span<const double> p_start, std::span<const double> p_end) {
    if (p_start.empty() || p_start.size() != p_end.size()) {
        throw ShapeError("start/end distributions must be non-empty and equally long");
    }
    SpanChoice best{0, 0, p_start[0] * p_end[0]};
    std::size_t arg_start = 0;  // argmax of p_start[0..k]
    for (std::size_t k = 0; k < p_end.size(); ++k) {
        if (p_start[k] > p_start[arg_start]) arg_start = k;
        const double v = p_start[arg_start] * p_end[k];
        if (v > best.probability) best = {arg_start, k, v};
    }
    return best;
}

AnswerCandidate paragraph_answer(const ParagraphScores& s, const Paragraph& p) {
    const std::array<double, 4> y = {s.y_span, s.y_yes, s.y_no, s.y_none};
    const double m = *std::max_element(y.begin(), y.end());
    double z = 0.0;
    for (double v : y) z += std::exp(v - m);

    std::size_t kind = 0;
    for (std::size_t i = 1; i < 3; ++i) {
        if (y[i] > y[kind]) kind = i;
    }
    AnswerCandidate c;
    c.paragraph_index = s.paragraph_index;
    c.confidence = std::exp(y[kind] - m) / z;
    if (kind == 1) {
        c.kind = AnswerKind::Yes;
        c.text = "yes";
        return c;
    }
    if (kind == 2) {
        c.kind = AnswerKind::No;
        c.text = "no";
        return c;
    }
    const auto toks = paragraph_tokens(p);
    if (toks.size() != s.p_start.size()) {
        throw ShapeError("span distributions cover " + std::to_string(s.p_start.size()) +
                         " tokens but paragraph '" + p.title + "' has " + std::to_string(toks.size()));
    }
    const SpanChoice span = best_span(s.p_start, s.p_end);
    c.kind = AnswerKind::Span;
    c.start = span.start;
    c.end = span.end;
    c.confidence *= span.probability;
    const std::string text = p.text();
    c.text = detokenize(std::span<const Token>(toks).subspan(span.start, span.end - span.start + 1), text);
    return c;
}

AnswerCandidate select_answer(std::span<const ParagraphScores> scores,
                              std::span<const Paragraph> paragraphs) {
    if (paragraphs.empty() || scores.empty()) throw NoContext("no paragraphs to answer from");
    const ParagraphScores* best = nullptr;
    for (const auto& s : scores) {
        if (s.paragraph_index >= paragraphs.size()) {
            throw ShapeError("score for paragraph " + std::to_string(s.paragraph_index) +
                             " but only " + std::to_string(paragraphs.size()) + " paragraphs");
        }
        if (best == nullptr || s.y_none < best->y_none ||
            (s.y_none == best->y_none && s.paragraph_index < best->paragraph_index)) {
            best = &s;
        }
    }
    return paragraph_answer(*best, paragraphs[best->paragraph_index]);
}

std::vector<AnswerCandidate> per_paragraph_answers(std::span<const ParagraphScores> scores,
                                                   std::span<const Paragraph> paragraphs) {
    std::vector<AnswerCandidate> out;
    out.reserve(scores.size());
    for (const auto& s : scores) {
        if (s.paragraph_index >= paragraphs.size()) throw ShapeError("paragraph index out of range");
        out.push_back(paragraph_answer(s, paragraphs[s.paragraph_index]));
    }
    return out;
}

AnswerCandidate answer(const RCBackend& backend, const SubQuestion& q,
                       std::span<const Paragraph> paragraphs) {
    if (q.has_placeholder()) throw Error("sub-question still has an unfilled ANS slot");
    if (paragraphs.empty()) throw NoContext("no paragraphs for '" + q.render() + "'");
    const auto scores = backend.score(q, paragraphs);
    return select_answer(scores, paragraphs);
}

SerializedBackend::SerializedBackend(std::shared_ptr<const RCBackend> inner)
    : inner_(std::move(inner)) {}

std::string SerializedBackend::name() const { return inner_->name(); }

std::vector<ParagraphScores> SerializedBackend::score(const SubQuestion& q,
                                                      std::span<const Paragraph> paragraphs) const {
    std::lock_guard lock(mu_);
    return inner_->score(q, paragraphs);
}

std::string sha256_hex(std::string_view text) {
    unsigned char digest[EVP_MAX_MD_SIZE];
    unsigned int len = 0;
    if (EVP_Digest(text.data(), text.size(), digest, &len, EVP_sha256(), nullptr) != 1) {
        throw Error("sha256 failed");
    }
    std::ostringstream out;
    for (unsigned int i = 0; i < len; ++i) {
        out << std::hex << std::setw(2) << std::setfill('0') << static_cast<int>(digest[i]);
    }
    return out.str();
}

ReplayBackend ReplayBackend::load(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ParseError("cannot open " + path.string());
    return parse(in, path.string());
}

ReplayBackend ReplayBackend::parse(std::istream& in, const std::string& name) {
    ReplayBackend b;
    detail::for_each_json_line(in, name, [&](const json& rec, std::size_t line) {
        const std::string where = name + ":" + std::to_string(line);
        ParagraphScores s;
        std::string hash;
        try {
            hash = rec.at("subq_sha256").get<std::string>();
            s.paragraph_index = rec.at("paragraph_index").get<std::size_t>();
            const auto y = rec.at("y").get<std::vector<double>>();
            if (y.size() != 4) throw ParseError(where + ": y must hold [span, yes, no, none]");
            s.y_span = y[0];
            s.y_yes = y[1];
            s.y_no = y[2];
            s.y_none = y[3];
            s.p_start = rec.at("p_start").get<std::vector<double>>();
            s.p_end = rec.at("p_end").get<std::vector<double>>();
        } catch (const json::exception&) {
            throw ParseError(where + ": malformed score record");
        }
        try {
            validate_distributions(s);
        } catch (const ParseError& e) {
            throw ParseError(where + ": " + e.what());
        }
        b.add(hash, std::move(s));
    });
    return b;
}

void ReplayBackend::add(const std::string& subq_sha256, ParagraphScores s) {
    table_[replay_key(subq_sha256, s.paragraph_index)] = std::move(s);
}

std::vector<ParagraphScores> ReplayBackend::score(const SubQuestion& q,
                                                  std::span<const Paragraph> paragraphs) const {
    const std::string rendered = q.render();
    const std::string hash = sha256_hex(rendered);
    std::vector<ParagraphScores> out;
    out.reserve(paragraphs.size());
    for (std::size_t i = 0; i < paragraphs.size(); ++i) {
        const auto it = table_.find(replay_key(hash, i));
        if (it == table_.end()) {
            throw MissingScores("no stored scores for '" + rendered + "' paragraph " + std::to_string(i));
        }
        out.push_back(it->second);
    }
    return out;
}

void write_replay_record(std::ostream& out, std::string_view rendered_subq, const ParagraphScores& s) {
    out << json{{"subq_sha256", sha256_hex(rendered_subq)},
                {"paragraph_index", s.paragraph_index},
                {"y", {s.y_span, s.y_yes, s.y_no, s.y_none}},
                {"p_start", s.p_start},
                {"p_end", s.p_end}}
               .dump()
        << '\n';
}

LexicalBackend::LexicalBackend(LexicalConfig config) : config_(config) {}

std::vector<ParagraphScores> LexicalBackend::score(const SubQuestion& q,
                                                   std::span<const Paragraph> paragraphs) const {
    const auto qterms = content_terms(q.tokens());
    const std::unordered_set<std::string> qset(qterms.begin(), qterms.end());

    std::vector<std::vector<Token>> ptoks;
    std::vector<std::map<std::string, double>> counts;
    std::map<std::string, std::size_t> df;
    for (const auto& p : paragraphs) {
        ptoks.push_back(paragraph_tokens(p));
        std::map<std::string, double> c;
        for (const auto& term : content_terms(ptoks.back())) c[term] += 1.0;
        for (const auto& [term, _] : c) ++df[term];
        counts.push_back(std::move(c));
    }
    const double n_docs = static_cast<double>(paragraphs.size());
    auto idf = [&](const std::string& term) {
        const auto it = df.find(term);
        const double d = it == df.end() ? 0.0 : static_cast<double>(it->second);
        return std::log((1.0 + n_docs) / (1.0 + d)) + 1.0;
    };
    std::map<std::string, double> qvec;
    for (const auto& term : qterms) qvec[term] += 1.0;
    double qnorm = 0.0;
    for (auto& [term, v] : qvec) {
        v = (1.0 + std::log(v)) * idf(term);
        qnorm += v * v;
    }
    qnorm = std::sqrt(qnorm);

    const bool wh = asks_wh(q.tokens());
    const WantedType wanted = wanted_type(q.tokens());
    std::vector<ParagraphScores> out;
    out.reserve(paragraphs.size());
    for (std::size_t i = 0; i < paragraphs.size(); ++i) {
        const auto& toks = ptoks[i];
        ParagraphScores s;
        s.paragraph_index = i;
        double dot = 0.0;
        double pnorm = 0.0;
        for (const auto& [term, c] : counts[i]) {
            const double w = (1.0 + std::log(c)) * idf(term);
            pnorm += w * w;
            const auto it = qvec.find(term);
            if (it != qvec.end()) dot += w * it->second;
        }
        const double cosine = (qnorm > 0.0 && pnorm > 0.0) ? dot / (qnorm * std::sqrt(pnorm)) : 0.0;
        s.y_none = 1.0 - cosine;

        if (toks.empty()) {
            // Nothing to point at; keep the distributions valid.
            s.p_start = {1.0};
            s.p_end = {1.0};
            s.y_span = -1.0;
            out.push_back(std::move(s));
            continue;
        }
        if (!wh) {
            std::unordered_set<std::string> present;
            bool negated = false;
            for (std::size_t t = 0; t < toks.size(); ++t) {
                if (qset.count(toks[t].text) != 0) present.insert(toks[t].text);
                if (is_negation(toks[t].text)) negated = true;
            }
            const double coverage = qset.empty() ? 0.0
                                                 : static_cast<double>(present.size()) /
                                                       static_cast<double>(qset.size());
            s.y_span = -1.0;
            s.y_yes = negated ? 0.0 : coverage;
            s.y_no = negated ? coverage : 1.0 - coverage;
            s.p_start = uniform(toks.size());
            s.p_end = uniform(toks.size());
            out.push_back(std::move(s));
            continue;
        }

        // Closeness of each candidate to question-term occurrences.
        std::vector<std::size_t> hits;
        for (std::size_t t = 0; t < toks.size(); ++t) {
            if (qset.count(toks[t].text) != 0) hits.push_back(t);
        }
        std::optional<Candidate> chosen;
        double chosen_score = 0.0;
        for (const auto& cand : candidates(toks, wanted)) {
            bool echoes_question = true;
            for (std::size_t t = cand.start; t <= cand.end; ++t) {
                if (qset.count(toks[t].text) == 0) echoes_question = false;
            }
            if (echoes_question) continue;
            double sc = 0.0;
            for (std::size_t h : hits) {
                if (h >= cand.start && h <= cand.end) continue;
                const std::size_t d = h < cand.start ? cand.start - h : h - cand.end;
                if (d <= config_.window) sc += 1.0 / static_cast<double>(d);
            }
            if (!chosen || sc > chosen_score) {
                chosen = cand;
                chosen_score = sc;
            }
        }
        if (chosen) {
            s.y_span = 1.0 + cosine;
            s.p_start = peaked(toks.size(), chosen->start, config_.peak);
            s.p_end = peaked(toks.size(), chosen->end, config_.peak);
        } else {
            s.y_span = cosine;
            s.p_start = uniform(toks.size());
            s.p_end = uniform(toks.size());
        }
        out.push_back(std::move(s));
    }
    return out;
}

FixtureBackend::FixtureBackend(std::unordered_map<std::string, std::string> answers) {
    for (auto& [question, ans] : answers) answers_[normalize_answer(question)] = std::move(ans);
}

FixtureBackend FixtureBackend::load(const std::filesystem::path& path) {
    std::unordered_map<std::string, std::string> answers;
    try {
        const json doc = json::parse(detail::read_file(path));
        for (const auto& [question, ans] : doc.items()) answers[question] = ans.get<std::string>();
    } catch (const json::exception& e) {
        throw ParseError(path.string() + ": expected an object of question -> answer strings (" + e.what() + ")");
    }
    return FixtureBackend(std::move(answers));
}

std::vector<ParagraphScores> FixtureBackend::score(const SubQuestion& q,
                                                   std::span<const Paragraph> paragraphs) const {
    const std::string rendered = q.render();
    const auto it = answers_.find(normalize_answer(rendered));
    if (it == answers_.end()) throw MissingScores("fixture has no answer for '" + rendered + "'");
    const std::string norm = normalize_answer(it->second);

    std::vector<ParagraphScores> out;
    out.reserve(paragraphs.size());
    bool placed = false;
    const auto want = tokenize_text(it->second);
    for (std::size_t i = 0; i < paragraphs.size(); ++i) {
        const auto toks = paragraph_tokens(paragraphs[i]);
        ParagraphScores s;
        s.paragraph_index = i;
        s.y_none = 1.0;
        s.y_span = -1.0;
        s.p_start = uniform(std::max<std::size_t>(toks.size(), 1));
        s.p_end = s.p_start;
        if (!placed && (norm == "yes" || norm == "no")) {
            s.y_none = 0.0;
            (norm == "yes" ? s.y_yes : s.y_no) = 1.0;
            placed = true;
        } else if (!placed && !want.empty() && toks.size() >= want.size()) {
            for (std::size_t b = 0; b + want.size() <= toks.size(); ++b) {
                bool match = true;
                for (std::size_t k = 0; k < want.size() && match; ++k) {
                    match = toks[b + k].text == want[k].text;
                }
                if (!match) continue;
                s.y_none = 0.0;
                s.y_span = 1.0;
                s.p_start = peaked(toks.size(), b, 1.0);
                s.p_end = peaked(toks.size(), b + want.size() - 1, 1.0);
                placed = true;
                break;
            }
        }
        out.push_back(std::move(s));
    }
    if (!placed) throw MissingScores("fixture answer '" + it->second + "' appears in no paragraph");
    return out;
}

std::vector<Token> augment_question(std::span<const Token> tokens, std::uint64_t seed,
                                    const AugmentConfig& config) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    std::vector<Token> out;
    out.reserve(tokens.size());
    for (const auto& t : tokens) {
        // Both draws happen for every token so the stream stays aligned.
        const double drop = unit(rng);
        const double swap = unit(rng);
        if (drop < config.drop_probability) continue;
        if (is_wh_word(t.text) && swap < config.wh_replace_probability) {
            Token the = Token::synthetic(t.capitalized ? "The" : "the");
            out.push_back(std::move(the));
            continue;
        }
        out.push_back(t);
    }
    return out;
}

}  // namespace decomprc
