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

#include "decomprc/decompose.hpp"

#include <algorithm>
#include <array>
#include <string_view>

#include "decomprc/errors.hpp"

namespace decomprc {

namespace {

constexpr std::array<std::string_view, 14> kGreater = {
    "more", "most", "later", "last",    "latest", "longer",  "larger",
    "younger", "newer", "taller", "higher", "after", "greater", "farther"};
constexpr std::array<std::string_view, 12> kSmaller = {
    "less",    "earlier", "earliest", "first",  "shorter", "smaller",
    "older",   "closer",  "before",   "fewer",  "least",   "lower"};
constexpr std::array<std::string_view, 18> kHowMany = {
    "more",   "most",    "greater", "larger", "longer",  "taller", "higher",  "less",  "fewer",
    "smaller", "shorter", "older",  "younger", "newer", "closer", "least",  "lower", "farther"};
constexpr std::array<std::string_view, 11> kTemporal = {
    "earlier", "later", "first", "last",    "latest", "earliest",
    "before",  "after", "older", "younger", "newer"};
constexpr std::array<std::string_view, 8> kNameConnectors = {"of", "the", "de", "and",
                                                             "&",  "von", "van", "du"};

template <std::size_t N>
bool contains(const std::array<std::string_view, N>& set, std::string_view w) {
    return std::find(set.begin(), set.end(), w) != set.end();
}

bool is_conjunction(std::string_view w) { return w == "or" || w == "and"; }
bool is_preconjunct(std::string_view w) { return w == "either" || w == "both"; }

bool is_comparative(std::string_view w) {
    return is_greater_keyword(w) || is_smaller_keyword(w) || w == "than";
}

Token question_mark() { return Token::synthetic("?"); }

void ensure_question_mark(std::vector<Token>& toks) {
    if (toks.empty() || toks.back().text != "?") toks.push_back(question_mark());
}

void append(std::vector<Token>& out, const std::vector<Token>& more) {
    out.insert(out.end(), more.begin(), more.end());
}

// Tokens that may extend a "which <noun>" run.
bool noun_run_token(const Token& t) {
    return !is_auxiliary(t.text) && !is_punctuation(t.text) && !is_wh_word(t.text) &&
           !is_conjunction(t.text) && !is_comparative(t.text) && !is_preconjunct(t.text);
}

bool is_head_wh(std::string_view w) { return w == "which" || w == "what" || w == "who"; }

std::optional<TokenSpan> find_head_entity(const TokenizedQuestion& q, const TokenSpan& e1) {
    std::size_t j = e1.begin;
    const bool comma_before = j > 0 && q[j - 1].text == ",";
    if (comma_before) --j;
    std::size_t k = j;
    while (k > 0 && noun_run_token(q[k - 1])) --k;
    if (k > 0 && k < j && is_head_wh(q[k - 1].text)) return TokenSpan{k - 1, j};

    // "Which X ... , ent1 or ent2?": the head opens the question.
    if (comma_before && q.size() > 1 && is_head_wh(q[0].text)) {
        std::size_t e = 1;
        while (e < e1.begin && noun_run_token(q[e])) ++e;
        if (e > 1) return TokenSpan{0, e};
    }
    return std::nullopt;
}

std::string span_text(const TokenizedQuestion& q, TokenSpan s) {
    const auto toks = q.slice(s.begin, s.end);
    return detokenize(toks, q.raw());
}

bool outside_entities(const ComparisonParse& p, std::size_t i) {
    return !p.entity1.contains(i) && !p.entity2.contains(i);
}

bool mentions(const TokenizedQuestion& q, const ComparisonParse& p, std::string_view w) {
    for (std::size_t i = 0; i < q.size(); ++i) {
        if (outside_entities(p, i) && q[i].text == w) return true;
    }
    return false;
}

bool mentions_in_common(const TokenizedQuestion& q, const ComparisonParse& p) {
    for (std::size_t i = 0; i + 1 < q.size(); ++i) {
        if (outside_entities(p, i) && q[i].text == "in" && q[i + 1].text == "common") return true;
    }
    return false;
}

// End of the question body, excluding terminal punctuation.
std::size_t body_end(const TokenizedQuestion& q) {
    std::size_t e = q.size();
    while (e > 0 && (q[e - 1].text == "?" || q[e - 1].text == "." || q[e - 1].text == "!")) --e;
    return e;
}

// Where the interrogative lead ("Which X", "Who", an auxiliary) stops.
std::size_t lead_end(const TokenizedQuestion& q, const ComparisonParse& p) {
    if (p.head_entity && p.head_entity->begin == 0) return p.head_entity->end;
    if (q.size() > 0 && (is_wh_word(q[0].text) || is_auxiliary(q[0].text))) return 1;
    return 0;
}

// Copies [b, e) dropping punctuation, preconjuncts and the given positions.
std::vector<Token> clause(const TokenizedQuestion& q, const ComparisonParse& p, std::size_t b,
                          std::size_t e, std::initializer_list<std::string_view> drop = {}) {
    std::vector<Token> out;
    for (std::size_t i = b; i < e; ++i) {
        const auto& t = q[i];
        if (!outside_entities(p, i) || is_punctuation(t.text) || is_preconjunct(t.text)) continue;
        if (std::find(drop.begin(), drop.end(), t.text) != drop.end()) continue;
        out.push_back(t);
    }
    return out;
}

std::string singular_auxiliary(std::string_view aux) {
    if (aux == "are") return "is";
    if (aux == "were") return "was";
    if (aux == "do") return "does";
    if (aux == "have") return "has";
    return std::string(aux);
}

std::vector<Token> numeric_value_question(const TokenizedQuestion& q, const ComparisonParse& p,
                                          const std::vector<Token>& ent) {
    const auto trig = find_trigger(q, p);
    if (!trig) throw RewriteError("numeric comparison without a comparative keyword");
    const std::size_t k = trig->position;
    const std::string& kw = q[k].text;
    const std::size_t end = body_end(q);

    std::vector<Token> predicate;
    std::vector<Token> measure;
    if (k < p.entity1.begin) {
        predicate = clause(q, p, lead_end(q, p), k);
        std::size_t stop = k + 1;
        while (stop < p.entity1.begin && q[stop].text != "," && q[stop].text != "between") ++stop;
        measure = clause(q, p, k + 1, stop, {"than"});
    } else if (k < p.entity2.begin) {
        predicate = clause(q, p, p.entity1.end, k, {"or", "and"});
        measure = clause(q, p, k + 1, p.entity2.begin, {"than", "or", "and"});
    } else {
        predicate = clause(q, p, p.entity2.end, k);
        measure = clause(q, p, k + 1, end, {"than"});
    }
    // Stray articles left in front of the measure noun.
    while (!measure.empty() && is_article(measure.front().text)) measure.erase(measure.begin());

    std::vector<Token> out = ent;
    if (contains(kHowMany, kw) && !measure.empty()) {
        append(out, predicate);
        out.push_back(Token::synthetic("how"));
        out.push_back(Token::synthetic("many"));
        append(out, measure);
    } else if (contains(kTemporal, kw)) {
        const bool bare_copula = predicate.empty() ||
                                 (predicate.size() == 1 && is_auxiliary(predicate[0].text));
        if ((kw == "older" || kw == "younger") && bare_copula) {
            out.push_back(Token::synthetic("was"));
            out.push_back(Token::synthetic("born"));
        } else {
            append(out, predicate);
        }
        out.push_back(Token::synthetic("when"));
    } else {
        throw RewriteError("no value question for comparative '" + kw + "'");
    }
    out.push_back(question_mark());
    return out;
}

// The clause that is asserted of each entity.
std::vector<Token> shared_predicate(const TokenizedQuestion& q, const ComparisonParse& p) {
    const std::size_t end = body_end(q);
    std::size_t b = p.entity2.end;
    while (b < end && (q[b].text == "," || is_wh_word(q[b].text) || q[b].text == "that")) ++b;
    auto pred = clause(q, p, b, end);
    if (pred.empty()) {
        std::size_t e = p.entity1.begin;
        while (e > 0 && (q[e - 1].text == "," || q[e - 1].text == "between")) --e;
        pred = clause(q, p, lead_end(q, p), e);
    }
    return pred;
}

// "the same state" / "different" -> "which state".
std::vector<Token> ask_for_value(const std::vector<Token>& pred) {
    std::vector<Token> out;
    bool replaced = false;
    for (std::size_t i = 0; i < pred.size(); ++i) {
        const auto& w = pred[i].text;
        if (!replaced && (w == "same" || w == "different")) {
            while (!out.empty() && is_article(out.back().text)) out.pop_back();
            out.push_back(Token::synthetic("which"));
            replaced = true;
            continue;
        }
        out.push_back(pred[i]);
    }
    if (!replaced) throw RewriteError("string comparison without 'same' or 'different'");
    return out;
}

std::vector<Token> drop_in_common(const std::vector<Token>& pred) {
    std::vector<Token> out;
    for (std::size_t i = 0; i < pred.size(); ++i) {
        if (pred[i].text == "in" && i + 1 < pred.size() && pred[i + 1].text == "common") {
            ++i;
            continue;
        }
        out.push_back(pred[i]);
    }
    return out;
}

bool name_start_ok(const TokenizedQuestion& q, std::size_t i) {
    if (!q[i].capitalized) return false;
    return !(i == 0 && (is_wh_word(q[i].text) || is_auxiliary(q[i].text)));
}

// Extends a capitalized run forward from `b`; returns its end.
std::size_t run_forward(const TokenizedQuestion& q, std::size_t b, std::size_t limit) {
    std::size_t i = b;
    while (i < limit) {
        const auto& t = q[i];
        if (name_start_ok(q, i)) {
            ++i;
        } else if (i > b && i + 1 < limit && contains(kNameConnectors, t.text) &&
                   q[i + 1].capitalized) {
            ++i;
        } else if (i > b && t.text == "." && q[i - 1].surface.size() == 1 && i + 1 < limit &&
                   q[i + 1].capitalized) {
            ++i;
        } else {
            break;
        }
    }
    return i;
}

// Extends a capitalized run backward from `e` (exclusive); returns its start.
std::size_t run_backward(const TokenizedQuestion& q, std::size_t e) {
    std::size_t i = e;
    while (i > 0) {
        const std::size_t k = i - 1;
        const auto& t = q[k];
        if (name_start_ok(q, k)) {
            i = k;
        } else if (k < e - 1 && k > 0 && (contains(kNameConnectors, t.text) ||
                                          (t.text == "." && q[k - 1].surface.size() == 1)) &&
                   name_start_ok(q, k - 1)) {
            i = k;
        } else {
            break;
        }
    }
    // "the Battle of ..." keeps its article.
    if (i < e && i > 0 && is_article(q[i - 1].text) && !q[i - 1].capitalized) --i;
    return i;
}

std::optional<std::array<std::size_t, 4>> flanking_runs(const TokenizedQuestion& q,
                                                        std::size_t conj) {
    if (conj == 0 || conj + 1 >= q.size()) return std::nullopt;
    const std::size_t left_begin = run_backward(q, conj);
    if (left_begin == conj) return std::nullopt;
    std::size_t right_begin = conj + 1;
    if (is_article(q[right_begin].text) && !q[right_begin].capitalized) ++right_begin;
    if (right_begin >= q.size()) return std::nullopt;
    const std::size_t right_end = run_forward(q, right_begin, q.size());
    if (right_end == right_begin) return std::nullopt;
    return std::array<std::size_t, 4>{left_begin, conj, conj + 1, right_end};
}

}  // namespace

bool is_greater_keyword(std::string_view lowered) { return contains(kGreater, lowered); }
bool is_smaller_keyword(std::string_view lowered) { return contains(kSmaller, lowered); }

bool ComparisonParse::is_either(const TokenizedQuestion& q) const {
    if (preconjunct) return q[*preconjunct].text == "either";
    return q[coordination].text == "or";
}

bool ComparisonParse::is_both(const TokenizedQuestion& q) const {
    if (preconjunct) return q[*preconjunct].text == "both";
    return q[coordination].text == "and";
}

Decomposition generate_bridging(const TokenizedQuestion& q, std::size_t ind1, std::size_t ind2,
                                std::size_t ind3) {
    const std::size_t n = q.size();
    if (!(ind1 <= ind2 && ind2 < ind3 && ind3 <= n)) {
        throw SpanError("bridging indices (" + std::to_string(ind1) + ", " + std::to_string(ind2) +
                        ", " + std::to_string(ind3) + ") invalid for " + std::to_string(n) +
                        " tokens");
    }
    std::vector<Token> q1;
    const std::size_t window = std::max(ind1, ind2 >= 5 ? ind2 - 5 : std::size_t{0});
    std::optional<std::size_t> article;
    for (std::size_t i = ind2; i-- > window;) {
        if (is_article(q[i].text)) {
            article = i;
            break;
        }
    }
    for (std::size_t i = ind1; i < ind3; ++i) {
        if (article && i == *article) {
            q1.push_back(Token::synthetic("which"));
            continue;
        }
        if (!article && i == ind2) q1.push_back(Token::synthetic("which"));
        q1.push_back(q[i]);
    }
    std::vector<Token> q2 = q.slice(0, ind1);
    q2.push_back(Token::placeholder());
    append(q2, q.slice(ind3, n));
    if (q.ends_with_question_mark()) {
        ensure_question_mark(q1);
        ensure_question_mark(q2);
    }
    return Decomposition::bridging(SubQuestion(std::move(q1), q.raw()),
                                   SubQuestion(std::move(q2), q.raw()));
}

Decomposition generate_intersection(const TokenizedQuestion& q, std::size_t ind1,
                                    std::size_t ind2) {
    const std::size_t n = q.size();
    if (!(0 < ind1 && ind1 < ind2 && ind2 < n)) {
        throw SpanError("intersection indices (" + std::to_string(ind1) + ", " +
                        std::to_string(ind2) + ") need 0 < ind1 < ind2 < " + std::to_string(n));
    }
    std::vector<Token> q1 = q.slice(0, ind2);
    std::vector<Token> q2 = is_wh_word(q[ind1].text) ? q.slice(ind1, ind2) : q.slice(0, ind1);
    append(q2, q.slice(ind2, n));
    if (q.ends_with_question_mark()) {
        ensure_question_mark(q1);
        ensure_question_mark(q2);
    }
    return Decomposition::intersection(SubQuestion(std::move(q1), q.raw()),
                                       SubQuestion(std::move(q2), q.raw()));
}

ComparisonParse parse_comparison(const TokenizedQuestion& q, std::array<std::size_t, 4> ind) {
    const std::size_t n = q.size();
    if (!(ind[0] < ind[1] && ind[1] <= ind[2] && ind[2] < ind[3] && ind[3] <= n)) {
        throw SpanError("comparison indices need ind1 < ind2 <= ind3 < ind4 <= " +
                        std::to_string(n));
    }
    ComparisonParse p;
    p.entity1 = {ind[0], ind[1]};
    p.entity2 = {ind[2], ind[3]};

    std::optional<std::size_t> coord;
    for (std::size_t i = ind[1]; i < ind[2] && !coord; ++i) {
        if (is_conjunction(q[i].text)) coord = i;
    }
    for (std::size_t i = ind[1]; i < ind[2] && !coord; ++i) {
        if (is_comparative(q[i].text)) coord = i;
    }
    if (!coord) {
        throw NotComparison("no 'or'/'and' or comparative between '" + span_text(q, p.entity1) +
                            "' and '" + span_text(q, p.entity2) + "'");
    }
    p.coordination = *coord;
    for (std::size_t i = 0; i < n; ++i) {
        if (outside_entities(p, i) && is_preconjunct(q[i].text)) {
            p.preconjunct = i;
            break;
        }
    }
    p.head_entity = find_head_entity(q, p.entity1);
    p.is_yes_no = n > 0 && is_auxiliary(q[0].text);
    return p;
}

std::optional<ComparativeTrigger> find_trigger(const TokenizedQuestion& q,
                                               const ComparisonParse& parse) {
    for (std::size_t i = 0; i < q.size(); ++i) {
        if (outside_entities(parse, i) && is_greater_keyword(q[i].text)) return ComparativeTrigger{i, true};
    }
    for (std::size_t i = 0; i < q.size(); ++i) {
        if (outside_entities(parse, i) && is_smaller_keyword(q[i].text)) return ComparativeTrigger{i, false};
    }
    return std::nullopt;
}

DiscreteOp find_op(const ComparisonParse& parse, const TokenizedQuestion& q) {
    const bool has_head = parse.head_entity.has_value();
    // Which* when a head names the answer type or the question is not yes/no.
    const bool pick_entity = has_head || !parse.is_yes_no;
    if (const auto trig = find_trigger(q, parse)) {
        if (trig->greater) return pick_entity ? DiscreteOp::WhichIsGreater : DiscreteOp::IsGreater;
        return pick_entity ? DiscreteOp::WhichIsSmaller : DiscreteOp::IsSmaller;
    }
    if (has_head) return DiscreteOp::WhichIsTrue;
    if (!parse.is_yes_no) {
        if (mentions(q, parse, "same") || mentions_in_common(q, parse)) return DiscreteOp::Intersection;
        return DiscreteOp::WhichIsTrue;
    }
    if (mentions(q, parse, "same")) return DiscreteOp::IsEqual;
    if (mentions(q, parse, "different")) return DiscreteOp::NotEqual;
    if (parse.is_either(q)) return DiscreteOp::Or;
    if (parse.is_both(q)) return DiscreteOp::And;
    throw UnsupportedComparison("no operation fits '" + q.raw() + "'");
}

std::pair<SubQuestion, SubQuestion> form_subq(const TokenizedQuestion& q,
                                              const ComparisonParse& parse, DiscreteOp op) {
    const auto e1 = q.slice(parse.entity1.begin, parse.entity1.end);
    const auto e2 = q.slice(parse.entity2.begin, parse.entity2.end);

    auto build = [&](const std::vector<Token>& ent) -> std::vector<Token> {
        switch (op) {
            case DiscreteOp::IsGreater:
            case DiscreteOp::IsSmaller:
            case DiscreteOp::WhichIsGreater:
            case DiscreteOp::WhichIsSmaller:
                return numeric_value_question(q, parse, ent);
            case DiscreteOp::IsEqual:
            case DiscreteOp::NotEqual: {
                auto pred = shared_predicate(q, parse);
                if (!pred.empty() && is_auxiliary(pred.front().text)) pred.erase(pred.begin());
                std::vector<Token> out = ent;
                append(out, ask_for_value(pred));
                out.push_back(question_mark());
                return out;
            }
            case DiscreteOp::And:
            case DiscreteOp::Or: {
                const auto pred = shared_predicate(q, parse);
                if (pred.empty()) throw RewriteError("no predicate to assert of each entity");
                std::vector<Token> out;
                if (parse.is_yes_no) out.push_back(Token::synthetic(singular_auxiliary(q[0].text)));
                append(out, ent);
                append(out, pred);
                out.push_back(question_mark());
                return out;
            }
            case DiscreteOp::WhichIsTrue: {
                const auto pred = shared_predicate(q, parse);
                if (pred.empty()) throw RewriteError("no predicate to assert of each entity");
                std::vector<Token> out = ent;
                append(out, pred);
                out.push_back(question_mark());
                return out;
            }
            case DiscreteOp::Intersection: {
                // "What genre do A and B have in common?" -> "What genre does A have?"
                std::size_t aux = 0;
                while (aux < parse.entity1.begin && !is_auxiliary(q[aux].text)) ++aux;
                if (aux == 0) throw RewriteError("property-in-common question without a wh-phrase");
                std::vector<Token> out = q.slice(0, aux);
                if (aux < parse.entity1.begin) {
                    out.push_back(Token::synthetic(singular_auxiliary(q[aux].text)));
                }
                append(out, ent);
                auto pred = drop_in_common(clause(q, parse, parse.entity2.end, body_end(q)));
                std::vector<Token> kept;
                for (auto& t : pred) {
                    if (t.text != "same") kept.push_back(std::move(t));
                }
                append(out, kept);
                out.push_back(question_mark());
                return out;
            }
        }
        throw RewriteError("unknown operation");
    };
    return {SubQuestion(build(e1), q.raw()), SubQuestion(build(e2), q.raw())};
}

Decomposition generate_comparison(const TokenizedQuestion& q, std::array<std::size_t, 4> ind) {
    const auto parse = parse_comparison(q, ind);
    const DiscreteOp op = find_op(parse, q);
    auto [q1, q2] = form_subq(q, parse, op);
    EntityPair ents{parse.entity1, parse.entity2, span_text(q, parse.entity1),
                    span_text(q, parse.entity2)};
    return Decomposition::comparison(std::move(q1), std::move(q2), op, std::move(ents));
}

std::optional<std::array<std::size_t, 4>> propose_entities(const TokenizedQuestion& q) {
    for (std::string_view conj : {"or", "and"}) {
        for (std::size_t i = 0; i < q.size(); ++i) {
            if (q[i].text != conj) continue;
            if (auto r = flanking_runs(q, i)) return r;
        }
    }
    // No coordination: the first two capitalized runs.
    std::vector<std::pair<std::size_t, std::size_t>> runs;
    std::size_t i = 0;
    while (i < q.size() && runs.size() < 2) {
        if (!name_start_ok(q, i)) {
            ++i;
            continue;
        }
        const std::size_t end = run_forward(q, i, q.size());
        std::size_t begin = i;
        if (begin > 0 && is_article(q[begin - 1].text) && !q[begin - 1].capitalized) --begin;
        runs.emplace_back(begin, end);
        i = end;
    }
    if (runs.size() < 2) return std::nullopt;
    return std::array<std::size_t, 4>{runs[0].first, runs[0].second, runs[1].first,
                                      runs[1].second};
}

DecompositionSet decompose_all(const TokenizedQuestion& q, const PointerHeads& heads,
                               const Encoder& encoder) {
    DecompositionSet out;
    std::optional<Embedding> emb;
    auto predict = [&](const PointerHead& head) {
        if (!emb) emb = encoder.encode(q);
        return decode(score(head, *emb));
    };
    auto attempt = [&](ReasoningType type, auto&& make) {
        try {
            out.candidates.push_back(make());
        } catch (const Error& e) {
            out.skipped.push_back({type, e.what()});
        }
    };

    if (heads.bridging) {
        attempt(ReasoningType::Bridging, [&] {
            const auto ind = predict(*heads.bridging);
            if (ind.size() != 3) throw ArityError("bridging head must have 3 columns");
            return generate_bridging(q, ind[0], ind[1], ind[2]);
        });
    } else {
        out.skipped.push_back({ReasoningType::Bridging, "no bridging pointer head"});
    }
    if (heads.intersection) {
        attempt(ReasoningType::Intersection, [&] {
            const auto ind = predict(*heads.intersection);
            if (ind.size() != 2) throw ArityError("intersection head must have 2 columns");
            return generate_intersection(q, ind[0], ind[1]);
        });
    } else {
        out.skipped.push_back({ReasoningType::Intersection, "no intersection pointer head"});
    }
    attempt(ReasoningType::Comparison, [&] {
        std::array<std::size_t, 4> ind{};
        if (heads.comparison) {
            const auto v = predict(*heads.comparison);
            if (v.size() != 4) throw ArityError("comparison head must have 4 columns");
            std::copy(v.begin(), v.end(), ind.begin());
        } else {
            const auto proposed = propose_entities(q);
            if (!proposed) throw NotComparison("no pair of capitalized entity spans");
            ind = *proposed;
        }
        return generate_comparison(q, ind);
    });
    out.candidates.push_back(Decomposition::original(SubQuestion::from_question(q)));
    return out;
}

}  // namespace decomprc
