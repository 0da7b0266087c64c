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

#include "decomprc/eval.hpp"

#include <algorithm>
#include <cctype>
#include <unordered_map>

#include <nlohmann/json.hpp>

#include "decomprc/dataset.hpp"
#include "decomprc/discrete_ops.hpp"
#include "decomprc/errors.hpp"
#include "json_util.hpp"

namespace decomprc {

using nlohmann::json;

namespace {

constexpr std::array<std::pair<std::string_view, std::string_view>, 11> kAntonyms = {{
    {"earlier", "later"},
    {"earliest", "latest"},
    {"first", "last"},
    {"more", "less"},
    {"most", "least"},
    {"larger", "smaller"},
    {"longer", "shorter"},
    {"older", "younger"},
    {"higher", "lower"},
    {"before", "after"},
    {"same", "different"},
}};

bool is_yes_no_token(const std::string& w) { return w == "yes" || w == "no" || w == "noanswer"; }

std::string match_case(std::string_view like, std::string_view word) {
    std::string out(word);
    if (!like.empty() && std::isupper(static_cast<unsigned char>(like[0])) && !out.empty()) {
        out[0] = static_cast<char>(std::toupper(static_cast<unsigned char>(out[0])));
    }
    return out;
}

// Positions >= `from` move by `delta`.
std::size_t shift(std::size_t pos, std::size_t from, long delta) {
    return pos >= from ? static_cast<std::size_t>(static_cast<long>(pos) + delta) : pos;
}

ComparisonParse shifted(ComparisonParse p, std::size_t from, long delta) {
    auto span = [&](TokenSpan s) { return TokenSpan{shift(s.begin, from, delta), shift(s.end, from, delta)}; };
    p.entity1 = span(p.entity1);
    p.entity2 = span(p.entity2);
    p.coordination = shift(p.coordination, from, delta);
    if (p.preconjunct) p.preconjunct = shift(*p.preconjunct, from, delta);
    if (p.head_entity) p.head_entity = span(*p.head_entity);
    return p;
}

bool outside(const ComparisonParse& p, std::size_t i) {
    return !p.entity1.contains(i) && !p.entity2.contains(i);
}

// The auxiliary of the clause asserted of each entity.
std::optional<std::size_t> predicate_auxiliary(const TokenizedQuestion& q, const ComparisonParse& p) {
    for (std::size_t i = p.entity2.end; i < q.size(); ++i) {
        if (is_auxiliary(q[i].text)) return i;
    }
    for (std::size_t i = 0; i < p.entity1.begin; ++i) {
        if (is_auxiliary(q[i].text) && i > 0) return i;
    }
    return std::nullopt;
}

SplitScore mean_of(const std::vector<const ExampleScore*>& xs) {
    SplitScore s;
    s.count = xs.size();
    if (xs.empty()) return s;
    for (const auto* x : xs) {
        s.f1 += x->f1;
        s.em += x->em;
    }
    s.f1 /= static_cast<double>(xs.size());
    s.em /= static_cast<double>(xs.size());
    return s;
}

json split_json(const SplitScore& s) { return {{"f1", s.f1}, {"em", s.em}, {"count", s.count}}; }

}  // namespace

double token_f1(std::string_view prediction, std::string_view gold) {
    const auto p = normalized_tokens(prediction);
    const auto g = normalized_tokens(gold);
    if (p.empty() && g.empty()) return 1.0;
    const std::string pn = normalize_answer(prediction);
    const std::string gn = normalize_answer(gold);
    if ((is_yes_no_token(pn) || is_yes_no_token(gn)) && pn != gn) return 0.0;
    if (p.empty() || g.empty()) return 0.0;

    std::unordered_map<std::string, long> counts;
    for (const auto& w : g) ++counts[w];
    long common = 0;
    for (const auto& w : p) {
        auto it = counts.find(w);
        if (it != counts.end() && it->second > 0) {
            --it->second;
            ++common;
        }
    }
    if (common == 0) return 0.0;
    const double precision = static_cast<double>(common) / static_cast<double>(p.size());
    const double recall = static_cast<double>(common) / static_cast<double>(g.size());
    return 2.0 * precision * recall / (precision + recall);
}

double exact_match(std::string_view prediction, std::string_view gold) {
    return normalize_answer(prediction) == normalize_answer(gold) ? 1.0 : 0.0;
}

double joint_f1(double original_f1, double inverted_f1) { return std::min(original_f1, inverted_f1); }

PerModelF1 parse_per_model_f1(std::string_view json_text) {
    PerModelF1 out;
    json doc;
    try {
        doc = json::parse(json_text);
    } catch (const json::parse_error& e) {
        throw ParseError(std::string("per-model F1 file is not JSON: ") + e.what());
    }
    if (!doc.is_object()) throw ParseError("per-model F1 file must be an object of id -> [f1, f1, f1]");
    for (const auto& [id, row] : doc.items()) {
        if (!row.is_array() || row.size() != 3) throw ParseError("per-model F1 row '" + id + "' needs 3 numbers");
        std::array<double, 3> f{};
        for (std::size_t i = 0; i < 3; ++i) {
            if (!row[i].is_number()) throw ParseError("per-model F1 row '" + id + "' has a non-number");
            f[i] = row[i].get<double>();
        }
        out[id] = f;
    }
    return out;
}

PerModelF1 load_per_model_f1(const std::filesystem::path& path) {
    return parse_per_model_f1(detail::read_file(path));
}

bool is_single_hop(const std::array<double, 3>& f1) {
    return std::all_of(f1.begin(), f1.end(), [](double v) { return v > 0.0; });
}

SingleMultiSplit split_single_multi(std::span<const QAExample> examples, const PerModelF1& table) {
    SingleMultiSplit out;
    for (const auto& ex : examples) {
        const auto it = table.find(ex.id);
        if (it == table.end()) throw ParseError("no per-model F1 row for '" + ex.id + "'");
        (is_single_hop(it->second) ? out.single : out.multi).push_back(ex.id);
    }
    return out;
}

std::optional<std::string_view> antonym(std::string_view lowered) {
    for (const auto& [a, b] : kAntonyms) {
        if (lowered == a) return b;
        if (lowered == b) return a;
    }
    return std::nullopt;
}

std::optional<InvertedQuestion> invert_comparison(const TokenizedQuestion& q,
                                                  const ComparisonParse& parse, DiscreteOp op) {
    const auto inverted_op = dual(op);
    if (!inverted_op) return std::nullopt;
    const std::string& raw = q.raw();

    if (op == DiscreteOp::WhichIsTrue) {
        const auto aux = predicate_auxiliary(q, parse);
        if (!aux) throw InversionError("no auxiliary to negate in '" + raw + "'");
        const std::size_t a = *aux;
        InvertedQuestion out{TokenizedQuestion(), *inverted_op, parse, true};
        if (a + 1 < q.size() && q[a + 1].text == "not") {
            const std::string next = raw.substr(0, q[a].char_end) + raw.substr(q[a + 1].char_end);
            out.question = TokenizedQuestion(q.id(), next);
            out.parse = shifted(parse, a + 1, -1);
        } else {
            const std::string next = raw.substr(0, q[a].char_end) + " not" + raw.substr(q[a].char_end);
            out.question = TokenizedQuestion(q.id(), next);
            out.parse = shifted(parse, a + 1, 1);
        }
        return out;
    }

    std::optional<std::size_t> pos;
    if (op == DiscreteOp::IsEqual || op == DiscreteOp::NotEqual) {
        const std::string_view want = op == DiscreteOp::IsEqual ? "same" : "different";
        for (std::size_t i = 0; i < q.size() && !pos; ++i) {
            if (outside(parse, i) && q[i].text == want) pos = i;
        }
    } else if (const auto trig = find_trigger(q, parse)) {
        pos = trig->position;
    }
    if (!pos) throw InversionError("no comparative keyword in '" + raw + "'");
    const Token& t = q[*pos];
    const auto swap = antonym(t.text);
    if (!swap) throw InversionError("'" + t.surface + "' has no antonym");
    const std::string next = raw.substr(0, t.char_start) + match_case(t.surface, *swap) +
                             raw.substr(t.char_end);
    return InvertedQuestion{TokenizedQuestion(q.id(), next), *inverted_op, parse, false};
}

std::string EvalReport::to_json(int indent) const {
    json doc;
    doc["overall"] = split_json(overall);
    doc["bridge"] = split_json(bridge);
    doc["comparison"] = split_json(comparison);
    if (single) doc["single"] = split_json(*single);
    if (multi) doc["multi"] = split_json(*multi);
    doc["missing"] = missing;
    json rows = json::array();
    for (const auto& e : examples) {
        json r{{"id", e.id}, {"f1", e.f1}, {"em", e.em}, {"missing", e.missing},
               {"type", std::string(decomprc::to_string(e.hotpot_type))}};
        if (e.single_hop) r["single_hop"] = *e.single_hop;
        if (e.chosen_type) r["chosen_type"] = *e.chosen_type;
        rows.push_back(std::move(r));
    }
    doc["examples"] = std::move(rows);
    return doc.dump(indent);
}

EvalReport evaluate(const std::map<std::string, std::string>& predictions,
                    std::span<const QAExample> gold, const PerModelF1* table,
                    const std::map<std::string, std::string>* chosen_types) {
    EvalReport report;
    report.examples.reserve(gold.size());
    for (const auto& ex : gold) {
        ExampleScore s;
        s.id = ex.id;
        s.hotpot_type = ex.hotpot_type;
        const auto it = predictions.find(ex.id);
        if (it == predictions.end()) {
            s.missing = true;
            ++report.missing;
        } else {
            s.f1 = token_f1(it->second, ex.gold_answer);
            s.em = exact_match(it->second, ex.gold_answer);
        }
        if (table != nullptr) {
            const auto row = table->find(ex.id);
            if (row == table->end()) throw ParseError("no per-model F1 row for '" + ex.id + "'");
            s.single_hop = is_single_hop(row->second);
        }
        if (chosen_types != nullptr) {
            const auto c = chosen_types->find(ex.id);
            if (c != chosen_types->end()) s.chosen_type = c->second;
        }
        report.examples.push_back(std::move(s));
    }

    std::vector<const ExampleScore*> all;
    std::vector<const ExampleScore*> bridge;
    std::vector<const ExampleScore*> comparison;
    std::vector<const ExampleScore*> single;
    std::vector<const ExampleScore*> multi;
    for (const auto& s : report.examples) {
        all.push_back(&s);
        (s.hotpot_type == HotpotType::Bridge ? bridge : comparison).push_back(&s);
        if (s.single_hop) (*s.single_hop ? single : multi).push_back(&s);
    }
    report.overall = mean_of(all);
    report.bridge = mean_of(bridge);
    report.comparison = mean_of(comparison);
    if (table != nullptr) {
        report.single = mean_of(single);
        report.multi = mean_of(multi);
    }
    return report;
}

}  // namespace decomprc
