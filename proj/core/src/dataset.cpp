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

#include "decomprc/dataset.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>

#include <nlohmann/json.hpp>

#include "decomprc/errors.hpp"
#include "json_util.hpp"

namespace decomprc {

using nlohmann::json;

namespace {

HotpotType parse_type(const std::string& s, const std::string& id) {
    if (s == "bridge") return HotpotType::Bridge;
    if (s == "comparison") return HotpotType::Comparison;
    throw ParseError("record " + id + ": unknown type '" + s + "'");
}

Level parse_level(const std::string& s, const std::string& id) {
    if (s == "easy") return Level::Easy;
    if (s == "medium") return Level::Medium;
    if (s == "hard") return Level::Hard;
    throw ParseError("record " + id + ": unknown level '" + s + "'");
}

template <typename T>
T required(const json& rec, const char* field, const std::string& id) {
    auto it = rec.find(field);
    if (it == rec.end()) throw ParseError("record " + id + ": missing field '" + field + "'");
    try {
        return it->get<T>();
    } catch (const json::exception&) {
        throw ParseError("record " + id + ": field '" + field + "' has the wrong type");
    }
}

QAExample parse_record(const json& rec, std::size_t position) {
    if (!rec.is_object()) {
        throw ParseError("record #" + std::to_string(position) + " is not an object");
    }
    std::string id = rec.contains("_id") && rec["_id"].is_string()
                         ? rec["_id"].get<std::string>()
                         : "#" + std::to_string(position);
    QAExample ex;
    ex.id = required<std::string>(rec, "_id", id);
    const auto question = required<std::string>(rec, "question", id);
    try {
        ex.question = TokenizedQuestion(id, question);
    } catch (const EmptyQuestion&) {
        throw ParseError("record " + id + ": empty question");
    }
    ex.gold_answer = required<std::string>(rec, "answer", id);
    ex.hotpot_type = parse_type(required<std::string>(rec, "type", id), id);
    ex.level = parse_level(required<std::string>(rec, "level", id), id);

    if (auto it = rec.find("context"); it != rec.end()) {
        if (!it->is_array()) throw ParseError("record " + id + ": context must be an array");
        for (const json& entry : *it) {
            if (!entry.is_array() || entry.size() != 2 || !entry[0].is_string() ||
                !entry[1].is_array()) {
                throw ParseError("record " + id + ": malformed context entry");
            }
            Paragraph p;
            p.title = entry[0].get<std::string>();
            for (const json& s : entry[1]) {
                if (!s.is_string()) throw ParseError("record " + id + ": non-string sentence");
                p.sentences.push_back(s.get<std::string>());
            }
            if (p.title.empty()) throw ParseError("record " + id + ": paragraph without title");
            if (p.sentences.empty() || tokenize_text(p.text()).empty()) {
                throw ParseError("record " + id + ": paragraph '" + p.title + "' has no text");
            }
            ex.paragraphs.push_back(std::move(p));
        }
    }

    if (auto it = rec.find("supporting_facts"); it != rec.end()) {
        if (!it->is_array()) throw ParseError("record " + id + ": supporting_facts must be an array");
        for (const json& sf : *it) {
            if (!sf.is_array() || sf.size() != 2 || !sf[0].is_string() ||
                !sf[1].is_number_integer() || sf[1].get<long long>() < 0) {
                throw ParseError("record " + id + ": malformed supporting fact");
            }
            SupportingFact fact{sf[0].get<std::string>(), sf[1].get<std::size_t>()};
            if (!ex.paragraphs.empty()) {
                auto para = std::find_if(ex.paragraphs.begin(), ex.paragraphs.end(),
                                         [&](const Paragraph& p) { return p.title == fact.title; });
                if (para == ex.paragraphs.end()) {
                    throw ParseError("record " + id + ": supporting fact names unknown title '" +
                                     fact.title + "'");
                }
                if (fact.sentence_index >= para->sentences.size()) {
                    throw ParseError("record " + id + ": supporting fact sentence index out of range");
                }
            }
            ex.supporting_facts.push_back(std::move(fact));
        }
    }
    return ex;
}

json record_to_json(const QAExample& ex) {
    json rec;
    rec["_id"] = ex.id;
    rec["question"] = ex.question.raw();
    rec["answer"] = ex.gold_answer;
    rec["type"] = to_string(ex.hotpot_type);
    rec["level"] = to_string(ex.level);
    json sfs = json::array();
    for (const auto& sf : ex.supporting_facts) sfs.push_back(json::array({sf.title, sf.sentence_index}));
    rec["supporting_facts"] = std::move(sfs);
    json ctx = json::array();
    for (const auto& p : ex.paragraphs) ctx.push_back(json::array({p.title, p.sentences}));
    rec["context"] = std::move(ctx);
    return rec;
}

}  // namespace

std::string_view to_string(HotpotType t) {
    return t == HotpotType::Bridge ? "bridge" : "comparison";
}

std::string_view to_string(Level l) {
    switch (l) {
        case Level::Easy: return "easy";
        case Level::Medium: return "medium";
        case Level::Hard: return "hard";
    }
    return "medium";
}

std::vector<QAExample> parse_dataset(std::string_view json_text) {
    json doc;
    try {
        doc = json::parse(json_text);
    } catch (const json::parse_error& e) {
        throw ParseError(std::string("dataset is not valid JSON: ") + e.what());
    }
    if (!doc.is_array()) throw ParseError("dataset must be a top-level JSON array");
    std::vector<QAExample> out;
    out.reserve(doc.size());
    for (std::size_t i = 0; i < doc.size(); ++i) out.push_back(parse_record(doc[i], i));
    return out;
}

std::vector<QAExample> load_dataset(const std::filesystem::path& path) {
    return parse_dataset(detail::read_file(path));
}

void write_dataset(std::ostream& out, const std::vector<QAExample>& examples) {
    json doc = json::array();
    for (const auto& ex : examples) doc.push_back(record_to_json(ex));
    out << doc.dump(1) << '\n';
}

void write_dataset(const std::filesystem::path& path, const std::vector<QAExample>& examples) {
    std::ofstream out(path);
    if (!out) throw Error("cannot write " + path.string());
    write_dataset(out, examples);
}

std::vector<Paragraph> load_corpus(const std::filesystem::path& path) {
    std::vector<Paragraph> corpus;
    detail::for_each_json_line(path, [&](const json& rec, std::size_t line) {
        Paragraph p;
        try {
            p.title = rec.at("title").get<std::string>();
            p.sentences = rec.at("sentences").get<std::vector<std::string>>();
        } catch (const json::exception&) {
            throw ParseError(path.string() + ":" + std::to_string(line) + ": malformed corpus record");
        }
        if (p.title.empty() || p.sentences.empty()) {
            throw ParseError(path.string() + ":" + std::to_string(line) + ": empty paragraph");
        }
        corpus.push_back(std::move(p));
    });
    return corpus;
}

void write_corpus(std::ostream& out, const std::vector<Paragraph>& corpus) {
    for (const auto& p : corpus) {
        out << json{{"title", p.title}, {"sentences", p.sentences}}.dump() << '\n';
    }
}

std::map<std::string, std::string> load_predictions(const std::filesystem::path& path) {
    json doc;
    try {
        doc = json::parse(detail::read_file(path));
        return doc.get<std::map<std::string, std::string>>();
    } catch (const json::exception& e) {
        throw ParseError(path.string() + ": predictions must map ids to strings (" + e.what() + ")");
    }
}

void write_predictions(std::ostream& out, const std::map<std::string, std::string>& predictions) {
    out << json(predictions).dump(1) << '\n';
}

}  // namespace decomprc
