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

// Shared fixture loading for tests and the acceptance binary.

#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <map>
#include <cstddef>
#include <filesystem>
#include <fstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "decomprc/discrete_ops.hpp"
#include "decomprc/text.hpp"
#include "decomprc/types.hpp"

namespace decomprc::testing {

inline std::filesystem::path data_dir() { return std::filesystem::path(DECOMPRC_TEST_DATA_DIR); }

inline std::filesystem::path data_file(const std::string& name) { return data_dir() / name; }

/// First token run of `q` whose lowered text equals `phrase`, as [begin, end).
inline TokenSpan find_phrase(const TokenizedQuestion& q, const std::string& phrase, std::size_t from = 0) {
    const auto want = tokenize_text(phrase);
    for (std::size_t i = from; i + want.size() <= q.size(); ++i) {
        bool ok = true;
        for (std::size_t j = 0; j < want.size() && ok; ++j) ok = q[i + j].text == want[j].text;
        if (ok) return {i, i + want.size()};
    }
    throw std::runtime_error("'" + phrase + "' not in '" + q.raw() + "'");
}

inline std::array<std::size_t, 4> entity_indices(const TokenizedQuestion& q, const std::string& e1,
                                                 const std::string& e2) {
    const TokenSpan a = find_phrase(q, e1);
    const TokenSpan b = find_phrase(q, e2, a.end);
    return {a.begin, a.end, b.begin, b.end};
}

struct InversionCase {
    std::string question;
    std::string entity1;
    std::string entity2;
    DiscreteOp op;
};

inline std::vector<InversionCase> load_inversion_cases() {
    std::ifstream in(data_file("inversion.jsonl"));
    std::vector<InversionCase> out;
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        const auto j = nlohmann::json::parse(line);
        out.push_back({j.at("question").get<std::string>(), j.at("entities").at(0).get<std::string>(),
                       j.at("entities").at(1).get<std::string>(),
                       discrete_op_from_string(j.at("op").get<std::string>())});
    }
    return out;
}

/// Retrieval reference: tf-idf over unigram and bigram strings in a dense
/// matrix, cosine by full dot products, ranked by (score desc, index asc).
inline std::vector<std::pair<std::size_t, double>> dense_tfidf_ranking(const std::vector<Paragraph>& docs,
                                                                       const std::string& query) {
    auto words = [](const std::string& text) {
        std::vector<std::string> out;
        for (const auto& t : tokenize_text(text)) {
            if (!is_punctuation(t.text)) out.push_back(t.text);
        }
        return out;
    };
    auto terms = [&](const std::string& text) {
        const auto w = words(text);
        std::map<std::string, double> counts;
        for (std::size_t i = 0; i < w.size(); ++i) {
            counts["u:" + w[i]] += 1.0;
            if (i + 1 < w.size()) counts["b:" + w[i] + " " + w[i + 1]] += 1.0;
        }
        return counts;
    };
    std::vector<std::map<std::string, double>> doc_terms;
    std::map<std::string, std::size_t> column;
    std::map<std::string, double> df;
    for (const auto& d : docs) {
        doc_terms.push_back(terms(d.text()));
        for (const auto& [t, _] : doc_terms.back()) {
            column.emplace(t, column.size());
            df[t] += 1.0;
        }
    }
    const double n = static_cast<double>(docs.size());
    auto dense = [&](const std::map<std::string, double>& counts) {
        std::vector<double> v(column.size(), 0.0);
        for (const auto& [t, c] : counts) {
            const auto it = column.find(t);
            if (it == column.end()) continue;
            v[it->second] = (1.0 + std::log(c)) * (std::log((1.0 + n) / (1.0 + df[t])) + 1.0);
        }
        return v;
    };
    auto cos = [](const std::vector<double>& a, const std::vector<double>& b) {
        double dot = 0.0, na = 0.0, nb = 0.0;
        for (std::size_t i = 0; i < a.size(); ++i) {
            dot += a[i] * b[i];
            na += a[i] * a[i];
            nb += b[i] * b[i];
        }
        return na == 0.0 || nb == 0.0 ? 0.0 : dot / std::sqrt(na * nb);
    };
    const auto q = dense(terms(query));
    std::vector<std::pair<std::size_t, double>> out;
    for (std::size_t i = 0; i < docs.size(); ++i) out.emplace_back(i, cos(dense(doc_terms[i]), q));
    std::stable_sort(out.begin(), out.end(), [](const auto& a, const auto& b) { return a.second > b.second; });
    return out;
}

}  // namespace decomprc::testing
