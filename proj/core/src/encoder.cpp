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

#include "decomprc/encoder.hpp"

#include <cmath>

#include "decomprc/errors.hpp"
#include "json_util.hpp"

namespace decomprc {

std::uint64_t fnv1a(std::string_view s) noexcept {
    std::uint64_t h = 1469598103934665603ULL;
    for (unsigned char c : s) {
        h ^= c;
        h *= 1099511628211ULL;
    }
    return h;
}

FeatureEncoder::FeatureEncoder(std::size_t buckets) : buckets_(buckets) {
    if (buckets_ == 0) throw ShapeError("feature encoder needs at least one hash bucket");
}

std::string FeatureEncoder::name() const { return "features-" + std::to_string(buckets_); }

std::size_t FeatureEncoder::bucket_of(std::string_view lowered) const {
    return static_cast<std::size_t>(fnv1a(lowered) % buckets_);
}

Embedding FeatureEncoder::encode(const TokenizedQuestion& q) const {
    const std::size_t n = q.size();
    Embedding u = Embedding::Zero(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(width()));
    for (std::size_t i = 0; i < n; ++i) {
        const Token& t = q[i];
        const auto row = static_cast<Eigen::Index>(i);
        auto set = [&](Flag f, double v) { u(row, static_cast<Eigen::Index>(flag_column(f))) = v; };

        u(row, static_cast<Eigen::Index>(bucket_of(t.text))) = 1.0;
        set(kWhWord, is_wh_word(t.text) ? 1.0 : 0.0);
        set(kArticle, is_article(t.text) ? 1.0 : 0.0);
        set(kCapitalized, t.capitalized ? 1.0 : 0.0);
        set(kCommaOrConjunction, (t.text == "," || t.text == "and" || t.text == "or") ? 1.0 : 0.0);
        set(kRelativePosition, n > 1 ? static_cast<double>(i) / static_cast<double>(n - 1) : 0.0);
        if (i > 0) {
            const std::string& prev = q[i - 1].text;
            set(kAfterArticleOrWh, (is_article(prev) || is_wh_word(prev)) ? 1.0 : 0.0);
        }
        set(kNumeric, has_digit(t.text) ? 1.0 : 0.0);
        set(kTerminalPunctuation, (t.text == "?" || t.text == "." || t.text == "!") ? 1.0 : 0.0);
    }
    return u;
}

StoredEmbeddings::StoredEmbeddings(std::size_t width,
                                   std::unordered_map<std::string, Embedding> rows)
    : width_(width), rows_(std::move(rows)) {}

Embedding StoredEmbeddings::encode(const TokenizedQuestion& q) const {
    auto it = rows_.find(q.id());
    if (it == rows_.end()) throw MissingEmbedding("no stored embedding for question '" + q.id() + "'");
    if (static_cast<std::size_t>(it->second.rows()) != q.size()) {
        throw ShapeError("stored embedding for '" + q.id() + "' has " +
                         std::to_string(it->second.rows()) + " rows but the question has " +
                         std::to_string(q.size()) + " tokens");
    }
    return it->second;
}

std::shared_ptr<const Encoder> load_external_embeddings(const std::filesystem::path& path) {
    std::unordered_map<std::string, Embedding> rows;
    std::size_t width = 0;
    detail::for_each_json_line(path, [&](const nlohmann::json& rec, std::size_t line) {
        const std::string where = path.string() + ":" + std::to_string(line);
        std::string id;
        std::size_t h = 0;
        std::vector<std::vector<double>> data;
        try {
            id = rec.at("question_id").get<std::string>();
            h = rec.at("h").get<std::size_t>();
            data = rec.at("rows").get<std::vector<std::vector<double>>>();
        } catch (const nlohmann::json::exception&) {
            throw ParseError(where + ": malformed embedding record");
        }
        if (width == 0) width = h;
        if (h != width || h == 0) throw ShapeError(where + ": inconsistent width h=" + std::to_string(h));
        Embedding m(static_cast<Eigen::Index>(data.size()), static_cast<Eigen::Index>(h));
        for (std::size_t r = 0; r < data.size(); ++r) {
            if (data[r].size() != h) throw ShapeError(where + ": row " + std::to_string(r) + " has wrong width");
            for (std::size_t c = 0; c < h; ++c) {
                if (!std::isfinite(data[r][c])) throw ParseError(where + ": non-finite entry");
                m(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = data[r][c];
            }
        }
        rows[id] = std::move(m);
    });
    return std::make_shared<StoredEmbeddings>(width, std::move(rows));
}

}  // namespace decomprc
