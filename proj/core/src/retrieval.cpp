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

#include "decomprc/retrieval.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <random>
#include <set>
#include <unordered_set>

#include "decomprc/encoder.hpp"
#include "decomprc/errors.hpp"

namespace decomprc {

namespace {

// Raw term counts, keyed by term id. `assign` adds unseen unigrams to the
// vocabulary; without it they are skipped.
std::map<std::uint64_t, double> count_terms(
    const std::vector<std::string>& words, std::unordered_map<std::string, std::uint64_t>* assign,
    const std::unordered_map<std::string, std::uint64_t>& vocab) {
    std::map<std::uint64_t, double> counts;
    for (std::size_t i = 0; i < words.size(); ++i) {
        auto it = vocab.find(words[i]);
        if (it == vocab.end() && assign != nullptr) {
            it = assign->emplace(words[i], assign->size()).first;
        }
        if (it != vocab.end()) counts[it->second] += 1.0;
        if (i + 1 < words.size()) counts[TfIdfIndex::bigram_id(words[i], words[i + 1])] += 1.0;
    }
    return counts;
}

SparseVector weigh(const std::map<std::uint64_t, double>& counts,
                   const std::unordered_map<std::uint64_t, double>& idf) {
    SparseVector v;
    double norm = 0.0;
    for (const auto& [term, c] : counts) {
        const auto it = idf.find(term);
        if (it == idf.end()) continue;
        const double w = (1.0 + std::log(c)) * it->second;
        v.emplace_back(term, w);
        norm += w * w;
    }
    if (norm > 0.0) {
        norm = std::sqrt(norm);
        for (auto& [_, w] : v) w /= norm;
    }
    return v;
}

bool contains_run(const std::vector<std::string>& hay, const std::vector<std::string>& needle) {
    if (needle.empty() || needle.size() > hay.size()) return false;
    return std::search(hay.begin(), hay.end(), needle.begin(), needle.end()) != hay.end();
}

}  // namespace

std::vector<std::string> index_words(std::string_view text) {
    std::vector<std::string> out;
    for (const auto& t : tokenize_text(text)) {
        if (!is_punctuation(t.text)) out.push_back(t.text);
    }
    return out;
}

double cosine(const SparseVector& a, const SparseVector& b) {
    double dot = 0.0;
    double na = 0.0;
    double nb = 0.0;
    for (const auto& [_, w] : a) na += w * w;
    for (const auto& [_, w] : b) nb += w * w;
    std::size_t i = 0;
    std::size_t j = 0;
    while (i < a.size() && j < b.size()) {
        if (a[i].first < b[j].first) {
            ++i;
        } else if (b[j].first < a[i].first) {
            ++j;
        } else {
            dot += a[i].second * b[j].second;
            ++i;
            ++j;
        }
    }
    if (na == 0.0 || nb == 0.0) return 0.0;
    return dot / (std::sqrt(na) * std::sqrt(nb));
}

TfIdfIndex TfIdfIndex::build(std::vector<Paragraph> corpus) {
    if (corpus.empty()) throw EmptyCorpus("cannot index an empty corpus");
    TfIdfIndex index;
    index.documents_ = std::move(corpus);
    std::vector<std::map<std::uint64_t, double>> counts;
    counts.reserve(index.documents_.size());
    std::unordered_map<std::uint64_t, std::size_t> df;
    for (const auto& p : index.documents_) {
        counts.push_back(count_terms(index_words(p.text()), &index.vocabulary_, index.vocabulary_));
        for (const auto& [term, _] : counts.back()) ++df[term];
    }
    const double d = static_cast<double>(index.documents_.size());
    for (const auto& [term, n] : df) {
        index.idf_[term] = std::log((1.0 + d) / (1.0 + static_cast<double>(n))) + 1.0;
    }
    index.vectors_.reserve(counts.size());
    for (const auto& c : counts) index.vectors_.push_back(weigh(c, index.idf_));
    return index;
}

std::optional<std::uint64_t> TfIdfIndex::unigram_id(std::string_view lowered) const {
    const auto it = vocabulary_.find(std::string(lowered));
    if (it == vocabulary_.end()) return std::nullopt;
    return it->second;
}

std::uint64_t TfIdfIndex::bigram_id(std::string_view first, std::string_view second) {
    std::string joined(first);
    joined += ' ';
    joined += second;
    return kBigramOffset + fnv1a(joined) % kBigramBuckets;
}

double TfIdfIndex::idf(std::uint64_t term) const {
    const auto it = idf_.find(term);
    return it == idf_.end() ? 0.0 : it->second;
}

SparseVector TfIdfIndex::vectorize(std::string_view text) const {
    return weigh(count_terms(index_words(text), nullptr, vocabulary_), idf_);
}

std::vector<RetrievalHit> TfIdfIndex::query(std::string_view text, std::size_t k) const {
    const SparseVector q = vectorize(text);
    std::vector<RetrievalHit> hits;
    hits.reserve(vectors_.size());
    for (std::size_t i = 0; i < vectors_.size(); ++i) hits.push_back({i, cosine(q, vectors_[i])});
    const std::size_t keep = std::min(k, hits.size());
    std::partial_sort(hits.begin(), hits.begin() + static_cast<std::ptrdiff_t>(keep), hits.end(),
                      [](const RetrievalHit& a, const RetrievalHit& b) {
                          if (a.score != b.score) return a.score > b.score;
                          return a.document < b.document;
                      });
    hits.resize(keep);
    return hits;
}

QAExample regenerate_distractors(const QAExample& example, const TfIdfIndex& index, std::size_t k,
                                 std::uint64_t seed) {
    std::set<std::string> gold_titles;
    for (const auto& f : example.supporting_facts) gold_titles.insert(f.title);

    std::vector<Paragraph> gold;
    std::unordered_set<std::string> original_titles;
    std::unordered_set<std::string> original_texts;
    for (const auto& p : example.paragraphs) {
        original_titles.insert(p.title);
        original_texts.insert(p.text());
        if (gold_titles.count(p.title) != 0) gold.push_back(p);
    }
    if (gold.empty()) throw NoContext("example '" + example.id + "' has no identifiable gold paragraph");

    const std::string answer = normalize_answer(example.gold_answer);
    const bool check_answer = answer != "yes" && answer != "no" && !answer.empty();
    const auto answer_words = normalized_tokens(example.gold_answer);

    std::vector<Paragraph> chosen;
    for (const auto& hit : index.query(example.question.raw(), index.documents().size())) {
        if (chosen.size() == k) break;
        const Paragraph& p = index.documents()[hit.document];
        const std::string text = p.text();
        if (original_titles.count(p.title) != 0 || original_texts.count(text) != 0) continue;
        if (gold_titles.count(p.title) != 0) continue;
        if (check_answer && contains_run(normalized_tokens(p.title + " " + text), answer_words)) continue;
        chosen.push_back(p);
    }
    if (chosen.size() < k) {
        throw InsufficientDistractors("example '" + example.id + "': only " +
                                      std::to_string(chosen.size()) + " eligible paragraphs, need " +
                                      std::to_string(k));
    }

    QAExample out = example;
    out.paragraphs = std::move(gold);
    out.paragraphs.insert(out.paragraphs.end(), chosen.begin(), chosen.end());
    std::mt19937_64 rng(seed);
    std::shuffle(out.paragraphs.begin(), out.paragraphs.end(), rng);
    return out;
}

}  // namespace decomprc
