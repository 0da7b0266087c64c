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

#include <set>

#include <gtest/gtest.h>

#include "decomprc/dataset.hpp"
#include "decomprc/errors.hpp"
#include "decomprc/retrieval.hpp"
#include "test_util.hpp"

namespace decomprc {
namespace {

const char* const kQueries[] = {
    "Which fruit is grown in orchards?",
    "programming language Java virtual machine",
    "island of Java coffee",
};

TEST(TfIdf, MatchesDenseReferenceRanking) {
    const auto docs = load_corpus(testing::data_file("toy10.jsonl"));
    const auto index = TfIdfIndex::build(docs);
    for (const char* q : kQueries) {
        const auto hits = index.query(q, docs.size());
        const auto want = testing::dense_tfidf_ranking(docs, q);
        ASSERT_EQ(hits.size(), want.size());
        for (std::size_t r = 0; r < hits.size(); ++r) {
            EXPECT_EQ(hits[r].document, want[r].first) << q << " rank " << r;
            EXPECT_NEAR(hits[r].score, want[r].second, 1e-12);
        }
    }
}

TEST(TfIdf, IdfAndVectors) {
    const auto docs = load_corpus(testing::data_file("toy10.jsonl"));
    const auto index = TfIdfIndex::build(docs);
    const auto java = index.unigram_id("java");
    ASSERT_TRUE(java.has_value());
    // "java" is in 4 of 10 documents.
    EXPECT_NEAR(index.idf(*java), std::log(11.0 / 5.0) + 1.0, 1e-12);
    EXPECT_FALSE(index.unigram_id("zebra").has_value());
    for (std::size_t i = 0; i < docs.size(); ++i) {
        double norm = 0.0;
        for (const auto& [_, w] : index.document_vector(i)) norm += w * w;
        EXPECT_NEAR(norm, 1.0, 1e-12);
    }
    EXPECT_GE(TfIdfIndex::bigram_id("a", "b"), kBigramOffset);
    EXPECT_LT(TfIdfIndex::bigram_id("a", "b"), kBigramOffset + kBigramBuckets);
}

TEST(TfIdf, EdgeCases) {
    EXPECT_THROW(TfIdfIndex::build({}), EmptyCorpus);
    const auto index = TfIdfIndex::build(load_corpus(testing::data_file("toy10.jsonl")));
    EXPECT_EQ(index.query("fruit", 100).size(), 10u);
    EXPECT_EQ(index.query("fruit", 3).size(), 3u);
    for (const auto& h : index.query("zebra quokka", 10)) EXPECT_EQ(h.score, 0.0);
    EXPECT_TRUE(index.vectorize("zebra").empty());
}

TEST(TfIdf, CosineOfSelfIsOne) {
    const auto index = TfIdfIndex::build(load_corpus(testing::data_file("toy10.jsonl")));
    for (std::size_t i = 0; i < 10; ++i) {
        EXPECT_NEAR(cosine(index.document_vector(i), index.document_vector(i)), 1.0, 1e-12);
    }
}

class Regenerate : public ::testing::Test {
protected:
    void SetUp() override {
        gold = load_dataset(testing::data_file("regen_gold.json"));
        index = std::make_unique<TfIdfIndex>(TfIdfIndex::build(load_corpus(testing::data_file("corpus30.jsonl"))));
    }
    std::vector<QAExample> gold;
    std::unique_ptr<TfIdfIndex> index;
};

TEST_F(Regenerate, NeverOverlapsOriginalsNorContainsAnswer) {
    for (const auto& ex : gold) {
        for (std::uint64_t seed : {0u, 1u, 2u}) {
            const auto out = regenerate_distractors(ex, *index, 8, seed);
            std::set<std::string> gold_titles;
            for (const auto& sf : ex.supporting_facts) gold_titles.insert(sf.title);
            ASSERT_EQ(out.paragraphs.size(), gold_titles.size() + 8);
            std::set<std::string> seen;
            std::size_t gold_count = 0;
            for (const auto& p : out.paragraphs) {
                EXPECT_TRUE(seen.insert(p.title).second);
                if (gold_titles.count(p.title)) {
                    ++gold_count;
                    continue;
                }
                for (const auto& orig : ex.paragraphs) {
                    EXPECT_NE(p.title, orig.title);
                    EXPECT_NE(p.text(), orig.text());
                }
                const std::string a = normalize_answer(ex.gold_answer);
                if (a != "yes" && a != "no") {
                    EXPECT_EQ(normalize_answer(p.title + " " + p.text()).find(a), std::string::npos) << p.title;
                }
            }
            EXPECT_EQ(gold_count, gold_titles.size());
        }
    }
}

TEST_F(Regenerate, SeedControlsOrderOnly) {
    const auto a = regenerate_distractors(gold[0], *index, 8, 1);
    const auto b = regenerate_distractors(gold[0], *index, 8, 1);
    const auto c = regenerate_distractors(gold[0], *index, 8, 99);
    std::vector<std::string> ta, tb, tc;
    for (const auto& p : a.paragraphs) ta.push_back(p.title);
    for (const auto& p : b.paragraphs) tb.push_back(p.title);
    for (const auto& p : c.paragraphs) tc.push_back(p.title);
    EXPECT_EQ(ta, tb);
    std::sort(ta.begin(), ta.end());
    std::sort(tc.begin(), tc.end());
    EXPECT_EQ(ta, tc);
}

TEST_F(Regenerate, ErrorsOnShortCorpusOrMissingGold) {
    EXPECT_THROW(regenerate_distractors(gold[0], *index, 40), InsufficientDistractors);
    QAExample no_gold = gold[0];
    no_gold.supporting_facts.clear();
    EXPECT_THROW(regenerate_distractors(no_gold, *index, 2), NoContext);
}

}  // namespace
}  // namespace decomprc
