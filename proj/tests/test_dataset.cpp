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

#include <sstream>

#include <gtest/gtest.h>

#include "decomprc/dataset.hpp"
#include "decomprc/errors.hpp"
#include "test_util.hpp"

namespace decomprc {
namespace {

TEST(Dataset, LoadsHotpotRecords) {
    const auto ds = load_dataset(testing::data_file("comparisons.json"));
    ASSERT_EQ(ds.size(), 3u);
    EXPECT_EQ(ds[0].id, "cmp-numeric");
    EXPECT_EQ(ds[0].hotpot_type, HotpotType::Comparison);
    EXPECT_EQ(ds[0].level, Level::Hard);
    EXPECT_EQ(ds[0].paragraphs.size(), 2u);
    EXPECT_EQ(ds[0].supporting_facts.size(), 2u);
    EXPECT_EQ(ds[1].gold_answer, "Atsushi Ogata");
}

TEST(Dataset, WriteThenParseIsIdentity) {
    const auto ds = load_dataset(testing::data_file("regen_gold.json"));
    std::ostringstream out;
    write_dataset(out, ds);
    const auto back = parse_dataset(out.str());
    ASSERT_EQ(back.size(), ds.size());
    for (std::size_t i = 0; i < ds.size(); ++i) {
        EXPECT_EQ(back[i].id, ds[i].id);
        EXPECT_EQ(back[i].question.raw(), ds[i].question.raw());
        EXPECT_EQ(back[i].gold_answer, ds[i].gold_answer);
        ASSERT_EQ(back[i].paragraphs.size(), ds[i].paragraphs.size());
        for (std::size_t p = 0; p < ds[i].paragraphs.size(); ++p) {
            EXPECT_EQ(back[i].paragraphs[p].title, ds[i].paragraphs[p].title);
            EXPECT_EQ(back[i].paragraphs[p].sentences, ds[i].paragraphs[p].sentences);
        }
    }
}

TEST(Dataset, EmptyArrayIsEmpty) { EXPECT_TRUE(parse_dataset("[]").empty()); }

TEST(Dataset, MalformedInputsThrowParseError) {
    EXPECT_THROW(parse_dataset("{"), ParseError);
    EXPECT_THROW(parse_dataset("{}"), ParseError);
    EXPECT_THROW(parse_dataset(R"([{"_id":"a","question":"q?","type":"bridge","level":"easy"}])"), ParseError);
    EXPECT_THROW(parse_dataset(R"([{"_id":"a","question":"  ","answer":"x","type":"bridge","level":"easy"}])"),
                 ParseError);
    EXPECT_THROW(parse_dataset(R"([{"_id":"a","question":"q?","answer":"x","type":"sideways","level":"easy"}])"),
                 ParseError);
    EXPECT_THROW(parse_dataset(R"([{"_id":"a","question":"q?","answer":"x","type":"bridge","level":"easy",
        "context":[["T",["One sentence."]]],"supporting_facts":[["T",3]]}])"),
                 ParseError);
    EXPECT_THROW(parse_dataset(R"([{"_id":"a","question":"q?","answer":"x","type":"bridge","level":"easy",
        "context":[["T",["One sentence."]]],"supporting_facts":[["U",0]]}])"),
                 ParseError);
}

TEST(Corpus, LoadsJsonLines) {
    const auto corpus = load_corpus(testing::data_file("corpus30.jsonl"));
    ASSERT_EQ(corpus.size(), 30u);
    EXPECT_EQ(corpus[0].title, "Buddy Hield");
    EXPECT_NE(corpus[0].text().find("Sacramento Kings"), std::string::npos);
}

TEST(Predictions, RoundTrip) {
    const std::map<std::string, std::string> preds{{"a", "yes"}, {"b", "Sacramento Kings"}};
    const auto path = std::filesystem::temp_directory_path() / "decomprc_preds_test.json";
    {
        std::ofstream out(path);
        write_predictions(out, preds);
    }
    EXPECT_EQ(load_predictions(path), preds);
    std::filesystem::remove(path);
}

}  // namespace
}  // namespace decomprc
