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

#include <random>
#include <set>

#include <gtest/gtest.h>
#include <nlohmann/json.hpp>

#include "decomprc/dataset.hpp"
#include "decomprc/errors.hpp"
#include "decomprc/eval.hpp"
#include "test_util.hpp"

namespace decomprc {
namespace {

TEST(TokenF1, HandComputedFixtures) {
    // Articles and case vanish: identical.
    EXPECT_DOUBLE_EQ(token_f1("the Sacramento Kings", "Sacramento Kings"), 1.0);
    // P = 1/2, R = 1: 2 * 0.5 / 1.5.
    EXPECT_NEAR(token_f1("Sacramento Kings", "Kings"), 0.667, 5e-4);
    EXPECT_DOUBLE_EQ(token_f1("Sacramento Kings", "Kings"), 2.0 / 3.0);
    // P = R = 2/4.
    EXPECT_DOUBLE_EQ(token_f1("red green blue pink", "red green black white"), 0.5);
    EXPECT_DOUBLE_EQ(token_f1("Ohio", "Missouri"), 0.0);
    EXPECT_DOUBLE_EQ(token_f1("yes", "no"), 0.0);
}

TEST(TokenF1, EdgeCases) {
    EXPECT_DOUBLE_EQ(token_f1("", ""), 1.0);
    EXPECT_DOUBLE_EQ(token_f1("", "x"), 0.0);
    EXPECT_DOUBLE_EQ(token_f1("yes", "yes"), 1.0);
    EXPECT_DOUBLE_EQ(token_f1("yes sir", "yes"), 0.0);
    EXPECT_DOUBLE_EQ(token_f1("cat cat", "cat"), 2.0 / 3.0);
}

TEST(TokenF1, PropertySymmetricAndBounded) {
    std::mt19937_64 rng(2);
    const char* words[] = {"a", "red", "blue", "cat", "the", "dog", "yes", "no", "ohio"};
    for (int trial = 0; trial < 500; ++trial) {
        std::string p, g;
        for (int i = 0, n = 1 + rng() % 4; i < n; ++i) p += std::string(words[rng() % 9]) + " ";
        for (int i = 0, n = 1 + rng() % 4; i < n; ++i) g += std::string(words[rng() % 9]) + " ";
        const double f = token_f1(p, g);
        EXPECT_GE(f, 0.0);
        EXPECT_LE(f, 1.0);
        EXPECT_DOUBLE_EQ(f, token_f1(g, p));
        if (exact_match(p, g) == 1.0) {
            EXPECT_DOUBLE_EQ(f, 1.0);
        }
    }
}

TEST(ExactMatch, Normalized) {
    EXPECT_EQ(exact_match("The Kings.", "kings"), 1.0);
    EXPECT_EQ(exact_match("Kings", "Queens"), 0.0);
}

TEST(JointF1, IsExampleWiseMinimum) {
    std::mt19937_64 rng(8);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int i = 0; i < 1000; ++i) {
        const double a = u(rng);
        const double b = u(rng);
        EXPECT_EQ(joint_f1(a, b), a < b ? a : b);
    }
}

TEST(Evaluate, AggregatesAreMeansOfExamples) {
    const auto gold = load_dataset(testing::data_file("regen_gold.json"));
    const std::map<std::string, std::string> preds{
        {"regen-bridge", "Kings"}, {"regen-battle", "yes"}, {"regen-state", "yes"}};
    const auto report = evaluate(preds, gold);
    ASSERT_EQ(report.examples.size(), 3u);
    double sum = 0.0;
    for (const auto& e : report.examples) sum += e.f1;
    EXPECT_DOUBLE_EQ(report.overall.f1, sum / 3.0);
    EXPECT_DOUBLE_EQ(report.overall.f1, (2.0 / 3.0 + 1.0 + 0.0) / 3.0);
    EXPECT_DOUBLE_EQ(report.bridge.f1, 2.0 / 3.0);
    EXPECT_DOUBLE_EQ(report.comparison.f1, 0.5);
    EXPECT_DOUBLE_EQ(report.overall.em, 1.0 / 3.0);
    EXPECT_EQ(report.missing, 0u);
    const auto doc = nlohmann::json::parse(report.to_json());
    EXPECT_EQ(doc["overall"]["count"], 3);
}

TEST(Evaluate, MissingPredictionScoresZero) {
    const auto gold = load_dataset(testing::data_file("regen_gold.json"));
    const auto report = evaluate({{"regen-battle", "yes"}}, gold);
    EXPECT_EQ(report.missing, 2u);
    EXPECT_DOUBLE_EQ(report.overall.f1, 1.0 / 3.0);
}

TEST(Evaluate, SingleMultiSplit) {
    const auto gold = load_dataset(testing::data_file("regen_gold.json"));
    const auto table = parse_per_model_f1(
        R"({"regen-bridge": [1, 0.5, 0.2], "regen-battle": [1, 0, 1], "regen-state": [0, 0, 0]})");
    const auto split = split_single_multi(gold, table);
    EXPECT_EQ(split.single, std::vector<std::string>{"regen-bridge"});
    EXPECT_EQ(split.multi.size(), 2u);
    const auto report = evaluate({{"regen-bridge", "Sacramento Kings"}}, gold, &table);
    ASSERT_TRUE(report.single.has_value());
    EXPECT_DOUBLE_EQ(report.single->f1, 1.0);
    EXPECT_DOUBLE_EQ(report.multi->f1, 0.0);
    EXPECT_THROW(split_single_multi(gold, parse_per_model_f1("{}")), ParseError);
    EXPECT_THROW(parse_per_model_f1(R"({"a": [1, 2]})"), ParseError);
    EXPECT_THROW(parse_per_model_f1("[1]"), ParseError);
}

TEST(Inversion, FixtureIsAnInvolutionAndDualizesTheOp) {
    const auto cases = testing::load_inversion_cases();
    ASSERT_EQ(cases.size(), 50u);
    std::set<DiscreteOp> families;
    for (const auto& c : cases) {
        const TokenizedQuestion q("q", c.question);
        const auto parse = parse_comparison(q, testing::entity_indices(q, c.entity1, c.entity2));
        ASSERT_EQ(find_op(parse, q), c.op) << c.question;
        families.insert(c.op);
        const auto inv = invert_comparison(q, parse, c.op);
        ASSERT_TRUE(inv.has_value()) << c.question;
        EXPECT_NE(inv->question.raw(), c.question);
        EXPECT_EQ(find_op(inv->parse, inv->question), *dual(c.op)) << inv->question.raw();
        EXPECT_EQ(inv->low_confidence, c.op == DiscreteOp::WhichIsTrue);
        const auto back = invert_comparison(inv->question, inv->parse, inv->op);
        ASSERT_TRUE(back.has_value());
        EXPECT_EQ(back->question.raw(), c.question);
    }
    EXPECT_EQ(families.size(), 7u);
}

TEST(Inversion, ExamplesAndErrors) {
    const TokenizedQuestion q("q", "Who is older, Bob Dylan or Neil Young?");
    const auto parse = parse_comparison(q, testing::entity_indices(q, "Bob Dylan", "Neil Young"));
    const auto inv = invert_comparison(q, parse, DiscreteOp::WhichIsSmaller);
    ASSERT_TRUE(inv.has_value());
    EXPECT_EQ(inv->question.raw(), "Who is younger, Bob Dylan or Neil Young?");
    EXPECT_EQ(inv->op, DiscreteOp::WhichIsGreater);
    EXPECT_FALSE(invert_comparison(q, parse, DiscreteOp::And).has_value());

    const TokenizedQuestion ogata("q", "In between Atsushi Ogata and Ralpha Smart who graduated from Harvard College?");
    const auto ogata_parse = parse_comparison(ogata, testing::entity_indices(ogata, "Atsushi Ogata", "Ralpha Smart"));
    EXPECT_THROW(invert_comparison(ogata, ogata_parse, DiscreteOp::WhichIsTrue), InversionError);

    const TokenizedQuestion big("q", "Which is bigger, Boston or Denver?");
    const auto pb = parse_comparison(big, testing::entity_indices(big, "Boston", "Denver"));
    EXPECT_THROW(invert_comparison(big, pb, DiscreteOp::WhichIsGreater), InversionError);
}

TEST(Antonym, Symmetric) {
    for (const char* w : {"earlier", "first", "more", "older", "before", "same", "larger"}) {
        const auto a = antonym(w);
        ASSERT_TRUE(a.has_value());
        EXPECT_EQ(*antonym(*a), w);
    }
    EXPECT_FALSE(antonym("bigger").has_value());
}

}  // namespace
}  // namespace decomprc
