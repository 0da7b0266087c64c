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

#include <gtest/gtest.h>
#include <nlohmann/json.hpp>

#include "decomprc/dataset.hpp"
#include "decomprc/errors.hpp"
#include "decomprc/eval.hpp"
#include "decomprc/orchestrate.hpp"
#include "synthetic.hpp"
#include "test_util.hpp"

namespace decomprc {
namespace {

using Answers = std::unordered_map<std::string, std::string>;

Paragraph para(std::string title, std::string sentence) { return {std::move(title), {std::move(sentence)}}; }

DecompositionResult result(ReasoningType t, std::string answer, double confidence, double score) {
    DecompositionResult r;
    r.reasoning_type = t;
    r.final_answer = std::move(answer);
    r.confidence = confidence;
    r.arbiter_score = score;
    return r;
}

TEST(RunBridging, SubstitutesHopOneAnswer) {
    const TokenizedQuestion q("q", "Which team does the player named 2015 Diamond Head Classic's MVP play for?");
    const auto d = generate_bridging(q, 3, 4, 11);
    const FixtureBackend fx(Answers{{"Which player named 2015 Diamond Head Classic's MVP?", "Buddy Hield"},
                                    {"Which team does Buddy Hield play for?", "Sacramento Kings"}});
    const FixedContext ctx(load_corpus(testing::data_file("corpus30.jsonl")));
    const auto r = run_bridging(d, ctx, fx);
    ASSERT_FALSE(r.failed()) << *r.error;
    EXPECT_EQ(r.final_answer, "Sacramento Kings");
    ASSERT_EQ(r.asked.size(), 2u);
    EXPECT_EQ(r.asked[1].render(), "Which team does Buddy Hield play for?");
    EXPECT_EQ(r.evidence->title, "Buddy Hield");
    EXPECT_DOUBLE_EQ(r.confidence, std::min(r.hop_answers[0].confidence, r.hop_answers[1].confidence));
}

TEST(RunBridging, HopFailureIsRecorded) {
    const TokenizedQuestion q("q", "Which team does the player named 2015 Diamond Head Classic's MVP play for?");
    const FixtureBackend fx(Answers{});
    const FixedContext ctx({para("A", "Nothing here.")});
    const auto r = run_bridging(generate_bridging(q, 3, 4, 11), ctx, fx);
    EXPECT_TRUE(r.failed());
    EXPECT_EQ(r.confidence, 0.0);
}

TEST(RunIntersection, SharedAnswerWins) {
    const TokenizedQuestion q("q", "Stories USA starred which actor and comedian from 'The Office'?");
    const auto d = generate_intersection(q, 3, 7);
    const FixtureBackend fx(Answers{{"Stories USA starred which actor and comedian?", "Steve Carell"},
                                    {"Which actor and comedian from 'The Office'?", "Steve Carell"}});
    const FixedContext ctx({para("Stories USA", "Stories USA is a film that starred Steve Carell."),
                            para("Steve Carell", "Steve Carell is an actor and comedian from The Office.")});
    const auto r = run_intersection(d, ctx, fx);
    ASSERT_FALSE(r.failed()) << *r.error;
    EXPECT_EQ(r.final_answer, "Steve Carell");
    EXPECT_FALSE(r.low_confidence);
}

TEST(IntersectCandidates, SumMinAndFallback) {
    auto cand = [](std::string t, double c) {
        AnswerCandidate a;
        a.text = std::move(t);
        a.confidence = c;
        return a;
    };
    const std::vector<AnswerCandidate> a{cand("Steve Carell", 0.4), cand("Ohio", 0.9)};
    const std::vector<AnswerCandidate> b{cand("the Steve Carell", 0.7), cand("Texas", 0.95)};
    const auto p = intersect_candidates(a, b);
    EXPECT_FALSE(p.fallback);
    EXPECT_EQ(p.answer, "Steve Carell");
    EXPECT_DOUBLE_EQ(p.score, 1.1);
    EXPECT_DOUBLE_EQ(p.confidence, 0.4);
    EXPECT_EQ(p.evidence_set, 1u);

    const std::vector<AnswerCandidate> c{cand("Texas", 0.3)};
    const std::vector<AnswerCandidate> e{cand("Ohio", 0.8)};
    const auto f = intersect_candidates(c, e);
    EXPECT_TRUE(f.fallback);
    EXPECT_EQ(f.answer, "Ohio");
    EXPECT_DOUBLE_EQ(f.confidence, 0.4);
    EXPECT_THROW(intersect_candidates({}, {}), NoAnswer);
}

TEST(RunComparison, WorkedExamplesThroughFixture) {
    const auto gold = load_dataset(testing::data_file("comparisons.json"));
    const auto fx = FixtureBackend::load(testing::data_file("comparison_answers.json"));
    const std::array<std::pair<const char*, const char*>, 3> ents{{
        {"the Battle of Stones River", "the Battle of Saipan"},
        {"Atsushi Ogata", "Ralpha Smart"},
        {"Cardinal Health", "Kansas City Southern"},
    }};
    for (std::size_t i = 0; i < gold.size(); ++i) {
        const auto& q = gold[i].question;
        const auto d = generate_comparison(q, testing::entity_indices(q, ents[i].first, ents[i].second));
        const auto r = run_comparison(d, FixedContext(gold[i].paragraphs), fx);
        ASSERT_FALSE(r.failed()) << *r.error;
        EXPECT_EQ(r.final_answer, gold[i].gold_answer);
    }
}

TEST(RunComparison, AmbiguousResultFails) {
    const TokenizedQuestion q("q", "Who is older, Bob Dylan or Neil Young?");
    const auto d = generate_comparison(q, testing::entity_indices(q, "Bob Dylan", "Neil Young"));
    const FixtureBackend fx(Answers{{"Bob Dylan was born when?", "1941"}, {"Neil Young was born when?", "1941"}});
    const auto r = run_comparison(d, FixedContext({para("A", "Both were born in 1941.")}), fx);
    EXPECT_TRUE(r.failed());
    EXPECT_EQ(r.hop_answers.size(), 2u);
}

TEST(RunDecomposition, OriginalFailureBecomesResult) {
    const auto d = Decomposition::original(SubQuestion::from_question(TokenizedQuestion("q", "Who?")));
    const auto r = run_decomposition(d, FixedContext({para("A", "x")}), FixtureBackend(Answers{}));
    EXPECT_TRUE(r.failed());
    const auto empty = run_decomposition(d, FixedContext({}), FixtureBackend(Answers{{"Who?", "x"}}));
    EXPECT_TRUE(empty.failed());
}

TEST(ScorerInput, LayoutAndBudget) {
    const TokenizedQuestion q("q", "Who is older?");
    const auto x = scorer_input(q, ReasoningType::Comparison, "Bob Dylan", "one two three four five", 3);
    ASSERT_EQ(x.size(), q.size() + 1 + 1 + 2 + 1 + 3);
    EXPECT_EQ(x[q.size()].surface, "[TYPE-C]");
    EXPECT_EQ(x[q.size() + 1].surface, "[ANS-SEP]");
    EXPECT_EQ(x[q.size() + 4].surface, "[EVID-SEP]");
    EXPECT_EQ(x[x.size() - 1].surface, "three");
}

TEST(Scorer, GradientMatchesFiniteDifferences) {
    std::mt19937_64 rng(12);
    std::normal_distribution<double> n(0.0, 1.0);
    for (int trial = 0; trial < 10; ++trial) {
        Eigen::MatrixXd x(7, 5);
        for (Eigen::Index i = 0; i < x.size(); ++i) x.data()[i] = n(rng);
        std::vector<double> labels(7);
        for (auto& l : labels) l = static_cast<double>(rng() % 2);
        Eigen::VectorXd w(5);
        for (Eigen::Index i = 0; i < 5; ++i) w(i) = n(rng);
        Eigen::VectorXd grad;
        scorer_loss(w, x, labels, &grad);
        const double err = testing::gradient_check(w, grad, [&](const Eigen::MatrixXd& v) {
            return scorer_loss(Eigen::VectorXd(v), x, labels);
        });
        EXPECT_LT(err, 1e-4);
    }
}

TEST(Scorer, LossIsFiniteForExtremeLogits) {
    Eigen::MatrixXd x(2, 1);
    x << 1000.0, -1000.0;
    const std::vector<double> labels{0.0, 1.0};
    const double loss = scorer_loss(Eigen::VectorXd::Ones(1), x, labels);
    EXPECT_TRUE(std::isfinite(loss));
    EXPECT_NEAR(loss, 1000.0, 1e-9);
}

TEST(Scorer, TrainsTowardsCorrectDecompositions) {
    const FeatureEncoder enc(16);
    std::vector<ScorerTrace> traces;
    const TokenizedQuestion q("q", "Who is older, Bob Dylan or Neil Young?");
    for (int i = 0; i < 10; ++i) {
        auto good = result(ReasoningType::Comparison, "Bob Dylan", 0.5, 0.0);
        good.evidence = para("Bob Dylan", "Bob Dylan was born in 1941.");
        auto bad = result(ReasoningType::Original, "1941", 0.5, 0.0);
        bad.evidence = para("Other", "A year 1941 appears here.");
        traces.push_back({q, good, true});
        traces.push_back({q, bad, false});
    }
    const auto trained = train_scorer(traces, enc);
    EXPECT_TRUE(trained.warnings.empty());
    EXPECT_LT(trained.loss, std::log(2.0));
    EXPECT_GT(score_decomposition(trained.model, enc, q, traces[0].result),
              score_decomposition(trained.model, enc, q, traces[1].result));

    const auto back = ScorerModel::from_json(trained.model.to_json());
    EXPECT_EQ(back.w, trained.model.w);
    EXPECT_THROW(score_decomposition(ScorerModel::zeros(3), enc, q, traces[0].result), ShapeError);
    EXPECT_THROW(ScorerModel::from_json(R"({"h": 2, "weights": [1]})"), ShapeError);
}

TEST(Scorer, DegenerateLabelsWarn) {
    const FeatureEncoder enc(8);
    const TokenizedQuestion q("q", "Who?");
    std::vector<ScorerTrace> traces{{q, result(ReasoningType::Original, "x", 0.5, 0.0), true}};
    const auto trained = train_scorer(traces, enc);
    ASSERT_EQ(trained.warnings.size(), 1u);
    EXPECT_EQ(trained.warnings[0].rfind("DegenerateTraining", 0), 0u);
}

TEST(PipelineClassifier, LearnsTypeFromQuestionWords) {
    const FeatureEncoder enc(32);
    std::vector<TypeExample> ex;
    for (int i = 0; i < 5; ++i) {
        ex.push_back({TokenizedQuestion("a", "Who is older, Bob Dylan or Neil Young?"), ReasoningType::Comparison});
        ex.push_back({TokenizedQuestion("b", "Which team does the player named MVP play for?"), ReasoningType::Bridging});
    }
    const auto c = train_pipeline_classifier(ex, enc);
    const auto p = c.probabilities(enc, TokenizedQuestion("c", "Who is older, Bob Dylan or Neil Young?"));
    EXPECT_NEAR(p[0] + p[1] + p[2] + p[3], 1.0, 1e-12);
    EXPECT_GT(p[2], p[0]);
    const auto back = PipelineClassifier::from_json(c.to_json());
    EXPECT_EQ(back.w, c.w);
}

TEST(Arbitrate, ModesAndTieOrder) {
    std::vector<DecompositionResult> rs{
        result(ReasoningType::Original, "Ohio", 0.9, 0.2),
        result(ReasoningType::Comparison, "Missouri", 0.4, 0.7),
        result(ReasoningType::Bridging, "Texas", 0.4, 0.7),
    };
    EXPECT_EQ(arbitrate(rs, ArbitrationMode::Scorer), 2u);
    EXPECT_EQ(arbitrate(rs, ArbitrationMode::Confidence), 0u);
    ArbitrationInputs in;
    in.gold = "Missouri";
    EXPECT_EQ(arbitrate(rs, ArbitrationMode::Oracle, in), 1u);
    in.type_probabilities = std::array<double, 4>{0.1, 0.1, 0.2, 0.6};
    EXPECT_EQ(arbitrate(rs, ArbitrationMode::Pipeline, in), 0u);
    EXPECT_THROW(arbitrate(rs, ArbitrationMode::Pipeline), Error);
    EXPECT_THROW(arbitrate(rs, ArbitrationMode::Oracle), Error);

    rs[2].error = "hop failed";
    rs[2].final_answer.clear();
    EXPECT_EQ(arbitrate(rs, ArbitrationMode::Scorer), 1u);
    for (auto& r : rs) {
        r.error = "x";
        r.final_answer.clear();
    }
    EXPECT_THROW(arbitrate(rs, ArbitrationMode::Confidence), NoAnswer);
}

TEST(Arbitrate, PropertyArgmaxInvariantUnderPositiveRescaling) {
    std::mt19937_64 rng(31);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int trial = 0; trial < 300; ++trial) {
        std::vector<DecompositionResult> rs;
        for (int t = 0; t < 4; ++t) {
            rs.push_back(result(static_cast<ReasoningType>(t), "a" + std::to_string(t), u(rng), u(rng)));
        }
        const auto pick = arbitrate(rs, ArbitrationMode::Scorer);
        std::size_t want = 0;
        for (std::size_t i = 1; i < rs.size(); ++i) {
            if (rs[i].arbiter_score > rs[want].arbiter_score) want = i;
        }
        EXPECT_EQ(pick, want);
        const double c = 0.01 + 100.0 * u(rng);
        for (auto& r : rs) r.arbiter_score *= c;
        EXPECT_EQ(arbitrate(rs, ArbitrationMode::Scorer), pick);
    }
}

class PipelineRun : public ::testing::Test {
protected:
    void SetUp() override {
        gold = load_dataset(testing::data_file("comparisons.json"));
        backend = std::make_shared<FixtureBackend>(FixtureBackend::load(testing::data_file("arbitration_answers.json")));
        encoder = std::make_shared<FeatureEncoder>(16);
    }
    double mean_f1(const Pipeline& p) {
        double sum = 0.0;
        for (const auto& ex : gold) {
            const auto o = p.run(ex.question, FixedContext(ex.paragraphs), ex.gold_answer);
            sum += token_f1(o.answer, ex.gold_answer);
        }
        return sum / static_cast<double>(gold.size());
    }
    std::vector<QAExample> gold;
    std::shared_ptr<const RCBackend> backend;
    std::shared_ptr<const Encoder> encoder;
};

TEST_F(PipelineRun, OracleDominatesScorer) {
    const double oracle = mean_f1(Pipeline(encoder, {}, backend, {ArbitrationMode::Oracle}));
    EXPECT_DOUBLE_EQ(oracle, 1.0);
    std::mt19937_64 rng(5);
    std::normal_distribution<double> n(0.0, 1.0);
    for (int trial = 0; trial < 10; ++trial) {
        ScorerModel m = ScorerModel::zeros(encoder->width());
        for (Eigen::Index i = 0; i < m.w.size(); ++i) m.w(i) = n(rng);
        const double scorer = mean_f1(Pipeline(encoder, {}, backend, {ArbitrationMode::Scorer}, m));
        EXPECT_GE(oracle, scorer);
        EXPECT_GE(scorer, 0.0);
    }
}

TEST_F(PipelineRun, ScorerPicksArgmaxAndTraceIsJson) {
    const Pipeline p(encoder, {}, backend, {ArbitrationMode::Scorer});
    for (const auto& ex : gold) {
        const auto o = p.run(ex.question, FixedContext(ex.paragraphs));
        ASSERT_FALSE(o.error.has_value()) << *o.error;
        ASSERT_TRUE(o.chosen.has_value());
        const auto doc = nlohmann::json::parse(trace_record(o));
        EXPECT_EQ(doc["id"], ex.id);
        EXPECT_EQ(doc["answer"], o.answer);
        EXPECT_EQ(doc["results"].size(), o.results.size());
        EXPECT_EQ(doc["chosen_type"], std::string(to_string(o.results[*o.chosen].reasoning_type)));
        // Zero weights score every usable result 0.5; the tie goes to comparison.
        EXPECT_EQ(o.results[*o.chosen].reasoning_type, ReasoningType::Comparison);
    }
}

TEST_F(PipelineRun, ModeRequirements) {
    EXPECT_THROW(Pipeline(encoder, {}, backend, {ArbitrationMode::Pipeline}), Error);
    EXPECT_THROW(Pipeline(encoder, {}, backend, {ArbitrationMode::Scorer}, ScorerModel::zeros(3)), ShapeError);
    const Pipeline oracle(encoder, {}, backend, {ArbitrationMode::Oracle});
    const auto o = oracle.run(gold[0].question, FixedContext(gold[0].paragraphs));
    EXPECT_TRUE(o.error.has_value());
    EXPECT_TRUE(o.answer.empty());
}

TEST(RetrievedContext, UsesRenderedHop) {
    auto index = std::make_shared<TfIdfIndex>(TfIdfIndex::build(load_corpus(testing::data_file("corpus30.jsonl"))));
    const RetrievedContext ctx(index, 2);
    const auto ps = ctx.paragraphs_for(SubQuestion::from_question(TokenizedQuestion("q", "Which team does Buddy Hield play for?")));
    ASSERT_EQ(ps.size(), 2u);
    EXPECT_EQ(ps[0].title, "Buddy Hield");
    EXPECT_THROW(RetrievedContext(index, 0), Error);
}

}  // namespace
}  // namespace decomprc
