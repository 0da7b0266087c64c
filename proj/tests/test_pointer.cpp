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

#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>

#include <gtest/gtest.h>

#include "decomprc/encoder.hpp"
#include "decomprc/errors.hpp"
#include "decomprc/pointer.hpp"
#include "synthetic.hpp"

namespace decomprc {
namespace {

TEST(Decode, MatchesBruteForceOnRandomMatrices) {
    std::mt19937_64 rng(7);
    for (int trial = 0; trial < 300; ++trial) {
        const std::size_t n = 1 + rng() % 10;
        const std::size_t c = 2 + rng() % 3;
        const auto y = testing::random_column_stochastic(rng, n, c);
        EXPECT_EQ(decode(y), testing::brute_force_decode(y)) << "trial " << trial;
    }
}

TEST(Decode, OutputIsNonDecreasing) {
    std::mt19937_64 rng(11);
    for (int trial = 0; trial < 200; ++trial) {
        const auto y = testing::random_column_stochastic(rng, 12, 4);
        const auto ind = decode(y);
        ASSERT_EQ(ind.size(), 4u);
        EXPECT_TRUE(std::is_sorted(ind.begin(), ind.end()));
        EXPECT_LT(ind.back(), 12u);
    }
}

TEST(Decode, PrefersLaterColumnWhenOrderMatters) {
    // Column 0 peaks at 3 and column 1 at 1; the ordered optimum cannot use both.
    Eigen::MatrixXd y(4, 2);
    y << 0.1, 0.1,
         0.1, 0.6,
         0.1, 0.1,
         0.7, 0.2;
    const auto ind = decode(y);
    EXPECT_EQ(ind, testing::brute_force_decode(y));
    EXPECT_EQ(ind, (std::vector<std::size_t>{3, 3}));
}

TEST(Decode, TiesGoToLexicographicallySmallest) {
    Eigen::MatrixXd y = Eigen::MatrixXd::Constant(5, 3, 0.2);
    EXPECT_EQ(decode(y), (std::vector<std::size_t>{0, 0, 0}));
}

TEST(ColumnSoftmax, ColumnsSumToOne) {
    Eigen::MatrixXd logits = Eigen::MatrixXd::Random(6, 3) * 50.0;
    const auto y = column_softmax(logits);
    for (Eigen::Index j = 0; j < y.cols(); ++j) EXPECT_NEAR(y.col(j).sum(), 1.0, 1e-12);
    EXPECT_TRUE((y.array() >= 0.0).all());
}

TEST(PointerHead, RejectsBadArity) {
    EXPECT_THROW(PointerHead(Eigen::MatrixXd::Zero(8, 1)), ShapeError);
    EXPECT_THROW(PointerHead(Eigen::MatrixXd::Zero(8, 5)), ShapeError);
    EXPECT_NO_THROW(PointerHead(Eigen::MatrixXd::Zero(8, 4)));
}

TEST(PointerHead, JsonRoundTripIsExact) {
    Eigen::MatrixXd w = Eigen::MatrixXd::Random(9, 3);
    const PointerHead h(w);
    const PointerHead back = PointerHead::from_json(h.to_json());
    EXPECT_EQ(back.weights(), w);
    EXPECT_THROW(PointerHead::from_json("{\"c\":3}"), ParseError);
}

TEST(PointerHead, ScoreChecksWidth) {
    const PointerHead h(Eigen::MatrixXd::Zero(5, 2));
    EXPECT_THROW(score(h, Embedding::Zero(3, 6)), ShapeError);
    const auto y = score(h, Embedding::Zero(3, 5));
    EXPECT_NEAR(y(0, 0), 1.0 / 3.0, 1e-12);
}

TEST(PointerArity, PerType) {
    EXPECT_EQ(pointer_arity(ReasoningType::Bridging), 3u);
    EXPECT_EQ(pointer_arity(ReasoningType::Intersection), 2u);
    EXPECT_EQ(pointer_arity(ReasoningType::Comparison), 4u);
}

TEST(PointerLoss, GradientMatchesFiniteDifferences) {
    std::mt19937_64 rng(3);
    for (int trial = 0; trial < 10; ++trial) {
        const std::size_t c = 2 + trial % 3;
        const auto corpus = testing::synthetic_pointer_corpus(100 + trial, 4, c, 6);
        std::vector<Embedding> inputs;
        std::vector<std::vector<std::size_t>> targets;
        for (const auto& ex : corpus.examples) {
            inputs.push_back(corpus.encoder->encode(ex.question));
            targets.push_back(ex.indices);
        }
        Eigen::MatrixXd w = Eigen::MatrixXd::Random(6, static_cast<Eigen::Index>(c));
        Eigen::MatrixXd grad;
        pointer_loss(w, inputs, targets, &grad);
        const double err = testing::gradient_check(
            w, grad, [&](const Eigen::MatrixXd& x) { return pointer_loss(x, inputs, targets); });
        EXPECT_LT(err, 1e-4) << "trial " << trial;
    }
}

TEST(TrainPointer, LearnsSeparableCorpus) {
    const auto corpus = testing::synthetic_pointer_corpus(42, 120, 3);
    const std::span<const PointerExample> all(corpus.examples);
    const auto trained = train_pointer(all.subspan(0, 80), *corpus.encoder, 3);
    EXPECT_LT(trained.loss, trained.loss_history.front());
    EXPECT_GE(exact_tuple_accuracy(trained.head, all.subspan(80), *corpus.encoder), 0.95);
}

TEST(TrainPointer, IsDeterministic) {
    const auto corpus = testing::synthetic_pointer_corpus(5, 20, 2);
    PointerTrainConfig cfg;
    cfg.epochs = 30;
    const auto a = train_pointer(corpus.examples, *corpus.encoder, 2, cfg);
    const auto b = train_pointer(corpus.examples, *corpus.encoder, 2, cfg);
    EXPECT_EQ(a.head.to_json(), b.head.to_json());
}

TEST(TrainPointer, RejectsArityMismatchAndBadIndices) {
    const auto corpus = testing::synthetic_pointer_corpus(5, 4, 3);
    EXPECT_THROW(train_pointer(corpus.examples, *corpus.encoder, 2), ArityError);
    auto bad = corpus.examples;
    bad[0].indices = {2, 1, 3};
    EXPECT_THROW(train_pointer(bad, *corpus.encoder, 3), SpanError);
    bad[0].indices = {0, 1, bad[0].question.size()};
    EXPECT_THROW(train_pointer(bad, *corpus.encoder, 3), SpanError);
}

TEST(Annotations, WriteThenLoad) {
    const auto path = std::filesystem::temp_directory_path() / "decomprc_annotations_test.jsonl";
    {
        std::ofstream out(path);
        write_annotation(out, {"a1", "Which team does the player play for?", ReasoningType::Bridging, {3, 4, 5}});
        write_annotation(out, {"a2", "Stories USA starred which actor from Ohio?", ReasoningType::Intersection, {3, 5}});
    }
    const auto anns = load_annotations(path);
    ASSERT_EQ(anns.size(), 2u);
    EXPECT_EQ(anns[1].type, ReasoningType::Intersection);
    EXPECT_EQ(anns[0].indices, (std::vector<std::size_t>{3, 4, 5}));
    const auto examples = pointer_examples(anns);
    EXPECT_EQ(examples[0].question.id(), "a1");
    std::filesystem::remove(path);
}

TEST(FeatureEncoder, FlagsAndBuckets) {
    const FeatureEncoder enc(16);
    EXPECT_EQ(enc.width(), 24u);
    const TokenizedQuestion q("q", "Which team does the player play for?");
    const Embedding e = enc.encode(q);
    ASSERT_EQ(e.rows(), static_cast<Eigen::Index>(q.size()));
    EXPECT_EQ(e(0, static_cast<Eigen::Index>(enc.flag_column(FeatureEncoder::kWhWord))), 1.0);
    EXPECT_EQ(e(3, static_cast<Eigen::Index>(enc.flag_column(FeatureEncoder::kArticle))), 1.0);
    EXPECT_EQ(e(4, static_cast<Eigen::Index>(enc.flag_column(FeatureEncoder::kAfterArticleOrWh))), 1.0);
    EXPECT_EQ(e(1, static_cast<Eigen::Index>(enc.bucket_of("team"))), 1.0);
}

TEST(StoredEmbeddings, UnknownIdAndShape) {
    std::unordered_map<std::string, Embedding> rows;
    rows.emplace("q", Embedding::Zero(2, 4));
    const StoredEmbeddings enc(4, rows);
    EXPECT_THROW(enc.encode(TokenizedQuestion("other", "a b")), MissingEmbedding);
    EXPECT_THROW(enc.encode(TokenizedQuestion("q", "a b c")), ShapeError);
    EXPECT_EQ(enc.encode(TokenizedQuestion("q", "a b")).rows(), 2);
}

}  // namespace
}  // namespace decomprc
