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

// Running decompositions against a reader and choosing among them.
//
// Every candidate decomposition is answered hop by hop, the hop answers are
// recombined per reasoning type, and an arbiter picks one result: a learned
// scorer over (question, type, answer, evidence), the raw hop confidence, or
// a question-only type classifier.

#pragma once

#include <array>
#include <cstddef>
#include <filesystem>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "decomprc/decompose.hpp"
#include "decomprc/encoder.hpp"
#include "decomprc/rc_backend.hpp"
#include "decomprc/retrieval.hpp"
#include "decomprc/types.hpp"

namespace decomprc {

/// Supplies the paragraphs a (sub-)question is answered against.
class ContextProvider {
public:
    virtual ~ContextProvider() = default;
    virtual std::vector<Paragraph> paragraphs_for(const SubQuestion& q) const = 0;
};

/// The same paragraph set for every hop (distractor setting).
class FixedContext final : public ContextProvider {
public:
    explicit FixedContext(std::vector<Paragraph> paragraphs) : paragraphs_(std::move(paragraphs)) {}
    std::vector<Paragraph> paragraphs_for(const SubQuestion&) const override { return paragraphs_; }

private:
    std::vector<Paragraph> paragraphs_;
};

/// Top-k TF-IDF paragraphs for each hop's rendered text, so a bridging
/// hop 2 retrieves with its answer already spliced in.
class RetrievedContext final : public ContextProvider {
public:
    RetrievedContext(std::shared_ptr<const TfIdfIndex> index, std::size_t k);
    std::vector<Paragraph> paragraphs_for(const SubQuestion& q) const override;

private:
    std::shared_ptr<const TfIdfIndex> index_;
    std::size_t k_;
};

struct DecompositionResult {
    ReasoningType reasoning_type = ReasoningType::Original;
    /// Sub-questions as asked; a bridging hop 2 appears with ANS filled in.
    std::vector<SubQuestion> asked;
    std::vector<AnswerCandidate> hop_answers;
    std::optional<Paragraph> evidence;
    std::string final_answer;
    /// Weakest-hop confidence; 0 on failure.
    double confidence = 0.0;
    double arbiter_score = 0.0;
    bool low_confidence = false;
    std::optional<DiscreteOp> op;
    std::optional<std::string> error;

    bool failed() const noexcept { return error.has_value() && final_answer.empty(); }
};

/// Hop failures become a failed result with confidence 0.
DecompositionResult run_bridging(const Decomposition& d, const ContextProvider& ctx,
                                 const RCBackend& backend);

/// Shared answer with the highest summed confidence over the two per-paragraph
/// candidate sets; with nothing shared, the single most confident candidate
/// at half its confidence, flagged low_confidence.
DecompositionResult run_intersection(const Decomposition& d, const ContextProvider& ctx,
                                     const RCBackend& backend);

/// Discrete-op errors are recorded with confidence 0; the hop answers stay.
DecompositionResult run_comparison(const Decomposition& d, const ContextProvider& ctx,
                                   const RCBackend& backend);

/// Throws NoContext when the provider returns no paragraphs.
DecompositionResult run_original(const Decomposition& d, const ContextProvider& ctx,
                                 const RCBackend& backend);

/// Dispatches on type; any Error becomes a failed result.
DecompositionResult run_decomposition(const Decomposition& d, const ContextProvider& ctx,
                                      const RCBackend& backend);

/// Intersection recombination on candidate sets alone, matching answers by
/// normalize_answer().
struct IntersectionPick {
    std::string answer;
    /// Summed confidence of the shared answer, or the fallback's own.
    double score = 0.0;
    /// Weakest of the two matched confidences; halved for a fallback.
    double confidence = 0.0;
    /// Which set (0 or 1) and candidate supplies the evidence paragraph.
    std::size_t evidence_set = 0;
    std::size_t evidence_index = 0;
    bool fallback = false;
};

/// Throws NoAnswer when both sets are empty.
IntersectionPick intersect_candidates(std::span<const AnswerCandidate> first,
                                      std::span<const AnswerCandidate> second);

inline constexpr std::size_t kDefaultEvidenceBudget = 300;

/// Scorer input: question, [TYPE-x], [ANS-SEP], answer, [EVID-SEP], then at
/// most `evidence_budget` evidence tokens.
TokenizedQuestion scorer_input(const TokenizedQuestion& q, ReasoningType type,
                               std::string_view answer, std::string_view evidence,
                               std::size_t evidence_budget = kDefaultEvidenceBudget);

/// Column-wise max over token rows.
Eigen::VectorXd max_pool(const Embedding& e);

struct ScorerModel {
    Eigen::VectorXd w;

    static ScorerModel zeros(std::size_t width);
    /// {"h", "weights"}.
    std::string to_json() const;
    static ScorerModel from_json(std::string_view text);
    void save(const std::filesystem::path& path) const;
    static ScorerModel load(const std::filesystem::path& path);
};

/// sigmoid(w . max_pool(encode(x))). Throws ShapeError on a width mismatch.
double score_decomposition(const ScorerModel& m, const Encoder& encoder, const TokenizedQuestion& q,
                           const DecompositionResult& r,
                           std::size_t evidence_budget = kDefaultEvidenceBudget);

double sigmoid(double x);

struct ScorerTrace {
    TokenizedQuestion question;
    DecompositionResult result;
    bool label = false;
};

struct ScorerTrainConfig {
    double step_size = 0.5;
    std::size_t epochs = 300;
    std::size_t evidence_budget = kDefaultEvidenceBudget;
};

struct TrainedScorer {
    ScorerModel model;
    double loss = 0.0;
    std::vector<std::string> warnings;
};

/// Mean binary cross-entropy of sigmoid(X w) against labels; fills grad.
double scorer_loss(const Eigen::VectorXd& w, const Eigen::MatrixXd& features,
                   std::span<const double> labels, Eigen::VectorXd* grad = nullptr);

/// Full-batch gradient descent from zero weights. Single-class labels add a
/// DegenerateTraining warning and still return the trained model.
TrainedScorer train_scorer(std::span<const ScorerTrace> traces, const Encoder& encoder,
                           const ScorerTrainConfig& config = {});

/// Softmax over the four reasoning types from the question alone.
struct PipelineClassifier {
    Eigen::MatrixXd w;  // h x 4

    static PipelineClassifier zeros(std::size_t width);
    std::array<double, 4> probabilities(const Encoder& encoder, const TokenizedQuestion& q) const;
    std::string to_json() const;
    static PipelineClassifier from_json(std::string_view text);
    void save(const std::filesystem::path& path) const;
    static PipelineClassifier load(const std::filesystem::path& path);
};

struct TypeExample {
    TokenizedQuestion question;
    ReasoningType gold;
};

PipelineClassifier train_pipeline_classifier(std::span<const TypeExample> examples,
                                             const Encoder& encoder,
                                             const ScorerTrainConfig& config = {});

enum class ArbitrationMode { Scorer, Confidence, Pipeline, Oracle };

std::string_view to_string(ArbitrationMode m);
ArbitrationMode arbitration_mode_from_string(std::string_view s);

struct ArbitrationInputs {
    /// Pipeline mode: classifier probabilities in ReasoningType order.
    std::optional<std::array<double, 4>> type_probabilities;
    /// Oracle mode: the gold answer.
    std::optional<std::string> gold;
};

/// Index of the chosen result among the non-failed ones. Scorer picks the
/// highest arbiter_score, Confidence the highest confidence, Pipeline the
/// most probable type that has a usable result, Oracle the highest F1
/// against gold. Ties follow Bridging, Intersection, Comparison, Original.
/// Throws NoAnswer when every result failed, Error when a mode's inputs are
/// missing.
std::size_t arbitrate(std::span<const DecompositionResult> results, ArbitrationMode mode,
                      const ArbitrationInputs& inputs = {});

struct PipelineConfig {
    ArbitrationMode mode = ArbitrationMode::Scorer;
    std::size_t evidence_budget = kDefaultEvidenceBudget;
};

struct ExampleOutcome {
    std::string id;
    std::string question;
    DecompositionSet decompositions;
    std::vector<DecompositionResult> results;
    std::optional<std::size_t> chosen;
    std::string answer;
    std::optional<std::string> error;
};

/// One JSON object describing the decompositions, hop answers and scores.
std::string trace_record(const ExampleOutcome& o);

/// Decompose, answer every candidate, score, arbitrate.
class Pipeline {
public:
    Pipeline(std::shared_ptr<const Encoder> encoder, PointerHeads heads,
             std::shared_ptr<const RCBackend> backend, PipelineConfig config,
             std::optional<ScorerModel> scorer = std::nullopt,
             std::optional<PipelineClassifier> classifier = std::nullopt);

    /// `gold` is required in Oracle mode. Never throws for per-example
    /// failures; they land in ExampleOutcome::error.
    ExampleOutcome run(const TokenizedQuestion& q, const ContextProvider& ctx,
                       const std::optional<std::string>& gold = std::nullopt) const;

    const Encoder& encoder() const { return *encoder_; }

private:
    std::shared_ptr<const Encoder> encoder_;
    PointerHeads heads_;
    std::shared_ptr<const RCBackend> backend_;
    PipelineConfig config_;
    ScorerModel scorer_;
    std::optional<PipelineClassifier> classifier_;
};

}  // namespace decomprc
