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

// Span pointer over question tokens.
//
// A head maps an n x h encoding to an n x c matrix whose column j is a
// distribution over token positions for the j-th index. Decoding picks the
// non-decreasing index tuple with the highest product of column
// probabilities. Index semantics are token boundaries: an index i means
// "just before token i", so Q[a:b] is tokens a..b-1.

#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "decomprc/encoder.hpp"
#include "decomprc/types.hpp"

namespace decomprc {

using ScoreMatrix = Eigen::MatrixXd;

/// Pointer arity per reasoning type: bridging 3, intersection 2, comparison 4.
std::size_t pointer_arity(ReasoningType t);

class PointerHead {
public:
    /// `weights` is h x c with c in {2, 3, 4}; throws ShapeError otherwise.
    explicit PointerHead(Eigen::MatrixXd weights);

    std::size_t columns() const noexcept { return static_cast<std::size_t>(weights_.cols()); }
    std::size_t width() const noexcept { return static_cast<std::size_t>(weights_.rows()); }
    const Eigen::MatrixXd& weights() const noexcept { return weights_; }

    /// {"c", "h", "weights": row-major h x c}.
    std::string to_json() const;
    static PointerHead from_json(std::string_view text);
    void save(const std::filesystem::path& path) const;
    static PointerHead load(const std::filesystem::path& path);

private:
    Eigen::MatrixXd weights_;
};

/// Column-wise softmax of U W. Throws ShapeError on a width mismatch.
ScoreMatrix score(const PointerHead& head, const Embedding& emb);

/// Softmax over rows, independently per column.
ScoreMatrix column_softmax(const Eigen::MatrixXd& logits);

/// Exact argmax over i_1 <= ... <= i_c of prod_j Y(i_j, j); ties go to the
/// lexicographically smallest tuple.
std::vector<std::size_t> decode(const ScoreMatrix& y);

struct SpanAnnotation {
    std::string question_id;
    std::string question;
    ReasoningType type = ReasoningType::Bridging;
    std::vector<std::size_t> indices;
};

/// One {"question_id", "question", "type", "indices"} object per line.
std::vector<SpanAnnotation> load_annotations(const std::filesystem::path& path);
void write_annotation(std::ostream& out, const SpanAnnotation& a);

struct PointerExample {
    TokenizedQuestion question;
    std::vector<std::size_t> indices;
};

std::vector<PointerExample> pointer_examples(std::span<const SpanAnnotation> annotations);

struct PointerTrainConfig {
    double step_size = 0.1;
    std::size_t epochs = 500;
};

struct TrainedPointer {
    PointerHead head;
    double loss = 0.0;
    std::vector<double> loss_history;
};

/// Full-batch gradient descent on the mean over examples of
/// sum_j -log Y(ind_j, j), starting from zero weights. Returns the weights
/// with the lowest training loss seen. Throws ArityError for an empty set or
/// an example whose index count differs from c, and SpanError for indices
/// that are decreasing or do not address a token row.
TrainedPointer train_pointer(std::span<const PointerExample> examples, const Encoder& encoder,
                             std::size_t c, const PointerTrainConfig& config = {});

/// Training objective at `weights` over pre-encoded inputs. Fills `grad`
/// (same shape as weights) when non-null.
double pointer_loss(const Eigen::MatrixXd& weights, std::span<const Embedding> inputs,
                    std::span<const std::vector<std::size_t>> targets,
                    Eigen::MatrixXd* grad = nullptr);

/// Fraction of examples whose decoded tuple equals the gold tuple.
double exact_tuple_accuracy(const PointerHead& head, std::span<const PointerExample> examples,
                            const Encoder& encoder);

}  // namespace decomprc
