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

#include "decomprc/pointer.hpp"

#include <cmath>
#include <fstream>
#include <limits>

#include <nlohmann/json.hpp>

#include "decomprc/errors.hpp"
#include "json_util.hpp"

namespace decomprc {

using nlohmann::json;

std::size_t pointer_arity(ReasoningType t) {
    switch (t) {
        case ReasoningType::Bridging: return 3;
        case ReasoningType::Intersection: return 2;
        case ReasoningType::Comparison: return 4;
        case ReasoningType::Original: break;
    }
    throw ArityError("the original reasoning type has no pointer");
}

PointerHead::PointerHead(Eigen::MatrixXd weights) : weights_(std::move(weights)) {
    if (weights_.cols() < 2 || weights_.cols() > 4) {
        throw ShapeError("pointer head needs 2 to 4 columns, got " + std::to_string(weights_.cols()));
    }
    if (weights_.rows() == 0) throw ShapeError("pointer head has zero width");
    if (!weights_.allFinite()) throw ShapeError("pointer head has non-finite weights");
}

std::string PointerHead::to_json() const {
    std::vector<double> flat;
    flat.reserve(static_cast<std::size_t>(weights_.size()));
    for (Eigen::Index r = 0; r < weights_.rows(); ++r) {
        for (Eigen::Index c = 0; c < weights_.cols(); ++c) flat.push_back(weights_(r, c));
    }
    return json{{"c", columns()}, {"h", width()}, {"weights", flat}}.dump();
}

PointerHead PointerHead::from_json(std::string_view text) {
    std::size_t c = 0;
    std::size_t h = 0;
    std::vector<double> flat;
    try {
        const json doc = json::parse(text);
        c = doc.at("c").get<std::size_t>();
        h = doc.at("h").get<std::size_t>();
        flat = doc.at("weights").get<std::vector<double>>();
    } catch (const json::exception& e) {
        throw ParseError(std::string("malformed head checkpoint: ") + e.what());
    }
    if (flat.size() != c * h) throw ShapeError("head checkpoint weight count does not match c*h");
    Eigen::MatrixXd w(static_cast<Eigen::Index>(h), static_cast<Eigen::Index>(c));
    for (std::size_t r = 0; r < h; ++r) {
        for (std::size_t col = 0; col < c; ++col) {
            w(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(col)) = flat[r * c + col];
        }
    }
    return PointerHead(std::move(w));
}

void PointerHead::save(const std::filesystem::path& path) const {
    std::ofstream out(path);
    if (!out) throw Error("cannot write " + path.string());
    out << to_json() << '\n';
}

PointerHead PointerHead::load(const std::filesystem::path& path) {
    return from_json(detail::read_file(path));
}

ScoreMatrix column_softmax(const Eigen::MatrixXd& logits) {
    ScoreMatrix y(logits.rows(), logits.cols());
    for (Eigen::Index j = 0; j < logits.cols(); ++j) {
        const double m = logits.col(j).maxCoeff();
        y.col(j) = (logits.col(j).array() - m).exp();
        y.col(j) /= y.col(j).sum();
    }
    return y;
}

ScoreMatrix score(const PointerHead& head, const Embedding& emb) {
    if (static_cast<std::size_t>(emb.cols()) != head.width()) {
        throw ShapeError("embedding width " + std::to_string(emb.cols()) +
                         " does not match head width " + std::to_string(head.width()));
    }
    if (emb.rows() == 0) throw ShapeError("cannot score an empty embedding");
    return column_softmax(emb * head.weights());
}

std::vector<std::size_t> decode(const ScoreMatrix& y) {
    const auto n = static_cast<std::size_t>(y.rows());
    const auto c = static_cast<std::size_t>(y.cols());
    if (n == 0 || c == 0) return {};

    // best[j][i]: max product over columns j..c-1 with ind_j = i.
    // suffix[j][i]: max over i' >= i of best[j][i'].
    std::vector<std::vector<double>> best(c, std::vector<double>(n));
    std::vector<std::vector<double>> suffix(c, std::vector<double>(n));
    for (std::size_t jj = c; jj-- > 0;) {
        for (std::size_t i = 0; i < n; ++i) {
            const double p = y(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(jj));
            best[jj][i] = jj + 1 == c ? p : p * suffix[jj + 1][i];
        }
        suffix[jj][n - 1] = best[jj][n - 1];
        for (std::size_t i = n - 1; i-- > 0;) suffix[jj][i] = std::max(best[jj][i], suffix[jj][i + 1]);
    }

    std::vector<std::size_t> out(c);
    std::size_t lo = 0;
    for (std::size_t j = 0; j < c; ++j) {
        const double target = suffix[j][lo];
        std::size_t pick = lo;
        while (best[j][pick] != target) ++pick;
        out[j] = pick;
        lo = pick;
    }
    return out;
}

std::vector<SpanAnnotation> load_annotations(const std::filesystem::path& path) {
    std::vector<SpanAnnotation> out;
    detail::for_each_json_line(path, [&](const json& rec, std::size_t line) {
        const std::string where = path.string() + ":" + std::to_string(line);
        SpanAnnotation a;
        std::string type;
        try {
            a.question_id = rec.at("question_id").get<std::string>();
            a.question = rec.at("question").get<std::string>();
            type = rec.at("type").get<std::string>();
            a.indices = rec.at("indices").get<std::vector<std::size_t>>();
        } catch (const json::exception&) {
            throw ParseError(where + ": malformed annotation");
        }
        a.type = reasoning_type_from_string(type);
        if (a.type == ReasoningType::Original) throw ParseError(where + ": annotations cannot be 'original'");
        out.push_back(std::move(a));
    });
    return out;
}

void write_annotation(std::ostream& out, const SpanAnnotation& a) {
    out << json{{"question_id", a.question_id},
                {"question", a.question},
                {"type", to_string(a.type)},
                {"indices", a.indices}}
               .dump()
        << '\n';
}

std::vector<PointerExample> pointer_examples(std::span<const SpanAnnotation> annotations) {
    std::vector<PointerExample> out;
    out.reserve(annotations.size());
    for (const auto& a : annotations) out.push_back({tokenize(a.question_id, a.question), a.indices});
    return out;
}

double pointer_loss(const Eigen::MatrixXd& weights, std::span<const Embedding> inputs,
                    std::span<const std::vector<std::size_t>> targets, Eigen::MatrixXd* grad) {
    if (grad != nullptr) *grad = Eigen::MatrixXd::Zero(weights.rows(), weights.cols());
    if (inputs.empty()) return 0.0;
    double loss = 0.0;
    for (std::size_t e = 0; e < inputs.size(); ++e) {
        const ScoreMatrix y = column_softmax(inputs[e] * weights);
        Eigen::MatrixXd residual = y;
        for (std::size_t j = 0; j < targets[e].size(); ++j) {
            const auto row = static_cast<Eigen::Index>(targets[e][j]);
            const auto col = static_cast<Eigen::Index>(j);
            loss -= std::log(std::max(y(row, col), std::numeric_limits<double>::min()));
            residual(row, col) -= 1.0;
        }
        if (grad != nullptr) *grad += inputs[e].transpose() * residual;
    }
    const double scale = 1.0 / static_cast<double>(inputs.size());
    if (grad != nullptr) *grad *= scale;
    return loss * scale;
}

TrainedPointer train_pointer(std::span<const PointerExample> examples, const Encoder& encoder,
                             std::size_t c, const PointerTrainConfig& config) {
    if (examples.empty()) throw ArityError("pointer training needs at least one example");
    if (c < 2 || c > 4) throw ArityError("pointer arity must be 2, 3 or 4");

    std::vector<Embedding> inputs;
    std::vector<std::vector<std::size_t>> targets;
    inputs.reserve(examples.size());
    targets.reserve(examples.size());
    for (const auto& ex : examples) {
        if (ex.indices.size() != c) {
            throw ArityError("annotation for '" + ex.question.id() + "' has " +
                             std::to_string(ex.indices.size()) + " indices, expected " +
                             std::to_string(c));
        }
        for (std::size_t j = 0; j < c; ++j) {
            if (ex.indices[j] >= ex.question.size() || (j > 0 && ex.indices[j] < ex.indices[j - 1])) {
                throw SpanError("annotation for '" + ex.question.id() +
                                "' has indices that are decreasing or past the last token");
            }
        }
        inputs.push_back(encoder.encode(ex.question));
        targets.push_back(ex.indices);
    }

    const auto h = static_cast<Eigen::Index>(encoder.width());
    Eigen::MatrixXd w = Eigen::MatrixXd::Zero(h, static_cast<Eigen::Index>(c));
    Eigen::MatrixXd best_w = w;
    double best_loss = std::numeric_limits<double>::infinity();
    std::vector<double> history;
    history.reserve(config.epochs + 1);
    Eigen::MatrixXd grad;

    for (std::size_t epoch = 0; epoch <= config.epochs; ++epoch) {
        const double loss = pointer_loss(w, inputs, targets, &grad);
        history.push_back(loss);
        if (loss < best_loss) {
            best_loss = loss;
            best_w = w;
        }
        if (epoch < config.epochs) w -= config.step_size * grad;
    }
    return {PointerHead(std::move(best_w)), best_loss, std::move(history)};
}

double exact_tuple_accuracy(const PointerHead& head, std::span<const PointerExample> examples,
                            const Encoder& encoder) {
    if (examples.empty()) return 0.0;
    std::size_t hits = 0;
    for (const auto& ex : examples) {
        if (decode(score(head, encoder.encode(ex.question))) == ex.indices) ++hits;
    }
    return static_cast<double>(hits) / static_cast<double>(examples.size());
}

}  // namespace decomprc
