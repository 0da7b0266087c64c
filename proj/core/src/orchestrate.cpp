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

#include "decomprc/orchestrate.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <map>

#include <nlohmann/json.hpp>

#include "decomprc/discrete_ops.hpp"
#include "decomprc/errors.hpp"
#include "decomprc/eval.hpp"
#include "json_util.hpp"

namespace decomprc {

using nlohmann::json;

namespace {

struct Hop {
    AnswerCandidate answer;
    std::vector<Paragraph> paragraphs;
};

Hop ask(const RCBackend& backend, const ContextProvider& ctx, const SubQuestion& q) {
    Hop h;
    h.paragraphs = ctx.paragraphs_for(q);
    h.answer = answer(backend, q, h.paragraphs);
    return h;
}

DecompositionResult start(const Decomposition& d) {
    DecompositionResult r;
    r.reasoning_type = d.type();
    r.op = d.op();
    return r;
}

void fail(DecompositionResult& r, const std::exception& e) {
    r.error = e.what();
    r.final_answer.clear();
    r.confidence = 0.0;
}

std::string_view type_marker(ReasoningType t) {
    switch (t) {
        case ReasoningType::Bridging: return "[TYPE-B]";
        case ReasoningType::Intersection: return "[TYPE-I]";
        case ReasoningType::Comparison: return "[TYPE-C]";
        case ReasoningType::Original: return "[TYPE-O]";
    }
    return "[TYPE-O]";
}

Eigen::VectorXd flat_to_vector(const std::vector<double>& flat) {
    Eigen::VectorXd v(static_cast<Eigen::Index>(flat.size()));
    for (std::size_t i = 0; i < flat.size(); ++i) v(static_cast<Eigen::Index>(i)) = flat[i];
    return v;
}

Eigen::VectorXd features_for(const Encoder& encoder, const TokenizedQuestion& q,
                             const DecompositionResult& r, std::size_t budget) {
    const std::string evidence = r.evidence ? r.evidence->text() : std::string();
    return max_pool(encoder.encode(scorer_input(q, r.reasoning_type, r.final_answer, evidence, budget)));
}

json candidate_json(const AnswerCandidate& c) {
    json j{{"kind", std::string(to_string(c.kind))},
           {"text", c.text},
           {"confidence", c.confidence},
           {"paragraph_index", c.paragraph_index}};
    if (c.kind == AnswerKind::Span) {
        j["start"] = c.start;
        j["end"] = c.end;
    }
    return j;
}

}  // namespace

RetrievedContext::RetrievedContext(std::shared_ptr<const TfIdfIndex> index, std::size_t k)
    : index_(std::move(index)), k_(k) {
    if (k_ == 0) throw Error("retrieval k must be at least 1");
}

std::vector<Paragraph> RetrievedContext::paragraphs_for(const SubQuestion& q) const {
    std::vector<Paragraph> out;
    for (const auto& hit : index_->query(q.render(), k_)) out.push_back(index_->documents()[hit.document]);
    return out;
}

DecompositionResult run_bridging(const Decomposition& d, const ContextProvider& ctx,
                                 const RCBackend& backend) {
    if (d.type() != ReasoningType::Bridging) throw Error("run_bridging needs a bridging decomposition");
    DecompositionResult r = start(d);
    try {
        const Hop h1 = ask(backend, ctx, d.sub_questions()[0]);
        r.asked.push_back(d.sub_questions()[0]);
        r.hop_answers.push_back(h1.answer);
        const SubQuestion q2 = d.sub_questions()[1].substitute(h1.answer.text);
        r.asked.push_back(q2);
        const Hop h2 = ask(backend, ctx, q2);
        r.hop_answers.push_back(h2.answer);
        r.final_answer = h2.answer.text;
        r.evidence = h2.paragraphs[h2.answer.paragraph_index];
        r.confidence = std::min(h1.answer.confidence, h2.answer.confidence);
    } catch (const Error& e) {
        fail(r, e);
    }
    return r;
}

IntersectionPick intersect_candidates(std::span<const AnswerCandidate> first,
                                      std::span<const AnswerCandidate> second) {
    if (first.empty() && second.empty()) throw NoAnswer("no candidates to intersect");
    // Best candidate per normalized answer in the second set.
    std::map<std::string, std::size_t> best_second;
    for (std::size_t j = 0; j < second.size(); ++j) {
        const std::string key = normalize_answer(second[j].text);
        auto it = best_second.find(key);
        if (it == best_second.end() || second[j].confidence > second[it->second].confidence) {
            best_second[key] = j;
        }
    }
    std::optional<IntersectionPick> best;
    for (std::size_t i = 0; i < first.size(); ++i) {
        const auto it = best_second.find(normalize_answer(first[i].text));
        if (it == best_second.end()) continue;
        const AnswerCandidate& b = second[it->second];
        const double sum = first[i].confidence + b.confidence;
        if (best && sum <= best->score) continue;
        IntersectionPick p;
        p.answer = first[i].text;
        p.score = sum;
        p.confidence = std::min(first[i].confidence, b.confidence);
        if (b.confidence > first[i].confidence) {
            p.evidence_set = 1;
            p.evidence_index = it->second;
        } else {
            p.evidence_set = 0;
            p.evidence_index = i;
        }
        best = p;
    }
    if (best) return *best;

    IntersectionPick p;
    p.fallback = true;
    p.score = -1.0;
    for (std::size_t set = 0; set < 2; ++set) {
        const auto cands = set == 0 ? first : second;
        for (std::size_t i = 0; i < cands.size(); ++i) {
            if (cands[i].confidence > p.score) {
                p.score = cands[i].confidence;
                p.answer = cands[i].text;
                p.evidence_set = set;
                p.evidence_index = i;
            }
        }
    }
    p.confidence = p.score * 0.5;
    return p;
}

DecompositionResult run_intersection(const Decomposition& d, const ContextProvider& ctx,
                                     const RCBackend& backend) {
    if (d.type() != ReasoningType::Intersection) {
        throw Error("run_intersection needs an intersection decomposition");
    }
    DecompositionResult r = start(d);
    try {
        std::array<std::vector<AnswerCandidate>, 2> sets;
        std::array<std::vector<Paragraph>, 2> contexts;
        for (std::size_t h = 0; h < 2; ++h) {
            const SubQuestion& q = d.sub_questions()[h];
            r.asked.push_back(q);
            if (q.has_placeholder()) throw Error("intersection sub-question has an ANS slot");
            contexts[h] = ctx.paragraphs_for(q);
            if (contexts[h].empty()) throw NoContext("no paragraphs for '" + q.render() + "'");
            const auto scores = backend.score(q, contexts[h]);
            sets[h] = per_paragraph_answers(scores, contexts[h]);
            r.hop_answers.push_back(select_answer(scores, contexts[h]));
        }
        const IntersectionPick pick = intersect_candidates(sets[0], sets[1]);
        r.final_answer = pick.answer;
        r.confidence = pick.confidence;
        r.low_confidence = pick.fallback;
        const AnswerCandidate& ev = sets[pick.evidence_set][pick.evidence_index];
        r.evidence = contexts[pick.evidence_set][ev.paragraph_index];
    } catch (const Error& e) {
        fail(r, e);
    }
    return r;
}

DecompositionResult run_comparison(const Decomposition& d, const ContextProvider& ctx,
                                   const RCBackend& backend) {
    if (d.type() != ReasoningType::Comparison || !d.op() || !d.entities()) {
        throw Error("run_comparison needs a comparison decomposition with op and entities");
    }
    DecompositionResult r = start(d);
    std::array<Hop, 2> hops;
    try {
        for (std::size_t h = 0; h < 2; ++h) {
            r.asked.push_back(d.sub_questions()[h]);
            hops[h] = ask(backend, ctx, d.sub_questions()[h]);
            r.hop_answers.push_back(hops[h].answer);
        }
    } catch (const Error& e) {
        fail(r, e);
        return r;
    }
    try {
        const DiscreteOp op = *d.op();
        const ValueKind kind = value_kind(op);
        const auto v1 = parse_value(hops[0].answer.text, kind);
        const auto v2 = parse_value(hops[1].answer.text, kind);
        const auto& ents = *d.entities();
        r.final_answer = apply(op, ents.first_text, v1, ents.second_text, v2);
        if (r.final_answer.empty()) throw AmbiguousComparison("the two answers share no text");
        r.confidence = std::min(hops[0].answer.confidence, hops[1].answer.confidence);
        const std::size_t ev = hops[1].answer.confidence > hops[0].answer.confidence ? 1 : 0;
        r.evidence = hops[ev].paragraphs[hops[ev].answer.paragraph_index];
    } catch (const Error& e) {
        fail(r, e);
    }
    return r;
}

DecompositionResult run_original(const Decomposition& d, const ContextProvider& ctx,
                                 const RCBackend& backend) {
    if (d.type() != ReasoningType::Original) throw Error("run_original needs the original question");
    DecompositionResult r = start(d);
    const SubQuestion& q = d.sub_questions()[0];
    r.asked.push_back(q);
    const Hop h = ask(backend, ctx, q);
    r.hop_answers.push_back(h.answer);
    r.final_answer = h.answer.text;
    r.confidence = h.answer.confidence;
    r.evidence = h.paragraphs[h.answer.paragraph_index];
    return r;
}

DecompositionResult run_decomposition(const Decomposition& d, const ContextProvider& ctx,
                                      const RCBackend& backend) {
    switch (d.type()) {
        case ReasoningType::Bridging: return run_bridging(d, ctx, backend);
        case ReasoningType::Intersection: return run_intersection(d, ctx, backend);
        case ReasoningType::Comparison: return run_comparison(d, ctx, backend);
        case ReasoningType::Original:
            try {
                return run_original(d, ctx, backend);
            } catch (const Error& e) {
                DecompositionResult r = start(d);
                r.asked = d.sub_questions();
                fail(r, e);
                return r;
            }
    }
    throw Error("unknown reasoning type");
}

TokenizedQuestion scorer_input(const TokenizedQuestion& q, ReasoningType type,
                               std::string_view answer, std::string_view evidence,
                               std::size_t evidence_budget) {
    std::vector<Token> toks(q.tokens().begin(), q.tokens().end());
    toks.push_back(Token::sentinel(std::string(type_marker(type))));
    toks.push_back(Token::sentinel("[ANS-SEP]"));
    for (auto& t : tokenize_text(answer)) toks.push_back(std::move(t));
    toks.push_back(Token::sentinel("[EVID-SEP]"));
    auto ev = tokenize_text(evidence);
    if (ev.size() > evidence_budget) ev.resize(evidence_budget);
    for (auto& t : ev) toks.push_back(std::move(t));
    return TokenizedQuestion::from_tokens(q.id(), toks);
}

Eigen::VectorXd max_pool(const Embedding& e) {
    if (e.rows() == 0) throw ShapeError("cannot pool an empty encoding");
    return e.colwise().maxCoeff().transpose();
}

double sigmoid(double x) {
    if (x >= 0) return 1.0 / (1.0 + std::exp(-x));
    const double ex = std::exp(x);
    return ex / (1.0 + ex);
}

ScorerModel ScorerModel::zeros(std::size_t width) {
    return {Eigen::VectorXd::Zero(static_cast<Eigen::Index>(width))};
}

std::string ScorerModel::to_json() const {
    return json{{"h", w.size()}, {"weights", std::vector<double>(w.data(), w.data() + w.size())}}.dump();
}

ScorerModel ScorerModel::from_json(std::string_view text) {
    std::vector<double> flat;
    std::size_t h = 0;
    try {
        const json doc = json::parse(text);
        h = doc.at("h").get<std::size_t>();
        flat = doc.at("weights").get<std::vector<double>>();
    } catch (const json::exception& e) {
        throw ParseError(std::string("malformed scorer checkpoint: ") + e.what());
    }
    if (flat.size() != h) throw ShapeError("scorer checkpoint weight count does not match h");
    ScorerModel m{flat_to_vector(flat)};
    if (!m.w.allFinite()) throw ShapeError("scorer checkpoint has non-finite weights");
    return m;
}

void ScorerModel::save(const std::filesystem::path& path) const {
    std::ofstream out(path);
    if (!out) throw Error("cannot write " + path.string());
    out << to_json() << '\n';
}

ScorerModel ScorerModel::load(const std::filesystem::path& path) {
    return from_json(detail::read_file(path));
}

double score_decomposition(const ScorerModel& m, const Encoder& encoder, const TokenizedQuestion& q,
                           const DecompositionResult& r, std::size_t evidence_budget) {
    if (static_cast<std::size_t>(m.w.size()) != encoder.width()) {
        throw ShapeError("scorer width " + std::to_string(m.w.size()) + " does not match encoder width " +
                         std::to_string(encoder.width()));
    }
    return sigmoid(m.w.dot(features_for(encoder, q, r, evidence_budget)));
}

double scorer_loss(const Eigen::VectorXd& w, const Eigen::MatrixXd& features,
                   std::span<const double> labels, Eigen::VectorXd* grad) {
    const auto m = features.rows();
    if (grad != nullptr) *grad = Eigen::VectorXd::Zero(w.size());
    if (m == 0) return 0.0;
    const Eigen::VectorXd z = features * w;
    Eigen::VectorXd residual(m);
    double loss = 0.0;
    for (Eigen::Index i = 0; i < m; ++i) {
        const double y = labels[static_cast<std::size_t>(i)];
        // log(1 + e^z) - y z, written to stay finite for large |z|.
        const double zi = z(i);
        const double softplus = zi > 0 ? zi + std::log1p(std::exp(-zi)) : std::log1p(std::exp(zi));
        loss += softplus - y * zi;
        residual(i) = sigmoid(zi) - y;
    }
    const double scale = 1.0 / static_cast<double>(m);
    if (grad != nullptr) *grad = features.transpose() * residual * scale;
    return loss * scale;
}

TrainedScorer train_scorer(std::span<const ScorerTrace> traces, const Encoder& encoder,
                           const ScorerTrainConfig& config) {
    TrainedScorer out;
    out.model = ScorerModel::zeros(encoder.width());
    if (traces.empty()) {
        out.warnings.push_back("DegenerateTraining: no traces; returning zero weights");
        return out;
    }
    Eigen::MatrixXd x(static_cast<Eigen::Index>(traces.size()), static_cast<Eigen::Index>(encoder.width()));
    std::vector<double> labels;
    labels.reserve(traces.size());
    std::size_t positives = 0;
    for (std::size_t i = 0; i < traces.size(); ++i) {
        x.row(static_cast<Eigen::Index>(i)) =
            features_for(encoder, traces[i].question, traces[i].result, config.evidence_budget).transpose();
        labels.push_back(traces[i].label ? 1.0 : 0.0);
        if (traces[i].label) ++positives;
    }
    if (positives == 0 || positives == traces.size()) {
        out.warnings.push_back(std::string("DegenerateTraining: every label is ") +
                               (positives == 0 ? "false" : "true"));
    }
    Eigen::VectorXd w = out.model.w;
    Eigen::VectorXd best = w;
    double best_loss = std::numeric_limits<double>::infinity();
    Eigen::VectorXd grad;
    for (std::size_t epoch = 0; epoch <= config.epochs; ++epoch) {
        const double loss = scorer_loss(w, x, labels, &grad);
        if (loss < best_loss) {
            best_loss = loss;
            best = w;
        }
        if (epoch < config.epochs) w -= config.step_size * grad;
    }
    out.model.w = best;
    out.loss = best_loss;
    return out;
}

PipelineClassifier PipelineClassifier::zeros(std::size_t width) {
    return {Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(width), 4)};
}

std::array<double, 4> PipelineClassifier::probabilities(const Encoder& encoder,
                                                        const TokenizedQuestion& q) const {
    if (static_cast<std::size_t>(w.rows()) != encoder.width()) {
        throw ShapeError("pipeline classifier width does not match encoder width");
    }
    const Eigen::VectorXd logits = w.transpose() * max_pool(encoder.encode(q));
    const double m = logits.maxCoeff();
    std::array<double, 4> p{};
    double z = 0.0;
    for (std::size_t t = 0; t < 4; ++t) {
        p[t] = std::exp(logits(static_cast<Eigen::Index>(t)) - m);
        z += p[t];
    }
    for (auto& v : p) v /= z;
    return p;
}

std::string PipelineClassifier::to_json() const {
    std::vector<double> flat;
    for (Eigen::Index r = 0; r < w.rows(); ++r) {
        for (Eigen::Index c = 0; c < w.cols(); ++c) flat.push_back(w(r, c));
    }
    return json{{"c", 4}, {"h", w.rows()}, {"weights", flat}}.dump();
}

PipelineClassifier PipelineClassifier::from_json(std::string_view text) {
    std::vector<double> flat;
    std::size_t h = 0;
    try {
        const json doc = json::parse(text);
        h = doc.at("h").get<std::size_t>();
        if (doc.at("c").get<std::size_t>() != 4) throw ShapeError("pipeline classifier must have 4 columns");
        flat = doc.at("weights").get<std::vector<double>>();
    } catch (const json::exception& e) {
        throw ParseError(std::string("malformed classifier checkpoint: ") + e.what());
    }
    if (flat.size() != h * 4) throw ShapeError("classifier checkpoint weight count does not match h*4");
    PipelineClassifier c = zeros(h);
    for (std::size_t r = 0; r < h; ++r) {
        for (std::size_t k = 0; k < 4; ++k) c.w(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(k)) = flat[r * 4 + k];
    }
    return c;
}

void PipelineClassifier::save(const std::filesystem::path& path) const {
    std::ofstream out(path);
    if (!out) throw Error("cannot write " + path.string());
    out << to_json() << '\n';
}

PipelineClassifier PipelineClassifier::load(const std::filesystem::path& path) {
    return from_json(detail::read_file(path));
}

PipelineClassifier train_pipeline_classifier(std::span<const TypeExample> examples,
                                             const Encoder& encoder, const ScorerTrainConfig& config) {
    PipelineClassifier c = PipelineClassifier::zeros(encoder.width());
    if (examples.empty()) return c;
    const auto m = static_cast<Eigen::Index>(examples.size());
    Eigen::MatrixXd x(m, static_cast<Eigen::Index>(encoder.width()));
    Eigen::MatrixXd y = Eigen::MatrixXd::Zero(m, 4);
    for (Eigen::Index i = 0; i < m; ++i) {
        const auto& ex = examples[static_cast<std::size_t>(i)];
        x.row(i) = max_pool(encoder.encode(ex.question)).transpose();
        y(i, static_cast<Eigen::Index>(ex.gold)) = 1.0;
    }
    for (std::size_t epoch = 0; epoch < config.epochs; ++epoch) {
        Eigen::MatrixXd logits = x * c.w;
        for (Eigen::Index i = 0; i < m; ++i) {
            const double mx = logits.row(i).maxCoeff();
            logits.row(i) = (logits.row(i).array() - mx).exp();
            logits.row(i) /= logits.row(i).sum();
        }
        c.w -= config.step_size * (x.transpose() * (logits - y)) / static_cast<double>(m);
    }
    return c;
}

std::string_view to_string(ArbitrationMode m) {
    switch (m) {
        case ArbitrationMode::Scorer: return "scorer";
        case ArbitrationMode::Confidence: return "confidence";
        case ArbitrationMode::Pipeline: return "pipeline";
        case ArbitrationMode::Oracle: return "oracle";
    }
    return "scorer";
}

ArbitrationMode arbitration_mode_from_string(std::string_view s) {
    if (s == "scorer") return ArbitrationMode::Scorer;
    if (s == "confidence") return ArbitrationMode::Confidence;
    if (s == "pipeline") return ArbitrationMode::Pipeline;
    if (s == "oracle") return ArbitrationMode::Oracle;
    throw ParseError("unknown arbitration mode '" + std::string(s) + "'");
}

std::size_t arbitrate(std::span<const DecompositionResult> results, ArbitrationMode mode,
                      const ArbitrationInputs& inputs) {
    if (mode == ArbitrationMode::Pipeline && !inputs.type_probabilities) {
        throw Error("pipeline arbitration needs type probabilities");
    }
    if (mode == ArbitrationMode::Oracle && !inputs.gold) throw Error("oracle arbitration needs a gold answer");

    auto key = [&](const DecompositionResult& r) {
        switch (mode) {
            case ArbitrationMode::Scorer: return r.arbiter_score;
            case ArbitrationMode::Confidence: return r.confidence;
            case ArbitrationMode::Pipeline:
                return (*inputs.type_probabilities)[static_cast<std::size_t>(r.reasoning_type)];
            case ArbitrationMode::Oracle: return token_f1(r.final_answer, *inputs.gold);
        }
        return 0.0;
    };
    std::optional<std::size_t> best;
    double best_key = 0.0;
    for (std::size_t i = 0; i < results.size(); ++i) {
        if (results[i].failed()) continue;
        const double k = key(results[i]);
        if (!best || k > best_key ||
            (k == best_key && results[i].reasoning_type < results[*best].reasoning_type)) {
            best = i;
            best_key = k;
        }
    }
    if (!best) throw NoAnswer("every decomposition failed");
    return *best;
}

std::string trace_record(const ExampleOutcome& o) {
    json decomps = json::array();
    for (const auto& d : o.decompositions.candidates) {
        json subs = json::array();
        for (const auto& q : d.sub_questions()) subs.push_back(q.render());
        json j{{"type", std::string(to_string(d.type()))}, {"sub_questions", subs}};
        if (d.op()) j["op"] = std::string(to_string(*d.op()));
        if (d.entities()) j["entities"] = {d.entities()->first_text, d.entities()->second_text};
        decomps.push_back(std::move(j));
    }
    json skipped = json::array();
    for (const auto& s : o.decompositions.skipped) {
        skipped.push_back({{"type", std::string(to_string(s.type))}, {"reason", s.reason}});
    }
    json results = json::array();
    for (const auto& r : o.results) {
        json asked = json::array();
        for (const auto& q : r.asked) asked.push_back(q.render());
        json hops = json::array();
        for (const auto& h : r.hop_answers) hops.push_back(candidate_json(h));
        json j{{"type", std::string(to_string(r.reasoning_type))},
               {"asked", asked},
               {"hop_answers", hops},
               {"final_answer", r.final_answer},
               {"confidence", r.confidence},
               {"arbiter_score", r.arbiter_score},
               {"low_confidence", r.low_confidence}};
        if (r.evidence) j["evidence_title"] = r.evidence->title;
        if (r.op) j["op"] = std::string(to_string(*r.op));
        if (r.error) j["error"] = *r.error;
        results.push_back(std::move(j));
    }
    json doc{{"id", o.id},
             {"question", o.question},
             {"answer", o.answer},
             {"decompositions", decomps},
             {"skipped", skipped},
             {"results", results}};
    doc["chosen_type"] = o.chosen ? json(std::string(to_string(o.results[*o.chosen].reasoning_type))) : json(nullptr);
    if (o.error) doc["error"] = *o.error;
    return doc.dump();
}

Pipeline::Pipeline(std::shared_ptr<const Encoder> encoder, PointerHeads heads,
                   std::shared_ptr<const RCBackend> backend, PipelineConfig config,
                   std::optional<ScorerModel> scorer, std::optional<PipelineClassifier> classifier)
    : encoder_(std::move(encoder)),
      heads_(std::move(heads)),
      backend_(std::move(backend)),
      config_(config),
      scorer_(scorer ? std::move(*scorer) : ScorerModel::zeros(encoder_->width())),
      classifier_(std::move(classifier)) {
    if (!backend_->concurrent_safe()) backend_ = std::make_shared<SerializedBackend>(backend_);
    if (config_.mode == ArbitrationMode::Pipeline && !classifier_) {
        throw Error("pipeline arbitration needs a type classifier");
    }
    if (static_cast<std::size_t>(scorer_.w.size()) != encoder_->width()) {
        throw ShapeError("scorer width does not match encoder width");
    }
}

ExampleOutcome Pipeline::run(const TokenizedQuestion& q, const ContextProvider& ctx,
                             const std::optional<std::string>& gold) const {
    ExampleOutcome o;
    o.id = q.id();
    o.question = q.raw();
    try {
        o.decompositions = decompose_all(q, heads_, *encoder_);
        for (const auto& d : o.decompositions.candidates) {
            o.results.push_back(run_decomposition(d, ctx, *backend_));
        }
        for (auto& r : o.results) {
            if (!r.failed()) r.arbiter_score = score_decomposition(scorer_, *encoder_, q, r, config_.evidence_budget);
        }
        ArbitrationInputs in;
        if (config_.mode == ArbitrationMode::Pipeline) in.type_probabilities = classifier_->probabilities(*encoder_, q);
        if (config_.mode == ArbitrationMode::Oracle) {
            if (!gold) throw Error("oracle mode needs the gold answer");
            in.gold = gold;
        }
        o.chosen = arbitrate(o.results, config_.mode, in);
        o.answer = o.results[*o.chosen].final_answer;
    } catch (const Error& e) {
        o.error = e.what();
    }
    return o;
}

}  // namespace decomprc
