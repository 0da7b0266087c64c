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

// decomprc: command-line front end.
//
// Exit codes: 0 success (possibly with warnings), 1 internal error,
// 2 usage or configuration error.

#include <algorithm>
#include <atomic>
#include <cstdint>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <memory>
#include <optional>
#include <random>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "decomprc/dataset.hpp"
#include "decomprc/decompose.hpp"
#include "decomprc/discrete_ops.hpp"
#include "decomprc/encoder.hpp"
#include "decomprc/errors.hpp"
#include "decomprc/eval.hpp"
#include "decomprc/orchestrate.hpp"
#include "decomprc/pointer.hpp"
#include "decomprc/rc_backend.hpp"
#include "decomprc/retrieval.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace decomprc;

namespace {

constexpr int kOk = 0;
constexpr int kInternal = 1;
constexpr int kUsage = 2;

class UsageError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Relative inputs missing from the working directory are looked up under
// DECOMP_DATA_DIR.
fs::path resolve_input(const std::string& p) {
    fs::path path(p);
    if (path.empty()) throw UsageError("empty path");
    if (fs::exists(path) || path.is_absolute()) {
        if (!fs::exists(path)) throw UsageError("no such file: " + p);
        return path;
    }
    if (const char* dir = std::getenv("DECOMP_DATA_DIR"); dir != nullptr && *dir != '\0') {
        const fs::path alt = fs::path(dir) / path;
        if (fs::exists(alt)) return alt;
    }
    throw UsageError("no such file: " + p);
}

std::ofstream open_output(const std::string& p) {
    std::ofstream out(p);
    if (!out) throw UsageError("cannot write " + p);
    return out;
}

struct EncoderOptions {
    std::size_t buckets = 64;
    std::string embeddings;

    void add(CLI::App* cmd) {
        cmd->add_option("--buckets", buckets, "Hash buckets of the feature encoder")->check(CLI::PositiveNumber);
        cmd->add_option("--embeddings", embeddings, "Precomputed token embeddings (JSONL) instead of features");
    }
    std::shared_ptr<const Encoder> make() const {
        if (!embeddings.empty()) return load_external_embeddings(resolve_input(embeddings));
        return std::make_shared<FeatureEncoder>(buckets);
    }
};

struct HeadOptions {
    std::string bridging;
    std::string intersection;
    std::string comparison;

    void add(CLI::App* cmd) {
        cmd->add_option("--bridging-head", bridging, "Pointer checkpoint with 3 columns");
        cmd->add_option("--intersection-head", intersection, "Pointer checkpoint with 2 columns");
        cmd->add_option("--comparison-head", comparison, "Pointer checkpoint with 4 columns");
    }
    PointerHeads load(const Encoder& encoder) const {
        PointerHeads heads;
        auto one = [&](const std::string& path, std::size_t c) -> std::optional<PointerHead> {
            if (path.empty()) return std::nullopt;
            PointerHead h = PointerHead::load(resolve_input(path));
            if (h.columns() != c) {
                throw UsageError(path + " has " + std::to_string(h.columns()) + " columns, expected " + std::to_string(c));
            }
            if (h.width() != encoder.width()) {
                throw UsageError(path + " has width " + std::to_string(h.width()) + " but the encoder has " +
                                 std::to_string(encoder.width()));
            }
            return h;
        };
        heads.bridging = one(bridging, 3);
        heads.intersection = one(intersection, 2);
        heads.comparison = one(comparison, 4);
        return heads;
    }
};

struct BackendOptions {
    std::string kind = "lexical";
    std::string scores;
    std::string fixture;

    void add(CLI::App* cmd) {
        cmd->add_option("--backend", kind, "Reader: replay, lexical or oracle-fixture")
            ->check(CLI::IsMember({"replay", "lexical", "oracle-fixture"}));
        cmd->add_option("--scores", scores, "Score file for the replay backend");
        cmd->add_option("--fixture", fixture, "Question->answer JSON for the oracle-fixture backend");
    }
    std::shared_ptr<const RCBackend> make() const {
        if (kind == "replay") {
            if (scores.empty()) throw UsageError("--backend replay needs --scores");
            return std::make_shared<ReplayBackend>(ReplayBackend::load(resolve_input(scores)));
        }
        if (kind == "oracle-fixture") {
            if (fixture.empty()) throw UsageError("--backend oracle-fixture needs --fixture");
            return std::make_shared<FixtureBackend>(FixtureBackend::load(resolve_input(fixture)));
        }
        return std::make_shared<LexicalBackend>();
    }
};

struct ContextOptions {
    std::string corpus;
    std::size_t k = 30;
    bool per_hop = true;

    void add(CLI::App* cmd) {
        cmd->add_option("--corpus", corpus, "Corpus JSONL; enables full-wiki retrieval");
        cmd->add_option("--k", k, "Paragraphs retrieved per question or hop")->check(CLI::PositiveNumber);
        cmd->add_flag("!--no-per-hop", per_hop, "Retrieve once per question instead of per hop");
    }
};

std::size_t default_threads() {
    return std::clamp<std::size_t>(std::thread::hardware_concurrency(), 1, 8);
}

// Runs fn(i) for i in [0, n) on a bounded pool; results land by index.
template <typename Fn>
void parallel_for(std::size_t n, std::size_t threads, Fn&& fn) {
    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        for (std::size_t i = next++; i < n; i = next++) fn(i);
    };
    std::vector<std::thread> pool;
    const std::size_t count = std::min(threads, n);
    for (std::size_t t = 1; t < count; ++t) pool.emplace_back(worker);
    worker();
    for (auto& th : pool) th.join();
}

std::vector<std::size_t> parse_indices(const std::string& s) {
    std::vector<std::size_t> out;
    std::stringstream ss(s);
    std::string part;
    while (std::getline(ss, part, ',')) {
        try {
            std::size_t used = 0;
            const long v = std::stol(part, &used);
            if (used != part.size() || v < 0) throw std::invalid_argument(part);
            out.push_back(static_cast<std::size_t>(v));
        } catch (const std::exception&) {
            throw UsageError("--indices expects comma-separated non-negative integers, got '" + s + "'");
        }
    }
    return out;
}

json decomposition_json(const Decomposition& d) {
    json subs = json::array();
    for (const auto& q : d.sub_questions()) subs.push_back(q.render());
    json j{{"type", std::string(to_string(d.type()))}, {"sub_questions", subs}};
    if (d.op()) j["op"] = std::string(to_string(*d.op()));
    if (d.entities()) j["entities"] = {d.entities()->first_text, d.entities()->second_text};
    return j;
}

// ---------------------------------------------------------------- decompose

struct DecomposeArgs {
    std::string question;
    std::string dataset;
    std::string type = "all";
    std::string indices;
    std::string out;
    HeadOptions heads;
    EncoderOptions encoder;
};

int cmd_decompose(const DecomposeArgs& a) {
    if (a.question.empty() == a.dataset.empty()) throw UsageError("give exactly one of --question or --dataset");
    if (!a.indices.empty() && (a.type == "all" || a.type == "original")) {
        throw UsageError("--indices needs --type bridging, intersection or comparison");
    }
    std::vector<TokenizedQuestion> questions;
    if (!a.question.empty()) {
        questions.push_back(tokenize("q0", a.question));
    } else {
        for (auto& ex : load_dataset(resolve_input(a.dataset))) questions.push_back(std::move(ex.question));
    }
    const auto encoder = a.encoder.make();
    const PointerHeads heads = a.heads.load(*encoder);
    const auto explicit_indices = a.indices.empty() ? std::vector<std::size_t>{} : parse_indices(a.indices);

    if (a.indices.empty() && a.type != "all" && a.type != "original") {
        const bool missing = (a.type == "bridging" && !heads.bridging) ||
                             (a.type == "intersection" && !heads.intersection);
        if (missing) throw UsageError("--type " + a.type + " needs --" + a.type + "-head or --indices");
    }

    std::ofstream file;
    if (!a.out.empty()) file = open_output(a.out);
    std::ostream& out = a.out.empty() ? std::cout : file;

    for (const auto& q : questions) {
        json rec{{"id", q.id()}, {"question", q.raw()}};
        json decomps = json::array();
        json skipped = json::array();
        if (a.type == "all") {
            const auto set = decompose_all(q, heads, *encoder);
            for (const auto& d : set.candidates) decomps.push_back(decomposition_json(d));
            for (const auto& s : set.skipped) {
                skipped.push_back({{"type", std::string(to_string(s.type))}, {"reason", s.reason}});
            }
        } else {
            const ReasoningType t = reasoning_type_from_string(a.type);
            try {
                std::vector<std::size_t> ind = explicit_indices;
                if (ind.empty() && t != ReasoningType::Original) {
                    if (t == ReasoningType::Comparison && !heads.comparison) {
                        const auto p = propose_entities(q);
                        if (!p) throw NotComparison("no pair of capitalized entity spans");
                        ind.assign(p->begin(), p->end());
                    } else {
                        const PointerHead& h = t == ReasoningType::Bridging       ? *heads.bridging
                                               : t == ReasoningType::Intersection ? *heads.intersection
                                                                                  : *heads.comparison;
                        ind = decode(score(h, encoder->encode(q)));
                    }
                }
                if (t != ReasoningType::Original && ind.size() != pointer_arity(t)) {
                    throw UsageError(std::string(to_string(t)) + " needs " + std::to_string(pointer_arity(t)) +
                                     " indices");
                }
                switch (t) {
                    case ReasoningType::Bridging:
                        decomps.push_back(decomposition_json(generate_bridging(q, ind[0], ind[1], ind[2])));
                        break;
                    case ReasoningType::Intersection:
                        decomps.push_back(decomposition_json(generate_intersection(q, ind[0], ind[1])));
                        break;
                    case ReasoningType::Comparison:
                        decomps.push_back(
                            decomposition_json(generate_comparison(q, {ind[0], ind[1], ind[2], ind[3]})));
                        break;
                    case ReasoningType::Original:
                        decomps.push_back(decomposition_json(Decomposition::original(SubQuestion::from_question(q))));
                        break;
                }
            } catch (const UsageError&) {
                throw;
            } catch (const Error& e) {
                skipped.push_back({{"type", a.type}, {"reason", e.what()}});
                std::cerr << "note: " << q.id() << ": " << e.what() << '\n';
            }
        }
        rec["decompositions"] = decomps;
        rec["skipped"] = skipped;
        out << rec.dump() << '\n';
    }
    return kOk;
}

// ------------------------------------------------------------------- answer

struct AnswerArgs {
    std::string dataset;
    std::string out = "predictions.json";
    std::string trace;
    std::string mode = "scorer";
    std::string scorer;
    std::string classifier;
    std::size_t budget = kDefaultEvidenceBudget;
    std::size_t threads = default_threads();
    HeadOptions heads;
    EncoderOptions encoder;
    BackendOptions backend;
    ContextOptions context;
};

int cmd_answer(const AnswerArgs& a) {
    const auto examples = load_dataset(resolve_input(a.dataset));
    const auto encoder = a.encoder.make();
    PipelineConfig cfg;
    cfg.mode = arbitration_mode_from_string(a.mode);
    cfg.evidence_budget = a.budget;
    std::optional<ScorerModel> scorer;
    if (!a.scorer.empty()) scorer = ScorerModel::load(resolve_input(a.scorer));
    if (cfg.mode == ArbitrationMode::Scorer && !scorer) {
        std::cerr << "warning: no --scorer checkpoint; every decomposition scores 0.5\n";
    }
    std::optional<PipelineClassifier> classifier;
    if (!a.classifier.empty()) classifier = PipelineClassifier::load(resolve_input(a.classifier));
    if (cfg.mode == ArbitrationMode::Pipeline && !classifier) throw UsageError("--mode pipeline needs --classifier");

    std::shared_ptr<const TfIdfIndex> index;
    if (!a.context.corpus.empty()) {
        index = std::make_shared<TfIdfIndex>(TfIdfIndex::build(load_corpus(resolve_input(a.context.corpus))));
    }
    const Pipeline pipeline(encoder, a.heads.load(*encoder), a.backend.make(), cfg, scorer, classifier);

    std::vector<ExampleOutcome> outcomes(examples.size());
    parallel_for(examples.size(), std::max<std::size_t>(a.threads, 1), [&](std::size_t i) {
        const QAExample& ex = examples[i];
        std::unique_ptr<ContextProvider> ctx;
        if (index && a.context.per_hop) {
            ctx = std::make_unique<RetrievedContext>(index, a.context.k);
        } else if (index) {
            std::vector<Paragraph> ps;
            for (const auto& h : index->query(ex.question.raw(), a.context.k)) ps.push_back(index->documents()[h.document]);
            ctx = std::make_unique<FixedContext>(std::move(ps));
        } else {
            ctx = std::make_unique<FixedContext>(ex.paragraphs);
        }
        outcomes[i] = pipeline.run(ex.question, *ctx, ex.gold_answer);
    });

    std::map<std::string, std::string> predictions;
    std::size_t warnings = 0;
    for (const auto& o : outcomes) {
        predictions[o.id] = o.answer;
        if (o.error) {
            ++warnings;
            std::cerr << "warning: " << o.id << ": " << *o.error << '\n';
        }
    }
    auto pred_out = open_output(a.out);
    write_predictions(pred_out, predictions);
    if (!a.trace.empty()) {
        auto trace_out = open_output(a.trace);
        for (const auto& o : outcomes) trace_out << trace_record(o) << '\n';
    }
    if (cfg.mode == ArbitrationMode::Oracle) {
        // Best achievable F1 over the candidate decompositions.
        double sum = 0.0;
        for (const auto& ex : examples) sum += token_f1(predictions[ex.id], ex.gold_answer);
        const double mean = examples.empty() ? 0.0 : sum / static_cast<double>(examples.size());
        std::cout << json{{"mode", "oracle"}, {"count", examples.size()}, {"upper_bound_f1", mean}}.dump() << '\n';
    }
    std::cerr << "answered " << examples.size() << " examples, " << warnings << " warnings\n";
    return kOk;
}

// ------------------------------------------------------------ train-pointer

struct TrainPointerArgs {
    std::string annotations;
    std::size_t c = 3;
    std::string out;
    double step = 0.1;
    std::size_t epochs = 500;
    double holdout = 0.0;
    std::uint64_t seed = 0;
    EncoderOptions encoder;
};

int cmd_train_pointer(const TrainPointerArgs& a) {
    const auto annotations = load_annotations(resolve_input(a.annotations));
    std::vector<PointerExample> all = pointer_examples(annotations);
    for (const auto& ex : all) {
        if (ex.indices.size() != a.c) {
            throw UsageError("annotation '" + ex.question.id() + "' has " + std::to_string(ex.indices.size()) +
                             " indices but --c is " + std::to_string(a.c));
        }
    }
    std::vector<PointerExample> train = all;
    std::vector<PointerExample> held;
    if (a.holdout > 0.0) {
        std::mt19937_64 rng(a.seed);
        std::shuffle(train.begin(), train.end(), rng);
        const auto n_held = static_cast<std::size_t>(a.holdout * static_cast<double>(train.size()));
        held.assign(train.end() - static_cast<std::ptrdiff_t>(n_held), train.end());
        train.resize(train.size() - n_held);
    }
    const auto encoder = a.encoder.make();
    PointerTrainConfig cfg;
    cfg.step_size = a.step;
    cfg.epochs = a.epochs;
    const TrainedPointer trained = train_pointer(train, *encoder, a.c, cfg);
    trained.head.save(a.out);
    std::cout << "final_loss " << trained.loss << '\n';
    std::cout << "train_accuracy " << exact_tuple_accuracy(trained.head, train, *encoder) << '\n';
    if (!held.empty()) std::cout << "holdout_accuracy " << exact_tuple_accuracy(trained.head, held, *encoder) << '\n';
    return kOk;
}

// ------------------------------------------------------------- train-scorer

struct TrainScorerArgs {
    std::string dataset;
    std::string out;
    std::string classifier_out;
    double step = 0.5;
    std::size_t epochs = 300;
    double threshold = 0.5;
    std::size_t budget = kDefaultEvidenceBudget;
    std::size_t threads = default_threads();
    HeadOptions heads;
    EncoderOptions encoder;
    BackendOptions backend;
};

int cmd_train_scorer(const TrainScorerArgs& a) {
    const auto examples = load_dataset(resolve_input(a.dataset));
    const auto encoder = a.encoder.make();
    PipelineConfig cfg;
    cfg.mode = ArbitrationMode::Confidence;
    cfg.evidence_budget = a.budget;
    const Pipeline pipeline(encoder, a.heads.load(*encoder), a.backend.make(), cfg);

    std::vector<ExampleOutcome> outcomes(examples.size());
    parallel_for(examples.size(), std::max<std::size_t>(a.threads, 1), [&](std::size_t i) {
        outcomes[i] = pipeline.run(examples[i].question, FixedContext(examples[i].paragraphs));
    });

    std::vector<ScorerTrace> traces;
    std::vector<TypeExample> type_examples;
    for (std::size_t i = 0; i < examples.size(); ++i) {
        std::optional<ReasoningType> gold_type;
        for (const auto& r : outcomes[i].results) {
            if (r.failed()) continue;
            const bool label = token_f1(r.final_answer, examples[i].gold_answer) >= a.threshold;
            traces.push_back({examples[i].question, r, label});
            if (label && (!gold_type || r.reasoning_type < *gold_type)) gold_type = r.reasoning_type;
        }
        if (gold_type) type_examples.push_back({examples[i].question, *gold_type});
    }
    ScorerTrainConfig tc;
    tc.step_size = a.step;
    tc.epochs = a.epochs;
    tc.evidence_budget = a.budget;
    const TrainedScorer trained = train_scorer(traces, *encoder, tc);
    for (const auto& w : trained.warnings) std::cerr << "warning: " << w << '\n';
    trained.model.save(a.out);
    std::cout << "traces " << traces.size() << '\n' << "final_loss " << trained.loss << '\n';
    if (!a.classifier_out.empty()) {
        train_pipeline_classifier(type_examples, *encoder, tc).save(a.classifier_out);
        std::cout << "classifier_examples " << type_examples.size() << '\n';
    }
    return kOk;
}

// ----------------------------------------------------------------- retrieve

struct RetrieveArgs {
    std::string corpus;
    std::string query;
    std::size_t k = 30;
};

int cmd_retrieve(const RetrieveArgs& a) {
    const auto index = TfIdfIndex::build(load_corpus(resolve_input(a.corpus)));
    std::size_t rank = 0;
    for (const auto& h : index.query(a.query, a.k)) {
        std::cout << json{{"rank", ++rank}, {"title", index.documents()[h.document].title}, {"score", h.score}}.dump()
                  << '\n';
    }
    return kOk;
}

// ------------------------------------------------------------------- invert

struct InvertArgs {
    std::string gold;
    std::string out;
    HeadOptions heads;
    EncoderOptions encoder;
};

std::optional<std::string> inverted_answer(DiscreteOp op, const std::string& gold, const EntityPair& ents) {
    const std::string g = normalize_answer(gold);
    if (op == DiscreteOp::WhichIsGreater || op == DiscreteOp::WhichIsSmaller || op == DiscreteOp::WhichIsTrue) {
        if (g == normalize_answer(ents.first_text)) return ents.second_text;
        if (g == normalize_answer(ents.second_text)) return ents.first_text;
        return std::nullopt;
    }
    if (g == "yes") return std::string("no");
    if (g == "no") return std::string("yes");
    return std::nullopt;
}

int cmd_invert(const InvertArgs& a) {
    const auto examples = load_dataset(resolve_input(a.gold));
    const auto encoder = a.encoder.make();
    const PointerHeads heads = a.heads.load(*encoder);
    std::vector<QAExample> out;
    std::size_t skipped = 0;
    for (const auto& ex : examples) {
        if (ex.hotpot_type != HotpotType::Comparison) continue;
        try {
            std::array<std::size_t, 4> ind{};
            if (heads.comparison) {
                const auto v = decode(score(*heads.comparison, encoder->encode(ex.question)));
                std::copy(v.begin(), v.end(), ind.begin());
            } else {
                const auto p = propose_entities(ex.question);
                if (!p) throw NotComparison("no entity pair");
                ind = *p;
            }
            const auto parse = parse_comparison(ex.question, ind);
            const DiscreteOp op = find_op(parse, ex.question);
            const auto inv = invert_comparison(ex.question, parse, op);
            if (!inv) {
                ++skipped;
                continue;
            }
            const auto d = generate_comparison(ex.question, ind);
            const auto answer = inverted_answer(op, ex.gold_answer, *d.entities());
            if (!answer) {
                ++skipped;
                continue;
            }
            QAExample copy = ex;
            copy.id = ex.id + "-inv";
            copy.question = TokenizedQuestion(copy.id, inv->question.raw());
            copy.gold_answer = *answer;
            out.push_back(std::move(copy));
        } catch (const Error& e) {
            ++skipped;
            std::cerr << "note: " << ex.id << ": " << e.what() << '\n';
        }
    }
    write_dataset(fs::path(a.out), out);
    std::cerr << "inverted " << out.size() << " questions, skipped " << skipped << '\n';
    return kOk;
}

// ----------------------------------------------------------------- evaluate

struct EvaluateArgs {
    std::string pred;
    std::string gold;
    std::string per_model_f1;
    std::string trace;
    std::string inverted_pred;
    std::string inverted_gold;
};

int cmd_evaluate(const EvaluateArgs& a) {
    const auto gold = load_dataset(resolve_input(a.gold));
    const auto preds = load_predictions(resolve_input(a.pred));
    std::optional<PerModelF1> table;
    if (!a.per_model_f1.empty()) table = load_per_model_f1(resolve_input(a.per_model_f1));
    std::map<std::string, std::string> chosen;
    if (!a.trace.empty()) {
        std::ifstream in(resolve_input(a.trace));
        std::string line;
        while (std::getline(in, line)) {
            if (line.empty()) continue;
            const json rec = json::parse(line, nullptr, false);
            if (rec.is_discarded() || !rec.contains("id")) throw ParseError("malformed trace line");
            if (rec.contains("chosen_type") && rec["chosen_type"].is_string()) {
                chosen[rec["id"].get<std::string>()] = rec["chosen_type"].get<std::string>();
            }
        }
    }
    const EvalReport report = evaluate(preds, gold, table ? &*table : nullptr, a.trace.empty() ? nullptr : &chosen);
    json doc = json::parse(report.to_json());
    if (a.inverted_pred.empty() != a.inverted_gold.empty()) {
        throw UsageError("--inverted-pred and --inverted-gold go together");
    }
    if (!a.inverted_pred.empty()) {
        const auto inv_gold = load_dataset(resolve_input(a.inverted_gold));
        const auto inv_preds = load_predictions(resolve_input(a.inverted_pred));
        const EvalReport inv = evaluate(inv_preds, inv_gold);
        std::map<std::string, double> orig_f1;
        for (const auto& e : report.examples) orig_f1[e.id] = e.f1;
        double sum_orig = 0.0;
        double sum_inv = 0.0;
        double sum_joint = 0.0;
        std::size_t n = 0;
        for (const auto& e : inv.examples) {
            const std::string base = e.id.size() > 4 && e.id.ends_with("-inv") ? e.id.substr(0, e.id.size() - 4) : e.id;
            const auto it = orig_f1.find(base);
            if (it == orig_f1.end()) continue;
            sum_orig += it->second;
            sum_inv += e.f1;
            sum_joint += joint_f1(it->second, e.f1);
            ++n;
        }
        const double denom = n == 0 ? 1.0 : static_cast<double>(n);
        doc["adversarial"] = {{"count", n},
                              {"original_f1", sum_orig / denom},
                              {"inverted_f1", sum_inv / denom},
                              {"joint_f1", sum_joint / denom}};
    }
    std::cout << doc.dump(2) << '\n';
    return kOk;
}

// -------------------------------------------------------- regen-distractors

struct RegenArgs {
    std::string gold;
    std::string corpus;
    std::string out;
    std::size_t k = 8;
    std::uint64_t seed = 0;
};

int cmd_regen(const RegenArgs& a) {
    const auto examples = load_dataset(resolve_input(a.gold));
    const auto index = TfIdfIndex::build(load_corpus(resolve_input(a.corpus)));
    std::vector<QAExample> out;
    std::size_t failed = 0;
    // Each example gets its own stream derived from the command seed.
    std::vector<std::uint64_t> seeds(examples.size());
    std::mt19937_64 master(a.seed);
    for (auto& s : seeds) s = master();
    for (std::size_t i = 0; i < examples.size(); ++i) {
        try {
            out.push_back(regenerate_distractors(examples[i], index, a.k, seeds[i]));
        } catch (const Error& e) {
            ++failed;
            std::cerr << "warning: " << examples[i].id << ": " << e.what() << '\n';
        }
    }
    write_dataset(fs::path(a.out), out);
    std::cerr << "regenerated " << out.size() << " examples, " << failed << " skipped\n";
    return kOk;
}

// Trims spaces and matching quotes.
std::string trim_value(std::string v) {
    const auto b = v.find_first_not_of(" \t\r");
    const auto e = v.find_last_not_of(" \t\r");
    v = b == std::string::npos ? std::string() : v.substr(b, e - b + 1);
    if (v.size() >= 2 && (v.front() == '"' || v.front() == '\'') && v.back() == v.front()) {
        v = v.substr(1, v.size() - 2);
    }
    return v;
}

// `--config FILE` names a key=value file whose keys are long option names
// of the chosen command. Options already on the command line win; the
// remaining keys are appended as flags before CLI11 sees the arguments.
std::vector<std::string> apply_config(CLI::App& app, std::vector<std::string> args) {
    std::optional<std::string> path;
    std::vector<std::string> kept;
    for (std::size_t i = 0; i < args.size(); ++i) {
        if (args[i] == "--config") {
            if (i + 1 == args.size()) throw UsageError("--config needs a file");
            path = args[++i];
        } else if (args[i].starts_with("--config=")) {
            path = args[i].substr(9);
        } else {
            kept.push_back(args[i]);
        }
    }
    if (!path) return kept;
    CLI::App* sub = nullptr;
    for (const auto& a : kept) {
        if (a.starts_with("-")) continue;
        sub = app.get_subcommand_ptr(a).get();
        break;
    }
    if (sub == nullptr) throw UsageError("--config needs a command");
    std::ifstream in(*path);
    if (!in) throw UsageError("cannot read config " + *path);

    auto given = [&](const CLI::Option* opt) {
        for (const auto& name : opt->get_lnames()) {
            const std::string flag = "--" + name;
            for (const auto& a : kept) {
                if (a == flag || a.starts_with(flag + "=")) return true;
            }
        }
        return false;
    };
    std::vector<std::string> extra;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const std::string t = trim_value(line);
        if (t.empty() || t[0] == '#' || t[0] == ';') continue;
        const auto eq = t.find('=');
        if (eq == std::string::npos) {
            throw UsageError(*path + ":" + std::to_string(lineno) + ": expected key=value");
        }
        const std::string key = trim_value(t.substr(0, eq));
        const std::string value = trim_value(t.substr(eq + 1));
        const CLI::Option* opt = sub->get_option_no_throw("--" + key);
        if (opt == nullptr) {
            std::cerr << "warning: " << *path << ": '" << key << "' is not an option of " << sub->get_name() << '\n';
            continue;
        }
        if (given(opt)) continue;
        if (opt->get_expected_min() == 0) {
            if (value == "true" || value == "1" || value == "on" || value == "yes") extra.push_back("--" + key);
        } else {
            extra.push_back("--" + key);
            extra.push_back(value);
        }
    }
    kept.insert(kept.end(), extra.begin(), extra.end());
    return kept;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Multi-hop question answering by span-based question decomposition"};
    app.add_option("--config", "key=value file of defaults for the chosen command");
    app.require_subcommand(1);

    DecomposeArgs dec;
    auto* c_dec = app.add_subcommand("decompose", "Print candidate decompositions as trace records");
    c_dec->add_option("--question", dec.question, "A single question");
    c_dec->add_option("--dataset", dec.dataset, "HotpotQA-format JSON");
    c_dec->add_option("--type", dec.type, "all, bridging, intersection, comparison or original")
        ->check(CLI::IsMember({"all", "bridging", "intersection", "comparison", "original"}));
    c_dec->add_option("--indices", dec.indices, "Explicit pointer indices, comma separated");
    c_dec->add_option("--out", dec.out, "Trace output (default stdout)");
    dec.heads.add(c_dec);
    dec.encoder.add(c_dec);

    AnswerArgs ans;
    auto* c_ans = app.add_subcommand("answer", "Answer a dataset and write predictions plus a trace");
    c_ans->add_option("--dataset,--gold", ans.dataset, "HotpotQA-format JSON")->required();
    c_ans->add_option("--out", ans.out, "Predictions JSON");
    c_ans->add_option("--trace", ans.trace, "Trace JSONL");
    c_ans->add_option("--mode", ans.mode, "scorer, confidence, pipeline or oracle")
        ->check(CLI::IsMember({"scorer", "confidence", "pipeline", "oracle"}));
    c_ans->add_option("--scorer", ans.scorer, "Decomposition scorer checkpoint");
    c_ans->add_option("--classifier", ans.classifier, "Type classifier checkpoint for --mode pipeline");
    c_ans->add_option("--budget", ans.budget, "Evidence tokens seen by the scorer")->check(CLI::PositiveNumber);
    c_ans->add_option("--threads", ans.threads, "Worker threads")->check(CLI::PositiveNumber);
    ans.heads.add(c_ans);
    ans.encoder.add(c_ans);
    ans.backend.add(c_ans);
    ans.context.add(c_ans);

    TrainPointerArgs tp;
    auto* c_tp = app.add_subcommand("train-pointer", "Train a pointer head from span annotations");
    c_tp->add_option("--annotations", tp.annotations, "Annotation JSONL")->required();
    c_tp->add_option("--c", tp.c, "Number of indices (2, 3 or 4)")->check(CLI::Range(2, 4));
    c_tp->add_option("--out", tp.out, "Checkpoint path")->required();
    c_tp->add_option("--step", tp.step, "Gradient step size")->check(CLI::PositiveNumber);
    c_tp->add_option("--epochs", tp.epochs, "Full-batch epochs");
    c_tp->add_option("--holdout", tp.holdout, "Fraction held out for accuracy")->check(CLI::Range(0.0, 0.9));
    c_tp->add_option("--seed", tp.seed, "Seed for the holdout split");
    tp.encoder.add(c_tp);

    TrainScorerArgs ts;
    auto* c_ts = app.add_subcommand("train-scorer", "Train the decomposition scorer on pipeline traces");
    c_ts->add_option("--dataset", ts.dataset, "HotpotQA-format JSON with gold answers")->required();
    c_ts->add_option("--out", ts.out, "Scorer checkpoint path")->required();
    c_ts->add_option("--classifier-out", ts.classifier_out, "Also train the question-only type classifier");
    c_ts->add_option("--step", ts.step, "Gradient step size")->check(CLI::PositiveNumber);
    c_ts->add_option("--epochs", ts.epochs, "Full-batch epochs");
    c_ts->add_option("--threshold", ts.threshold, "F1 at or above which a trace is labeled correct")
        ->check(CLI::Range(0.0, 1.0));
    c_ts->add_option("--budget", ts.budget, "Evidence tokens seen by the scorer")->check(CLI::PositiveNumber);
    c_ts->add_option("--threads", ts.threads, "Worker threads")->check(CLI::PositiveNumber);
    ts.heads.add(c_ts);
    ts.encoder.add(c_ts);
    ts.backend.add(c_ts);

    RetrieveArgs rt;
    auto* c_rt = app.add_subcommand("retrieve", "Rank corpus paragraphs by TF-IDF cosine");
    c_rt->add_option("--corpus", rt.corpus, "Corpus JSONL")->required();
    c_rt->add_option("--query", rt.query, "Query text")->required();
    c_rt->add_option("--k", rt.k, "Number of results")->check(CLI::PositiveNumber);

    InvertArgs inv;
    auto* c_inv = app.add_subcommand("invert", "Write adversarially inverted comparison questions");
    c_inv->add_option("--gold", inv.gold, "HotpotQA-format JSON")->required();
    c_inv->add_option("--out", inv.out, "Output dataset")->required();
    inv.heads.add(c_inv);
    inv.encoder.add(c_inv);

    EvaluateArgs ev;
    auto* c_ev = app.add_subcommand("evaluate", "Score predictions against gold answers");
    c_ev->add_option("--pred", ev.pred, "Predictions JSON")->required();
    c_ev->add_option("--gold", ev.gold, "HotpotQA-format JSON")->required();
    c_ev->add_option("--per-model-f1", ev.per_model_f1, "id -> [f1, f1, f1] for the single/multi split");
    c_ev->add_option("--trace", ev.trace, "Trace JSONL; copies chosen types into the report");
    c_ev->add_option("--inverted-pred", ev.inverted_pred, "Predictions on the inverted questions");
    c_ev->add_option("--inverted-gold", ev.inverted_gold, "Inverted dataset from `invert`");

    RegenArgs rg;
    auto* c_rg = app.add_subcommand("regen-distractors", "Replace distractor paragraphs via retrieval");
    c_rg->add_option("--gold", rg.gold, "HotpotQA-format JSON")->required();
    c_rg->add_option("--corpus", rg.corpus, "Corpus JSONL")->required();
    c_rg->add_option("--out", rg.out, "Output dataset")->required();
    c_rg->add_option("--k", rg.k, "Distractors per example")->check(CLI::PositiveNumber);
    c_rg->add_option("--seed", rg.seed, "Shuffle seed");

    std::vector<std::string> args(argv + 1, argv + argc);
    try {
        args = apply_config(app, std::move(args));
    } catch (const UsageError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kUsage;
    }
    std::reverse(args.begin(), args.end());

    try {
        app.parse(args);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kOk : kUsage;
    }

    try {
        if (c_dec->parsed()) return cmd_decompose(dec);
        if (c_ans->parsed()) return cmd_answer(ans);
        if (c_tp->parsed()) return cmd_train_pointer(tp);
        if (c_ts->parsed()) return cmd_train_scorer(ts);
        if (c_rt->parsed()) return cmd_retrieve(rt);
        if (c_inv->parsed()) return cmd_invert(inv);
        if (c_ev->parsed()) return cmd_evaluate(ev);
        if (c_rg->parsed()) return cmd_regen(rg);
    } catch (const UsageError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kUsage;
    } catch (const ParseError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kUsage;
    } catch (const ArityError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kUsage;
    } catch (const ShapeError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kUsage;
    } catch (const std::exception& e) {
        std::cerr << "internal error: " << e.what() << '\n';
        return kInternal;
    }
    return kUsage;
}
