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
#include <string>
#include <vector>

#include <benchmark/benchmark.h>

#include "decomprc/decompose.hpp"
#include "decomprc/encoder.hpp"
#include "decomprc/pointer.hpp"
#include "decomprc/rc_backend.hpp"
#include "decomprc/retrieval.hpp"

namespace dr = decomprc;

namespace {

Eigen::MatrixXd random_scores(std::mt19937_64& rng, std::size_t n, std::size_t c) {
    std::uniform_real_distribution<double> u(0.01, 1.0);
    Eigen::MatrixXd y(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(c));
    for (Eigen::Index i = 0; i < y.size(); ++i) y.data()[i] = u(rng);
    y.array().rowwise() /= y.colwise().sum().array();
    return y;
}

void BM_Decode(benchmark::State& state) {
    std::mt19937_64 rng(1);
    const auto y = random_scores(rng, static_cast<std::size_t>(state.range(0)), static_cast<std::size_t>(state.range(1)));
    for (auto _ : state) benchmark::DoNotOptimize(dr::decode(y));
    state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_Decode)->ArgsProduct({{16, 64, 256}, {2, 3, 4}});

void BM_BestSpan(benchmark::State& state) {
    std::mt19937_64 rng(2);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    const auto n = static_cast<std::size_t>(state.range(0));
    std::vector<double> ps(n);
    std::vector<double> pe(n);
    for (auto& v : ps) v = u(rng);
    for (auto& v : pe) v = u(rng);
    for (auto _ : state) benchmark::DoNotOptimize(dr::best_span(ps, pe));
    state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_BestSpan)->RangeMultiplier(4)->Range(64, 4096)->Complexity(benchmark::oN);

std::vector<dr::Paragraph> random_corpus(std::size_t docs, std::size_t words) {
    std::mt19937_64 rng(3);
    std::geometric_distribution<int> g(0.002);
    std::vector<dr::Paragraph> out;
    for (std::size_t d = 0; d < docs; ++d) {
        std::string text;
        for (std::size_t w = 0; w < words; ++w) text += "w" + std::to_string(g(rng)) + " ";
        out.push_back({"doc" + std::to_string(d), {text}});
    }
    return out;
}

void BM_TfIdfQuery(benchmark::State& state) {
    const auto index = dr::TfIdfIndex::build(random_corpus(static_cast<std::size_t>(state.range(0)), 80));
    for (auto _ : state) benchmark::DoNotOptimize(index.query("w1 w2 w17 w40 w300", 30));
    state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_TfIdfQuery)->RangeMultiplier(4)->Range(256, 16384);

void BM_DecomposeAll(benchmark::State& state) {
    const dr::FeatureEncoder enc(64);
    const dr::PointerHeads heads;
    const std::string text = "Who was born earlier, Emma Bull or Virginia Woolf?";
    for (auto _ : state) {
        const auto q = dr::tokenize("q", text);
        benchmark::DoNotOptimize(dr::decompose_all(q, heads, enc));
    }
}
BENCHMARK(BM_DecomposeAll);

}  // namespace

BENCHMARK_MAIN();
