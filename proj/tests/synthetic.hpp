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

// Random instances and brute-force references shared by tests and the
// acceptance binary.

#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <memory>
#include <random>
#include <string>
#include <unordered_map>
#include <vector>

#include <Eigen/Dense>

#include "decomprc/encoder.hpp"
#include "decomprc/pointer.hpp"
#include "decomprc/rc_backend.hpp"

namespace decomprc::testing {

/// n x c with positive entries; each column sums to 1.
inline Eigen::MatrixXd random_column_stochastic(std::mt19937_64& rng, std::size_t n, std::size_t c) {
    std::uniform_real_distribution<double> u(0.01, 1.0);
    Eigen::MatrixXd y(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(c));
    for (Eigen::Index j = 0; j < y.cols(); ++j) {
        for (Eigen::Index i = 0; i < y.rows(); ++i) y(i, j) = u(rng);
        y.col(j) /= y.col(j).sum();
    }
    return y;
}

/// Every non-decreasing c-tuple in lexicographic order; keeps the first
/// maximum. The product is accumulated from the last column backwards.
inline std::vector<std::size_t> brute_force_decode(const Eigen::MatrixXd& y) {
    const auto n = static_cast<std::size_t>(y.rows());
    const auto c = static_cast<std::size_t>(y.cols());
    std::vector<std::size_t> cur(c, 0);
    std::vector<std::size_t> best;
    double best_value = -1.0;
    std::function<void(std::size_t, std::size_t)> rec = [&](std::size_t j, std::size_t lo) {
        if (j == c) {
            double v = y(static_cast<Eigen::Index>(cur[c - 1]), static_cast<Eigen::Index>(c - 1));
            for (std::size_t k = c - 1; k-- > 0;) {
                v = y(static_cast<Eigen::Index>(cur[k]), static_cast<Eigen::Index>(k)) * v;
            }
            if (v > best_value) {
                best_value = v;
                best = cur;
            }
            return;
        }
        for (std::size_t i = lo; i < n; ++i) {
            cur[j] = i;
            rec(j + 1, i);
        }
    };
    rec(0, 0);
    return best;
}

/// Reference span: every pair j <= k, first maximum in (j, k) order.
inline SpanChoice brute_force_span(const std::vector<double>& ps, const std::vector<double>& pe) {
    SpanChoice best{0, 0, -1.0};
    for (std::size_t j = 0; j < ps.size(); ++j) {
        for (std::size_t k = j; k < pe.size(); ++k) {
            const double v = ps[j] * pe[k];
            if (v > best.probability) best = {j, k, v};
        }
    }
    return best;
}

inline std::vector<double> random_distribution(std::mt19937_64& rng, std::size_t n) {
    std::uniform_real_distribution<double> u(0.0, 1.0);
    std::vector<double> p(n);
    double sum = 0.0;
    for (auto& v : p) sum += v = u(rng);
    for (auto& v : p) v /= sum;
    return p;
}

struct SyntheticPointerCorpus {
    std::shared_ptr<const Encoder> encoder;
    std::vector<PointerExample> examples;
};

/// Questions of 6 to 14 filler words with c distinct gold positions. Column
/// h - c + j is 1 on the j-th gold token and 0 elsewhere; the remaining
/// columns are Gaussian noise.
inline SyntheticPointerCorpus synthetic_pointer_corpus(std::uint64_t seed, std::size_t count, std::size_t c,
                                                       std::size_t h = 16) {
    std::mt19937_64 rng(seed);
    std::uniform_int_distribution<std::size_t> len(6, 14);
    std::normal_distribution<double> noise(0.0, 1.0);
    std::unordered_map<std::string, Embedding> rows;
    SyntheticPointerCorpus out;
    for (std::size_t e = 0; e < count; ++e) {
        const std::size_t n = len(rng);
        std::string text;
        for (std::size_t i = 0; i < n; ++i) text += (i ? " w" : "w") + std::to_string(i);
        const std::string id = "syn" + std::to_string(e);
        std::vector<std::size_t> positions(n);
        for (std::size_t i = 0; i < n; ++i) positions[i] = i;
        std::shuffle(positions.begin(), positions.end(), rng);
        positions.resize(c);
        std::sort(positions.begin(), positions.end());

        Embedding m = Embedding::Zero(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(h));
        for (Eigen::Index i = 0; i < m.rows(); ++i) {
            for (Eigen::Index d = 0; d < static_cast<Eigen::Index>(h - c); ++d) m(i, d) = noise(rng);
        }
        for (std::size_t j = 0; j < c; ++j) {
            m(static_cast<Eigen::Index>(positions[j]), static_cast<Eigen::Index>(h - c + j)) = 1.0;
        }
        rows.emplace(id, std::move(m));
        out.examples.push_back({TokenizedQuestion(id, text), positions});
    }
    out.encoder = std::make_shared<StoredEmbeddings>(h, std::move(rows));
    return out;
}

/// Largest relative error between an analytic gradient and central
/// differences, with |a - b| / max(1e-6, |a| + |b|) per entry.
template <typename Loss>
double gradient_check(const Eigen::MatrixXd& at, const Eigen::MatrixXd& analytic, Loss&& loss,
                      double eps = 1e-6) {
    double worst = 0.0;
    Eigen::MatrixXd w = at;
    for (Eigen::Index i = 0; i < w.rows(); ++i) {
        for (Eigen::Index j = 0; j < w.cols(); ++j) {
            const double orig = w(i, j);
            w(i, j) = orig + eps;
            const double up = loss(w);
            w(i, j) = orig - eps;
            const double down = loss(w);
            w(i, j) = orig;
            const double numeric = (up - down) / (2.0 * eps);
            const double a = analytic(i, j);
            const double denom = std::max(1e-6, std::abs(a) + std::abs(numeric));
            worst = std::max(worst, std::abs(a - numeric) / denom);
        }
    }
    return worst;
}

}  // namespace decomprc::testing
