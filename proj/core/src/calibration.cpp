/*
 * Copyright (C) 2026 The tlretrieve Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *      http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#include "tlr/calibration.hpp"

#include <algorithm>
#include <limits>

#include "tlr/error.hpp"

namespace tlr {

std::uint64_t bounded_draw(std::mt19937_64& rng, std::uint64_t bound) {
    if (bound == 0) throw InvalidInput("bounded_draw needs a positive bound");
    // Reject the top partial bucket so every residue is equally likely.
    const std::uint64_t limit = std::numeric_limits<std::uint64_t>::max() - std::numeric_limits<std::uint64_t>::max() % bound;
    std::uint64_t x;
    do x = rng();
    while (x >= limit);
    return x % bound;
}

std::vector<LabeledPair> build_pairs(std::span<const Positive> positives, std::uint64_t seed) {
    const std::size_t n = positives.size();
    if (n < 2) throw InvalidInput("build_pairs needs at least two positives");
    std::mt19937_64 rng(seed);
    std::vector<LabeledPair> out;
    out.reserve(2 * n);
    for (std::size_t i = 0; i < n; ++i) {
        auto j = static_cast<std::size_t>(bounded_draw(rng, n - 1));
        if (j >= i) ++j;
        out.push_back({positives[i].item, positives[i].caption, true});
        out.push_back({positives[i].item, positives[j].caption, false});
    }
    return out;
}

namespace {

struct Sweep {
    std::vector<double> candidates; // ascending distinct scores
    std::vector<std::size_t> tp;    // positives with score >= candidate
    std::vector<std::size_t> fp;    // negatives with score >= candidate
    std::size_t positives = 0;
    std::size_t negatives = 0;
};

Sweep sweep(std::span<const ScoredPair> pairs) {
    Sweep s;
    std::vector<ScoredPair> sorted(pairs.begin(), pairs.end());
    for (const auto& p : sorted) {
        if (!(p.score >= 0.0 && p.score <= 1.0)) throw InvalidInput("score outside [0, 1]");
        (p.label ? s.positives : s.negatives) += 1;
    }
    if (s.positives == 0 || s.negatives == 0) throw InvalidInput("calibration needs both positive and negative labels");

    std::sort(sorted.begin(), sorted.end(), [](const ScoredPair& a, const ScoredPair& b) { return a.score > b.score; });
    std::size_t tp = 0, fp = 0;
    for (std::size_t i = 0; i < sorted.size();) {
        const double c = sorted[i].score;
        for (; i < sorted.size() && sorted[i].score == c; ++i) (sorted[i].label ? tp : fp) += 1;
        s.candidates.push_back(c);
        s.tp.push_back(tp);
        s.fp.push_back(fp);
    }
    std::reverse(s.candidates.begin(), s.candidates.end());
    std::reverse(s.tp.begin(), s.tp.end());
    std::reverse(s.fp.begin(), s.fp.end());
    return s;
}

std::vector<RocPoint> roc_from(const Sweep& s) {
    std::vector<RocPoint> roc{{0.0, 0.0}, {1.0, 1.0}};
    const auto P = static_cast<double>(s.positives), N = static_cast<double>(s.negatives);
    for (std::size_t k = 0; k < s.candidates.size(); ++k) {
        roc.push_back({static_cast<double>(s.fp[k]) / N, static_cast<double>(s.tp[k]) / P});
    }
    std::sort(roc.begin(), roc.end(), [](const RocPoint& a, const RocPoint& b) {
        return a.fpr != b.fpr ? a.fpr < b.fpr : a.tpr < b.tpr;
    });
    return roc;
}

} // namespace

double accuracy_at(std::span<const ScoredPair> pairs, double threshold) {
    if (pairs.empty()) throw InvalidInput("no pairs");
    std::size_t correct = 0;
    for (const auto& p : pairs) correct += (p.score >= threshold) == p.label;
    return static_cast<double>(correct) / static_cast<double>(pairs.size());
}

CalibrationReport select_threshold(std::span<const ScoredPair> pairs) {
    const Sweep s = sweep(pairs);
    std::size_t best_correct = 0, best = 0;
    for (std::size_t k = 0; k < s.candidates.size(); ++k) {
        // score >= c: tp true positives; negatives below c are true negatives.
        const std::size_t correct = s.tp[k] + (s.negatives - s.fp[k]);
        if (correct > best_correct) {
            best_correct = correct;
            best = k;
        }
    }
    CalibrationReport r;
    r.threshold = s.candidates[best];
    r.accuracy = static_cast<double>(best_correct) / static_cast<double>(pairs.size());
    r.roc = roc_from(s);
    r.auc = auc(r.roc);
    r.pair_count = pairs.size();
    return r;
}

std::vector<RocPoint> roc_points(std::span<const ScoredPair> pairs) { return roc_from(sweep(pairs)); }

double auc(std::span<const RocPoint> roc) {
    double area = 0.0;
    for (std::size_t i = 1; i < roc.size(); ++i) {
        area += (roc[i].fpr - roc[i - 1].fpr) * (roc[i].tpr + roc[i - 1].tpr) / 2.0;
    }
    return area;
}

} // namespace tlr
