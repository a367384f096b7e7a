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

#pragma once

#include <cstddef>
#include <cstdint>
#include <random>
#include <span>
#include <string>
#include <vector>

namespace tlr {

struct ScoredPair {
    double score = 0.0; ///< in [0, 1]
    bool label = false;

    friend bool operator==(const ScoredPair&, const ScoredPair&) = default;
};

/// Ground-truth (item, caption) match, e.g. an image and its caption.
struct Positive {
    std::string item;
    std::string caption;

    friend bool operator==(const Positive&, const Positive&) = default;
};

struct LabeledPair {
    std::string item;
    std::string caption;
    bool label = false;

    friend bool operator==(const LabeledPair&, const LabeledPair&) = default;
};

/// Uniform integer in [0, bound) from a 64-bit engine by rejection, so the
/// sequence is the same on every standard library.
std::uint64_t bounded_draw(std::mt19937_64& rng, std::uint64_t bound);

/// Every positive with label true, then for each positive i one negative
/// pairing item i with the caption of a uniformly drawn j != i. Output is
/// interleaved (pos_0, neg_0, pos_1, neg_1, ...). Throws InvalidInput with
/// fewer than two positives.
std::vector<LabeledPair> build_pairs(std::span<const Positive> positives, std::uint64_t seed);

struct RocPoint {
    double fpr = 0.0;
    double tpr = 0.0;

    friend bool operator==(const RocPoint&, const RocPoint&) = default;
};

struct CalibrationReport {
    double threshold = 0.0;
    double accuracy = 0.0;
    std::vector<RocPoint> roc;
    double auc = 0.0;
    std::size_t pair_count = 0;
};

/// Fraction of pairs with (score >= threshold) == label.
double accuracy_at(std::span<const ScoredPair> pairs, double threshold);

/// Candidates are the distinct scores; the answer is the smallest candidate
/// with maximal accuracy. Throws InvalidInput unless both labels occur or a
/// score lies outside [0, 1].
CalibrationReport select_threshold(std::span<const ScoredPair> pairs);

/// One point per distinct score plus the (0,0) and (1,1) anchors, sorted by
/// fpr then tpr. Same preconditions as select_threshold.
std::vector<RocPoint> roc_points(std::span<const ScoredPair> pairs);

/// Trapezoid area under sorted ROC points.
double auc(std::span<const RocPoint> roc);

} // namespace tlr
