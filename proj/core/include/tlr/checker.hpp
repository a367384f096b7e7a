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
#include <optional>
#include <unordered_map>
#include <vector>

#include "tlr/automaton.hpp"
#include "tlr/error.hpp"
#include "tlr/formula.hpp"

namespace tlr {

/// Raised by extract_witness when no path of positive mass satisfies the formula.
class NoSatisfyingPath : public Error {
public:
    NoSatisfyingPath() : Error("no satisfying path") {}
};

/// Sigmoid used to turn a satisfaction probability into a thresholdable score.
struct SmoothingParams {
    double gamma = 50.0; ///< steepness, > 0
    double tau = 0.7;    ///< midpoint, in (0, 1)

    void check() const;
};

/// 1 / (1 + exp(-gamma * (c - tau))). Exactly 0.5 at c == tau.
double smooth(double c, const SmoothingParams& p);

struct WitnessStep {
    std::size_t window = 0;
    StateId state = 0;
    LabelSet labels;

    friend bool operator==(const WitnessStep&, const WitnessStep&) = default;
};

/// Most probable satisfying path, one step per window.
struct Witness {
    std::vector<WitnessStep> steps;
    /// First window after which the residual formula is `true`; the last
    /// window when acceptance is only decided at the end of the trace.
    std::size_t accept_layer = 0;
    /// Product of transition probabilities along the path.
    double mass = 0.0;

    std::vector<LabelSet> labels() const;
    friend bool operator==(const Witness&, const Witness&) = default;
};

struct SatisfactionResult {
    double probability = 0.0;
    double smoothed = 0.0;
    std::optional<Witness> witness; ///< present iff probability > 0
};

/// Probability mass of paths whose label trace satisfies `f`. Backward
/// dynamic program memoized on (state, residual formula); the initial state
/// carries no label. Throws InvalidInput on a malformed automaton or on atoms
/// the automaton does not know.
double satisfaction_probability(const VideoAutomaton& automaton, const Formula& f);

/// Limit on root-to-final paths for brute_force_probability.
inline constexpr std::size_t kBruteForcePathBudget = 1'000'000;

/// Enumerates every path and evaluates `f` on its trace with the direct
/// recursive semantics (`holds`). Test oracle for satisfaction_probability.
double brute_force_probability(const VideoAutomaton& automaton, const Formula& f,
                               std::size_t path_budget = kBruteForcePathBudget);

/// Max-product variant of the same dynamic program. Ties go to the lower
/// state index. Throws NoSatisfyingPath when every satisfying path has mass 0.
Witness extract_witness(const VideoAutomaton& automaton, const Formula& f);

/// probability, smoothed score, and witness (when probability > 0).
SatisfactionResult check(const VideoAutomaton& automaton, const Formula& f, const SmoothingParams& smoothing);

/// Forward, incremental evaluation of one formula against a growing
/// automaton. After each `advance` the exact satisfaction probability of the
/// current prefix is available in O(1). Confined to one thread.
class CheckSession {
public:
    explicit CheckSession(const Formula& f);

    /// Consumes all layers of `automaton` not seen yet. The automaton must be
    /// the same one, only ever extended, between calls.
    void advance(const VideoAutomaton& automaton);

    std::size_t layers() const noexcept { return layers_; }
    double probability() const noexcept;
    /// Mass already committed to acceptance (residual became `true`).
    double accepted_mass() const noexcept { return accepted_; }

private:
    struct Key {
        StateId state;
        Formula residual;
        bool operator==(const Key&) const = default;
    };
    struct KeyHash {
        std::size_t operator()(const Key& k) const noexcept;
    };
    struct StepKey {
        Formula formula;
        std::uint64_t labels;
        bool operator==(const StepKey&) const = default;
    };
    struct StepKeyHash {
        std::size_t operator()(const StepKey& k) const noexcept;
    };

    const Formula& progress_cached(const Formula& f, LabelSet labels);

    Formula formula_;
    std::size_t layers_ = 0;
    double accepted_ = 0.0;
    // (frontier state, residual after consuming it) -> mass, in insertion order.
    std::vector<std::pair<Key, double>> frontier_;
    std::unordered_map<StepKey, Formula, StepKeyHash> progress_memo_;
};

} // namespace tlr
