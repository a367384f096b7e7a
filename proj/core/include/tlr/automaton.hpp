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
#include <span>
#include <string>
#include <vector>

#include "tlr/detection_matrix.hpp"
#include "tlr/proposition.hpp"

namespace tlr {

struct BuildConfig {
    /// Per-proposition labelling thresholds; missing entries default to 0.5.
    std::vector<double> label_thresholds;
    /// Truth assignments with mass below this are dropped before renormalizing.
    /// Besides bounding growth this keeps background-level detections from
    /// compounding over long videos into spurious satisfaction.
    double prune_epsilon = 0.05;
    /// At most this many assignments survive per window.
    std::size_t max_branches = 32;

    double threshold(PropId id) const noexcept {
        return id < label_thresholds.size() ? label_thresholds[id] : 0.5;
    }
    /// Throws InvalidInput on out-of-range fields.
    void check() const;
};

struct Branch {
    LabelSet labels;
    double probability = 0.0;

    friend bool operator==(const Branch&, const Branch&) = default;
};

/// Truth assignments for one window under per-window independence of the
/// propositions. Zero-mass and sub-epsilon assignments are dropped, the top
/// `max_branches` kept, and the survivors renormalized. Ordered by
/// descending mass, ties by lexicographic label order.
std::vector<Branch> layer_distribution(std::span<const double> z_row, const BuildConfig& cfg);

using StateId = std::uint32_t;

struct State {
    /// Window index; -1 for the initial state.
    std::int64_t layer = -1;
    LabelSet labels;
    /// Mass of this state's assignment within its window.
    double probability = 1.0;

    friend bool operator==(const State&, const State&) = default;
};

struct Transition {
    StateId target = 0;
    double probability = 0.0;

    friend bool operator==(const Transition&, const Transition&) = default;
};

/// Labelled discrete-time Markov chain over windows. State 0 is the initial
/// state; every other state belongs to one layer (window) and the states of
/// a layer are contiguous. The last layer is absorbing.
class VideoAutomaton {
public:
    explicit VideoAutomaton(std::size_t proposition_count = 0);

    static constexpr StateId initial() noexcept { return 0; }

    std::size_t proposition_count() const noexcept { return proposition_count_; }
    std::size_t state_count() const noexcept { return states_.size(); }
    std::size_t layer_count() const noexcept { return layer_begin_.size(); }

    const State& state(StateId id) const { return states_.at(id); }
    const std::vector<State>& states() const noexcept { return states_; }
    const std::vector<Transition>& transitions(StateId id) const { return transitions_.at(id); }

    struct Layer {
        StateId first;
        StateId last; // one past the end
        auto size() const noexcept { return last - first; }
    };
    Layer layer(std::size_t t) const;
    /// States whose successors are the next window: the last layer, or the
    /// initial state while the automaton has no layers.
    Layer frontier() const;

    /// Appends one window whose assignments are `branches`: the previous
    /// frontier loses its self-loops and fans out to every new state, and the
    /// new layer becomes absorbing.
    void extend(const std::vector<Branch>& branches);

    // Unchecked editing, for assembling automata by hand (tests, loaders).
    // Callers are expected to run validate() afterwards.
    std::vector<Transition>& mutable_transitions(StateId id) { return transitions_.at(id); }
    State& mutable_state(StateId id) { return states_.at(id); }

    friend bool operator==(const VideoAutomaton&, const VideoAutomaton&) = default;

private:
    friend VideoAutomaton build_automaton(const DetectionMatrix& z, const BuildConfig& cfg);

    std::size_t proposition_count_ = 0;
    std::vector<State> states_;
    std::vector<std::vector<Transition>> transitions_;
    std::vector<StateId> layer_begin_;
};

/// Returns `automaton` extended by one window built from `z_row`.
VideoAutomaton build_increment(VideoAutomaton automaton, std::span<const double> z_row, const BuildConfig& cfg);

/// Builds every window of `z` in one pass. Equal to folding build_increment
/// over the rows.
VideoAutomaton build_automaton(const DetectionMatrix& z, const BuildConfig& cfg);

struct Violation {
    StateId state = 0;
    std::string rule;
    std::string detail;
};

inline constexpr double kStochasticTolerance = 1e-9;

/// Checks every structural invariant; an empty result means the automaton is
/// well formed. Rules: "initial", "layer", "labels", "probability",
/// "target", "stochasticity", "absorption".
std::vector<Violation> validate(const VideoAutomaton& automaton);

/// Thresholded labels, one set per window: {i : Z[t,i] >= threshold(i)}.
std::vector<LabelSet> boolean_trace(const DetectionMatrix& z, const BuildConfig& cfg);

} // namespace tlr
