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

#include "tlr/automaton.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

#include "tlr/error.hpp"

namespace tlr {

namespace {

// Enumeration refuses to materialize more partial assignments than this.
constexpr std::size_t kMaxAssignments = std::size_t{1} << 22;

void enumerate(std::span<const double> z, std::size_t i, std::uint64_t mask, double mass, double epsilon,
               std::vector<Branch>& out) {
    // The mass of a partial assignment bounds every completion, so pruning
    // here drops exactly the assignments below epsilon.
    if (mass <= 0.0 || mass < epsilon) return;
    if (i == z.size()) {
        if (out.size() >= kMaxAssignments) {
            throw InvalidInput("window has more than " + std::to_string(kMaxAssignments) +
                               " assignments above prune_epsilon; raise prune_epsilon");
        }
        out.push_back(Branch{LabelSet(mask), mass});
        return;
    }
    enumerate(z, i + 1, mask, mass * (1.0 - z[i]), epsilon, out);
    enumerate(z, i + 1, mask | (std::uint64_t{1} << i), mass * z[i], epsilon, out);
}

std::string fmt(double v) {
    std::ostringstream os;
    os.precision(17);
    os << v;
    return os.str();
}

} // namespace

void BuildConfig::check() const {
    for (std::size_t i = 0; i < label_thresholds.size(); ++i) {
        const double t = label_thresholds[i];
        if (!(t >= 0.0 && t <= 1.0)) throw InvalidInput("label threshold " + std::to_string(i) + " outside [0, 1]");
    }
    if (!(prune_epsilon >= 0.0 && prune_epsilon < 1.0)) throw InvalidInput("prune_epsilon must be in [0, 1)");
    if (max_branches < 1) throw InvalidInput("max_branches must be >= 1");
}

std::vector<Branch> layer_distribution(std::span<const double> z_row, const BuildConfig& cfg) {
    cfg.check();
    check_scores(z_row);
    if (z_row.size() > kMaxPropositions) throw InvalidInput("too many propositions in one window");

    std::vector<Branch> out;
    enumerate(z_row, 0, 0, 1.0, cfg.prune_epsilon, out);
    if (out.empty()) {
        throw InvalidInput("all truth assignments pruned; prune_epsilon or max_branches too aggressive");
    }
    std::sort(out.begin(), out.end(), [](const Branch& a, const Branch& b) {
        if (a.probability != b.probability) return a.probability > b.probability;
        return lexicographic_compare(a.labels, b.labels) < 0;
    });
    if (out.size() > cfg.max_branches) out.resize(cfg.max_branches);

    double total = 0.0;
    for (const auto& b : out) total += b.probability;
    for (auto& b : out) b.probability /= total;
    return out;
}

VideoAutomaton::VideoAutomaton(std::size_t proposition_count) : proposition_count_(proposition_count) {
    if (proposition_count > kMaxPropositions) throw InvalidInput("too many propositions");
    states_.push_back(State{});
    transitions_.push_back({Transition{initial(), 1.0}});
}

VideoAutomaton::Layer VideoAutomaton::layer(std::size_t t) const {
    if (t >= layer_begin_.size()) throw InvalidInput("layer " + std::to_string(t) + " out of range");
    const StateId first = layer_begin_[t];
    const StateId last = t + 1 < layer_begin_.size() ? layer_begin_[t + 1] : static_cast<StateId>(states_.size());
    return {first, last};
}

VideoAutomaton::Layer VideoAutomaton::frontier() const {
    if (layer_begin_.empty()) return {initial(), initial() + 1};
    return layer(layer_begin_.size() - 1);
}

void VideoAutomaton::extend(const std::vector<Branch>& branches) {
    if (branches.empty()) throw InvalidInput("cannot extend with an empty layer");
    const Layer prev = frontier();
    const auto t = static_cast<std::int64_t>(layer_begin_.size());
    const auto first = static_cast<StateId>(states_.size());

    std::vector<Transition> fan_out;
    fan_out.reserve(branches.size());
    for (std::size_t i = 0; i < branches.size(); ++i) {
        fan_out.push_back(Transition{static_cast<StateId>(first + i), branches[i].probability});
    }
    for (StateId s = prev.first; s < prev.last; ++s) transitions_[s] = fan_out;

    layer_begin_.push_back(first);
    for (std::size_t i = 0; i < branches.size(); ++i) {
        const auto id = static_cast<StateId>(first + i);
        states_.push_back(State{t, branches[i].labels, branches[i].probability});
        transitions_.push_back({Transition{id, 1.0}});
    }
}

VideoAutomaton build_increment(VideoAutomaton automaton, std::span<const double> z_row, const BuildConfig& cfg) {
    if (z_row.size() != automaton.proposition_count()) {
        throw InvalidInput("row has " + std::to_string(z_row.size()) + " scores for an automaton over " +
                           std::to_string(automaton.proposition_count()) + " propositions");
    }
    automaton.extend(layer_distribution(z_row, cfg));
    return automaton;
}

VideoAutomaton build_automaton(const DetectionMatrix& z, const BuildConfig& cfg) {
    std::vector<std::vector<Branch>> layers;
    layers.reserve(z.windows());
    std::size_t total = 1;
    for (std::size_t t = 0; t < z.windows(); ++t) {
        layers.push_back(layer_distribution(z.row(t), cfg));
        total += layers.back().size();
    }

    VideoAutomaton a(z.propositions());
    a.states_.reserve(total);
    a.transitions_.resize(total);
    a.layer_begin_.reserve(layers.size());

    StateId prev_first = VideoAutomaton::initial();
    StateId prev_last = prev_first + 1;
    for (std::size_t t = 0; t < layers.size(); ++t) {
        const auto first = static_cast<StateId>(a.states_.size());
        a.layer_begin_.push_back(first);
        std::vector<Transition> fan_out;
        for (const auto& b : layers[t]) {
            fan_out.push_back(Transition{static_cast<StateId>(a.states_.size()), b.probability});
            a.states_.push_back(State{static_cast<std::int64_t>(t), b.labels, b.probability});
        }
        for (StateId s = prev_first; s < prev_last; ++s) a.transitions_[s] = fan_out;
        prev_first = first;
        prev_last = static_cast<StateId>(a.states_.size());
    }
    for (StateId s = prev_first; s < prev_last; ++s) a.transitions_[s] = {Transition{s, 1.0}};
    return a;
}

std::vector<Violation> validate(const VideoAutomaton& a) {
    std::vector<Violation> out;
    const auto add = [&](StateId s, const char* rule, std::string detail) {
        out.push_back(Violation{s, rule, std::move(detail)});
    };
    const std::size_t n = a.state_count();
    if (n == 0) {
        add(0, "initial", "automaton has no initial state");
        return out;
    }
    const State& q0 = a.state(VideoAutomaton::initial());
    if (q0.layer != -1 || !q0.labels.empty()) add(0, "initial", "initial state must have layer -1 and no labels");

    const std::size_t layers = a.layer_count();
    for (std::size_t t = 0; t < layers; ++t) {
        const auto l = a.layer(t);
        if (l.size() == 0) add(l.first, "layer", "layer " + std::to_string(t) + " is empty");
        for (StateId s = l.first; s < l.last; ++s) {
            if (a.state(s).layer != static_cast<std::int64_t>(t)) {
                add(s, "layer", "state records layer " + std::to_string(a.state(s).layer) + " but sits in layer " +
                                    std::to_string(t));
            }
        }
    }
    if (layers > 0 && a.layer(0).first != 1) add(1, "layer", "layer 0 must start right after the initial state");

    const auto frontier = a.frontier();
    for (StateId s = 0; s < n; ++s) {
        const State& st = a.state(s);
        if (s != 0 && !(st.probability > 0.0 && st.probability <= 1.0)) {
            add(s, "probability", "branch probability " + fmt(st.probability) + " outside (0, 1]");
        }
        if (a.proposition_count() < 64 && (st.labels.mask() >> a.proposition_count()) != 0) {
            add(s, "labels", "label set " + to_string(st.labels) + " names unknown propositions");
        }
        const auto& out_edges = a.transitions(s);
        const bool is_final = s >= frontier.first && s < frontier.last;
        double sum = 0.0;
        for (const auto& tr : out_edges) {
            if (!(tr.probability > 0.0 && tr.probability <= 1.0)) {
                add(s, "probability", "transition to " + std::to_string(tr.target) + " has probability " +
                                          fmt(tr.probability));
            }
            if (tr.target >= n) {
                add(s, "target", "transition to missing state " + std::to_string(tr.target));
                continue;
            }
            if (!is_final && a.state(tr.target).layer != st.layer + 1) {
                add(s, "target", "transition to state " + std::to_string(tr.target) + " skips or reverses layers");
            }
            sum += tr.probability;
        }
        if (is_final) {
            if (out_edges.size() != 1 || out_edges.front().target != s || out_edges.front().probability != 1.0) {
                add(s, "absorption", "final-layer state must carry a single self-loop of probability 1");
            }
        } else if (std::abs(sum - 1.0) > kStochasticTolerance) {
            add(s, "stochasticity", "outgoing mass " + fmt(sum) + " differs from 1");
        }
    }
    return out;
}

std::vector<LabelSet> boolean_trace(const DetectionMatrix& z, const BuildConfig& cfg) {
    std::vector<LabelSet> out;
    out.reserve(z.windows());
    for (std::size_t t = 0; t < z.windows(); ++t) {
        LabelSet labels;
        const auto row = z.row(t);
        for (std::size_t i = 0; i < row.size(); ++i) {
            if (row[i] >= cfg.threshold(static_cast<PropId>(i))) labels.insert(static_cast<PropId>(i));
        }
        out.push_back(labels);
    }
    return out;
}

} // namespace tlr
