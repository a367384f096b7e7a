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

#include "tlr/checker.hpp"

#include <cmath>
#include <functional>
#include <limits>

#include "tlr/progression.hpp"

namespace tlr {

namespace {

void check_inputs(const VideoAutomaton& a, const Formula& f) {
    const auto violations = validate(a);
    if (!violations.empty()) {
        const auto& v = violations.front();
        throw InvalidInput("invalid automaton (" + std::to_string(violations.size()) + " violations), state " +
                           std::to_string(v.state) + " " + v.rule + ": " + v.detail);
    }
    if (auto top = max_atom(f); top && *top >= a.proposition_count()) {
        throw InvalidInput("formula references proposition " + std::to_string(*top) + " but the automaton has " +
                           std::to_string(a.proposition_count()));
    }
}

struct Entry {
    StateId state;
    Formula in;  // obligation this state must meet
    Formula out; // residual after consuming the state's labels
    double value = 0.0;
    std::int64_t best = -1; // argmax successor entry (max-product pass only)
};

struct EntryKey {
    StateId state;
    Formula in;
    bool operator==(const EntryKey&) const = default;
};
struct EntryKeyHash {
    std::size_t operator()(const EntryKey& k) const noexcept {
        return static_cast<std::size_t>(k.in.hash() * 0x9E3779B97F4A7C15ull ^ k.state);
    }
};

// Reachable (state, obligation) pairs, one table per layer.
struct Reach {
    std::vector<std::vector<Entry>> layers;
    std::vector<std::unordered_map<EntryKey, std::size_t, EntryKeyHash>> index;

    std::size_t find(std::size_t t, StateId s, const Formula& in) const {
        return index[t].at(EntryKey{s, in});
    }
};

Reach explore(const VideoAutomaton& a, const Formula& root) {
    const std::size_t L = a.layer_count();
    Reach r;
    r.layers.resize(L);
    r.index.resize(L);
    const auto add = [&](std::size_t t, StateId s, const Formula& in) {
        auto [it, fresh] = r.index[t].try_emplace(EntryKey{s, in}, r.layers[t].size());
        if (fresh) r.layers[t].push_back(Entry{s, in, progress(in, a.state(s).labels)});
    };

    for (const auto& tr : a.transitions(VideoAutomaton::initial())) add(0, tr.target, root);
    for (std::size_t t = 0; t + 1 < L; ++t) {
        for (std::size_t i = 0; i < r.layers[t].size(); ++i) {
            const Entry e = r.layers[t][i];
            if (e.out.is_true() || e.out.is_false()) continue;
            for (const auto& tr : a.transitions(e.state)) add(t + 1, tr.target, e.out);
        }
    }
    return r;
}

// Best continuation mass from each state to the end, with its argmax successor.
std::pair<std::vector<double>, std::vector<StateId>> best_tails(const VideoAutomaton& a) {
    const std::size_t n = a.state_count();
    std::vector<double> tail(n, 1.0);
    std::vector<StateId> next(n, 0);
    const auto frontier = a.frontier();
    for (std::size_t s = n; s-- > 0;) {
        const auto id = static_cast<StateId>(s);
        next[id] = id;
        if (id >= frontier.first && id < frontier.last) continue;
        double best = -1.0;
        for (const auto& tr : a.transitions(id)) {
            const double v = tr.probability * tail[tr.target];
            if (v > best || (v == best && tr.target < next[id])) {
                best = v;
                next[id] = tr.target;
            }
        }
        tail[id] = best;
    }
    return {std::move(tail), std::move(next)};
}

} // namespace

void SmoothingParams::check() const {
    if (!(gamma > 0.0) || !std::isfinite(gamma)) throw InvalidInput("smoothing gamma must be > 0");
    if (!(tau > 0.0 && tau < 1.0)) throw InvalidInput("smoothing tau must be in (0, 1)");
}

double smooth(double c, const SmoothingParams& p) {
    return 1.0 / (1.0 + std::exp(-p.gamma * (c - p.tau)));
}

std::vector<LabelSet> Witness::labels() const {
    std::vector<LabelSet> out;
    out.reserve(steps.size());
    for (const auto& s : steps) out.push_back(s.labels);
    return out;
}

double satisfaction_probability(const VideoAutomaton& a, const Formula& f) {
    check_inputs(a, f);
    const Formula root = simplify(f);
    const std::size_t L = a.layer_count();
    if (L == 0) return final_eval(root) ? 1.0 : 0.0;

    Reach r = explore(a, root);
    for (std::size_t t = L; t-- > 0;) {
        for (auto& e : r.layers[t]) {
            if (e.out.is_true()) e.value = 1.0;
            else if (e.out.is_false()) e.value = 0.0;
            else if (t + 1 == L) e.value = final_eval(e.out) ? 1.0 : 0.0;
            else {
                double sum = 0.0;
                for (const auto& tr : a.transitions(e.state)) {
                    sum += tr.probability * r.layers[t + 1][r.find(t + 1, tr.target, e.out)].value;
                }
                e.value = sum;
            }
        }
    }
    double mu = 0.0;
    for (const auto& tr : a.transitions(VideoAutomaton::initial())) {
        mu += tr.probability * r.layers[0][r.find(0, tr.target, root)].value;
    }
    return std::clamp(mu, 0.0, 1.0);
}

double brute_force_probability(const VideoAutomaton& a, const Formula& f, std::size_t path_budget) {
    check_inputs(a, f);
    const std::size_t L = a.layer_count();
    if (L == 0) return holds(f, {}) ? 1.0 : 0.0;

    // Count paths first so the budget is enforced before any enumeration.
    const auto frontier = a.frontier();
    std::vector<double> paths(a.state_count(), 1.0);
    for (std::size_t s = a.state_count(); s-- > 0;) {
        const auto id = static_cast<StateId>(s);
        if (id >= frontier.first && id < frontier.last) continue;
        double c = 0.0;
        for (const auto& tr : a.transitions(id)) c += paths[tr.target];
        paths[id] = c;
    }
    if (paths[VideoAutomaton::initial()] > static_cast<double>(path_budget)) {
        throw InvalidInput("brute force would enumerate " + std::to_string(paths[0]) + " paths, budget is " +
                           std::to_string(path_budget));
    }

    std::vector<LabelSet> trace;
    trace.reserve(L);
    double total = 0.0;
    const std::function<void(StateId, double)> walk = [&](StateId s, double mass) {
        for (const auto& tr : a.transitions(s)) {
            trace.push_back(a.state(tr.target).labels);
            const double m = mass * tr.probability;
            if (trace.size() == L) {
                if (holds(f, trace)) total += m;
            } else {
                walk(tr.target, m);
            }
            trace.pop_back();
        }
    };
    walk(VideoAutomaton::initial(), 1.0);
    return total;
}

Witness extract_witness(const VideoAutomaton& a, const Formula& f) {
    check_inputs(a, f);
    const Formula root = simplify(f);
    const std::size_t L = a.layer_count();
    if (L == 0) throw InvalidInput("automaton has no windows to extract a witness from");

    Reach r = explore(a, root);
    const auto [tail, tail_next] = best_tails(a);

    for (std::size_t t = L; t-- > 0;) {
        for (auto& e : r.layers[t]) {
            if (e.out.is_true()) e.value = tail[e.state];
            else if (e.out.is_false()) e.value = 0.0;
            else if (t + 1 == L) e.value = final_eval(e.out) ? 1.0 : 0.0;
            else {
                double best = -1.0;
                StateId best_state = std::numeric_limits<StateId>::max();
                for (const auto& tr : a.transitions(e.state)) {
                    const auto idx = r.find(t + 1, tr.target, e.out);
                    const double v = tr.probability * r.layers[t + 1][idx].value;
                    if (v > best || (v == best && tr.target < best_state)) {
                        best = v;
                        best_state = tr.target;
                        e.best = static_cast<std::int64_t>(idx);
                    }
                }
                e.value = best;
            }
        }
    }

    double best = -1.0;
    StateId best_state = std::numeric_limits<StateId>::max();
    std::size_t cursor = 0;
    for (const auto& tr : a.transitions(VideoAutomaton::initial())) {
        const auto idx = r.find(0, tr.target, root);
        const double v = tr.probability * r.layers[0][idx].value;
        if (v > best || (v == best && tr.target < best_state)) {
            best = v;
            best_state = tr.target;
            cursor = idx;
        }
    }
    if (!(best > 0.0)) throw NoSatisfyingPath();

    Witness w;
    w.mass = best;
    w.accept_layer = L - 1;
    bool accepted = false;
    std::size_t t = 0;
    // Follow the obligation-aware argmax chain until the residual becomes
    // true, then the plain best continuation.
    while (true) {
        const Entry& e = r.layers[t][cursor];
        w.steps.push_back(WitnessStep{t, e.state, a.state(e.state).labels});
        if (!accepted && e.out.is_true()) {
            accepted = true;
            w.accept_layer = t;
        }
        if (t + 1 == L) break;
        if (accepted) {
            StateId s = e.state;
            for (++t; t < L; ++t) {
                s = tail_next[s];
                w.steps.push_back(WitnessStep{t, s, a.state(s).labels});
            }
            break;
        }
        cursor = static_cast<std::size_t>(e.best);
        ++t;
    }
    return w;
}

SatisfactionResult check(const VideoAutomaton& a, const Formula& f, const SmoothingParams& smoothing) {
    smoothing.check();
    SatisfactionResult out;
    out.probability = satisfaction_probability(a, f);
    out.smoothed = smooth(out.probability, smoothing);
    if (out.probability > 0.0 && a.layer_count() > 0) out.witness = extract_witness(a, f);
    return out;
}

std::size_t CheckSession::KeyHash::operator()(const Key& k) const noexcept {
    return static_cast<std::size_t>(k.residual.hash() * 0x9E3779B97F4A7C15ull ^ k.state);
}

std::size_t CheckSession::StepKeyHash::operator()(const StepKey& k) const noexcept {
    return static_cast<std::size_t>(k.formula.hash() ^ (k.labels * 0xC2B2AE3D27D4EB4Full));
}

CheckSession::CheckSession(const Formula& f) : formula_(simplify(f)) {
    frontier_.push_back({Key{VideoAutomaton::initial(), formula_}, 1.0});
}

const Formula& CheckSession::progress_cached(const Formula& f, LabelSet labels) {
    auto [it, fresh] = progress_memo_.try_emplace(StepKey{f, labels.mask()});
    if (fresh) it->second = progress(f, labels);
    return it->second;
}

void CheckSession::advance(const VideoAutomaton& a) {
    if (auto top = max_atom(formula_); top && *top >= a.proposition_count()) {
        throw InvalidInput("formula references proposition " + std::to_string(*top) + " outside the automaton");
    }
    for (; layers_ < a.layer_count(); ++layers_) {
        const auto layer = a.layer(layers_);
        std::vector<std::pair<Key, double>> next;
        std::unordered_map<Key, std::size_t, KeyHash> index;
        for (const auto& [key, mass] : frontier_) {
            for (const auto& tr : a.transitions(key.state)) {
                if (tr.target < layer.first || tr.target >= layer.last) {
                    throw InvalidInput("automaton changed underneath a check session");
                }
                const Formula& residual = progress_cached(key.residual, a.state(tr.target).labels);
                const double m = mass * tr.probability;
                if (residual.is_true()) {
                    accepted_ += m;
                } else if (!residual.is_false()) {
                    auto [it, fresh] = index.try_emplace(Key{tr.target, residual}, next.size());
                    if (fresh) next.push_back({Key{tr.target, residual}, m});
                    else next[it->second].second += m;
                }
            }
        }
        frontier_ = std::move(next);
    }
}

double CheckSession::probability() const noexcept {
    double mu = accepted_;
    for (const auto& [key, mass] : frontier_) {
        if (final_eval(key.residual)) mu += mass;
    }
    return std::clamp(mu, 0.0, 1.0);
}

} // namespace tlr
