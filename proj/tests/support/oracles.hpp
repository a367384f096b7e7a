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

// Test-side oracles, written independently of the library's evaluators.

#include <cstddef>
#include <cstdint>
#include <functional>
#include <random>
#include <span>
#include <stdexcept>
#include <vector>

#include "tlr/automaton.hpp"
#include "tlr/formula.hpp"

namespace tlr::testing {

// Truth of `f` at every position 0..k of a k-step trace, filled bottom-up over
// subformulas and right-to-left over positions. Position k is the empty
// suffix: atoms, X, F and U are false there, G is true.
inline std::vector<char> truth_table(const Formula& f, std::span<const LabelSet> trace) {
    const std::size_t k = trace.size();
    std::vector<char> v(k + 1, 0);
    switch (f.op()) {
    case Op::True: std::fill(v.begin(), v.end(), 1); break;
    case Op::False: break;
    case Op::Atom:
        for (std::size_t i = 0; i < k; ++i) v[i] = trace[i].contains(f.atom_id());
        break;
    case Op::Not: {
        auto a = truth_table(f.lhs(), trace);
        for (std::size_t i = 0; i <= k; ++i) v[i] = !a[i];
        break;
    }
    case Op::And:
    case Op::Or:
    case Op::Implies: {
        auto a = truth_table(f.lhs(), trace), b = truth_table(f.rhs(), trace);
        for (std::size_t i = 0; i <= k; ++i) {
            v[i] = f.op() == Op::And ? (a[i] && b[i]) : f.op() == Op::Or ? (a[i] || b[i]) : (!a[i] || b[i]);
        }
        break;
    }
    case Op::Next: {
        auto a = truth_table(f.lhs(), trace);
        for (std::size_t i = 0; i < k; ++i) v[i] = a[i + 1];
        break;
    }
    case Op::Eventually: {
        auto a = truth_table(f.lhs(), trace);
        for (std::size_t i = k; i-- > 0;) v[i] = a[i] || v[i + 1];
        break;
    }
    case Op::Always: {
        auto a = truth_table(f.lhs(), trace);
        v[k] = 1;
        for (std::size_t i = k; i-- > 0;) v[i] = a[i] && v[i + 1];
        break;
    }
    case Op::Until: {
        auto a = truth_table(f.lhs(), trace), b = truth_table(f.rhs(), trace);
        for (std::size_t i = k; i-- > 0;) v[i] = b[i] || (a[i] && v[i + 1]);
        break;
    }
    }
    return v;
}

inline bool oracle_holds(const Formula& f, std::span<const LabelSet> trace) { return truth_table(f, trace)[0] != 0; }

// Sum over every q0-to-final path of its probability when the label trace
// satisfies f. Walks transitions directly and never calls the checker.
inline double oracle_probability(const VideoAutomaton& a, const Formula& f) {
    const std::size_t L = a.layer_count();
    if (L == 0) return oracle_holds(f, {}) ? 1.0 : 0.0;
    double total = 0.0;
    std::vector<LabelSet> trace;
    std::function<void(StateId, double)> walk = [&](StateId s, double mass) {
        if (trace.size() == L) {
            if (oracle_holds(f, trace)) total += mass;
            return;
        }
        for (const auto& tr : a.transitions(s)) {
            trace.push_back(a.state(tr.target).labels);
            walk(tr.target, mass * tr.probability);
            trace.pop_back();
        }
    };
    walk(VideoAutomaton::initial(), 1.0);
    return total;
}

// Uniform random formula whose depth in nodes is at most `max_depth`.
inline Formula random_formula(std::mt19937_64& rng, std::size_t max_depth, std::size_t props) {
    auto pick = [&](std::uint64_t n) { return static_cast<std::size_t>(rng() % n); };
    if (max_depth <= 1 || pick(4) == 0) {
        const auto r = pick(props + 2);
        if (r == props) return Formula::top();
        if (r == props + 1) return Formula::bottom();
        return Formula::atom(static_cast<PropId>(r));
    }
    const std::size_t d = max_depth - 1;
    switch (pick(8)) {
    case 0: return Formula::negation(random_formula(rng, d, props));
    case 1: return Formula::next(random_formula(rng, d, props));
    case 2: return Formula::eventually(random_formula(rng, d, props));
    case 3: return Formula::always(random_formula(rng, d, props));
    case 4: return Formula::conjunction(random_formula(rng, d, props), random_formula(rng, d, props));
    case 5: return Formula::disjunction(random_formula(rng, d, props), random_formula(rng, d, props));
    case 6: return Formula::implication(random_formula(rng, d, props), random_formula(rng, d, props));
    default: return Formula::until(random_formula(rng, d, props), random_formula(rng, d, props));
    }
}

// Every formula over {true, false, p0..p(props-1)} with node depth <= depth.
inline std::vector<Formula> all_formulas(std::size_t depth, std::size_t props) {
    std::vector<Formula> level{Formula::top(), Formula::bottom()};
    for (PropId i = 0; i < props; ++i) level.push_back(Formula::atom(i));
    for (std::size_t d = 2; d <= depth; ++d) {
        std::vector<Formula> next = {Formula::top(), Formula::bottom()};
        for (PropId i = 0; i < props; ++i) next.push_back(Formula::atom(i));
        for (const auto& a : level) {
            next.push_back(Formula::negation(a));
            next.push_back(Formula::next(a));
            next.push_back(Formula::eventually(a));
            next.push_back(Formula::always(a));
        }
        for (const auto& a : level) {
            for (const auto& b : level) {
                next.push_back(Formula::conjunction(a, b));
                next.push_back(Formula::disjunction(a, b));
                next.push_back(Formula::implication(a, b));
                next.push_back(Formula::until(a, b));
            }
        }
        level = std::move(next);
    }
    return level;
}

// Every trace of length <= max_len over `props` propositions.
inline std::vector<std::vector<LabelSet>> all_traces(std::size_t max_len, std::size_t props) {
    std::vector<std::vector<LabelSet>> out{{}};
    std::vector<std::vector<LabelSet>> frontier{{}};
    const std::uint64_t labels = std::uint64_t{1} << props;
    for (std::size_t len = 1; len <= max_len; ++len) {
        std::vector<std::vector<LabelSet>> grown;
        for (const auto& t : frontier) {
            for (std::uint64_t m = 0; m < labels; ++m) {
                auto u = t;
                u.push_back(LabelSet(m));
                grown.push_back(std::move(u));
            }
        }
        out.insert(out.end(), grown.begin(), grown.end());
        frontier = std::move(grown);
    }
    return out;
}

// Random detection row: a mix of certain, impossible and uniform scores.
inline std::vector<double> random_row(std::mt19937_64& rng, std::size_t props) {
    std::uniform_real_distribution<double> u(0.0, 1.0);
    std::vector<double> row(props);
    for (auto& z : row) {
        const auto kind = rng() % 6;
        z = kind == 0 ? 0.0 : kind == 1 ? 1.0 : u(rng);
    }
    return row;
}

inline VideoAutomaton random_automaton(std::mt19937_64& rng, std::size_t layers, std::size_t props,
                                       const BuildConfig& cfg) {
    VideoAutomaton a(props);
    for (std::size_t t = 0; t < layers; ++t) a = build_increment(std::move(a), random_row(rng, props), cfg);
    return a;
}

} // namespace tlr::testing
