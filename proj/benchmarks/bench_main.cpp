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

#include <benchmark/benchmark.h>

#include <random>

#include "tlr/automaton.hpp"
#include "tlr/checker.hpp"
#include "tlr/parse.hpp"

namespace {

using namespace tlr;

std::vector<std::vector<double>> noisy_rows(std::size_t windows, std::size_t props, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    std::vector<std::vector<double>> rows(windows, std::vector<double>(props));
    for (auto& r : rows)
        for (auto& v : r) v = u(rng) < 0.8 ? u(rng) * 0.1 : 0.9 + u(rng) * 0.1;
    return rows;
}

void BM_LayerDistribution(benchmark::State& state) {
    const auto props = static_cast<std::size_t>(state.range(0));
    const auto rows = noisy_rows(64, props, 1);
    BuildConfig cfg;
    std::size_t i = 0;
    for (auto _ : state) benchmark::DoNotOptimize(layer_distribution(rows[i++ % rows.size()], cfg));
}
BENCHMARK(BM_LayerDistribution)->DenseRange(1, 6);

void BM_SatisfactionProbability(benchmark::State& state) {
    const auto windows = static_cast<std::size_t>(state.range(0));
    const PropositionSet props{"a", "b", "c"};
    const auto automaton = build_automaton(DetectionMatrix(noisy_rows(windows, 3, 2), {8, 4, 2.0}), BuildConfig{});
    const auto f = parse_tl("F (p0 & X (!p2 U p1))", props);
    for (auto _ : state) benchmark::DoNotOptimize(satisfaction_probability(automaton, f));
    state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_SatisfactionProbability)->RangeMultiplier(4)->Range(16, 1024)->Complexity();

void BM_Incremental(benchmark::State& state) {
    const auto rows = noisy_rows(256, 3, 3);
    const PropositionSet props{"a", "b", "c"};
    const auto f = parse_tl("F (p0 & F p1)", props);
    BuildConfig cfg;
    for (auto _ : state) {
        VideoAutomaton a(3);
        CheckSession session(f);
        for (const auto& r : rows) {
            a.extend(layer_distribution(r, cfg));
            session.advance(a);
        }
        benchmark::DoNotOptimize(session.probability());
    }
}
BENCHMARK(BM_Incremental);

void BM_Parse(benchmark::State& state) {
    const PropositionSet props{"woman pours hot water over granola", "woman spoons yogurt into bowl",
                               "woman places topping"};
    const std::string text =
        R"((("woman pours hot water over granola" & "woman spoons yogurt into bowl") & F "woman places topping") | )"
        R"(G (!"woman places topping" -> X ("p0" U "p1")))";
    for (auto _ : state) benchmark::DoNotOptimize(parse_tl(text, props));
}
BENCHMARK(BM_Parse);

} // namespace
