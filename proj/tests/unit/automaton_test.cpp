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

#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "oracles.hpp"
#include "tlr/automaton.hpp"
#include "tlr/calibration.hpp"
#include "tlr/error.hpp"

namespace tlr {
namespace {

BuildConfig eps(double e) {
    BuildConfig c;
    c.prune_epsilon = e;
    return c;
}

TEST(LayerDistribution, CertainDetection) {
    const std::vector<double> z{1.0};
    const auto d = layer_distribution(z, eps(0.0));
    ASSERT_EQ(d.size(), 1u);
    EXPECT_EQ(d[0], (Branch{LabelSet{0}, 1.0}));
}

TEST(LayerDistribution, UniformPair) {
    const std::vector<double> z{0.5, 0.5};
    const auto d = layer_distribution(z, eps(0.0));
    ASSERT_EQ(d.size(), 4u);
    for (const auto& b : d) EXPECT_DOUBLE_EQ(b.probability, 0.25);
    // Equal mass falls back to lexicographic label order.
    EXPECT_EQ(d[0].labels, LabelSet{});
    EXPECT_EQ(d[1].labels, (LabelSet{0}));
    EXPECT_EQ(d[2].labels, (LabelSet{0, 1}));
    EXPECT_EQ(d[3].labels, (LabelSet{1}));
}

TEST(LayerDistribution, PrunesAndRenormalizes) {
    // {0}: .72, {0,1}: .18, {}: .08 survive eps .05; {1}: .02 is pruned.
    const std::vector<double> z{0.9, 0.2};
    const auto d = layer_distribution(z, eps(0.05));
    ASSERT_EQ(d.size(), 3u);
    EXPECT_EQ(d[0].labels, (LabelSet{0}));
    EXPECT_NEAR(d[0].probability, 0.72 / 0.98, 1e-15);
    EXPECT_EQ(d[1].labels, (LabelSet{0, 1}));
    EXPECT_NEAR(d[1].probability, 0.18 / 0.98, 1e-15);
    EXPECT_EQ(d[2].labels, LabelSet{});
    EXPECT_NEAR(d[2].probability, 0.08 / 0.98, 1e-15);
}

TEST(LayerDistribution, BranchCap) {
    BuildConfig c = eps(0.0);
    c.max_branches = 2;
    const std::vector<double> z{0.9, 0.2};
    const auto d = layer_distribution(z, c);
    ASSERT_EQ(d.size(), 2u);
    EXPECT_NEAR(d[0].probability, 0.72 / 0.90, 1e-15);
    EXPECT_NEAR(d[1].probability, 0.18 / 0.90, 1e-15);
}

TEST(LayerDistribution, ZeroMassAssignmentsDisappear) {
    const std::vector<double> z{1.0, 0.0, 0.5};
    const auto d = layer_distribution(z, eps(0.0));
    ASSERT_EQ(d.size(), 2u);
    EXPECT_EQ(d[0].labels, (LabelSet{0}));
    EXPECT_EQ(d[1].labels, (LabelSet{0, 2}));
}

TEST(LayerDistribution, Errors) {
    const std::vector<double> bad{1.2};
    EXPECT_THROW(layer_distribution(bad, eps(0.0)), InvalidInput);
    const std::vector<double> z{0.5, 0.5};
    EXPECT_THROW(layer_distribution(z, eps(0.3)), InvalidInput); // everything pruned
    EXPECT_THROW(layer_distribution(z, eps(1.0)), InvalidInput);
    BuildConfig c;
    c.max_branches = 0;
    EXPECT_THROW(layer_distribution(z, c), InvalidInput);
}

TEST(LayerDistribution, MatchesIndependentProducts) {
    std::mt19937_64 rng(5);
    for (int i = 0; i < 200; ++i) {
        const auto z = testing::random_row(rng, 4);
        const auto d = layer_distribution(z, eps(0.0));
        double kept = 0.0;
        for (std::uint64_t m = 0; m < 16; ++m) {
            double p = 1.0;
            for (int k = 0; k < 4; ++k) p *= (m >> k) & 1 ? z[k] : 1 - z[k];
            if (p > 0) kept += p;
        }
        for (const auto& b : d) {
            double p = 1.0;
            for (int k = 0; k < 4; ++k) p *= b.labels.contains(k) ? z[k] : 1 - z[k];
            EXPECT_NEAR(b.probability, p / kept, 1e-12);
        }
        for (std::size_t k = 1; k < d.size(); ++k) EXPECT_GE(d[k - 1].probability, d[k].probability);
    }
}

TEST(BuildIncrement, EmptyThenCertain) {
    const std::vector<double> one{1.0};
    const auto a = build_increment(VideoAutomaton(1), one, eps(0.0));
    ASSERT_EQ(a.state_count(), 2u);
    EXPECT_EQ(a.transitions(0), (std::vector<Transition>{{1, 1.0}}));
    EXPECT_EQ(a.transitions(1), (std::vector<Transition>{{1, 1.0}}));
    EXPECT_EQ(a.state(1).labels, (LabelSet{0}));
    EXPECT_TRUE(validate(a).empty());
}

TEST(BuildIncrement, DeterministicChain) {
    const std::vector<double> one{1.0}, zero{0.0};
    auto a = build_increment(VideoAutomaton(1), one, eps(0.0));
    a = build_increment(std::move(a), zero, eps(0.0));
    ASSERT_EQ(a.state_count(), 3u);
    EXPECT_EQ(a.transitions(0), (std::vector<Transition>{{1, 1.0}}));
    EXPECT_EQ(a.transitions(1), (std::vector<Transition>{{2, 1.0}}));
    EXPECT_EQ(a.transitions(2), (std::vector<Transition>{{2, 1.0}}));
    EXPECT_EQ(a.state(2).labels, LabelSet{});
}

TEST(BuildIncrement, ThreeCoinFlips) {
    const std::vector<double> half{0.5};
    VideoAutomaton a(1);
    for (int t = 0; t < 3; ++t) {
        a = build_increment(std::move(a), half, eps(0.0));
        EXPECT_TRUE(validate(a).empty());
    }
    EXPECT_EQ(a.state_count(), 7u);
    EXPECT_EQ(a.layer_count(), 3u);
}

TEST(BuildIncrement, RejectsWidthMismatch) {
    const std::vector<double> z{0.5, 0.5};
    EXPECT_THROW(build_increment(VideoAutomaton(1), z, eps(0.0)), InvalidInput);
}

TEST(BuildAutomaton, EqualsIncrementalFold) {
    std::mt19937_64 rng(17);
    for (int i = 0; i < 50; ++i) {
        const std::size_t T = 1 + rng() % 6, n = 1 + rng() % 3;
        std::vector<std::vector<double>> rows;
        for (std::size_t t = 0; t < T; ++t) rows.push_back(testing::random_row(rng, n));
        const DetectionMatrix z(rows, {});
        VideoAutomaton folded(n);
        for (std::size_t t = 0; t < T; ++t) folded = build_increment(std::move(folded), z.row(t), BuildConfig{});
        const auto one_pass = build_automaton(z, BuildConfig{});
        EXPECT_EQ(one_pass, folded);
        EXPECT_TRUE(validate(one_pass).empty());
        std::size_t bound = 1;
        for (std::size_t t = 0; t < T; ++t) bound += std::min<std::size_t>(std::size_t{1} << n, 32);
        EXPECT_LE(one_pass.state_count(), bound);
    }
}

TEST(BuildAutomaton, ZeroOneMatrixIsASinglePath) {
    const DetectionMatrix z({{1, 0}, {0, 0}, {1, 1}, {0, 1}}, {});
    const auto a = build_automaton(z, eps(0.0));
    EXPECT_EQ(a.state_count(), 5u);
    const auto trace = boolean_trace(z, eps(0.0));
    StateId s = 0;
    for (std::size_t t = 0; t < 4; ++t) {
        ASSERT_EQ(a.transitions(s).size(), 1u);
        s = a.transitions(s)[0].target;
        EXPECT_EQ(a.state(s).labels, trace[t]);
    }
}

TEST(Validate, StochasticityViolation) {
    const std::vector<double> half{0.5};
    auto a = build_increment(VideoAutomaton(1), half, eps(0.0));
    a = build_increment(std::move(a), half, eps(0.0));
    a.mutable_transitions(1)[0].probability = 0.4; // outgoing now sums to 0.9
    const auto v = validate(a);
    ASSERT_EQ(v.size(), 1u);
    EXPECT_EQ(v[0].rule, "stochasticity");
    EXPECT_EQ(v[0].state, 1u);
}

TEST(Validate, AbsorptionViolation) {
    const std::vector<double> one{1.0};
    auto a = build_increment(VideoAutomaton(1), one, eps(0.0));
    a.mutable_transitions(1).clear();
    const auto v = validate(a);
    ASSERT_EQ(v.size(), 1u);
    EXPECT_EQ(v[0].rule, "absorption");
}

TEST(Validate, OtherRules) {
    const std::vector<double> half{0.5};
    auto a = build_increment(VideoAutomaton(1), half, eps(0.0));
    a = build_increment(std::move(a), half, eps(0.0));
    {
        auto b = a;
        b.mutable_transitions(1)[0].target = 99;
        EXPECT_FALSE(validate(b).empty());
        EXPECT_EQ(validate(b)[0].rule, "target");
    }
    {
        auto b = a;
        b.mutable_state(2).labels = LabelSet{5};
        EXPECT_EQ(validate(b).at(0).rule, "labels");
    }
    {
        auto b = a;
        b.mutable_state(0).labels = LabelSet{0};
        EXPECT_EQ(validate(b).at(0).rule, "initial");
    }
    {
        auto b = a;
        b.mutable_state(3).layer = 0;
        EXPECT_EQ(validate(b).at(0).rule, "layer");
    }
    {
        auto b = a;
        b.mutable_state(1).probability = 0.0;
        EXPECT_EQ(validate(b).at(0).rule, "probability");
    }
}

TEST(BooleanTrace, Thresholds) {
    const DetectionMatrix z({{0.9, 0.1}, {0.0, 0.0}, {0.5, 0.49}}, {});
    const auto t = boolean_trace(z, BuildConfig{});
    EXPECT_EQ(t, (std::vector<LabelSet>{LabelSet{0}, LabelSet{}, LabelSet{0}}));
    BuildConfig c;
    c.label_thresholds = {0.95, 0.05};
    EXPECT_EQ(boolean_trace(z, c), (std::vector<LabelSet>{LabelSet{1}, LabelSet{}, LabelSet{1}}));
}

TEST(BooleanTrace, CalibratedThresholdMatchesDirectApplication) {
    std::mt19937_64 rng(23);
    std::uniform_real_distribution<double> u(0, 1);
    std::vector<ScoredPair> pairs;
    for (int i = 0; i < 200; ++i) {
        const bool label = i % 2 == 0;
        pairs.push_back({std::clamp(u(rng) * 0.6 + (label ? 0.4 : 0.0), 0.0, 1.0), label});
    }
    const double theta = select_threshold(pairs).threshold;
    std::vector<std::vector<double>> rows;
    for (const auto& p : pairs) rows.push_back({p.score});
    const DetectionMatrix z(rows, {});
    BuildConfig c;
    c.label_thresholds = {theta};
    const auto trace = boolean_trace(z, c);
    for (std::size_t i = 0; i < pairs.size(); ++i) EXPECT_EQ(trace[i].contains(0), pairs[i].score >= theta);
}

TEST(DetectionMatrix, ShapeAndErrors) {
    EXPECT_THROW(DetectionMatrix({}, {}), InvalidInput);
    EXPECT_THROW(DetectionMatrix({{0.5}, {0.5, 0.5}}, {}), InvalidInput);
    EXPECT_THROW(DetectionMatrix({{-0.1}}, {}), InvalidInput);
    EXPECT_THROW(DetectionMatrix({{std::nan("")}}, {}), InvalidInput);
    WindowGeometry g;
    g.stride = 0;
    EXPECT_THROW(DetectionMatrix({{0.5}}, g), InvalidInput);
    DetectionMatrix z({{0.1, 0.2}}, {});
    const std::vector<double> row{0.3, 0.4};
    z.append_row(row);
    EXPECT_EQ(z.windows(), 2u);
    EXPECT_DOUBLE_EQ(z.at(1, 1), 0.4);
    EXPECT_EQ(z.covered_frames(), 6u);
}

TEST(DetectionMatrix, FrameScoresUseWindowMaximum) {
    WindowGeometry g{3, 3, 3.0};
    const std::vector<std::vector<double>> frames{{0.1}, {0.7}, {0.2}, {0.0}, {0.3}, {0.1}, {0.9}};
    const auto z = DetectionMatrix::from_frame_scores(frames, g);
    ASSERT_EQ(z.windows(), 2u); // the seventh frame does not fill a window
    EXPECT_DOUBLE_EQ(z.at(0, 0), 0.7);
    EXPECT_DOUBLE_EQ(z.at(1, 0), 0.3);
    WindowGeometry overlap{3, 1, 3.0};
    EXPECT_EQ(DetectionMatrix::from_frame_scores(frames, overlap).windows(), 5u);
}

TEST(WindowGeometry, Mapping) {
    WindowGeometry g{10, 10, 3.0};
    EXPECT_EQ(g.first_frame(3), 30u);
    EXPECT_EQ(g.last_frame(3), 39u);
    EXPECT_EQ(g.window_count(9), 0u);
    EXPECT_EQ(g.window_count(10), 1u);
    EXPECT_EQ(g.window_count(39), 3u);
}

} // namespace
} // namespace tlr
