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
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "tlr/automaton.hpp"
#include "tlr/checker.hpp"
#include "tlr/clients/chat.hpp"
#include "tlr/clients/detector.hpp"
#include "tlr/clients/translator.hpp"
#include "tlr/detection_matrix.hpp"

namespace tlr {

/// Inclusive frame range. Seconds are derived from the frame indices.
struct Interval {
    std::size_t start_frame = 0;
    std::size_t end_frame = 0;
    double fps = 3.0;

    double start_seconds() const noexcept { return static_cast<double>(start_frame) / fps; }
    double end_seconds() const noexcept { return static_cast<double>(end_frame) / fps; }
    std::size_t length() const noexcept { return end_frame - start_frame + 1; }
    bool contains(const Interval& o) const noexcept {
        return start_frame <= o.start_frame && o.end_frame <= end_frame;
    }

    friend bool operator==(const Interval&, const Interval&) = default;
};

/// Signed frame offsets: alpha <= 0 moves the start back, beta >= 0 moves the end forward.
struct ExtensionSpans {
    std::int64_t alpha = 0;
    std::int64_t beta = 0;

    /// Throws InvalidInput unless alpha <= 0 <= beta.
    void check() const;
    friend bool operator==(const ExtensionSpans&, const ExtensionSpans&) = default;
};

struct RetrievalConfig {
    WindowGeometry geometry;
    BuildConfig build;
    SmoothingParams smoothing;
    /// The loop stops at the first window whose smoothed score exceeds this.
    double tau_stop = 0.7;
    /// Frames handed to the answering model.
    std::size_t frame_budget = 32;
    /// Fixed extension spans; when unset they are inferred from the question.
    std::optional<ExtensionSpans> extension;
    /// Check F(formula) so the matched events may start at any window rather
    /// than at the first one.
    bool anchor_anywhere = true;
    /// Concurrent detector calls per window.
    std::size_t max_in_flight = 4;

    void check() const;
};

/// Formula the retrieval loop model-checks for a translated question.
Formula retrieval_formula(const Formula& f, const RetrievalConfig& cfg);

struct VideoMeta {
    std::size_t frames = 0;
    /// Per-frame image files, if the detector needs them.
    std::vector<std::filesystem::path> images;
};

struct LayerScore {
    double probability = 0.0;
    double smoothed = 0.0;
};

struct RetrievalResult {
    PropositionSet propositions;
    Formula formula;         ///< as translated
    Formula checked_formula; ///< what was model-checked
    std::optional<Interval> raw_interval;
    std::optional<Interval> interval; ///< after extension and clamping
    ExtensionSpans spans;
    SatisfactionResult satisfaction;
    /// Window where the loop broke, or the last window when it ran to the end.
    std::size_t stop_layer = 0;
    bool stopped_early = false;
    /// Prefix the interval was taken from: stop_layer, or the best-scoring
    /// prefix when the threshold was never crossed.
    std::size_t analysed_layer = 0;
    std::vector<LayerScore> scores; ///< one per processed window
    std::vector<std::size_t> sampled_frames;
    std::vector<std::string> diagnostics;
};

/// Frames of the witness from the window where `f` is found to start
/// through accept_layer. The search begins at the last run of positions from
/// which `f` (unanchored) holds on the witness cut at accept_layer, and takes
/// the first window there whose labels touch f's propositions. A window
/// counts when the witness label is also in `boolean_labels`; failing that,
/// the witness label alone decides; failing that, the whole witness span is
/// used.
Interval extract_interval(const Witness& witness, const Formula& f, std::span<const LabelSet> boolean_labels,
                          const WindowGeometry& geometry);

/// Handle for asking a language model about extension spans.
struct LlmHandle {
    clients::ChatTransport* transport = nullptr;
    std::string model;
};

struct ExtensionDecision {
    ExtensionSpans spans;
    std::optional<std::string> warning;
};

/// Keyword rule over whole words "after" / "before" (any case):
/// after -> (0, 2w), before -> (-2w, 0), both -> (-2w, 2w), neither -> `defaults`,
/// where w = window_size * stride frames.
ExtensionSpans keyword_extension(std::string_view question, const WindowGeometry& geometry,
                                 const ExtensionSpans& defaults);

/// Asks the model when a handle is given, falling back to the keyword rule
/// (with a warning) when the reply cannot be used.
ExtensionDecision infer_extension(std::string_view question, const LlmHandle* llm, const WindowGeometry& geometry,
                                  const ExtensionSpans& defaults);

/// (-w, +w) with w = window_size * stride.
ExtensionSpans default_extension(const WindowGeometry& geometry);

struct TrimResult {
    Interval interval;
    std::vector<std::size_t> frames;
};

/// Applies the spans, clamps to [0, video_frames), and samples
/// min(budget, length) frames uniformly with both endpoints included
/// (a single sample takes the middle frame).
TrimResult trim_and_sample(const Interval& interval, const ExtensionSpans& spans, std::size_t video_frames,
                           std::size_t budget);

/// Window list for a video: index, frame range, and images when present.
clients::WindowRef window_ref(std::size_t window, const WindowGeometry& geometry, const VideoMeta& video);

/// The full search loop: translate, score windows, extend the automaton,
/// check, stop early, extract and extend the interval, sample frames.
/// `extension_llm` is consulted only when cfg.extension is unset. When
/// `scores_out` is given it receives the scores gathered before the stop.
RetrievalResult run_pipeline(std::string_view question, clients::Detector& detector, clients::Translator& translator,
                             const VideoMeta& video, const RetrievalConfig& cfg,
                             const LlmHandle* extension_llm = nullptr,
                             std::optional<DetectionMatrix>* scores_out = nullptr);

} // namespace tlr
