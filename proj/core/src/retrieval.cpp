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

#include "tlr/retrieval.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <regex>
#include <string>

#include "tlr/clients/prompts.hpp"
#include "tlr/error.hpp"
#include "tlr/log.hpp"

namespace tlr {

void ExtensionSpans::check() const {
    if (alpha > 0) throw InvalidInput("extension alpha must be <= 0 (it moves the start backward)");
    if (beta < 0) throw InvalidInput("extension beta must be >= 0 (it moves the end forward)");
}

void RetrievalConfig::check() const {
    geometry.check();
    build.check();
    smoothing.check();
    if (!(tau_stop >= 0.0 && tau_stop < 1.0)) throw InvalidInput("tau_stop must be in [0, 1)");
    if (frame_budget == 0) throw InvalidInput("frame_budget must be at least 1");
    if (max_in_flight == 0) throw InvalidInput("max_in_flight must be at least 1");
    if (extension) extension->check();
}

Formula retrieval_formula(const Formula& f, const RetrievalConfig& cfg) {
    return simplify(cfg.anchor_anywhere ? Formula::eventually(f) : f);
}

namespace {

// Truth of `f` at every position of `trace`, including the empty suffix at
// trace.size(). Same semantics as holds(), linear in trace length per node.
std::vector<char> truth_by_position(const Formula& f, std::span<const LabelSet> trace) {
    const std::size_t n = trace.size();
    std::vector<char> v(n + 1, 0);
    switch (f.op()) {
    case Op::True: std::fill(v.begin(), v.end(), 1); break;
    case Op::False: break;
    case Op::Atom:
        for (std::size_t i = 0; i < n; ++i) v[i] = trace[i].contains(f.atom_id());
        break;
    case Op::Not: {
        const auto a = truth_by_position(f.lhs(), trace);
        for (std::size_t i = 0; i <= n; ++i) v[i] = !a[i];
        break;
    }
    case Op::And:
    case Op::Or:
    case Op::Implies: {
        const auto a = truth_by_position(f.lhs(), trace), b = truth_by_position(f.rhs(), trace);
        for (std::size_t i = 0; i <= n; ++i) {
            v[i] = f.op() == Op::And ? (a[i] && b[i]) : f.op() == Op::Or ? (a[i] || b[i]) : (!a[i] || b[i]);
        }
        break;
    }
    case Op::Next: {
        const auto a = truth_by_position(f.lhs(), trace);
        for (std::size_t i = 0; i < n; ++i) v[i] = a[i + 1];
        break;
    }
    case Op::Eventually: {
        const auto a = truth_by_position(f.lhs(), trace);
        for (std::size_t i = n; i-- > 0;) v[i] = a[i] || v[i + 1];
        break;
    }
    case Op::Always: {
        const auto a = truth_by_position(f.lhs(), trace);
        v[n] = 1;
        for (std::size_t i = n; i-- > 0;) v[i] = a[i] && v[i + 1];
        break;
    }
    case Op::Until: {
        const auto a = truth_by_position(f.lhs(), trace), b = truth_by_position(f.rhs(), trace);
        for (std::size_t i = n; i-- > 0;) v[i] = b[i] || (a[i] && v[i + 1]);
        break;
    }
    }
    return v;
}

} // namespace

Interval extract_interval(const Witness& witness, const Formula& f, std::span<const LabelSet> boolean_labels,
                          const WindowGeometry& geometry) {
    if (witness.steps.empty()) throw InvalidInput("empty witness");
    geometry.check();
    const LabelSet relevant = propositions_of(f);

    const std::size_t end_layer = std::min(witness.accept_layer, witness.steps.size() - 1);

    // Where on the witness (cut at the accepting layer) does f start to hold?
    // Take the last run of such positions: an earlier, unrelated detection of
    // one of f's propositions then cannot pull the start forward.
    std::vector<LabelSet> path;
    for (std::size_t t = 0; t <= end_layer; ++t) path.push_back(witness.steps[t].labels);
    const auto sat = truth_by_position(f, path);
    std::size_t from = 0;
    for (std::size_t t = end_layer + 1; t-- > 0;) {
        if (!sat[t]) continue;
        from = t;
        while (from > 0 && sat[from - 1]) --from;
        break;
    }

    std::optional<std::size_t> start;
    for (std::size_t t = from; t <= end_layer && !start; ++t) {
        const auto& step = witness.steps[t];
        if (step.window < boolean_labels.size() && step.labels.intersects(relevant & boolean_labels[step.window])) {
            start = t;
        }
    }
    for (std::size_t t = from; t <= end_layer && !start; ++t) {
        if (witness.steps[t].labels.intersects(relevant)) start = t;
    }

    std::size_t first = witness.steps.front().window;
    std::size_t last = witness.steps[end_layer].window;
    if (start) first = witness.steps[*start].window;
    else last = witness.steps.back().window; // degenerate: nothing relevant on the path

    return Interval{geometry.first_frame(first), geometry.last_frame(last), geometry.fps};
}

ExtensionSpans default_extension(const WindowGeometry& geometry) {
    const auto w = static_cast<std::int64_t>(geometry.window_size * geometry.stride);
    return {-w, w};
}

namespace {

bool has_word(std::string_view text, std::string_view word) {
    std::string lower(text);
    std::transform(lower.begin(), lower.end(), lower.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    auto is_alpha = [](char c) { return std::isalpha(static_cast<unsigned char>(c)) != 0; };
    for (std::size_t pos = lower.find(word); pos != std::string::npos; pos = lower.find(word, pos + 1)) {
        const bool left_ok = pos == 0 || !is_alpha(lower[pos - 1]);
        const std::size_t after = pos + word.size();
        const bool right_ok = after >= lower.size() || !is_alpha(lower[after]);
        if (left_ok && right_ok) return true;
    }
    return false;
}

std::optional<ExtensionSpans> parse_extension_reply(const std::string& text) {
    static const std::regex backward(R"(BACKWARD\s*:\s*(\d+))", std::regex::icase);
    static const std::regex forward(R"(FORWARD\s*:\s*(\d+))", std::regex::icase);
    std::smatch b, f;
    if (!std::regex_search(text, b, backward) || !std::regex_search(text, f, forward)) return std::nullopt;
    std::int64_t back = 0, fwd = 0;
    const auto bs = b[1].str(), fs = f[1].str();
    if (std::from_chars(bs.data(), bs.data() + bs.size(), back).ec != std::errc{}) return std::nullopt;
    if (std::from_chars(fs.data(), fs.data() + fs.size(), fwd).ec != std::errc{}) return std::nullopt;
    return ExtensionSpans{-back, fwd};
}

} // namespace

ExtensionSpans keyword_extension(std::string_view question, const WindowGeometry& geometry,
                                 const ExtensionSpans& defaults) {
    const auto w2 = static_cast<std::int64_t>(2 * geometry.window_size * geometry.stride);
    const bool after = has_word(question, "after");
    const bool before = has_word(question, "before");
    if (after && before) return {-w2, w2};
    if (after) return {0, w2};
    if (before) return {-w2, 0};
    return defaults;
}

ExtensionDecision infer_extension(std::string_view question, const LlmHandle* llm, const WindowGeometry& geometry,
                                  const ExtensionSpans& defaults) {
    ExtensionDecision out;
    if (llm && llm->transport) {
        clients::ChatRequest req;
        req.model = llm->model;
        req.max_tokens = 32;
        req.messages.push_back(
            {clients::Role::User,
             clients::fill(clients::prompt("extension"),
                           {{"question", std::string(question)},
                            {"window_frames", std::to_string(geometry.window_size * geometry.stride)}}),
             {}});
        std::string problem;
        try {
            const auto reply = llm->transport->complete(req);
            if (auto spans = parse_extension_reply(reply.text)) {
                out.spans = *spans;
                return out;
            }
            problem = "unparseable extension reply";
        } catch (const Error& e) {
            problem = std::string("extension request failed: ") + e.what();
        }
        out.warning = problem + "; using the keyword rule";
        log_warn(*out.warning);
    }
    out.spans = keyword_extension(question, geometry, defaults);
    return out;
}

TrimResult trim_and_sample(const Interval& interval, const ExtensionSpans& spans, std::size_t video_frames,
                           std::size_t budget) {
    if (budget == 0) throw InvalidInput("frame budget must be at least 1");
    if (video_frames == 0) throw InvalidInput("video has no frames");
    if (interval.start_frame > interval.end_frame || interval.end_frame >= video_frames) {
        throw InvalidInput("interval outside the video");
    }
    spans.check();

    const auto last = static_cast<std::int64_t>(video_frames) - 1;
    const auto s = std::clamp(static_cast<std::int64_t>(interval.start_frame) + spans.alpha, std::int64_t{0}, last);
    const auto e = std::clamp(static_cast<std::int64_t>(interval.end_frame) + spans.beta, std::int64_t{0}, last);

    TrimResult out;
    out.interval = Interval{static_cast<std::size_t>(s), static_cast<std::size_t>(e), interval.fps};
    const std::size_t len = out.interval.length();
    const std::size_t count = std::min(budget, len);
    out.frames.reserve(count);
    if (count == 1) {
        out.frames.push_back(out.interval.start_frame + (len - 1) / 2);
    } else {
        // Round-half-up of s + i * (len - 1) / (count - 1), in integers.
        const std::size_t span = len - 1, steps = count - 1;
        for (std::size_t i = 0; i < count; ++i) {
            out.frames.push_back(out.interval.start_frame + (2 * i * span + steps) / (2 * steps));
        }
    }
    return out;
}

clients::WindowRef window_ref(std::size_t window, const WindowGeometry& geometry, const VideoMeta& video) {
    clients::WindowRef ref;
    ref.index = window;
    ref.first_frame = geometry.first_frame(window);
    ref.last_frame = geometry.last_frame(window);
    if (!video.images.empty()) {
        if (ref.last_frame >= video.images.size()) throw InvalidInput("fewer frame images than video frames");
        ref.images.assign(video.images.begin() + static_cast<std::ptrdiff_t>(ref.first_frame),
                          video.images.begin() + static_cast<std::ptrdiff_t>(ref.last_frame) + 1);
    }
    return ref;
}

RetrievalResult run_pipeline(std::string_view question, clients::Detector& detector, clients::Translator& translator,
                             const VideoMeta& video, const RetrievalConfig& cfg, const LlmHandle* extension_llm,
                             std::optional<DetectionMatrix>* scores_out) {
    cfg.check();
    const std::size_t windows = cfg.geometry.window_count(video.frames);
    if (windows == 0) throw InvalidInput("video is shorter than one window");

    auto translation = translator.translate(question);
    if (auto top = max_atom(translation.formula); top && *top >= translation.propositions.size()) {
        throw InvalidInput("formula references proposition p" + std::to_string(*top) +
                           " outside the translated proposition set");
    }

    RetrievalResult out;
    out.propositions = translation.propositions;
    out.formula = translation.formula;
    out.checked_formula = retrieval_formula(translation.formula, cfg);

    const std::size_t n = out.propositions.size();
    VideoAutomaton automaton(n);
    CheckSession session(out.checked_formula);
    std::vector<std::vector<double>> rows;
    std::vector<std::vector<Branch>> layers;
    rows.reserve(windows);
    layers.reserve(windows);

    for (std::size_t t = 0; t < windows; ++t) {
        auto row = clients::detect_window(detector, out.propositions, window_ref(t, cfg.geometry, video),
                                          cfg.max_in_flight);
        layers.push_back(layer_distribution(row, cfg.build));
        automaton.extend(layers.back());
        rows.push_back(std::move(row));
        session.advance(automaton);
        const double mu = std::clamp(session.probability(), 0.0, 1.0);
        const double score = smooth(mu, cfg.smoothing);
        out.scores.push_back({mu, score});
        out.stop_layer = t;
        if (score > cfg.tau_stop) {
            out.stopped_early = true;
            break;
        }
    }
    if (scores_out) {
        if (n > 0) scores_out->emplace(rows, cfg.geometry);
        else scores_out->reset();
    }

    // Without an early stop, fall back to the earliest best-scoring prefix.
    out.analysed_layer = out.stop_layer;
    if (!out.stopped_early) {
        for (std::size_t t = 0; t < out.scores.size(); ++t) {
            if (out.scores[t].smoothed > out.scores[out.analysed_layer].smoothed ||
                (out.scores[t].smoothed == out.scores[out.analysed_layer].smoothed && t < out.analysed_layer)) {
                out.analysed_layer = t;
            }
        }
        out.diagnostics.push_back("smoothed score never exceeded tau_stop; using the best prefix (window " +
                                  std::to_string(out.analysed_layer) + ")");
    }
    if (out.analysed_layer != out.stop_layer) {
        automaton = VideoAutomaton(n);
        for (std::size_t t = 0; t <= out.analysed_layer; ++t) automaton.extend(layers[t]);
    }
    out.satisfaction = check(automaton, out.checked_formula, cfg.smoothing);

    if (!out.satisfaction.witness) {
        out.diagnostics.push_back("no satisfying path: satisfaction probability is 0 over the whole video");
        return out;
    }

    std::vector<LabelSet> labels(out.analysed_layer + 1);
    for (std::size_t t = 0; t < labels.size(); ++t) {
        for (PropId i = 0; i < n; ++i) {
            if (rows[t][i] >= cfg.build.threshold(i)) labels[t].insert(i);
        }
    }
    out.raw_interval = extract_interval(*out.satisfaction.witness, translation.formula, labels, cfg.geometry);

    if (cfg.extension) {
        out.spans = *cfg.extension;
    } else {
        auto decision = infer_extension(question, extension_llm, cfg.geometry, default_extension(cfg.geometry));
        out.spans = decision.spans;
        if (decision.warning) out.diagnostics.push_back(*decision.warning);
    }
    auto trimmed = trim_and_sample(*out.raw_interval, out.spans, video.frames, cfg.frame_budget);
    out.interval = trimmed.interval;
    out.sampled_frames = std::move(trimmed.frames);
    return out;
}

} // namespace tlr
