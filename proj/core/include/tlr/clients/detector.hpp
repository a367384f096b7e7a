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
#include <string>
#include <vector>

#include "tlr/clients/chat.hpp"
#include "tlr/detection_matrix.hpp"
#include "tlr/proposition.hpp"

namespace tlr::clients {

/// One window of the video as handed to a detector.
struct WindowRef {
    std::size_t index = 0;
    std::size_t first_frame = 0;
    std::size_t last_frame = 0;
    /// Frame images for [first_frame, last_frame]; may be empty for fixtures.
    std::vector<std::filesystem::path> images;
};

/// Per-proposition confidence source.
class Detector {
public:
    virtual ~Detector() = default;
    /// Confidence in [0, 1] that `prop` holds somewhere in `window`.
    virtual double detect(const Proposition& prop, const WindowRef& window) = 0;
};

/// Serves a preloaded detection matrix; bit-deterministic.
class FixtureDetector final : public Detector {
public:
    /// Throws InvalidInput when the matrix width differs from `props.size()`.
    FixtureDetector(DetectionMatrix matrix, const PropositionSet& props);

    double detect(const Proposition& prop, const WindowRef& window) override;
    const DetectionMatrix& matrix() const noexcept { return matrix_; }

private:
    DetectionMatrix matrix_;
};

inline constexpr double kYesWithoutLogprobs = 0.99;
inline constexpr double kNoWithoutLogprobs = 0.01;

/// P(yes) from a one-token Yes/No reply. With first-token alternatives:
/// exp(lp_yes) / (exp(lp_yes) + exp(lp_no)), where case and whitespace
/// variants of each answer are summed; if only one side appears among the
/// alternatives its own probability is used. Without log-probabilities the
/// reply text maps Yes to 0.99 and No to 0.01. Throws ReplyError when neither
/// answer can be found.
double yes_probability(const ChatReply& reply);

/// Vision-language model queried through a chat transport.
class RemoteDetector final : public Detector {
public:
    RemoteDetector(ChatTransport& transport, std::string model, std::string prompt_template = {});

    /// Throws InvalidInput when the window has no images.
    double detect(const Proposition& prop, const WindowRef& window) override;

    ChatRequest build_request(const Proposition& prop, const WindowRef& window) const;

private:
    ChatTransport& transport_;
    std::string model_;
    std::string template_;
};

/// Scores every proposition for one window, running up to `max_in_flight`
/// detector calls concurrently. Results are ordered by proposition id.
std::vector<double> detect_window(Detector& detector, const PropositionSet& props, const WindowRef& window,
                                  std::size_t max_in_flight = 1);

} // namespace tlr::clients
