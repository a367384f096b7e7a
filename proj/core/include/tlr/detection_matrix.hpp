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
#include <span>
#include <vector>

namespace tlr {

/// How windows are laid over the frame sequence. Window t covers frames
/// [t * stride, t * stride + window_size - 1].
struct WindowGeometry {
    std::size_t window_size = 3;
    std::size_t stride = 3;
    double fps = 3.0;

    /// Throws InvalidInput unless window_size >= 1, stride >= 1, fps > 0.
    void check() const;

    std::size_t first_frame(std::size_t window) const noexcept { return window * stride; }
    std::size_t last_frame(std::size_t window) const noexcept { return window * stride + window_size - 1; }

    /// Windows that fit in a video of `frames` frames; 0 when shorter than one window.
    std::size_t window_count(std::size_t frames) const noexcept;

    friend bool operator==(const WindowGeometry&, const WindowGeometry&) = default;
};

/// Calibrated per-window, per-proposition confidences (rows are windows).
class DetectionMatrix {
public:
    /// `rows` must be non-empty, rectangular, and every entry in [0, 1].
    DetectionMatrix(std::vector<std::vector<double>> rows, WindowGeometry geometry);

    /// Collapses frame-level scores to window scores by taking the maximum
    /// frame score inside each window.
    static DetectionMatrix from_frame_scores(const std::vector<std::vector<double>>& frame_scores,
                                             WindowGeometry geometry);

    std::size_t windows() const noexcept { return rows_; }
    std::size_t propositions() const noexcept { return cols_; }
    const WindowGeometry& geometry() const noexcept { return geometry_; }

    double at(std::size_t window, std::size_t prop) const;
    std::span<const double> row(std::size_t window) const;

    /// Appends a row with the same width. Throws InvalidInput on bad entries.
    void append_row(std::span<const double> row);

    /// Smallest video length (in frames) that produces exactly these windows.
    std::size_t covered_frames() const noexcept {
        return geometry_.first_frame(rows_ - 1) + geometry_.window_size;
    }

    friend bool operator==(const DetectionMatrix&, const DetectionMatrix&) = default;

private:
    DetectionMatrix() = default;

    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    std::vector<double> scores_;
    WindowGeometry geometry_;
};

/// Throws InvalidInput unless every score is a number in [0, 1].
void check_scores(std::span<const double> scores);

} // namespace tlr
