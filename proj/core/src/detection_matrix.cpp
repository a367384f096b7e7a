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

#include "tlr/detection_matrix.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "tlr/error.hpp"

namespace tlr {

void WindowGeometry::check() const {
    if (window_size < 1) throw InvalidInput("window_size must be >= 1");
    if (stride < 1) throw InvalidInput("stride must be >= 1");
    if (!(fps > 0.0) || !std::isfinite(fps)) throw InvalidInput("fps must be > 0");
}

std::size_t WindowGeometry::window_count(std::size_t frames) const noexcept {
    if (frames < window_size) return 0;
    return (frames - window_size) / stride + 1;
}

void check_scores(std::span<const double> scores) {
    for (std::size_t i = 0; i < scores.size(); ++i) {
        const double s = scores[i];
        if (!(s >= 0.0 && s <= 1.0)) {
            throw InvalidInput("score " + std::to_string(i) + " = " + std::to_string(s) + " is outside [0, 1]");
        }
    }
}

DetectionMatrix::DetectionMatrix(std::vector<std::vector<double>> rows, WindowGeometry geometry)
    : geometry_(geometry) {
    geometry_.check();
    if (rows.empty()) throw InvalidInput("detection matrix needs at least one window");
    cols_ = rows.front().size();
    scores_.reserve(rows.size() * cols_);
    for (const auto& r : rows) append_row(r);
}

DetectionMatrix DetectionMatrix::from_frame_scores(const std::vector<std::vector<double>>& frame_scores,
                                                   WindowGeometry geometry) {
    geometry.check();
    const std::size_t windows = geometry.window_count(frame_scores.size());
    if (windows == 0) {
        throw InvalidInput("video of " + std::to_string(frame_scores.size()) +
                           " frames is shorter than one window of " + std::to_string(geometry.window_size));
    }
    const std::size_t n = frame_scores.front().size();
    std::vector<std::vector<double>> rows(windows, std::vector<double>(n, 0.0));
    for (std::size_t t = 0; t < windows; ++t) {
        for (auto frame = geometry.first_frame(t); frame <= geometry.last_frame(t); ++frame) {
            const auto& fs = frame_scores[frame];
            if (fs.size() != n) throw InvalidInput("frame " + std::to_string(frame) + " has wrong width");
            check_scores(fs);
            for (std::size_t i = 0; i < n; ++i) rows[t][i] = std::max(rows[t][i], fs[i]);
        }
    }
    return DetectionMatrix(std::move(rows), geometry);
}

double DetectionMatrix::at(std::size_t window, std::size_t prop) const {
    if (window >= rows_ || prop >= cols_) throw InvalidInput("detection matrix index out of range");
    return scores_[window * cols_ + prop];
}

std::span<const double> DetectionMatrix::row(std::size_t window) const {
    if (window >= rows_) throw InvalidInput("detection matrix row out of range");
    return {scores_.data() + window * cols_, cols_};
}

void DetectionMatrix::append_row(std::span<const double> row) {
    if (row.size() != cols_) {
        throw InvalidInput("row " + std::to_string(rows_) + " has " + std::to_string(row.size()) +
                           " scores, expected " + std::to_string(cols_));
    }
    try {
        check_scores(row);
    } catch (const InvalidInput& e) {
        throw InvalidInput("row " + std::to_string(rows_) + ": " + e.what());
    }
    scores_.insert(scores_.end(), row.begin(), row.end());
    ++rows_;
}

} // namespace tlr
