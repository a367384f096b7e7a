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
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "tlr/calibration.hpp"
#include "tlr/detection_matrix.hpp"
#include "tlr/proposition.hpp"

namespace tlr {

using CsvRow = std::vector<std::string>;

/// RFC 4180: quoted fields may hold commas, CRLF and doubled quotes; CRLF or
/// LF line ends; a final line end is optional. Every row must have as many
/// fields as the first. Throws InvalidInput naming row and column (1-based).
std::vector<CsvRow> parse_csv(std::string_view text);

/// Quotes fields only when needed. Lines end in LF.
std::string format_csv(const std::vector<CsvRow>& rows);

/// Shortest text that parses back to exactly `v` ("%.17g" when needed).
std::string format_double(double v);

/// Strict decimal parse of a whole field; nullopt on junk or trailing text.
std::optional<double> parse_double(std::string_view text);

/// A detection matrix on disk: `<name>.csv` with header `t,p0,p1,...` and
/// one row per window, plus a sidecar `<name>.json` with window_size,
/// stride, fps, propositions, and optionally video_length_frames.
struct MatrixFile {
    DetectionMatrix matrix;
    PropositionSet propositions;
    std::optional<std::size_t> video_length_frames;
};

/// Sidecar path for a matrix CSV: same stem, `.json` extension.
std::filesystem::path sidecar_path(const std::filesystem::path& csv);

MatrixFile matrix_from_text(std::string_view csv, const nlohmann::json& sidecar);
std::string matrix_csv(const DetectionMatrix& matrix);
nlohmann::json matrix_sidecar(const MatrixFile& file);

MatrixFile load_matrix(const std::filesystem::path& csv);
/// Writes the CSV and its sidecar.
void save_matrix(const std::filesystem::path& csv, const MatrixFile& file);

/// `score,label` with a header; labels are 0/1 or true/false.
std::vector<ScoredPair> parse_pairs(std::string_view csv);
std::vector<ScoredPair> load_pairs(const std::filesystem::path& path);

/// `item,caption` with a header.
std::vector<Positive> parse_positives(std::string_view csv);
std::vector<Positive> load_positives(const std::filesystem::path& path);

/// `item,caption,label` with a header, labels as 0/1.
std::string format_labeled_pairs(const std::vector<LabeledPair>& pairs);

/// Writes via a temporary file and rename.
void write_file(const std::filesystem::path& path, std::string_view data);

} // namespace tlr
