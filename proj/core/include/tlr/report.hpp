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

#include <string>

#include <nlohmann/json.hpp>

#include "tlr/calibration.hpp"
#include "tlr/checker.hpp"
#include "tlr/clients/translator.hpp"
#include "tlr/retrieval.hpp"

namespace tlr {

// JSON reports written by the command-line tool. Shapes are pinned by the
// files under schemas/. Key order is fixed, so equal inputs give equal bytes.

nlohmann::ordered_json interval_json(const Interval& interval);

/// {"propositions": [...], "formula": quoted form, "formula_aliases": p<i> form}
nlohmann::ordered_json translation_json(const clients::Translation& t);

nlohmann::ordered_json witness_json(const Witness& w, const PropositionSet& props);

/// probability, smoothed, satisfiable, and the witness when there is one.
nlohmann::ordered_json satisfaction_json(const SatisfactionResult& r, const PropositionSet& props);

nlohmann::ordered_json check_report(const clients::Translation& t, const VideoAutomaton& automaton,
                            const SatisfactionResult& r, const SmoothingParams& smoothing);

nlohmann::ordered_json retrieval_report(const RetrievalResult& r, const RetrievalConfig& cfg);

nlohmann::ordered_json calibration_json(const CalibrationReport& r);

/// Fills {start} and {end} (seconds) in `tmpl`.
std::string trim_command(const Interval& interval, const std::string& tmpl);

inline constexpr const char* kDefaultTrimTemplate = "ffmpeg -ss {start} -to {end} -i INPUT -c copy OUTPUT";

/// Two-space indented dump ending in a newline.
std::string dump(const nlohmann::ordered_json& j);

} // namespace tlr
