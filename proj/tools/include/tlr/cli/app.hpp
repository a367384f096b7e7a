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

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "tlr/retrieval.hpp"

namespace tlr::cli {

enum ExitCode : int {
    kOk = 0,
    kDomainFailure = 1, ///< e.g. a translator reply that never parses
    kInputFailure = 2,  ///< bad flags or files, transport errors
};

/// Everything a run can be configured with. Defaults match the library.
struct PipelineConfig {
    RetrievalConfig retrieval;
    std::string endpoint;
    std::string api_key;
    std::string translator_model;
    std::string detector_model;
    std::string answer_model;
    bool cache = true;
    std::filesystem::path cache_dir = ".tlr-cache";
    /// "keyword" or "llm" (asks the translator model for spans).
    std::string extension_source = "keyword";
    std::string trim_template;
    int retry_attempts = 3;
};

/// `key = value` lines; `#` starts a comment. Unknown keys, malformed
/// values and out-of-range numbers throw InvalidInput naming the line.
void apply_config_text(PipelineConfig& cfg, std::string_view text, std::string_view origin = "config");

void apply_config_file(PipelineConfig& cfg, const std::filesystem::path& path);

/// TLR_ENDPOINT, TLR_API_KEY, TLR_TRANSLATOR_MODEL, TLR_DETECTOR_MODEL,
/// TLR_ANSWER_MODEL, when set and non-empty.
void apply_environment(PipelineConfig& cfg);

/// Every key accepted by apply_config_text, in documentation order.
std::vector<std::string> config_keys();

/// Entry point shared by the binary and the tests. `args` excludes argv[0].
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

} // namespace tlr::cli
