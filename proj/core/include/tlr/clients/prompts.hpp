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
#include <string_view>
#include <utility>
#include <vector>

namespace tlr::clients {

/// Prompt set compiled in from prompts/<version>/*.txt.
std::string_view prompt_version() noexcept;

/// Prompt text by file stem (e.g. "detect"), trailing newline removed.
/// Throws InvalidInput for unknown names.
std::string_view prompt(std::string_view name);

std::vector<std::string_view> prompt_names();

/// Replaces each "{key}" in `tmpl`. Unreferenced keys are ignored.
std::string fill(std::string_view tmpl, const std::vector<std::pair<std::string_view, std::string>>& values);

} // namespace tlr::clients
