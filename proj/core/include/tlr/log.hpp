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

#include <functional>
#include <string_view>

namespace tlr {

enum class LogLevel { Debug, Info, Warn, Error };

/// Human-readable diagnostics; written to stderr unless a sink is installed.
void log(LogLevel level, std::string_view message);
inline void log_info(std::string_view m) { log(LogLevel::Info, m); }
inline void log_warn(std::string_view m) { log(LogLevel::Warn, m); }

void set_log_level(LogLevel min_level);

using LogSink = std::function<void(LogLevel, std::string_view)>;
/// Replaces the stderr writer; pass an empty function to restore it.
/// Returns the previous sink.
LogSink set_log_sink(LogSink sink);

} // namespace tlr
