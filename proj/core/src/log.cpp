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

#include "tlr/log.hpp"

#include <iostream>
#include <mutex>

namespace tlr {

namespace {

std::mutex g_mutex;
LogLevel g_level = LogLevel::Info;
LogSink g_sink;

const char* tag(LogLevel level) {
    switch (level) {
    case LogLevel::Debug: return "debug";
    case LogLevel::Info: return "info";
    case LogLevel::Warn: return "warning";
    case LogLevel::Error: return "error";
    }
    return "?";
}

} // namespace

void log(LogLevel level, std::string_view message) {
    std::lock_guard lock(g_mutex);
    if (level < g_level) return;
    if (g_sink) {
        g_sink(level, message);
        return;
    }
    std::cerr << "tlr: " << tag(level) << ": " << message << '\n';
}

void set_log_level(LogLevel min_level) {
    std::lock_guard lock(g_mutex);
    g_level = min_level;
}

LogSink set_log_sink(LogSink sink) {
    std::lock_guard lock(g_mutex);
    std::swap(g_sink, sink);
    return sink;
}

} // namespace tlr
