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

#include <array>
#include <atomic>
#include <filesystem>
#include <shared_mutex>
#include <string>

#include "tlr/clients/chat.hpp"

namespace tlr::clients {

/// Canonical form of a request for cache addressing: message text has its
/// whitespace runs collapsed and ends trimmed, and images are replaced by the
/// SHA-256 of their bytes.
nlohmann::json canonical_request(const ChatRequest& request);

/// SHA-256 hex of the canonical request.
std::string request_digest(const ChatRequest& request);

/// Content-addressed reply cache in front of another transport.
///
/// Layout: <dir>/<digest[0:2]>/<digest>.json holding
/// {"request": <canonical request>, "reply": {"text", "tokens"}}.
/// Entries are written to a temporary file and renamed into place. An entry
/// that does not parse, or whose stored request differs, is a miss.
class CachedTransport final : public ChatTransport {
public:
    CachedTransport(ChatTransport& inner, std::filesystem::path dir, bool enabled = true);

    ChatReply complete(const ChatRequest& request) override;

    std::size_t hits() const noexcept { return hits_.load(); }
    std::size_t misses() const noexcept { return misses_.load(); }
    std::filesystem::path entry_path(const std::string& digest) const;

private:
    std::shared_mutex& stripe(const std::string& digest);

    ChatTransport& inner_;
    std::filesystem::path dir_;
    bool enabled_;
    std::array<std::shared_mutex, 32> stripes_;
    std::atomic<std::size_t> hits_{0};
    std::atomic<std::size_t> misses_{0};
};

} // namespace tlr::clients
