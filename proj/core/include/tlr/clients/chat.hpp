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

#include <atomic>
#include <chrono>
#include <cstddef>
#include <deque>
#include <filesystem>
#include <functional>
#include <mutex>
#include <optional>
#include <semaphore>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

namespace tlr::clients {

enum class Role { System, User, Assistant };

std::string_view to_string(Role role) noexcept;
/// Throws ReplyError on anything but "system", "user", "assistant".
Role role_from_string(std::string_view s);

struct ChatMessage {
    Role role = Role::User;
    std::string text;
    /// Image files on disk, embedded as base64 data URLs on the wire.
    std::vector<std::filesystem::path> images;
};

struct ChatRequest {
    std::string model;
    std::vector<ChatMessage> messages;
    bool logprobs = false;
    int top_logprobs = 0;
    double temperature = 0.0;
    int max_tokens = 0; ///< 0 leaves the server default
};

struct TokenLogprob {
    std::string token;
    double logprob = 0.0;
    /// Alternatives for this position, most likely first.
    std::vector<std::pair<std::string, double>> top;

    friend bool operator==(const TokenLogprob&, const TokenLogprob&) = default;
};

struct ChatReply {
    std::string text;
    std::vector<TokenLogprob> tokens; ///< empty when the server sent no logprobs

    friend bool operator==(const ChatReply&, const ChatReply&) = default;
};

/// OpenAI-compatible chat-completions request body. With `embed_images`
/// false, images are written as `file://` references (used for cache keys
/// and logs); otherwise as base64 data URLs.
nlohmann::json to_wire(const ChatRequest& request, bool embed_images = true);

/// Parses a chat-completions response body. Throws ReplyError when there is
/// no non-empty message content.
ChatReply reply_from_wire(const nlohmann::json& body);

nlohmann::json to_json(const ChatReply& reply);
ChatReply reply_from_json(const nlohmann::json& j);

/// Anything that turns a chat request into a reply.
class ChatTransport {
public:
    virtual ~ChatTransport() = default;
    /// Throws TransportError on failure (after any retries).
    virtual ChatReply complete(const ChatRequest& request) = 0;
};

/// Retry with exponential backoff: attempt k (0-based) waits base_delay * 2^(k-1).
struct RetryPolicy {
    int max_attempts = 3;
    std::chrono::milliseconds base_delay{500};
};

struct Endpoint {
    /// e.g. "http://localhost:8000/v1"; requests go to <base_url>/chat/completions
    std::string base_url;
    std::string api_key;
    std::chrono::seconds timeout{120};
};

/// Reads TLR_ENDPOINT and TLR_API_KEY. Throws InvalidInput when the endpoint is unset.
Endpoint endpoint_from_env();

/// HTTP(S) chat-completions client. Shareable between threads; at most
/// `max_in_flight` requests run at once.
class HttpChatTransport final : public ChatTransport {
public:
    HttpChatTransport(Endpoint endpoint, RetryPolicy retry = {}, std::ptrdiff_t max_in_flight = 4);

    ChatReply complete(const ChatRequest& request) override;

    /// HTTP attempts made so far, including retries.
    std::size_t attempts() const noexcept { return attempts_.load(); }

private:
    struct Url {
        std::string scheme_host_port;
        std::string path_prefix;
    };

    Endpoint endpoint_;
    RetryPolicy retry_;
    Url url_;
    std::counting_semaphore<> in_flight_;
    std::atomic<std::size_t> attempts_{0};
};

/// Offline transport that replays canned replies in order (cycling the last
/// one when exhausted) and records every request it sees.
class ScriptedTransport final : public ChatTransport {
public:
    explicit ScriptedTransport(std::vector<ChatReply> replies);
    /// Computes each reply from the request instead.
    explicit ScriptedTransport(std::function<ChatReply(const ChatRequest&)> responder);

    ChatReply complete(const ChatRequest& request) override;

    std::size_t calls() const;
    std::vector<ChatRequest> requests() const;

private:
    mutable std::mutex mutex_;
    std::vector<ChatReply> replies_;
    std::function<ChatReply(const ChatRequest&)> responder_;
    std::vector<ChatRequest> seen_;
};

} // namespace tlr::clients
