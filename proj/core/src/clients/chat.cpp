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

#include "tlr/clients/chat.hpp"

#include <cstdlib>
#include <thread>

#include <httplib.h>

#include "tlr/digest.hpp"
#include "tlr/error.hpp"
#include "tlr/log.hpp"

namespace tlr::clients {

namespace {

std::string mime_type(const std::filesystem::path& p) {
    auto ext = p.extension().string();
    for (auto& c : ext) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    if (ext == ".png") return "image/png";
    if (ext == ".webp") return "image/webp";
    if (ext == ".gif") return "image/gif";
    return "image/jpeg";
}

} // namespace

std::string_view to_string(Role role) noexcept {
    switch (role) {
    case Role::System: return "system";
    case Role::User: return "user";
    case Role::Assistant: return "assistant";
    }
    return "user";
}

Role role_from_string(std::string_view s) {
    if (s == "system") return Role::System;
    if (s == "user") return Role::User;
    if (s == "assistant") return Role::Assistant;
    throw ReplyError("unknown chat role '" + std::string(s) + "'");
}

nlohmann::json to_wire(const ChatRequest& request, bool embed_images) {
    nlohmann::json messages = nlohmann::json::array();
    for (const auto& m : request.messages) {
        nlohmann::json msg{{"role", to_string(m.role)}};
        if (m.images.empty()) {
            msg["content"] = m.text;
        } else {
            nlohmann::json parts = nlohmann::json::array();
            parts.push_back({{"type", "text"}, {"text", m.text}});
            for (const auto& img : m.images) {
                std::string url = embed_images
                                      ? "data:" + mime_type(img) + ";base64," + base64_encode(read_file(img))
                                      : "file://" + img.string();
                parts.push_back({{"type", "image_url"}, {"image_url", {{"url", std::move(url)}}}});
            }
            msg["content"] = std::move(parts);
        }
        messages.push_back(std::move(msg));
    }
    nlohmann::json body{{"model", request.model}, {"messages", std::move(messages)},
                        {"temperature", request.temperature}};
    if (request.logprobs) {
        body["logprobs"] = true;
        if (request.top_logprobs > 0) body["top_logprobs"] = request.top_logprobs;
    }
    if (request.max_tokens > 0) body["max_tokens"] = request.max_tokens;
    return body;
}

ChatReply reply_from_wire(const nlohmann::json& body) {
    ChatReply reply;
    try {
        const auto& choice = body.at("choices").at(0);
        const auto& content = choice.at("message").at("content");
        if (content.is_string()) reply.text = content.get<std::string>();
        if (auto lp = choice.find("logprobs"); lp != choice.end() && lp->is_object()) {
            if (auto c = lp->find("content"); c != lp->end() && c->is_array()) {
                for (const auto& tok : *c) {
                    TokenLogprob t;
                    t.token = tok.at("token").get<std::string>();
                    t.logprob = tok.at("logprob").get<double>();
                    if (auto top = tok.find("top_logprobs"); top != tok.end() && top->is_array()) {
                        for (const auto& alt : *top) {
                            t.top.emplace_back(alt.at("token").get<std::string>(), alt.at("logprob").get<double>());
                        }
                    }
                    reply.tokens.push_back(std::move(t));
                }
            }
        }
    } catch (const nlohmann::json::exception& e) {
        throw ReplyError(std::string("malformed chat-completions reply: ") + e.what());
    }
    if (reply.text.empty()) throw ReplyError("chat-completions reply has empty content");
    return reply;
}

nlohmann::json to_json(const ChatReply& reply) {
    nlohmann::json tokens = nlohmann::json::array();
    for (const auto& t : reply.tokens) {
        nlohmann::json top = nlohmann::json::array();
        for (const auto& [tok, lp] : t.top) top.push_back({{"token", tok}, {"logprob", lp}});
        tokens.push_back({{"token", t.token}, {"logprob", t.logprob}, {"top_logprobs", std::move(top)}});
    }
    return {{"text", reply.text}, {"tokens", std::move(tokens)}};
}

ChatReply reply_from_json(const nlohmann::json& j) {
    ChatReply reply;
    reply.text = j.at("text").get<std::string>();
    for (const auto& t : j.at("tokens")) {
        TokenLogprob tok;
        tok.token = t.at("token").get<std::string>();
        tok.logprob = t.at("logprob").get<double>();
        for (const auto& alt : t.at("top_logprobs")) {
            tok.top.emplace_back(alt.at("token").get<std::string>(), alt.at("logprob").get<double>());
        }
        reply.tokens.push_back(std::move(tok));
    }
    return reply;
}

Endpoint endpoint_from_env() {
    Endpoint e;
    const char* url = std::getenv("TLR_ENDPOINT");
    if (!url || !*url) throw InvalidInput("TLR_ENDPOINT is not set");
    e.base_url = url;
    if (const char* key = std::getenv("TLR_API_KEY")) e.api_key = key;
    return e;
}

HttpChatTransport::HttpChatTransport(Endpoint endpoint, RetryPolicy retry, std::ptrdiff_t max_in_flight)
    : endpoint_(std::move(endpoint)), retry_(retry), in_flight_(std::max<std::ptrdiff_t>(1, max_in_flight)) {
    if (retry_.max_attempts < 1) throw InvalidInput("max_attempts must be >= 1");
    const auto& base = endpoint_.base_url;
    const auto scheme_end = base.find("://");
    if (scheme_end == std::string::npos) throw InvalidInput("endpoint URL needs a scheme: " + base);
    const auto path_start = base.find('/', scheme_end + 3);
    url_.scheme_host_port = base.substr(0, path_start);
    url_.path_prefix = path_start == std::string::npos ? "" : base.substr(path_start);
    while (!url_.path_prefix.empty() && url_.path_prefix.back() == '/') url_.path_prefix.pop_back();
#ifndef CPPHTTPLIB_OPENSSL_SUPPORT
    if (base.rfind("https://", 0) == 0) throw InvalidInput("built without TLS support; cannot reach " + base);
#endif
}

ChatReply HttpChatTransport::complete(const ChatRequest& request) {
    const std::string body = to_wire(request, true).dump();
    const std::string path = url_.path_prefix + "/chat/completions";

    in_flight_.acquire();
    struct Release {
        std::counting_semaphore<>& s;
        ~Release() { s.release(); }
    } release{in_flight_};

    std::string last_error;
    for (int attempt = 0; attempt < retry_.max_attempts; ++attempt) {
        if (attempt > 0) std::this_thread::sleep_for(retry_.base_delay * (1 << (attempt - 1)));
        const auto n = ++attempts_;
        httplib::Client client(url_.scheme_host_port);
        client.set_connection_timeout(endpoint_.timeout);
        client.set_read_timeout(endpoint_.timeout);
        httplib::Headers headers;
        if (!endpoint_.api_key.empty()) headers.emplace("Authorization", "Bearer " + endpoint_.api_key);

        auto res = client.Post(path, headers, body, "application/json");
        if (!res) {
            last_error = "connection failed: " + httplib::to_string(res.error());
        } else if (res->status >= 200 && res->status < 300) {
            try {
                return reply_from_wire(nlohmann::json::parse(res->body));
            } catch (const nlohmann::json::exception& e) {
                throw ReplyError(std::string("reply is not JSON: ") + e.what());
            }
        } else if (res->status == 429 || res->status >= 500) {
            last_error = "HTTP " + std::to_string(res->status);
        } else {
            throw TransportError("HTTP " + std::to_string(res->status) + " from " + endpoint_.base_url + ": " +
                                 res->body.substr(0, 200));
        }
        log_warn("request attempt " + std::to_string(attempt + 1) + "/" + std::to_string(retry_.max_attempts) +
                 " (total " + std::to_string(n) + ") failed: " + last_error);
    }
    throw TransportError("giving up after " + std::to_string(retry_.max_attempts) + " attempts: " + last_error);
}

ScriptedTransport::ScriptedTransport(std::vector<ChatReply> replies) : replies_(std::move(replies)) {
    if (replies_.empty()) throw InvalidInput("scripted transport needs at least one reply");
}

ScriptedTransport::ScriptedTransport(std::function<ChatReply(const ChatRequest&)> responder)
    : responder_(std::move(responder)) {}

ChatReply ScriptedTransport::complete(const ChatRequest& request) {
    std::lock_guard lock(mutex_);
    const std::size_t i = seen_.size();
    seen_.push_back(request);
    if (responder_) return responder_(request);
    return replies_[std::min(i, replies_.size() - 1)];
}

std::size_t ScriptedTransport::calls() const {
    std::lock_guard lock(mutex_);
    return seen_.size();
}

std::vector<ChatRequest> ScriptedTransport::requests() const {
    std::lock_guard lock(mutex_);
    return seen_;
}

} // namespace tlr::clients
