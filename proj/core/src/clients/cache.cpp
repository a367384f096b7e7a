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

#include "tlr/clients/cache.hpp"

#include <fstream>
#include <mutex>
#include <random>
#include <sstream>
#include <thread>

#include "tlr/digest.hpp"
#include "tlr/log.hpp"

namespace tlr::clients {

namespace {

std::string collapse_whitespace(std::string_view s) {
    std::string out;
    bool pending = false;
    for (char c : s) {
        if (std::isspace(static_cast<unsigned char>(c))) {
            pending = !out.empty();
            continue;
        }
        if (pending) out.push_back(' ');
        pending = false;
        out.push_back(c);
    }
    return out;
}

} // namespace

nlohmann::json canonical_request(const ChatRequest& request) {
    nlohmann::json messages = nlohmann::json::array();
    for (const auto& m : request.messages) {
        nlohmann::json images = nlohmann::json::array();
        for (const auto& img : m.images) images.push_back(sha256_file_hex(img));
        messages.push_back({{"role", to_string(m.role)}, {"text", collapse_whitespace(m.text)}, {"images", images}});
    }
    return {{"model", request.model},
            {"messages", std::move(messages)},
            {"logprobs", request.logprobs},
            {"top_logprobs", request.top_logprobs},
            {"temperature", request.temperature},
            {"max_tokens", request.max_tokens}};
}

std::string request_digest(const ChatRequest& request) { return sha256_hex(canonical_request(request).dump()); }

CachedTransport::CachedTransport(ChatTransport& inner, std::filesystem::path dir, bool enabled)
    : inner_(inner), dir_(std::move(dir)), enabled_(enabled) {}

std::filesystem::path CachedTransport::entry_path(const std::string& digest) const {
    return dir_ / digest.substr(0, 2) / (digest + ".json");
}

std::shared_mutex& CachedTransport::stripe(const std::string& digest) {
    return stripes_[std::stoul(digest.substr(0, 2), nullptr, 16) % stripes_.size()];
}

ChatReply CachedTransport::complete(const ChatRequest& request) {
    if (!enabled_) return inner_.complete(request);

    const auto canonical = canonical_request(request);
    const auto digest = sha256_hex(canonical.dump());
    const auto path = entry_path(digest);
    auto& lock = stripe(digest);

    {
        std::shared_lock read(lock);
        std::error_code ec;
        if (std::filesystem::exists(path, ec)) {
            try {
                std::ifstream in(path, std::ios::binary);
                const auto entry = nlohmann::json::parse(in);
                if (entry.at("request") != canonical) throw std::runtime_error("stored request differs");
                auto reply = reply_from_json(entry.at("reply"));
                ++hits_;
                return reply;
            } catch (const std::exception& e) {
                log_warn("ignoring corrupt cache entry " + path.string() + ": " + e.what());
            }
        }
    }

    ++misses_;
    auto reply = inner_.complete(request);

    std::unique_lock write(lock);
    std::error_code ec;
    std::filesystem::create_directories(path.parent_path(), ec);
    std::ostringstream tmp_name;
    tmp_name << path.filename().string() << ".tmp." << std::hash<std::thread::id>{}(std::this_thread::get_id());
    const auto tmp = path.parent_path() / tmp_name.str();
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (out) {
            out << nlohmann::json{{"request", canonical}, {"reply", to_json(reply)}}.dump(2) << '\n';
        }
    }
    std::filesystem::rename(tmp, path, ec);
    if (ec) {
        log_warn("could not write cache entry " + path.string() + ": " + ec.message());
        std::filesystem::remove(tmp, ec);
    }
    return reply;
}

} // namespace tlr::clients
