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

#include "tlr/clients/chat.hpp"

namespace tlr::clients {

struct AnswerResult {
    /// Index into the choices; empty when the reply named no valid letter.
    std::optional<std::size_t> choice;
    std::string raw;
};

/// Finds the option letter in a free-form reply ("B", "(C)", "The answer is D.").
/// Letters beyond `choice_count` are ignored.
std::optional<std::size_t> extract_choice(std::string_view reply, std::size_t choice_count);

/// Multiple-choice question over the given frames. Throws InvalidInput with
/// fewer than two choices; an unreadable reply is an abstention, not an error.
AnswerResult answer(ChatTransport& transport, const std::string& model, std::string_view question,
                    const std::vector<std::string>& choices, const std::vector<std::filesystem::path>& frames);

ChatRequest build_answer_request(const std::string& model, std::string_view question,
                                 const std::vector<std::string>& choices,
                                 const std::vector<std::filesystem::path>& frames);

/// Abstentions never match.
inline bool matches(const std::optional<std::size_t>& chosen, std::size_t truth) noexcept {
    return chosen.has_value() && *chosen == truth;
}

} // namespace tlr::clients
