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

#include "tlr/clients/answerer.hpp"

#include <cctype>
#include <regex>

#include "tlr/clients/prompts.hpp"
#include "tlr/error.hpp"

namespace tlr::clients {

std::optional<std::size_t> extract_choice(std::string_view reply, std::size_t choice_count) {
    if (choice_count == 0) return std::nullopt;
    const char last = static_cast<char>('A' + std::min<std::size_t>(choice_count, 26) - 1);
    const std::string letters = std::string("[A-") + last + "]";
    const std::string text(reply);

    // Most explicit forms first.
    const std::regex patterns[] = {
        std::regex("[\\(\\[]" + letters + "[\\)\\]]"),
        std::regex("(?:answer|option|choice)(?: is)?[:\\s]*" + letters + "\\b", std::regex::icase),
        std::regex("^\\s*" + letters + "(?:[\\.\\):,]|\\s|$)"),
        std::regex("\\b" + letters + "\\b"),
    };
    for (std::size_t k = 0; k < std::size(patterns); ++k) {
        std::smatch m;
        if (!std::regex_search(text, m, patterns[k])) continue;
        const std::string hit = m.str();
        if (k == 1) {
            // Case-insensitive match: the letter is the last character.
            const char c = static_cast<char>(std::toupper(static_cast<unsigned char>(hit.back())));
            return static_cast<std::size_t>(c - 'A');
        }
        for (auto it = hit.rbegin(); it != hit.rend(); ++it) {
            if (*it >= 'A' && *it <= last) return static_cast<std::size_t>(*it - 'A');
        }
    }
    return std::nullopt;
}

ChatRequest build_answer_request(const std::string& model, std::string_view question,
                                 const std::vector<std::string>& choices,
                                 const std::vector<std::filesystem::path>& frames) {
    if (choices.size() < 2) throw InvalidInput("multiple-choice answering needs at least two choices");
    if (choices.size() > 26) throw InvalidInput("at most 26 choices are supported");
    std::string listed;
    for (std::size_t i = 0; i < choices.size(); ++i) {
        if (i > 0) listed += '\n';
        listed += static_cast<char>('A' + i);
        listed += ". ";
        listed += choices[i];
    }
    ChatRequest req;
    req.model = model;
    req.max_tokens = 16;
    req.messages.push_back(ChatMessage{
        Role::User, fill(prompt("answer"), {{"question", std::string(question)}, {"choices", listed}}), frames});
    return req;
}

AnswerResult answer(ChatTransport& transport, const std::string& model, std::string_view question,
                    const std::vector<std::string>& choices, const std::vector<std::filesystem::path>& frames) {
    auto req = build_answer_request(model, question, choices, frames);
    AnswerResult out;
    out.raw = transport.complete(req).text;
    out.choice = extract_choice(out.raw, choices.size());
    return out;
}

} // namespace tlr::clients
