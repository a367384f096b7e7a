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

#include "tlr/clients/translator.hpp"

#include <cctype>
#include <sstream>

#include "tlr/clients/prompts.hpp"
#include "tlr/error.hpp"
#include "tlr/log.hpp"
#include "tlr/parse.hpp"

namespace tlr::clients {

namespace {

std::string trim(std::string_view s) {
    std::size_t b = 0;
    std::size_t e = s.size();
    while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
    while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
    return std::string(s.substr(b, e - b));
}

bool starts_with_ci(std::string_view s, std::string_view prefix) {
    if (s.size() < prefix.size()) return false;
    for (std::size_t i = 0; i < prefix.size(); ++i) {
        if (std::toupper(static_cast<unsigned char>(s[i])) != prefix[i]) return false;
    }
    return true;
}

std::string strip_bullet(std::string line) {
    if (!line.empty() && (line[0] == '-' || line[0] == '*')) return trim(std::string_view(line).substr(1));
    std::size_t i = 0;
    while (i < line.size() && std::isdigit(static_cast<unsigned char>(line[i]))) ++i;
    if (i > 0 && i < line.size() && (line[i] == '.' || line[i] == ')')) return trim(std::string_view(line).substr(i + 1));
    return line;
}

} // namespace

Translation parse_translation_reply(std::string_view reply) {
    std::istringstream in{std::string(reply)};
    std::string raw;
    enum class Section { None, Props, Formula } section = Section::None;
    std::vector<std::string> phrases;
    std::string formula;
    bool saw_props = false;
    bool saw_formula = false;

    while (std::getline(in, raw)) {
        auto line = trim(raw);
        if (line.empty() || line.rfind("```", 0) == 0) continue;
        if (starts_with_ci(line, "PROPOSITIONS:")) {
            section = Section::Props;
            saw_props = true;
            line = trim(std::string_view(line).substr(13));
            if (line.empty()) continue;
        } else if (starts_with_ci(line, "FORMULA:")) {
            section = Section::Formula;
            saw_formula = true;
            line = trim(std::string_view(line).substr(8));
            if (line.empty()) continue;
        }
        switch (section) {
        case Section::Props: phrases.push_back(strip_bullet(line)); break;
        case Section::Formula:
            if (!formula.empty()) formula += ' ';
            formula += line;
            break;
        case Section::None: break;
        }
    }
    if (!saw_props) throw ReplyError("reply has no PROPOSITIONS: section");
    if (!saw_formula) throw ReplyError("reply has no FORMULA: line");
    if (formula.empty()) throw ReplyError("FORMULA: line is empty");

    Translation t;
    try {
        t.propositions = PropositionSet(phrases);
    } catch (const InvalidInput& e) {
        throw ReplyError(std::string("bad proposition list: ") + e.what());
    }
    t.formula = parse_tl(formula, t.propositions);
    return t;
}

LlmTranslator::LlmTranslator(ChatTransport& transport, std::string model)
    : transport_(transport), model_(std::move(model)) {}

ChatRequest LlmTranslator::build_request(std::string_view question) const {
    ChatRequest req;
    req.model = model_;
    req.messages = {
        {Role::System, std::string(prompt("q2tl_system")), {}},
        {Role::User, std::string(prompt("q2tl_shot1_question")), {}},
        {Role::Assistant, std::string(prompt("q2tl_shot1_reply")), {}},
        {Role::User, std::string(prompt("q2tl_shot2_question")), {}},
        {Role::Assistant, std::string(prompt("q2tl_shot2_reply")), {}},
        {Role::User, std::string(question), {}},
    };
    return req;
}

Translation LlmTranslator::translate(std::string_view question) {
    if (trim(question).empty()) throw InvalidInput("question is empty");
    auto req = build_request(question);
    auto reply = transport_.complete(req);
    try {
        return parse_translation_reply(reply.text);
    } catch (const Error& first) {
        if (dynamic_cast<const TransportError*>(&first)) throw;
        log_warn(std::string("translation reply unusable, reprompting: ") + first.what());
        req.messages.push_back({Role::Assistant, reply.text, {}});
        req.messages.push_back({Role::User, fill(prompt("q2tl_reprompt"), {{"error", first.what()}}), {}});
        reply = transport_.complete(req);
        try {
            return parse_translation_reply(reply.text);
        } catch (const Error& second) {
            throw ReplyError(std::string("translation reply unusable after reprompt: ") + second.what());
        }
    }
}

} // namespace tlr::clients
