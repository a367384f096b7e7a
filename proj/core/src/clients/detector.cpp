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

#include "tlr/clients/detector.hpp"

#include <cctype>
#include <cmath>
#include <future>

#include "tlr/clients/prompts.hpp"
#include "tlr/error.hpp"

namespace tlr::clients {

namespace {

enum class Answer { Yes, No, Other };

Answer classify(std::string_view token) {
    std::string t;
    for (char c : token) {
        const auto uc = static_cast<unsigned char>(c);
        if (std::isalpha(uc)) t.push_back(static_cast<char>(std::tolower(uc)));
        else if (!t.empty()) break;
    }
    if (t == "yes") return Answer::Yes;
    if (t == "no") return Answer::No;
    return Answer::Other;
}

} // namespace

FixtureDetector::FixtureDetector(DetectionMatrix matrix, const PropositionSet& props) : matrix_(std::move(matrix)) {
    if (matrix_.propositions() != props.size()) {
        throw InvalidInput("fixture matrix has " + std::to_string(matrix_.propositions()) + " columns but " +
                           std::to_string(props.size()) + " propositions are registered");
    }
}

double FixtureDetector::detect(const Proposition& prop, const WindowRef& window) {
    return matrix_.at(window.index, prop.id);
}

double yes_probability(const ChatReply& reply) {
    if (!reply.tokens.empty()) {
        const auto& first = reply.tokens.front();
        std::vector<std::pair<std::string, double>> alternatives = first.top;
        bool chosen_listed = false;
        for (const auto& [tok, lp] : alternatives) chosen_listed |= tok == first.token;
        if (!chosen_listed) alternatives.emplace_back(first.token, first.logprob);

        double yes = 0.0;
        double no = 0.0;
        for (const auto& [tok, lp] : alternatives) {
            switch (classify(tok)) {
            case Answer::Yes: yes += std::exp(lp); break;
            case Answer::No: no += std::exp(lp); break;
            case Answer::Other: break;
            }
        }
        if (yes > 0.0 && no > 0.0) return yes / (yes + no);
        if (yes > 0.0) return std::min(yes, 1.0);
        if (no > 0.0) return std::max(0.0, 1.0 - no);
    }
    switch (classify(reply.text)) {
    case Answer::Yes: return kYesWithoutLogprobs;
    case Answer::No: return kNoWithoutLogprobs;
    case Answer::Other: break;
    }
    throw ReplyError("reply lacks a Yes/No token: \"" + reply.text.substr(0, 80) + "\"");
}

RemoteDetector::RemoteDetector(ChatTransport& transport, std::string model, std::string prompt_template)
    : transport_(transport),
      model_(std::move(model)),
      template_(prompt_template.empty() ? std::string(prompt("detect")) : std::move(prompt_template)) {}

ChatRequest RemoteDetector::build_request(const Proposition& prop, const WindowRef& window) const {
    ChatRequest req;
    req.model = model_;
    req.logprobs = true;
    req.top_logprobs = 5;
    req.max_tokens = 1;
    req.messages.push_back(ChatMessage{Role::User, fill(template_, {{"proposition", prop.text}}), window.images});
    return req;
}

double RemoteDetector::detect(const Proposition& prop, const WindowRef& window) {
    if (window.images.empty()) {
        throw InvalidInput("window " + std::to_string(window.index) + " has no frames to show the detector");
    }
    return yes_probability(transport_.complete(build_request(prop, window)));
}

std::vector<double> detect_window(Detector& detector, const PropositionSet& props, const WindowRef& window,
                                  std::size_t max_in_flight) {
    std::vector<double> out(props.size(), 0.0);
    if (max_in_flight <= 1 || props.size() <= 1) {
        for (const auto& p : props) out[p.id] = detector.detect(p, window);
    } else {
        for (std::size_t begin = 0; begin < props.size(); begin += max_in_flight) {
            const std::size_t end = std::min(props.size(), begin + max_in_flight);
            std::vector<std::future<double>> batch;
            for (std::size_t i = begin; i < end; ++i) {
                batch.push_back(std::async(std::launch::async,
                                           [&, i] { return detector.detect(props[static_cast<PropId>(i)], window); }));
            }
            for (std::size_t i = begin; i < end; ++i) out[i] = batch[i - begin].get();
        }
    }
    for (std::size_t i = 0; i < out.size(); ++i) {
        if (!(out[i] >= 0.0 && out[i] <= 1.0)) {
            throw ReplyError("detector returned " + std::to_string(out[i]) + " for proposition " + std::to_string(i));
        }
    }
    return out;
}

} // namespace tlr::clients
