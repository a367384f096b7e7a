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

#include <string>
#include <string_view>

#include "tlr/clients/chat.hpp"
#include "tlr/formula.hpp"
#include "tlr/proposition.hpp"

namespace tlr::clients {

struct Translation {
    PropositionSet propositions;
    Formula formula;
};

/// Question -> (propositions, formula).
class Translator {
public:
    virtual ~Translator() = default;
    virtual Translation translate(std::string_view question) = 0;
};

/// Always returns the same translation (for formulas supplied by hand).
class FixedTranslator final : public Translator {
public:
    explicit FixedTranslator(Translation t) : translation_(std::move(t)) {}
    Translation translate(std::string_view) override { return translation_; }

private:
    Translation translation_;
};

/// Parses the constrained reply format:
///
///     PROPOSITIONS:
///     - phrase
///     - phrase
///     FORMULA: <formula in the parse_tl grammar>
///
/// Bullets may be "-", "*", "1." or "1)". Code fences are ignored. Throws
/// ReplyError (format) or ParseError (formula).
Translation parse_translation_reply(std::string_view reply);

/// Two-shot language-model translator. One reprompt carrying the parse error
/// is sent when the first reply is unusable.
class LlmTranslator final : public Translator {
public:
    LlmTranslator(ChatTransport& transport, std::string model);

    /// Throws InvalidInput on an empty question, ReplyError when the reply is
    /// still unusable after the reprompt, TransportError on transport failure.
    Translation translate(std::string_view question) override;

    ChatRequest build_request(std::string_view question) const;

private:
    ChatTransport& transport_;
    std::string model_;
};

} // namespace tlr::clients
