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

#include "tlr/formula.hpp"
#include "tlr/proposition.hpp"

namespace tlr {

/// Parses formula text. Grammar (docs/formats.md), loosest binding first:
///
///     formula := disj [ "->" formula ]
///     disj    := conj { "|" conj }
///     conj    := until { "&" until }
///     until   := unary [ "U" until ]
///     unary   := ( "!" | "X" | "F" | "G" ) unary | primary
///     primary := "(" formula ")" | STRING | "p" DIGITS | "true" | "false"
///
/// A STRING atom is resolved against `props` by normalized phrase first, then
/// as a `p<i>` alias. Throws ParseError with the byte offset of the problem.
Formula parse_tl(std::string_view text, const PropositionSet& props);

/// Inverse of parse_tl up to structural equality. Atoms are written as their
/// quoted phrases. Throws InvalidInput on an atom id outside `props`.
std::string render(const Formula& f, const PropositionSet& props);

/// Same, but atoms are written as `p<i>` aliases; needs no proposition set.
std::string render_aliases(const Formula& f);

} // namespace tlr
