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

#include "tlr/proposition.hpp"

#include <algorithm>
#include <cctype>
#include <unordered_set>

#include "tlr/error.hpp"

namespace tlr {

std::string normalize_phrase(std::string_view text) {
    std::string out;
    out.reserve(text.size());
    bool pending_space = false;
    for (char c : text) {
        const auto uc = static_cast<unsigned char>(c);
        if (std::isspace(uc)) {
            pending_space = !out.empty();
            continue;
        }
        if (pending_space) {
            out.push_back(' ');
            pending_space = false;
        }
        out.push_back(static_cast<char>(std::tolower(uc)));
    }
    return out;
}

PropositionSet::PropositionSet(std::vector<std::string> texts) {
    if (texts.size() > kMaxPropositions) {
        throw InvalidInput("at most " + std::to_string(kMaxPropositions) +
                           " propositions are supported, got " + std::to_string(texts.size()));
    }
    std::unordered_set<std::string> seen;
    items_.reserve(texts.size());
    for (std::size_t i = 0; i < texts.size(); ++i) {
        auto key = normalize_phrase(texts[i]);
        if (key.empty()) {
            throw InvalidInput("proposition " + std::to_string(i) + " has empty text");
        }
        if (!seen.insert(key).second) {
            throw InvalidInput("duplicate proposition text: \"" + texts[i] + "\"");
        }
        items_.push_back(Proposition{static_cast<PropId>(i), std::move(texts[i])});
    }
}

std::vector<std::string> PropositionSet::texts() const {
    std::vector<std::string> out;
    out.reserve(items_.size());
    for (const auto& p : items_) out.push_back(p.text);
    return out;
}

std::optional<PropId> PropositionSet::find(std::string_view text) const {
    const auto key = normalize_phrase(text);
    for (const auto& p : items_) {
        if (normalize_phrase(p.text) == key) return p.id;
    }
    return std::nullopt;
}

bool operator==(const PropositionSet& a, const PropositionSet& b) {
    return a.texts() == b.texts();
}

LabelSet::LabelSet(std::initializer_list<PropId> ids) {
    for (auto id : ids) insert(id);
}

void LabelSet::insert(PropId id) {
    if (id >= 64) throw InvalidInput("proposition id " + std::to_string(id) + " exceeds label capacity");
    mask_ |= std::uint64_t{1} << id;
}

std::vector<PropId> LabelSet::ids() const {
    std::vector<PropId> out;
    out.reserve(size());
    for (auto m = mask_; m != 0; m &= m - 1) {
        out.push_back(static_cast<PropId>(std::countr_zero(m)));
    }
    return out;
}

std::strong_ordering lexicographic_compare(LabelSet a, LabelSet b) noexcept {
    // Walk both ascending id lists; the first differing id decides, and a
    // proper prefix sorts first.
    auto ma = a.mask_;
    auto mb = b.mask_;
    while (ma != 0 && mb != 0) {
        const int ia = std::countr_zero(ma);
        const int ib = std::countr_zero(mb);
        if (ia != ib) return ia < ib ? std::strong_ordering::less : std::strong_ordering::greater;
        ma &= ma - 1;
        mb &= mb - 1;
    }
    if (ma == mb) return std::strong_ordering::equal;
    return ma == 0 ? std::strong_ordering::less : std::strong_ordering::greater;
}

std::string to_string(LabelSet labels) {
    std::string out = "{";
    bool first = true;
    for (auto id : labels.ids()) {
        if (!first) out += ',';
        out += std::to_string(id);
        first = false;
    }
    out += '}';
    return out;
}

} // namespace tlr
