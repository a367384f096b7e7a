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

#include <bit>
#include <compare>
#include <cstdint>
#include <initializer_list>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace tlr {

using PropId = std::uint32_t;

/// Hard cap on propositions per formula; label sets are 64-bit masks.
inline constexpr std::size_t kMaxPropositions = 64;

struct Proposition {
    PropId id = 0;
    std::string text;
};

/// Lowercases ASCII and collapses runs of whitespace to one space, trimming both ends.
std::string normalize_phrase(std::string_view text);

/// Ordered, densely indexed set of propositions. Texts are unique modulo
/// `normalize_phrase`.
class PropositionSet {
public:
    PropositionSet() = default;

    /// Throws InvalidInput on empty, duplicate, or too many texts.
    explicit PropositionSet(std::vector<std::string> texts);
    PropositionSet(std::initializer_list<std::string> texts)
        : PropositionSet(std::vector<std::string>(texts)) {}

    std::size_t size() const noexcept { return items_.size(); }
    bool empty() const noexcept { return items_.empty(); }
    const Proposition& operator[](PropId id) const { return items_.at(id); }
    const std::vector<Proposition>& items() const noexcept { return items_; }
    std::vector<std::string> texts() const;

    /// Lookup by phrase after normalization.
    std::optional<PropId> find(std::string_view text) const;

    auto begin() const noexcept { return items_.begin(); }
    auto end() const noexcept { return items_.end(); }

    friend bool operator==(const PropositionSet& a, const PropositionSet& b);

private:
    std::vector<Proposition> items_;
};

/// Set of proposition ids true at one trace step.
class LabelSet {
public:
    constexpr LabelSet() = default;
    constexpr explicit LabelSet(std::uint64_t mask) : mask_(mask) {}
    LabelSet(std::initializer_list<PropId> ids);

    constexpr bool contains(PropId id) const noexcept {
        return id < 64 && ((mask_ >> id) & 1u) != 0;
    }
    void insert(PropId id);
    void erase(PropId id) noexcept {
        if (id < 64) mask_ &= ~(std::uint64_t{1} << id);
    }
    constexpr bool empty() const noexcept { return mask_ == 0; }
    constexpr std::size_t size() const noexcept { return static_cast<std::size_t>(std::popcount(mask_)); }
    constexpr std::uint64_t mask() const noexcept { return mask_; }

    constexpr bool intersects(LabelSet other) const noexcept { return (mask_ & other.mask_) != 0; }
    constexpr LabelSet operator&(LabelSet other) const noexcept { return LabelSet(mask_ & other.mask_); }
    constexpr LabelSet operator|(LabelSet other) const noexcept { return LabelSet(mask_ | other.mask_); }

    /// Ascending ids.
    std::vector<PropId> ids() const;

    constexpr bool operator==(const LabelSet&) const = default;

    /// Lexicographic order on the ascending id lists, so {} < {0} < {0,1} < {1}.
    friend std::strong_ordering lexicographic_compare(LabelSet a, LabelSet b) noexcept;

private:
    std::uint64_t mask_ = 0;
};

std::strong_ordering lexicographic_compare(LabelSet a, LabelSet b) noexcept;

/// Renders as "{0,2}".
std::string to_string(LabelSet labels);

} // namespace tlr
