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

#include <compare>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <memory>
#include <string_view>

#include "tlr/proposition.hpp"

namespace tlr {

enum class Op : std::uint8_t {
    True,
    False,
    Atom,
    Not,
    And,
    Or,
    Implies,
    Next,
    Eventually,
    Always,
    Until,
};

std::string_view to_string(Op op) noexcept;
constexpr bool is_unary(Op op) noexcept {
    return op == Op::Not || op == Op::Next || op == Op::Eventually || op == Op::Always;
}
constexpr bool is_binary(Op op) noexcept {
    return op == Op::And || op == Op::Or || op == Op::Implies || op == Op::Until;
}

/// Immutable temporal-logic formula. Nodes are shared, so copies are cheap
/// and a Formula can be used from any thread.
///
/// The factories below build exactly the tree they are given. The `make_*`
/// free functions further down simplify and canonicalize instead.
class Formula {
public:
    /// Default-constructs `true`.
    Formula();

    static Formula top();
    static Formula bottom();
    static Formula atom(PropId id);
    static Formula negation(Formula f);
    static Formula conjunction(Formula a, Formula b);
    static Formula disjunction(Formula a, Formula b);
    static Formula implication(Formula a, Formula b);
    static Formula next(Formula f);
    static Formula eventually(Formula f);
    static Formula always(Formula f);
    static Formula until(Formula a, Formula b);

    Op op() const noexcept;
    /// Only meaningful for Op::Atom.
    PropId atom_id() const noexcept;
    /// Operand of a unary node, left operand of a binary node.
    const Formula& lhs() const;
    const Formula& rhs() const;

    /// Structural hash. Stable across runs and platforms.
    std::uint64_t hash() const noexcept;
    /// Height of the tree counted in nodes: an atom has depth 1.
    std::uint32_t depth() const noexcept;
    std::uint32_t size() const noexcept;

    /// True when no Boolean node has a constant operand and there is no
    /// double negation anywhere in the tree.
    bool is_simplified() const noexcept;

    bool is_true() const noexcept { return op() == Op::True; }
    bool is_false() const noexcept { return op() == Op::False; }

    friend bool operator==(const Formula& a, const Formula& b) noexcept;

    /// Total structural order; used to canonicalize commutative operands.
    friend std::strong_ordering structural_compare(const Formula& a, const Formula& b) noexcept;

private:
    struct Node;
    explicit Formula(std::shared_ptr<const Node> node) : node_(std::move(node)) {}
    static Formula make_node(Op op, PropId atom, const Formula* l, const Formula* r);

    std::shared_ptr<const Node> node_;
};

std::strong_ordering structural_compare(const Formula& a, const Formula& b) noexcept;

/// Orders by hash first, then structurally. This is the operand order that
/// `make_and` / `make_or` produce.
bool canonical_less(const Formula& a, const Formula& b) noexcept;

/// Propositions appearing anywhere in `f`.
LabelSet propositions_of(const Formula& f);

/// Largest atom id in `f`, or nothing when `f` has no atoms.
std::optional<PropId> max_atom(const Formula& f);

// Simplifying constructors. They absorb constants, remove double negation,
// flatten nested And/Or chains, drop duplicate operands, and sort operands by
// `canonical_less`, so two formulas that differ only in operand order or
// grouping become equal.
Formula make_not(const Formula& f);
Formula make_and(const Formula& a, const Formula& b);
Formula make_or(const Formula& a, const Formula& b);
Formula make_implies(const Formula& a, const Formula& b);

/// Rebuilds `f` bottom-up so that `is_simplified()` holds. Temporal nodes are
/// kept; only Boolean structure is rewritten. O(1) on simplified input.
Formula simplify(const Formula& f);

} // namespace tlr

template <>
struct std::hash<tlr::Formula> {
    std::size_t operator()(const tlr::Formula& f) const noexcept {
        return static_cast<std::size_t>(f.hash());
    }
};
