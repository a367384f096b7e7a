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

#include "tlr/formula.hpp"

#include <algorithm>
#include <vector>

#include "tlr/error.hpp"

namespace tlr {

struct Formula::Node {
    Op op;
    PropId atom;
    std::uint64_t hash;
    std::uint32_t depth;
    std::uint32_t size;
    bool simplified;
    Formula left;
    Formula right;
};

namespace {

constexpr std::uint64_t mix(std::uint64_t x) noexcept {
    // splitmix64 finalizer
    x += 0x9E3779B97F4A7C15ull;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
    return x ^ (x >> 31);
}

constexpr std::uint64_t combine(std::uint64_t seed, std::uint64_t v) noexcept {
    return mix(seed ^ (v + 0x632BE59BD9B4E019ull + (seed << 6) + (seed >> 2)));
}

// Constants are shared so that True/False nodes compare by pointer in the hot path.
const Formula& shared_true() {
    static const Formula f = Formula::top();
    return f;
}

} // namespace

Formula Formula::make_node(Op op, PropId atom, const Formula* l, const Formula* r) {
    std::uint64_t h = mix(static_cast<std::uint64_t>(op) + 1);
    std::uint32_t depth = 1;
    std::uint32_t size = 1;
    if (op == Op::Atom) h = combine(h, atom);
    if (l) {
        h = combine(h, l->hash());
        depth = std::max(depth, l->depth() + 1);
        size += l->size();
    }
    if (r) {
        h = combine(h, r->hash());
        depth = std::max(depth, r->depth() + 1);
        size += r->size();
    }
    bool simplified = (!l || l->is_simplified()) && (!r || r->is_simplified());
    if (simplified && (op == Op::Not || op == Op::And || op == Op::Or || op == Op::Implies)) {
        const auto constant = [](const Formula* f) { return f && (f->is_true() || f->is_false()); };
        simplified = !constant(l) && !constant(r) && !(op == Op::Not && l->op() == Op::Not);
    }
    // Leaf nodes hold null children; only accessors of unary/binary nodes read them.
    auto node = std::make_shared<Node>(Node{op, atom, h, depth, size, simplified, Formula(nullptr), Formula(nullptr)});
    if (l) node->left = *l;
    if (r) node->right = *r;
    return Formula(std::shared_ptr<const Node>(std::move(node)));
}

Formula::Formula() : Formula(shared_true()) {}

Formula Formula::top() {
    static const Formula f = make_node(Op::True, 0, nullptr, nullptr);
    return f;
}
Formula Formula::bottom() {
    static const Formula f = make_node(Op::False, 0, nullptr, nullptr);
    return f;
}
Formula Formula::atom(PropId id) {
    if (id >= kMaxPropositions) throw InvalidInput("atom id " + std::to_string(id) + " out of range");
    return make_node(Op::Atom, id, nullptr, nullptr);
}
Formula Formula::negation(Formula f) { return make_node(Op::Not, 0, &f, nullptr); }
Formula Formula::conjunction(Formula a, Formula b) { return make_node(Op::And, 0, &a, &b); }
Formula Formula::disjunction(Formula a, Formula b) { return make_node(Op::Or, 0, &a, &b); }
Formula Formula::implication(Formula a, Formula b) { return make_node(Op::Implies, 0, &a, &b); }
Formula Formula::next(Formula f) { return make_node(Op::Next, 0, &f, nullptr); }
Formula Formula::eventually(Formula f) { return make_node(Op::Eventually, 0, &f, nullptr); }
Formula Formula::always(Formula f) { return make_node(Op::Always, 0, &f, nullptr); }
Formula Formula::until(Formula a, Formula b) { return make_node(Op::Until, 0, &a, &b); }

Op Formula::op() const noexcept { return node_->op; }
PropId Formula::atom_id() const noexcept { return node_->atom; }

const Formula& Formula::lhs() const {
    if (!is_unary(op()) && !is_binary(op())) throw InvalidInput("leaf formula has no operand");
    return node_->left;
}
const Formula& Formula::rhs() const {
    if (!is_binary(op())) throw InvalidInput("formula has no right operand");
    return node_->right;
}

std::uint64_t Formula::hash() const noexcept { return node_->hash; }
std::uint32_t Formula::depth() const noexcept { return node_->depth; }
std::uint32_t Formula::size() const noexcept { return node_->size; }
bool Formula::is_simplified() const noexcept { return node_->simplified; }

bool operator==(const Formula& a, const Formula& b) noexcept {
    if (a.node_ == b.node_) return true;
    if (a.node_->hash != b.node_->hash || a.node_->op != b.node_->op || a.node_->size != b.node_->size) {
        return false;
    }
    switch (a.node_->op) {
    case Op::True:
    case Op::False:
        return true;
    case Op::Atom:
        return a.node_->atom == b.node_->atom;
    default:
        break;
    }
    if (!(a.node_->left == b.node_->left)) return false;
    return !is_binary(a.node_->op) || a.node_->right == b.node_->right;
}

std::strong_ordering structural_compare(const Formula& a, const Formula& b) noexcept {
    if (a.node_ == b.node_) return std::strong_ordering::equal;
    if (auto c = a.node_->op <=> b.node_->op; c != 0) return c;
    switch (a.node_->op) {
    case Op::True:
    case Op::False:
        return std::strong_ordering::equal;
    case Op::Atom:
        return a.node_->atom <=> b.node_->atom;
    default:
        break;
    }
    if (auto c = structural_compare(a.node_->left, b.node_->left); c != 0) return c;
    if (!is_binary(a.node_->op)) return std::strong_ordering::equal;
    return structural_compare(a.node_->right, b.node_->right);
}

bool canonical_less(const Formula& a, const Formula& b) noexcept {
    if (a.hash() != b.hash()) return a.hash() < b.hash();
    return structural_compare(a, b) < 0;
}

std::string_view to_string(Op op) noexcept {
    switch (op) {
    case Op::True: return "true";
    case Op::False: return "false";
    case Op::Atom: return "atom";
    case Op::Not: return "!";
    case Op::And: return "&";
    case Op::Or: return "|";
    case Op::Implies: return "->";
    case Op::Next: return "X";
    case Op::Eventually: return "F";
    case Op::Always: return "G";
    case Op::Until: return "U";
    }
    return "?";
}

namespace {

void collect_props(const Formula& f, LabelSet& out) {
    if (f.op() == Op::Atom) {
        out.insert(f.atom_id());
        return;
    }
    if (is_unary(f.op()) || is_binary(f.op())) collect_props(f.lhs(), out);
    if (is_binary(f.op())) collect_props(f.rhs(), out);
}

void flatten(Op op, const Formula& f, std::vector<Formula>& out) {
    if (f.op() == op) {
        flatten(op, f.lhs(), out);
        flatten(op, f.rhs(), out);
    } else {
        out.push_back(f);
    }
}

// Shared body of make_and / make_or. `absorbing` is the constant that wins
// (False for And), `neutral` the one that vanishes.
Formula make_assoc(Op op, const Formula& a, const Formula& b) {
    const Op absorbing = op == Op::And ? Op::False : Op::True;
    const Op neutral = op == Op::And ? Op::True : Op::False;

    std::vector<Formula> operands;
    flatten(op, a, operands);
    flatten(op, b, operands);

    std::vector<Formula> kept;
    kept.reserve(operands.size());
    for (auto& f : operands) {
        if (f.op() == absorbing) return f;
        if (f.op() != neutral) kept.push_back(std::move(f));
    }
    if (kept.empty()) return neutral == Op::True ? Formula::top() : Formula::bottom();

    std::sort(kept.begin(), kept.end(), canonical_less);
    kept.erase(std::unique(kept.begin(), kept.end()), kept.end());

    // x & !x and x | !x collapse to the absorbing constant.
    for (const auto& f : kept) {
        if (f.op() == Op::Not && std::binary_search(kept.begin(), kept.end(), f.lhs(), canonical_less)) {
            return absorbing == Op::True ? Formula::top() : Formula::bottom();
        }
    }

    Formula acc = kept.back();
    for (auto it = kept.rbegin() + 1; it != kept.rend(); ++it) {
        acc = op == Op::And ? Formula::conjunction(*it, acc) : Formula::disjunction(*it, acc);
    }
    return acc;
}

} // namespace

LabelSet propositions_of(const Formula& f) {
    LabelSet out;
    collect_props(f, out);
    return out;
}

std::optional<PropId> max_atom(const Formula& f) {
    const auto ids = propositions_of(f).ids();
    if (ids.empty()) return std::nullopt;
    return ids.back();
}

Formula make_not(const Formula& f) {
    switch (f.op()) {
    case Op::True: return Formula::bottom();
    case Op::False: return Formula::top();
    case Op::Not: return f.lhs();
    default: return Formula::negation(f);
    }
}

Formula make_and(const Formula& a, const Formula& b) { return make_assoc(Op::And, a, b); }
Formula make_or(const Formula& a, const Formula& b) { return make_assoc(Op::Or, a, b); }

Formula make_implies(const Formula& a, const Formula& b) {
    return make_or(make_not(a), b);
}

Formula simplify(const Formula& f) {
    if (f.is_simplified()) return f;
    switch (f.op()) {
    case Op::Not: return make_not(simplify(f.lhs()));
    case Op::And: return make_and(simplify(f.lhs()), simplify(f.rhs()));
    case Op::Or: return make_or(simplify(f.lhs()), simplify(f.rhs()));
    case Op::Implies: {
        auto a = simplify(f.lhs());
        auto b = simplify(f.rhs());
        if (a.is_true() || a.is_false() || b.is_true() || b.is_false()) return make_implies(a, b);
        return Formula::implication(std::move(a), std::move(b));
    }
    case Op::Next: return Formula::next(simplify(f.lhs()));
    case Op::Eventually: return Formula::eventually(simplify(f.lhs()));
    case Op::Always: return Formula::always(simplify(f.lhs()));
    case Op::Until: return Formula::until(simplify(f.lhs()), simplify(f.rhs()));
    default: return f;
    }
}

} // namespace tlr
