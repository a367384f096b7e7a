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

#include "tlr/progression.hpp"

#include "tlr/error.hpp"

namespace tlr {

namespace {

Formula step(const Formula& f, LabelSet labels) {
    switch (f.op()) {
    case Op::True:
    case Op::False:
        return f;
    case Op::Atom:
        return labels.contains(f.atom_id()) ? Formula::top() : Formula::bottom();
    case Op::Not:
        return make_not(step(f.lhs(), labels));
    case Op::And: {
        auto a = step(f.lhs(), labels);
        if (a.is_false()) return a;
        return make_and(a, step(f.rhs(), labels));
    }
    case Op::Or: {
        auto a = step(f.lhs(), labels);
        if (a.is_true()) return a;
        return make_or(a, step(f.rhs(), labels));
    }
    case Op::Implies: {
        auto a = step(f.lhs(), labels);
        if (a.is_false()) return Formula::top();
        return make_implies(a, step(f.rhs(), labels));
    }
    case Op::Next:
        return f.lhs();
    case Op::Eventually:
        return make_or(step(f.lhs(), labels), f);
    case Op::Always:
        return make_and(step(f.lhs(), labels), f);
    case Op::Until: {
        auto g = step(f.rhs(), labels);
        if (g.is_true()) return g;
        return make_or(g, make_and(step(f.lhs(), labels), f));
    }
    }
    throw Error("unknown formula operator");
}

} // namespace

Formula progress(const Formula& f, LabelSet labels) {
    return step(simplify(f), labels);
}

bool final_eval(const Formula& f) {
    switch (f.op()) {
    case Op::True: return true;
    case Op::False: return false;
    case Op::Atom: return false;
    case Op::Not: return !final_eval(f.lhs());
    case Op::And: return final_eval(f.lhs()) && final_eval(f.rhs());
    case Op::Or: return final_eval(f.lhs()) || final_eval(f.rhs());
    case Op::Implies: return !final_eval(f.lhs()) || final_eval(f.rhs());
    case Op::Next: return false;
    case Op::Eventually: return false;
    case Op::Always: return true;
    case Op::Until: return false;
    }
    throw Error("unknown formula operator");
}

bool accepts(const Formula& f, std::span<const LabelSet> trace) {
    Formula residual = simplify(f);
    for (const auto& labels : trace) {
        residual = progress(residual, labels);
        if (residual.is_true()) return true;
        if (residual.is_false()) return false;
    }
    return final_eval(residual);
}

bool holds(const Formula& f, std::span<const LabelSet> trace, std::size_t pos) {
    const std::size_t n = trace.size();
    switch (f.op()) {
    case Op::True: return true;
    case Op::False: return false;
    case Op::Atom: return pos < n && trace[pos].contains(f.atom_id());
    case Op::Not: return !holds(f.lhs(), trace, pos);
    case Op::And: return holds(f.lhs(), trace, pos) && holds(f.rhs(), trace, pos);
    case Op::Or: return holds(f.lhs(), trace, pos) || holds(f.rhs(), trace, pos);
    case Op::Implies: return !holds(f.lhs(), trace, pos) || holds(f.rhs(), trace, pos);
    case Op::Next: return pos < n && holds(f.lhs(), trace, pos + 1);
    case Op::Eventually:
        for (auto j = pos; j < n; ++j) {
            if (holds(f.lhs(), trace, j)) return true;
        }
        return false;
    case Op::Always:
        for (auto j = pos; j < n; ++j) {
            if (!holds(f.lhs(), trace, j)) return false;
        }
        return true;
    case Op::Until:
        for (auto j = pos; j < n; ++j) {
            if (holds(f.rhs(), trace, j)) return true;
            if (!holds(f.lhs(), trace, j)) return false;
        }
        return false;
    }
    throw Error("unknown formula operator");
}

} // namespace tlr
