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

#include "tlr/parse.hpp"

#include <cctype>
#include <charconv>
#include <optional>
#include <vector>

#include "tlr/error.hpp"

namespace tlr {

namespace {

enum class Tok {
    String,
    Alias,
    True,
    False,
    Not,
    And,
    Or,
    Implies,
    Next,
    Eventually,
    Always,
    Until,
    LParen,
    RParen,
    End,
};

struct Token {
    Tok kind;
    std::size_t offset;
    std::string text;
};

std::optional<PropId> alias_id(std::string_view s) {
    if (s.size() < 2 || s[0] != 'p') return std::nullopt;
    PropId id = 0;
    auto [ptr, ec] = std::from_chars(s.data() + 1, s.data() + s.size(), id);
    if (ec != std::errc{} || ptr != s.data() + s.size()) return std::nullopt;
    return id;
}

std::vector<Token> lex(std::string_view src) {
    std::vector<Token> out;
    std::size_t i = 0;
    while (i < src.size()) {
        const char c = src[i];
        if (std::isspace(static_cast<unsigned char>(c))) {
            ++i;
            continue;
        }
        const std::size_t start = i;
        switch (c) {
        case '(': out.push_back({Tok::LParen, start, {}}); ++i; continue;
        case ')': out.push_back({Tok::RParen, start, {}}); ++i; continue;
        case '!': out.push_back({Tok::Not, start, {}}); ++i; continue;
        case '&': out.push_back({Tok::And, start, {}}); ++i; continue;
        case '|': out.push_back({Tok::Or, start, {}}); ++i; continue;
        case '-':
            if (i + 1 < src.size() && src[i + 1] == '>') {
                out.push_back({Tok::Implies, start, {}});
                i += 2;
                continue;
            }
            throw ParseError("lexical error: expected '->'", start);
        case '"': {
            std::string text;
            ++i;
            bool closed = false;
            while (i < src.size()) {
                char d = src[i++];
                if (d == '"') {
                    closed = true;
                    break;
                }
                if (d == '\\') {
                    if (i >= src.size()) break;
                    d = src[i++];
                    if (d != '"' && d != '\\') {
                        throw ParseError("lexical error: unknown escape '\\" + std::string(1, d) + "'", i - 2);
                    }
                }
                text.push_back(d);
            }
            if (!closed) throw ParseError("lexical error: unterminated string", start);
            out.push_back({Tok::String, start, std::move(text)});
            continue;
        }
        default:
            break;
        }
        if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
            while (i < src.size() &&
                   (std::isalnum(static_cast<unsigned char>(src[i])) || src[i] == '_')) {
                ++i;
            }
            std::string word(src.substr(start, i - start));
            Tok kind;
            if (word == "X") kind = Tok::Next;
            else if (word == "F") kind = Tok::Eventually;
            else if (word == "G") kind = Tok::Always;
            else if (word == "U") kind = Tok::Until;
            else if (word == "true") kind = Tok::True;
            else if (word == "false") kind = Tok::False;
            else if (alias_id(word)) kind = Tok::Alias;
            else throw ParseError("lexical error: unknown identifier '" + word + "'", start);
            out.push_back({kind, start, std::move(word)});
            continue;
        }
        throw ParseError(std::string("lexical error: unexpected character '") + c + "'", start);
    }
    out.push_back({Tok::End, src.size(), {}});
    return out;
}

class Parser {
public:
    Parser(std::vector<Token> tokens, const PropositionSet& props)
        : tokens_(std::move(tokens)), props_(props) {}

    Formula parse() {
        auto f = formula();
        const auto& t = peek();
        if (t.kind == Tok::RParen) throw ParseError("unbalanced parentheses: unexpected ')'", t.offset);
        if (t.kind != Tok::End) throw ParseError("unexpected token after formula", t.offset);
        return f;
    }

private:
    const Token& peek() const { return tokens_[pos_]; }
    const Token& take() { return tokens_[pos_++]; }
    bool accept(Tok kind) {
        if (peek().kind != kind) return false;
        ++pos_;
        return true;
    }

    Formula formula() {
        auto lhs = disj();
        if (accept(Tok::Implies)) return Formula::implication(std::move(lhs), formula());
        return lhs;
    }

    Formula disj() {
        auto lhs = conj();
        while (accept(Tok::Or)) lhs = Formula::disjunction(std::move(lhs), conj());
        return lhs;
    }

    Formula conj() {
        auto lhs = until();
        while (accept(Tok::And)) lhs = Formula::conjunction(std::move(lhs), until());
        return lhs;
    }

    Formula until() {
        auto lhs = unary();
        if (accept(Tok::Until)) return Formula::until(std::move(lhs), until());
        return lhs;
    }

    Formula unary() {
        switch (peek().kind) {
        case Tok::Not: take(); return Formula::negation(unary());
        case Tok::Next: take(); return Formula::next(unary());
        case Tok::Eventually: take(); return Formula::eventually(unary());
        case Tok::Always: take(); return Formula::always(unary());
        default: return primary();
        }
    }

    Formula primary() {
        const Token& t = take();
        switch (t.kind) {
        case Tok::LParen: {
            auto f = formula();
            if (!accept(Tok::RParen)) {
                const auto& at = peek();
                if (at.kind == Tok::End) {
                    throw ParseError("unbalanced parentheses: missing ')' for '('", t.offset);
                }
                throw ParseError("expected ')'", at.offset);
            }
            return f;
        }
        case Tok::True: return Formula::top();
        case Tok::False: return Formula::bottom();
        case Tok::String: return resolve(t, true);
        case Tok::Alias: return resolve(t, false);
        case Tok::RParen: throw ParseError("unbalanced parentheses: unexpected ')'", t.offset);
        case Tok::End: throw ParseError("unexpected end of formula", t.offset);
        default: throw ParseError("expected an atom or '('", t.offset);
        }
    }

    Formula resolve(const Token& t, bool quoted) {
        if (quoted) {
            if (auto id = props_.find(t.text)) return Formula::atom(*id);
        }
        if (auto id = alias_id(t.text)) {
            if (*id < props_.size()) return Formula::atom(*id);
            throw ParseError("proposition alias '" + t.text + "' out of range (" +
                                 std::to_string(props_.size()) + " propositions)",
                             t.offset);
        }
        throw ParseError("unknown proposition phrase \"" + t.text + "\"", t.offset);
    }

    std::vector<Token> tokens_;
    const PropositionSet& props_;
    std::size_t pos_ = 0;
};

int precedence(Op op) {
    switch (op) {
    case Op::Implies: return 1;
    case Op::Or: return 2;
    case Op::And: return 3;
    case Op::Until: return 4;
    case Op::Not:
    case Op::Next:
    case Op::Eventually:
    case Op::Always: return 5;
    default: return 6;
    }
}

std::string quote(std::string_view text) {
    std::string out = "\"";
    for (char c : text) {
        if (c == '"' || c == '\\') out.push_back('\\');
        out.push_back(c);
    }
    out.push_back('"');
    return out;
}

template <typename AtomFn>
void write(const Formula& f, int min_prec, const AtomFn& atom, std::string& out) {
    const int prec = precedence(f.op());
    const bool parens = prec < min_prec;
    if (parens) out.push_back('(');
    switch (f.op()) {
    case Op::True: out += "true"; break;
    case Op::False: out += "false"; break;
    case Op::Atom: out += atom(f.atom_id()); break;
    case Op::Not:
        out += '!';
        write(f.lhs(), 5, atom, out);
        break;
    case Op::Next:
    case Op::Eventually:
    case Op::Always:
        out += to_string(f.op());
        out += ' ';
        write(f.lhs(), 5, atom, out);
        break;
    case Op::Implies:
    case Op::Until:
        // right associative
        write(f.lhs(), prec + 1, atom, out);
        out += ' ';
        out += to_string(f.op());
        out += ' ';
        write(f.rhs(), prec, atom, out);
        break;
    case Op::And:
    case Op::Or:
        write(f.lhs(), prec, atom, out);
        out += ' ';
        out += to_string(f.op());
        out += ' ';
        write(f.rhs(), prec + 1, atom, out);
        break;
    }
    if (parens) out.push_back(')');
}

} // namespace

Formula parse_tl(std::string_view text, const PropositionSet& props) {
    return Parser(lex(text), props).parse();
}

std::string render(const Formula& f, const PropositionSet& props) {
    std::string out;
    write(f, 0, [&](PropId id) {
        if (id >= props.size()) {
            throw InvalidInput("dangling atom id " + std::to_string(id) + " (" +
                               std::to_string(props.size()) + " propositions)");
        }
        return quote(props[id].text);
    }, out);
    return out;
}

std::string render_aliases(const Formula& f) {
    std::string out;
    write(f, 0, [](PropId id) { return "p" + std::to_string(id); }, out);
    return out;
}

} // namespace tlr
