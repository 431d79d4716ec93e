#pragma once

#include "mtlforge/formula.hpp"

#include <charconv>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>

namespace mtlf {

class ParseError : public std::runtime_error {
public:
    enum class Code { Syntax, UnknownAtom, BadInterval };
    ParseError(Code code, std::size_t offset, const std::string& msg)
        : std::runtime_error("at byte " + std::to_string(offset) + ": " + msg), code(code), offset(offset) {}
    Code code;
    std::size_t offset;
};

namespace detail {

class Parser {
public:
    Parser(std::string_view text, const Alphabet& sigma) : s_(text), sigma_(sigma) {}

    Formula parse() {
        Formula f = parse_iff();
        skip_ws();
        if (pos_ != s_.size()) fail("unexpected trailing input");
        return f;
    }

private:
    [[noreturn]] void fail(const std::string& msg, ParseError::Code code = ParseError::Code::Syntax) const {
        throw ParseError(code, pos_, msg);
    }
    [[noreturn]] void fail_at(std::size_t at, const std::string& msg, ParseError::Code code) const {
        throw ParseError(code, at, msg);
    }

    void skip_ws() {
        while (pos_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[pos_]))) ++pos_;
    }
    bool eat(std::string_view tok) {
        skip_ws();
        if (s_.substr(pos_, tok.size()) == tok) {
            pos_ += tok.size();
            return true;
        }
        return false;
    }
    static bool ident_char(char c) { return std::isalnum(static_cast<unsigned char>(c)) || c == '_'; }

    // Identifier at the cursor without consuming it.
    std::string_view peek_ident() {
        skip_ws();
        std::size_t e = pos_;
        while (e < s_.size() && ident_char(s_[e])) ++e;
        return s_.substr(pos_, e - pos_);
    }

    Formula parse_iff() {
        Formula f = parse_imp();
        while (eat("<->")) f = iff(f, parse_imp());
        return f;
    }
    Formula parse_imp() {
        Formula f = parse_or();
        if (eat("->")) return implies(f, parse_imp());
        return f;
    }
    Formula parse_or() {
        Formula f = parse_and();
        while (eat("|")) f = disj(f, parse_and());
        return f;
    }
    Formula parse_and() {
        Formula f = parse_until();
        while (eat("&")) f = conj(f, parse_until());
        return f;
    }
    Formula parse_until() {
        Formula f = parse_unary();
        for (;;) {
            auto id = peek_ident();
            if (id != "U" && id != "S" && id != "wU") return f;
            pos_ += id.size();
            Interval iv = parse_interval_opt();
            Formula g = parse_unary();
            if (id == "U") f = until(f, iv, g);
            else if (id == "S") f = since(f, iv, g);
            else f = weak_until(f, iv, g);
        }
    }

    // An interval is '[' or '(' followed by a digit; '(' otherwise opens a group.
    bool at_interval() {
        skip_ws();
        if (pos_ >= s_.size()) return false;
        char c = s_[pos_];
        if (c == '[') return true;
        if (c != '(') return false;
        std::size_t k = pos_ + 1;
        while (k < s_.size() && std::isspace(static_cast<unsigned char>(s_[k]))) ++k;
        return k < s_.size() && std::isdigit(static_cast<unsigned char>(s_[k]));
    }

    std::uint64_t parse_nat() {
        skip_ws();
        std::size_t b = pos_;
        while (pos_ < s_.size() && std::isdigit(static_cast<unsigned char>(s_[pos_]))) ++pos_;
        if (b == pos_) fail("expected natural number");
        std::uint64_t v = 0;
        auto [p, ec] = std::from_chars(s_.data() + b, s_.data() + pos_, v);
        if (ec != std::errc()) fail_at(b, "number out of range", ParseError::Code::BadInterval);
        return v;
    }

    Interval parse_interval_opt() {
        if (!at_interval()) return Interval::unbounded();
        std::size_t start = pos_;
        bool lc = s_[pos_] == '[';
        ++pos_;
        std::uint64_t lo = parse_nat();
        if (!eat(",")) fail("expected ',' in interval");
        std::optional<std::uint64_t> hi;
        skip_ws();
        if (s_.substr(pos_, 3) == "inf") pos_ += 3;
        else hi = parse_nat();
        skip_ws();
        if (pos_ >= s_.size() || (s_[pos_] != ']' && s_[pos_] != ')')) fail("expected ']' or ')' closing interval");
        bool hc = s_[pos_] == ']';
        ++pos_;
        try {
            return Interval::make(lo, hi, lc, hc);
        } catch (const IntervalError& e) {
            fail_at(start, std::string("ill-formed interval: ") + e.what(), ParseError::Code::BadInterval);
        }
    }

    Formula parse_unary() {
        skip_ws();
        if (eat("!")) return neg(parse_unary());
        if (eat("(")) {
            Formula f = parse_iff();
            if (!eat(")")) fail("expected ')'");
            return f;
        }
        std::size_t at = pos_;
        auto id = peek_ident();
        if (id.empty()) fail("expected formula");
        std::string name(id);
        pos_ += id.size();
        if (name == "F" || name == "P" || name == "G" || name == "H" || name == "wF" || name == "wG" || name == "O") {
            Interval iv = parse_interval_opt();
            Formula g = parse_unary();
            if (name == "F") return eventually(iv, g);
            if (name == "P") return once(iv, g);
            if (name == "G") return always(iv, g);
            if (name == "H") return historically(iv, g);
            if (name == "wF") return weak_eventually(iv, g);
            if (name == "wG") return weak_always(iv, g);
            return until(fls(), iv, g);
        }
        if (name == "BP") return bp();
        if (name == "EP") return ep();
        if (name == "true") return tru();
        if (name == "false") return fls();
        if (name == "act") return act(sigma_);
        if (name == "U" || name == "S" || name == "wU") fail_at(at, "binary operator without left operand", ParseError::Code::Syntax);
        if (!is_valid_prop(name)) fail_at(at, "invalid identifier '" + name + "'", ParseError::Code::Syntax);
        if (!sigma_.contains(name)) fail_at(at, "unknown atom '" + name + "'", ParseError::Code::UnknownAtom);
        return atom(name);
    }

    std::string_view s_;
    const Alphabet& sigma_;
    std::size_t pos_ = 0;
};

}  // namespace detail

inline Formula parse_formula(std::string_view text, const Alphabet& sigma) {
    return detail::Parser(text, sigma).parse();
}

// Fully parenthesized core syntax; parse(render(f)) == f.
inline std::string render_formula(const Formula& f) {
    switch (f.kind()) {
        case Kind::Atom: return f->prop;
        case Kind::BP: return "BP";
        case Kind::EP: return "EP";
        case Kind::True: return "true";
        case Kind::Not: return "(! " + render_formula(f->left) + ")";
        case Kind::And: return "(" + render_formula(f->left) + " & " + render_formula(f->right) + ")";
        case Kind::Until:
        case Kind::Since: {
            std::string op = f.kind() == Kind::Until ? " U" : " S";
            if (!f->iv.is_unbounded()) op += f->iv.str();
            return "(" + render_formula(f->left) + op + " " + render_formula(f->right) + ")";
        }
    }
    return "?";
}

}  // namespace mtlf
