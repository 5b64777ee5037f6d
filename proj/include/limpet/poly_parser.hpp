#pragma once

#include <cctype>
#include <stdexcept>
#include <string>

#include "limpet/poly.hpp"

namespace limpet {

struct ParseError : std::runtime_error {
    size_t pos;
    ParseError(const std::string& msg, size_t p)
        : std::runtime_error(msg + " (at column " + std::to_string(p + 1) + ")"), pos(p) {}
};

/// Recursive-descent parser for the polynomial text grammar:
///   expr   := ['+'|'-'] term (('+'|'-') term)*
///   term   := factor ('*' factor)*
///   factor := primary ['^' uint]
///   primary:= number | 'x' | 'y' | 'l' | 'a'<digits> | '(' expr ')'
/// Numbers are integers or p/q rationals; whitespace is ignored.
class PolyParser {
  public:
    explicit PolyParser(const std::string& text) : s_(text) {}

    Poly parse() {
        Poly p = expr();
        skip_ws();
        if (pos_ != s_.size()) throw ParseError("unexpected trailing input", pos_);
        return p;
    }

  private:
    const std::string& s_;
    size_t pos_ = 0;

    void skip_ws() {
        while (pos_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[pos_]))) ++pos_;
    }
    char peek() {
        skip_ws();
        return pos_ < s_.size() ? s_[pos_] : '\0';
    }
    bool eat(char c) {
        if (peek() == c) {
            ++pos_;
            return true;
        }
        return false;
    }

    Poly expr() {
        bool neg = false;
        if (eat('-'))
            neg = true;
        else
            eat('+');
        Poly acc = term();
        if (neg) acc = -acc;
        while (true) {
            char c = peek();
            if (c == '+') {
                ++pos_;
                acc += term();
            } else if (c == '-') {
                ++pos_;
                acc -= term();
            } else {
                break;
            }
        }
        return acc;
    }

    Poly term() {
        Poly acc = factor();
        while (eat('*')) acc *= factor();
        return acc;
    }

    Poly factor() {
        Poly base = primary();
        if (eat('^')) {
            size_t start = pos_;
            skip_ws();
            if (pos_ >= s_.size() || !std::isdigit(static_cast<unsigned char>(s_[pos_])))
                throw ParseError("expected non-negative integer exponent", start);
            long exp = 0;
            while (pos_ < s_.size() && std::isdigit(static_cast<unsigned char>(s_[pos_]))) {
                exp = exp * 10 + (s_[pos_] - '0');
                if (exp > 255) throw ParseError("exponent too large", start);
                ++pos_;
            }
            return base.pow(static_cast<int>(exp));
        }
        return base;
    }

    Poly primary() {
        char c = peek();
        size_t start = pos_;
        if (c == '(') {
            ++pos_;
            Poly p = expr();
            if (!eat(')')) throw ParseError("expected ')'", pos_);
            return p;
        }
        if (std::isdigit(static_cast<unsigned char>(c))) return number(start);
        if (c == 'x') {
            ++pos_;
            return Poly::variable(VX);
        }
        if (c == 'y') {
            ++pos_;
            return Poly::variable(VY);
        }
        if (c == 'l') {
            ++pos_;
            return Poly::variable(VL);
        }
        if (c == 'a') {
            ++pos_;
            if (pos_ >= s_.size() || !std::isdigit(static_cast<unsigned char>(s_[pos_])))
                throw ParseError("expected index after 'a'", pos_);
            long idx = 0;
            while (pos_ < s_.size() && std::isdigit(static_cast<unsigned char>(s_[pos_]))) {
                idx = idx * 10 + (s_[pos_] - '0');
                ++pos_;
            }
            if (idx < 1 || VA + idx - 1 >= kMaxVars) throw ParseError("parameter index out of range", start);
            return Poly::variable(VA + static_cast<int>(idx) - 1);
        }
        throw ParseError("expected number, variable or '('", start);
    }

    Poly number(size_t start) {
        std::string num;
        while (pos_ < s_.size() && std::isdigit(static_cast<unsigned char>(s_[pos_]))) num += s_[pos_++];
        if (pos_ + 1 < s_.size() && s_[pos_] == '/' && std::isdigit(static_cast<unsigned char>(s_[pos_ + 1]))) {
            num += s_[pos_++];
            while (pos_ < s_.size() && std::isdigit(static_cast<unsigned char>(s_[pos_]))) num += s_[pos_++];
        }
        try {
            return Poly::constant(parse_rat(num));
        } catch (const std::invalid_argument& e) {
            throw ParseError(e.what(), start);
        }
    }
};

inline Poly parse_poly(const std::string& text) { return PolyParser(text).parse(); }

}  // namespace limpet
