#pragma once

#include <cctype>
#include <charconv>
#include <memory>
#include <string>
#include <string_view>

#include "lamlab/util.hpp"

namespace lamlab {

/// Positioned parse failure (1-based line/column).
struct ParseError : std::runtime_error {
    int line;
    int column;
    ParseError(int line_, int col_, const std::string& what_)
        : std::runtime_error(std::to_string(line_) + ":" + std::to_string(col_) + ": " + what_),
          line(line_),
          column(col_) {}
};

struct Expr;
using ExprPtr = std::shared_ptr<const Expr>;

/// Syntax tree over z1..zq (holomorphic use only), a1..ad (arbitrary
/// Lipschitz use, including abs), complex literals, +, -, *, integer powers.
struct Expr {
    enum class Kind { Literal, VarZ, VarA, Add, Sub, Mul, Pow, Abs };
    Kind kind;
    Complex literal{};
    int index = 0;  // 1-based variable index for VarZ/VarA
    unsigned exponent = 0;
    ExprPtr lhs, rhs;

    static ExprPtr make_literal(Complex v) {
        auto e = std::make_shared<Expr>();
        e->kind = Kind::Literal;
        e->literal = v;
        return e;
    }
    static ExprPtr make_var(Kind k, int idx) {
        auto e = std::make_shared<Expr>();
        e->kind = k;
        e->index = idx;
        return e;
    }
    static ExprPtr make_binary(Kind k, ExprPtr a, ExprPtr b) {
        auto e = std::make_shared<Expr>();
        e->kind = k;
        e->lhs = std::move(a);
        e->rhs = std::move(b);
        return e;
    }
    static ExprPtr make_pow(ExprPtr base, unsigned n) {
        auto e = std::make_shared<Expr>();
        e->kind = Kind::Pow;
        e->lhs = std::move(base);
        e->exponent = n;
        return e;
    }
    static ExprPtr make_abs(ExprPtr inner) {
        auto e = std::make_shared<Expr>();
        e->kind = Kind::Abs;
        e->lhs = std::move(inner);
        return e;
    }
};

inline bool expr_equal(const ExprPtr& a, const ExprPtr& b) {
    if (!a || !b) return a == b;
    if (a->kind != b->kind) return false;
    switch (a->kind) {
        case Expr::Kind::Literal:
            return a->literal == b->literal;
        case Expr::Kind::VarZ:
        case Expr::Kind::VarA:
            return a->index == b->index;
        case Expr::Kind::Pow:
            return a->exponent == b->exponent && expr_equal(a->lhs, b->lhs);
        case Expr::Kind::Abs:
            return expr_equal(a->lhs, b->lhs);
        default:
            return expr_equal(a->lhs, b->lhs) && expr_equal(a->rhs, b->rhs);
    }
}

namespace detail {

inline Complex eval_expr(const Expr& e, const CVec& a, const CVec& z) {
    using K = Expr::Kind;
    switch (e.kind) {
        case K::Literal:
            return e.literal;
        case K::VarZ:
            if (e.index < 1 || e.index > static_cast<int>(z.size()))
                throw std::out_of_range("expression references z" + std::to_string(e.index));
            return z[e.index - 1];
        case K::VarA:
            if (e.index < 1 || e.index > static_cast<int>(a.size()))
                throw std::out_of_range("expression references a" + std::to_string(e.index));
            return a[e.index - 1];
        case K::Add:
            return eval_expr(*e.lhs, a, z) + eval_expr(*e.rhs, a, z);
        case K::Sub:
            return eval_expr(*e.lhs, a, z) - eval_expr(*e.rhs, a, z);
        case K::Mul:
            return eval_expr(*e.lhs, a, z) * eval_expr(*e.rhs, a, z);
        case K::Pow: {
            Complex base = eval_expr(*e.lhs, a, z);
            Complex r = 1.0;
            for (unsigned k = 0; k < e.exponent; ++k) r *= base;
            return r;
        }
        case K::Abs:
            return {std::abs(eval_expr(*e.lhs, a, z)), 0.0};
    }
    return {};
}

inline int z_degree(const Expr& e) {
    using K = Expr::Kind;
    switch (e.kind) {
        case K::Literal:
        case K::VarA:
        case K::Abs:  // guard guarantees no z inside
            return 0;
        case K::VarZ:
            return 1;
        case K::Add:
        case K::Sub:
            return std::max(z_degree(*e.lhs), z_degree(*e.rhs));
        case K::Mul:
            return z_degree(*e.lhs) + z_degree(*e.rhs);
        case K::Pow:
            return static_cast<int>(e.exponent) * z_degree(*e.lhs);
    }
    return 0;
}

inline int max_index(const Expr& e, Expr::Kind which) {
    using K = Expr::Kind;
    int m = 0;
    if (e.kind == which) m = e.index;
    if (e.lhs) m = std::max(m, max_index(*e.lhs, which));
    if (e.rhs) m = std::max(m, max_index(*e.rhs, which));
    (void)K::Literal;
    return m;
}

inline std::string print_expr(const Expr& e);

inline std::string print_literal(Complex v) {
    if (v.imag() == 0.0) return format_double(v.real());
    if (v.real() == 0.0) return format_double(v.imag()) + "i";
    // not representable as a single literal; emit an in-grammar sum
    return "(" + format_double(v.real()) + " + " + format_double(v.imag()) + "i)";
}

inline std::string print_child(const Expr& child, bool need_atom, bool need_factor, bool allow_addsub) {
    using K = Expr::Kind;
    std::string s = print_expr(child);
    const bool is_addsub = child.kind == K::Add || child.kind == K::Sub;
    const bool is_mul = child.kind == K::Mul;
    const bool is_atom = child.kind == K::Literal || child.kind == K::VarZ || child.kind == K::VarA ||
                         child.kind == K::Abs;
    if (need_atom && !is_atom) return "(" + s + ")";
    if (need_factor && (is_addsub || is_mul)) return "(" + s + ")";
    if (!allow_addsub && is_addsub) return "(" + s + ")";
    return s;
}

inline std::string print_expr(const Expr& e) {
    using K = Expr::Kind;
    switch (e.kind) {
        case K::Literal:
            return print_literal(e.literal);
        case K::VarZ:
            return "z" + std::to_string(e.index);
        case K::VarA:
            return "a" + std::to_string(e.index);
        case K::Add:
            return print_child(*e.lhs, false, false, true) + " + " +
                   print_child(*e.rhs, false, false, false);
        case K::Sub:
            return print_child(*e.lhs, false, false, true) + " - " +
                   print_child(*e.rhs, false, false, false);
        case K::Mul:
            return print_child(*e.lhs, false, false, false) + "*" +
                   print_child(*e.rhs, true, true, false);
        case K::Pow:
            return print_child(*e.lhs, true, false, false) + "^" + std::to_string(e.exponent);
        case K::Abs:
            return "abs(" + print_child(*e.lhs, true, false, false) + ")";
    }
    return {};
}

}  // namespace detail

/// A parsed family expression h_a(z'): evaluation, z-degree analysis, and
/// canonical printing (parse-print-parse is the identity).
class FamilyExpression {
public:
    FamilyExpression() = default;
    explicit FamilyExpression(ExprPtr root) : root_(std::move(root)) {}

    [[nodiscard]] Complex eval(const CVec& a, const CVec& z) const {
        return detail::eval_expr(*root_, a, z);
    }
    [[nodiscard]] int z_degree() const { return detail::z_degree(*root_); }
    [[nodiscard]] int max_z_index() const { return detail::max_index(*root_, Expr::Kind::VarZ); }
    [[nodiscard]] int max_a_index() const { return detail::max_index(*root_, Expr::Kind::VarA); }
    [[nodiscard]] std::string print() const { return detail::print_expr(*root_); }
    [[nodiscard]] const ExprPtr& root() const { return root_; }
    [[nodiscard]] bool valid() const { return root_ != nullptr; }

    friend bool operator==(const FamilyExpression& a, const FamilyExpression& b) {
        return expr_equal(a.root_, b.root_);
    }

private:
    ExprPtr root_;
};

namespace detail {

class Parser {
public:
    explicit Parser(std::string_view text) : text_(text) {}

    ExprPtr parse() {
        skip_ws();
        ExprPtr e = parse_expr();
        skip_ws();
        if (pos_ < text_.size()) fail("unexpected trailing input");
        return e;
    }

private:
    std::string_view text_;
    std::size_t pos_ = 0;
    int line_ = 1;
    int col_ = 1;

    [[noreturn]] void fail(const std::string& msg) const { throw ParseError(line_, col_, msg); }
    [[noreturn]] void fail_at(int line, int col, const std::string& msg) const {
        throw ParseError(line, col, msg);
    }

    void advance(std::size_t n) {
        for (std::size_t i = 0; i < n && pos_ < text_.size(); ++i) {
            if (text_[pos_] == '\n') {
                ++line_;
                col_ = 1;
            } else {
                ++col_;
            }
            ++pos_;
        }
    }

    void skip_ws() {
        while (pos_ < text_.size() && (text_[pos_] == ' ' || text_[pos_] == '\t' || text_[pos_] == '\n' ||
                                       text_[pos_] == '\r'))
            advance(1);
    }

    [[nodiscard]] char peek() const { return pos_ < text_.size() ? text_[pos_] : '\0'; }

    bool consume(char c) {
        if (peek() == c) {
            advance(1);
            return true;
        }
        return false;
    }

    ExprPtr parse_expr() {
        ExprPtr e = parse_term();
        skip_ws();
        while (peek() == '+' || peek() == '-') {
            const char op = peek();
            advance(1);
            skip_ws();
            ExprPtr rhs = parse_term();
            e = Expr::make_binary(op == '+' ? Expr::Kind::Add : Expr::Kind::Sub, e, rhs);
            skip_ws();
        }
        return e;
    }

    ExprPtr parse_term() {
        ExprPtr e = parse_factor();
        skip_ws();
        while (peek() == '*') {
            advance(1);
            skip_ws();
            ExprPtr rhs = parse_factor();
            e = Expr::make_binary(Expr::Kind::Mul, e, rhs);
            skip_ws();
        }
        return e;
    }

    ExprPtr parse_factor() {
        ExprPtr base = parse_atom();
        skip_ws();
        if (peek() == '^') {
            advance(1);
            skip_ws();
            if (!std::isdigit(static_cast<unsigned char>(peek()))) fail("expected integer exponent after '^'");
            unsigned value = 0;
            while (std::isdigit(static_cast<unsigned char>(peek()))) {
                value = value * 10 + static_cast<unsigned>(peek() - '0');
                if (value > 1000) fail("exponent too large");
                advance(1);
            }
            return Expr::make_pow(base, value);
        }
        return base;
    }

    ExprPtr parse_atom() {
        skip_ws();
        const char c = peek();
        if (c == '(') {
            advance(1);
            ExprPtr e = parse_expr();
            skip_ws();
            if (!consume(')')) fail("expected ')'");
            return e;
        }
        if (c == 'z' || c == 'a') {
            if (c == 'a' && text_.substr(pos_).starts_with("abs(")) return parse_abs();
            const int vline = line_, vcol = col_;
            advance(1);
            if (!std::isdigit(static_cast<unsigned char>(peek())))
                fail_at(vline, vcol, std::string("expected index after '") + c + "'");
            int idx = 0;
            while (std::isdigit(static_cast<unsigned char>(peek()))) {
                idx = idx * 10 + (peek() - '0');
                if (idx > 64) fail_at(vline, vcol, "variable index too large");
                advance(1);
            }
            return Expr::make_var(c == 'z' ? Expr::Kind::VarZ : Expr::Kind::VarA, idx);
        }
        if (c == 'i') {
            advance(1);
            return Expr::make_literal(Complex(0.0, 1.0));
        }
        if (std::isdigit(static_cast<unsigned char>(c))) return parse_number();
        fail("expected literal, variable, abs(...) or '('");
    }

    ExprPtr parse_abs() {
        const int aline = line_, acol = col_;
        advance(4);  // "abs("
        ExprPtr inner = parse_atom();
        skip_ws();
        if (!consume(')')) fail("expected ')' to close abs(");
        const int zvar = max_index(*inner, Expr::Kind::VarZ);
        if (zvar > 0)
            fail_at(aline, acol,
                    "holomorphy guard: abs(...) may not enclose z" + std::to_string(zvar));
        return Expr::make_abs(inner);
    }

    ExprPtr parse_number() {
        const std::size_t start = pos_;
        while (std::isdigit(static_cast<unsigned char>(peek()))) advance(1);
        if (peek() == '.') {
            advance(1);
            while (std::isdigit(static_cast<unsigned char>(peek()))) advance(1);
        }
        if (peek() == 'e' || peek() == 'E') {
            const std::size_t save_pos = pos_;
            const int sl = line_, sc = col_;
            advance(1);
            if (peek() == '+' || peek() == '-') advance(1);
            if (std::isdigit(static_cast<unsigned char>(peek()))) {
                while (std::isdigit(static_cast<unsigned char>(peek()))) advance(1);
            } else {
                pos_ = save_pos;
                line_ = sl;
                col_ = sc;
            }
        }
        double value = 0.0;
        const auto* first = text_.data() + start;
        const auto* last = text_.data() + pos_;
        const auto res = std::from_chars(first, last, value);
        if (res.ec != std::errc{} || res.ptr != last) fail("malformed number literal");
        if (peek() == 'i') {
            advance(1);
            return Expr::make_literal(Complex(0.0, value));
        }
        return Expr::make_literal(Complex(value, 0.0));
    }
};

}  // namespace detail

/// Parse the family grammar:
///   expr := term (('+'|'-') term)* ; term := factor ('*' factor)* ;
///   factor := atom ('^' uint)? ;
///   atom := literal | 'z'k | 'a'k | 'abs(' atom ')' | '(' expr ')'
/// abs() may not enclose any z variable (holomorphy guard, parse time).
inline FamilyExpression parse_family(std::string_view text) {
    detail::Parser p(text);
    return FamilyExpression(p.parse());
}

}  // namespace lamlab
