#include "lepage/expr.hpp"

#include <cctype>

#include "lepage/errors.hpp"

namespace lepage {

ExprPtr make_number(const Rational& v) {
    auto e = std::make_shared<Expr>();
    e->kind = Expr::Kind::number;
    e->value = v;
    return e;
}

ExprPtr make_name(const std::string& n) {
    auto e = std::make_shared<Expr>();
    e->kind = Expr::Kind::name;
    e->name = n;
    return e;
}

ExprPtr make_node(Expr::Kind k, std::vector<ExprPtr> args, std::string name) {
    auto e = std::make_shared<Expr>();
    e->kind = k;
    e->args = std::move(args);
    e->name = std::move(name);
    return e;
}

namespace {

enum class Tok { number, ident, op, end };

struct Token {
    Tok kind;
    std::string text;
    int line;
    int column;
};

class Lexer {
public:
    Lexer(const std::string& s, int line, int col) : s_(s), line_(line), col_(col) {}

    std::vector<Token> run() {
        std::vector<Token> out;
        for (;;) {
            skip_space();
            if (i_ >= s_.size()) {
                out.push_back({Tok::end, "", line_, col_});
                return out;
            }
            int l = line_, c = col_;
            char ch = s_[i_];
            if (std::isdigit(static_cast<unsigned char>(ch))) {
                std::string t;
                while (i_ < s_.size() && std::isdigit(static_cast<unsigned char>(s_[i_]))) t += take();
                out.push_back({Tok::number, t, l, c});
            } else if (std::isalpha(static_cast<unsigned char>(ch))) {
                out.push_back({Tok::ident, identifier(), l, c});
            } else if (ch == '/' && i_ + 1 < s_.size() && s_[i_ + 1] == '\\') {
                take();
                take();
                out.push_back({Tok::op, "/\\", l, c});
            } else if (std::string("+-*/^()[],:").find(ch) != std::string::npos) {
                out.push_back({Tok::op, std::string(1, take()), l, c});
            } else {
                throw ParseError(std::string("unexpected character '") + ch + "'", l, c);
            }
        }
    }

private:
    char take() {
        char c = s_[i_++];
        if (c == '\n') {
            ++line_;
            col_ = 1;
        } else {
            ++col_;
        }
        return c;
    }

    void skip_space() {
        while (i_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[i_]))) take();
    }

    // Plain identifiers, plus fiber names such as Z[q;x,y] whose bracket
    // holds a ';', optionally followed by primes.
    std::string identifier() {
        std::string t;
        while (i_ < s_.size() && (std::isalnum(static_cast<unsigned char>(s_[i_])) || s_[i_] == '_')) t += take();
        if (i_ < s_.size() && s_[i_] == '[') {
            auto close = s_.find(']', i_);
            if (close != std::string::npos) {
                std::string inner = s_.substr(i_, close - i_ + 1);
                if (inner.find(';') != std::string::npos) {
                    for (char ch : inner)
                        if (!std::isspace(static_cast<unsigned char>(ch))) t += ch;
                    while (i_ <= close) take();
                }
            }
        }
        while (i_ < s_.size() && s_[i_] == '\'') t += take();
        return t;
    }

    const std::string& s_;
    std::size_t i_ = 0;
    int line_;
    int col_;
};

class Parser {
public:
    explicit Parser(std::vector<Token> toks) : t_(std::move(toks)) {}

    ExprPtr parse() {
        auto e = sum();
        if (peek().kind != Tok::end) fail("unexpected '" + peek().text + "'");
        return e;
    }

private:
    const Token& peek() const { return t_[p_]; }
    bool is_op(const char* s) const { return peek().kind == Tok::op && peek().text == s; }
    [[noreturn]] void fail(const std::string& msg) const { throw ParseError(msg, peek().line, peek().column); }
    void expect(const char* s) {
        if (!is_op(s)) fail(std::string("expected '") + s + "'");
        ++p_;
    }

    ExprPtr at(ExprPtr e, const Token& tk) {
        auto m = std::const_pointer_cast<Expr>(e);
        m->line = tk.line;
        m->column = tk.column;
        return m;
    }

    ExprPtr sum() {
        auto l = wedge();
        while (is_op("+") || is_op("-")) {
            Token tk = t_[p_++];
            auto r = wedge();
            l = at(make_node(tk.text == "+" ? Expr::Kind::add : Expr::Kind::sub, {l, r}), tk);
        }
        return l;
    }

    ExprPtr wedge() {
        auto l = product();
        while (is_op("/\\")) {
            Token tk = t_[p_++];
            auto r = product();
            l = at(make_node(Expr::Kind::wedge, {l, r}), tk);
        }
        return l;
    }

    ExprPtr product() {
        auto l = unary();
        while (is_op("*") || is_op("/")) {
            Token tk = t_[p_++];
            auto r = unary();
            l = at(make_node(tk.text == "*" ? Expr::Kind::mul : Expr::Kind::div, {l, r}), tk);
        }
        return l;
    }

    ExprPtr unary() {
        if (is_op("-")) {
            Token tk = t_[p_++];
            return at(make_node(Expr::Kind::neg, {unary()}), tk);
        }
        return power();
    }

    ExprPtr power() {
        auto b = primary();
        if (is_op("^")) {
            Token tk = t_[p_++];
            ExprPtr ex;
            if (is_op("-")) {
                Token mt = t_[p_++];
                ex = at(make_node(Expr::Kind::neg, {primary()}), mt);
            } else {
                ex = primary();
            }
            return at(make_node(Expr::Kind::pow, {b, ex}), tk);
        }
        return b;
    }

    ExprPtr primary() {
        const Token tk = peek();
        if (tk.kind == Tok::number) {
            ++p_;
            return at(make_number(Rational(mpz_class(tk.text))), tk);
        }
        if (is_op("(")) {
            ++p_;
            auto e = sum();
            expect(")");
            return e;
        }
        if (tk.kind == Tok::ident) {
            ++p_;
            if (tk.text == "sum" && is_op("(")) return sum_node(tk);
            if (is_op("(")) {
                ++p_;
                auto args = arg_list(")");
                return at(make_node(Expr::Kind::call, std::move(args), tk.text), tk);
            }
            if (is_op("[")) {
                ++p_;
                auto args = arg_list("]");
                return at(make_node(Expr::Kind::index, std::move(args), tk.text), tk);
            }
            return at(make_name(tk.text), tk);
        }
        if (tk.kind == Tok::end) fail("unexpected end of expression");
        fail("unexpected '" + tk.text + "'");
    }

    std::vector<ExprPtr> arg_list(const char* close) {
        std::vector<ExprPtr> args;
        if (is_op(close)) {
            ++p_;
            return args;
        }
        for (;;) {
            args.push_back(sum());
            if (is_op(",")) {
                ++p_;
                continue;
            }
            expect(close);
            return args;
        }
    }

    ExprPtr sum_node(const Token& tk) {
        expect("(");
        std::vector<ExprPtr> args;
        for (;;) {
            if (peek().kind != Tok::ident) fail("expected index name in sum");
            args.push_back(at(make_name(peek().text), peek()));
            ++p_;
            if (is_op(",")) {
                ++p_;
                continue;
            }
            expect(":");
            break;
        }
        args.push_back(sum());
        expect(")");
        return at(make_node(Expr::Kind::sum, std::move(args)), tk);
    }

    std::vector<Token> t_;
    std::size_t p_ = 0;
};

int precedence(const Expr& e) {
    switch (e.kind) {
        case Expr::Kind::add:
        case Expr::Kind::sub: return 1;
        case Expr::Kind::wedge: return 2;
        case Expr::Kind::mul:
        case Expr::Kind::div: return 3;
        case Expr::Kind::neg: return 4;
        case Expr::Kind::pow: return 5;
        default: return 6;
    }
}

std::string print_at(const Expr& e, int ctx) {
    std::string s;
    auto join = [](const std::vector<ExprPtr>& a, std::size_t n) {
        std::string out;
        for (std::size_t i = 0; i < n; ++i) {
            if (i) out += ", ";
            out += print_at(*a[i], 0);
        }
        return out;
    };
    switch (e.kind) {
        case Expr::Kind::number:
            s = e.value.get_den() == 1 ? e.value.get_num().get_str() : "(" + e.value.get_str() + ")";
            break;
        case Expr::Kind::name: s = e.name; break;
        case Expr::Kind::index: s = e.name + "[" + join(e.args, e.args.size()) + "]"; break;
        case Expr::Kind::call: s = e.name + "(" + join(e.args, e.args.size()) + ")"; break;
        case Expr::Kind::sum:
            s = "sum(" + join(e.args, e.args.size() - 1) + ": " + print_at(*e.args.back(), 0) + ")";
            break;
        case Expr::Kind::neg: s = "-" + print_at(*e.args[0], 4); break;
        case Expr::Kind::add: s = print_at(*e.args[0], 1) + " + " + print_at(*e.args[1], 2); break;
        case Expr::Kind::sub: s = print_at(*e.args[0], 1) + " - " + print_at(*e.args[1], 2); break;
        case Expr::Kind::wedge: s = print_at(*e.args[0], 2) + " /\\ " + print_at(*e.args[1], 3); break;
        case Expr::Kind::mul: s = print_at(*e.args[0], 3) + "*" + print_at(*e.args[1], 4); break;
        case Expr::Kind::div: s = print_at(*e.args[0], 3) + "/" + print_at(*e.args[1], 4); break;
        case Expr::Kind::pow: {
            const Expr& x = *e.args[1];
            std::string ex = x.kind == Expr::Kind::number ? print_at(x, 6) : "(" + print_at(x, 0) + ")";
            s = print_at(*e.args[0], 6) + "^" + ex;
            break;
        }
    }
    if (precedence(e) < ctx) return "(" + s + ")";
    return s;
}

long integer_exponent(const Expr& e) {
    if (e.kind == Expr::Kind::number && e.value.get_den() == 1 && e.value.get_num().fits_slong_p())
        return e.value.get_num().get_si();
    if (e.kind == Expr::Kind::neg) return -integer_exponent(*e.args[0]);
    throw ParseError("exponent must be an integer literal", e.line, e.column);
}

}  // namespace

ExprPtr parse_expr(const std::string& text, int line, int column) {
    return Parser(Lexer(text, line, column).run()).parse();
}

std::string print_expr(const Expr& e) { return print_at(e, 0); }

Scalar normalize(const Expr& e, const Chart& chart) {
    switch (e.kind) {
        case Expr::Kind::number: return Scalar(e.value);
        case Expr::Kind::name: {
            auto p = chart.parameters.find(e.name);
            if (p != chart.parameters.end()) return Scalar(p->second);
            auto v = chart.find(e.name);
            if (!v) throw UnknownName(e.name);
            return Scalar::var(*v);
        }
        case Expr::Kind::neg: return -normalize(*e.args[0], chart);
        case Expr::Kind::add: return normalize(*e.args[0], chart) + normalize(*e.args[1], chart);
        case Expr::Kind::sub: return normalize(*e.args[0], chart) - normalize(*e.args[1], chart);
        case Expr::Kind::mul: return normalize(*e.args[0], chart) * normalize(*e.args[1], chart);
        case Expr::Kind::div: {
            Scalar d = normalize(*e.args[1], chart);
            if (d.is_zero()) throw DivisionByZero();
            return normalize(*e.args[0], chart) / d;
        }
        case Expr::Kind::pow: {
            long k = integer_exponent(*e.args[1]);
            Scalar b = normalize(*e.args[0], chart);
            if (k < 0 && b.is_zero()) throw DivisionByZero();
            return b.pow(k);
        }
        default: throw ParseError("not a scalar expression: " + print_expr(e), e.line, e.column);
    }
}

Scalar normalize(const std::string& text, const Chart& chart) { return normalize(*parse_expr(text), chart); }

}  // namespace lepage
