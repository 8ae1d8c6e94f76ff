#pragma once

#include <memory>
#include <string>
#include <vector>

#include "lepage/chart.hpp"
#include "lepage/scalar.hpp"

namespace lepage {

struct Expr;
using ExprPtr = std::shared_ptr<const Expr>;

// Expression tree shared by scalar normalization and the problem-file
// language. `index` is name[args], `call` is name(args), `sum` holds the
// index names followed by the body as its last argument.
struct Expr {
    enum class Kind { number, name, index, call, sum, neg, add, sub, mul, div, pow, wedge };
    Kind kind = Kind::number;
    Rational value;
    std::string name;
    std::vector<ExprPtr> args;
    int line = 1;
    int column = 1;
};

ExprPtr make_number(const Rational& v);
ExprPtr make_name(const std::string& n);
ExprPtr make_node(Expr::Kind k, std::vector<ExprPtr> args, std::string name = {});

// Throws ParseError. line/column offsets locate the text inside a larger file.
ExprPtr parse_expr(const std::string& text, int line = 1, int column = 1);

// Canonical text; parse_expr(print_expr(e)) prints identically.
std::string print_expr(const Expr& e);

// Scalar value of a tree built from numbers, chart names, parameters,
// + - * / and integer powers.
Scalar normalize(const Expr& e, const Chart& chart);
Scalar normalize(const std::string& text, const Chart& chart);

}  // namespace lepage
