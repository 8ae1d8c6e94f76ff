#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include <gmpxx.h>

namespace lepage {

using Rational = mpq_class;
using Var = std::uint32_t;

// Sparse exponent vector, sorted by variable index, no zero exponents.
class Monomial {
public:
    Monomial() = default;
    static Monomial var(Var v, std::uint32_t e = 1);

    const std::vector<std::pair<Var, std::uint32_t>>& factors() const { return f_; }
    std::uint32_t degree() const { return deg_; }
    std::uint32_t degree_in(Var v) const;
    bool is_one() const { return f_.empty(); }
    bool divides(const Monomial& other) const;

    Monomial operator*(const Monomial& o) const;
    // Requires divides(o, *this).
    Monomial operator/(const Monomial& o) const;
    Monomial without(Var v) const;
    static Monomial gcd(const Monomial& a, const Monomial& b);

    bool operator==(const Monomial& o) const { return f_ == o.f_; }
    bool operator!=(const Monomial& o) const { return f_ != o.f_; }

    // Graded lex with lower variable index ranking higher.
    static int compare(const Monomial& a, const Monomial& b);

private:
    std::vector<std::pair<Var, std::uint32_t>> f_;
    std::uint32_t deg_ = 0;
    friend class Poly;
};

struct Term {
    Monomial mono;
    Rational coef;
};

// Multivariate polynomial over Q. Terms sorted in decreasing graded lex order.
class Poly {
public:
    Poly() = default;
    Poly(long c);
    Poly(const Rational& c);
    static Poly var(Var v);
    static Poly monomial(const Monomial& m, const Rational& c);
    static Poly from_terms(std::vector<Term> terms);

    const std::vector<Term>& terms() const { return t_; }
    bool is_zero() const { return t_.empty(); }
    bool is_constant() const { return t_.empty() || (t_.size() == 1 && t_[0].mono.is_one()); }
    bool is_one() const;
    bool is_monomial() const { return t_.size() == 1; }
    Rational constant_value() const;
    const Term& leading() const { return t_.front(); }
    std::uint32_t total_degree() const;
    std::uint32_t degree_in(Var v) const;
    std::set<Var> variables() const;
    void collect_variables(std::set<Var>& out) const;
    bool has_var(Var v) const;

    Poly operator-() const;
    Poly operator+(const Poly& o) const;
    Poly operator-(const Poly& o) const;
    Poly operator*(const Poly& o) const;
    Poly scaled(const Rational& c) const;
    Poly times_monomial(const Monomial& m) const;
    Poly pow(unsigned e) const;
    Poly& operator+=(const Poly& o) { return *this = *this + o; }
    Poly& operator-=(const Poly& o) { return *this = *this - o; }
    Poly& operator*=(const Poly& o) { return *this = *this * o; }

    bool operator==(const Poly& o) const;
    bool operator!=(const Poly& o) const { return !(*this == o); }

    Poly partial(Var v) const;
    // Coefficients with respect to v: exponent -> coefficient free of v.
    std::map<std::uint32_t, Poly> coefficients_in(Var v) const;
    static Poly from_coefficients(Var v, const std::map<std::uint32_t, Poly>& c);

    Rational evaluate(const std::map<Var, Rational>& point) const;

    // Exact division; throws std::domain_error if d does not divide *this.
    Poly exact_div(const Poly& d) const;
    bool divides(const Poly& n, Poly* quotient = nullptr) const;

    // Scaled so the leading coefficient is 1.
    Poly monic() const;
    // Scaled to integer coefficients with content 1 and positive leading coefficient.
    Poly primitive() const;
    Monomial monomial_content() const;

    static Poly gcd(const Poly& a, const Poly& b);

    std::string str(const std::function<std::string(Var)>& name) const;

private:
    std::vector<Term> t_;
};

}  // namespace lepage
