#pragma once

#include <map>
#include <set>
#include <string>

#include "lepage/chart.hpp"
#include "lepage/poly.hpp"

namespace lepage {

// Rational function num/den in canonical form: gcd(num, den) = 1, den monic,
// zero is 0/1.
class Scalar {
public:
    Scalar() : den_(1) {}
    Scalar(long c) : num_(c), den_(1) {}
    Scalar(const Rational& c) : num_(c), den_(1) {}
    Scalar(Poly p) : num_(std::move(p)), den_(1) {}
    Scalar(const Poly& n, const Poly& d);
    static Scalar var(Var v) { return Scalar(Poly::var(v)); }

    const Poly& num() const { return num_; }
    const Poly& den() const { return den_; }
    bool is_zero() const { return num_.is_zero(); }
    bool is_constant() const { return num_.is_constant() && den_.is_constant(); }
    bool is_polynomial() const { return den_.is_one(); }
    Rational constant_value() const { return num_.constant_value(); }
    std::set<Var> variables() const;
    void collect_variables(std::set<Var>& out) const;
    bool has_var(Var v) const { return num_.has_var(v) || den_.has_var(v); }

    Scalar operator-() const;
    Scalar operator+(const Scalar& o) const;
    Scalar operator-(const Scalar& o) const;
    Scalar operator*(const Scalar& o) const;
    Scalar operator/(const Scalar& o) const;
    Scalar& operator+=(const Scalar& o) { return *this = *this + o; }
    Scalar& operator-=(const Scalar& o) { return *this = *this - o; }
    Scalar& operator*=(const Scalar& o) { return *this = *this * o; }
    Scalar pow(long e) const;
    Scalar inverse() const;

    bool operator==(const Scalar& o) const { return num_ == o.num_ && den_ == o.den_; }
    bool operator!=(const Scalar& o) const { return !(*this == o); }

    Scalar partial(Var v) const;

    std::string str(const Chart& chart) const;
    std::string str(const std::function<std::string(Var)>& name) const;

private:
    Poly num_;
    Poly den_;
};

bool is_zero(const Scalar& s);
Scalar partial(const Scalar& s, Var v);

using Bindings = std::map<Var, Scalar>;

// Simultaneous substitution. Throws DivisionByZero when the image denominator vanishes.
Scalar substitute(const Scalar& s, const Bindings& b);
Scalar substitute(const Poly& p, const Bindings& b);

// Throws DivisionByZero if the denominator vanishes at the point.
Rational evaluate(const Scalar& s, const std::map<Var, Rational>& point);

// Numerator made primitive with positive leading coefficient; the canonical
// representative of the hypersurface s = 0.
Poly constraint_key(const Scalar& s);

}  // namespace lepage
