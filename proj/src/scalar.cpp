#include "lepage/scalar.hpp"

#include "lepage/errors.hpp"

namespace lepage {

Scalar::Scalar(const Poly& n, const Poly& d) {
    if (d.is_zero()) throw DivisionByZero();
    if (n.is_zero()) {
        den_ = Poly(1);
        return;
    }
    if (d.is_constant()) {
        num_ = n.scaled(1 / d.constant_value());
        den_ = Poly(1);
        return;
    }
    Poly g = Poly::gcd(n, d);
    Poly nn = g.is_one() ? n : n.exact_div(g);
    Poly dd = g.is_one() ? d : d.exact_div(g);
    Rational lc = dd.leading().coef;
    if (dd.is_constant()) {
        num_ = nn.scaled(1 / lc);
        den_ = Poly(1);
        return;
    }
    if (lc != 1) {
        nn = nn.scaled(1 / lc);
        dd = dd.scaled(1 / lc);
    }
    num_ = std::move(nn);
    den_ = std::move(dd);
}

void Scalar::collect_variables(std::set<Var>& out) const {
    num_.collect_variables(out);
    den_.collect_variables(out);
}

std::set<Var> Scalar::variables() const {
    std::set<Var> s;
    collect_variables(s);
    return s;
}

Scalar Scalar::operator-() const {
    Scalar r = *this;
    r.num_ = -r.num_;
    return r;
}

Scalar Scalar::operator+(const Scalar& o) const {
    if (o.is_zero()) return *this;
    if (is_zero()) return o;
    Scalar r;
    if (den_.is_one() && o.den_.is_one()) {
        r.num_ = num_ + o.num_;
        return r;
    }
    if (o.den_.is_one()) {
        r.num_ = num_ + o.num_ * den_;
        r.den_ = r.num_.is_zero() ? Poly(1) : den_;
        return r;
    }
    if (den_.is_one()) {
        r.num_ = num_ * o.den_ + o.num_;
        r.den_ = r.num_.is_zero() ? Poly(1) : o.den_;
        return r;
    }
    if (den_ == o.den_) return Scalar(num_ + o.num_, den_);
    Poly g = Poly::gcd(den_, o.den_);
    if (g.is_one()) return Scalar(num_ * o.den_ + o.num_ * den_, den_ * o.den_);
    Poly a = den_.exact_div(g), b = o.den_.exact_div(g);
    return Scalar(num_ * b + o.num_ * a, a * b * g);
}

Scalar Scalar::operator-(const Scalar& o) const { return *this + (-o); }

Scalar Scalar::operator*(const Scalar& o) const {
    if (is_zero() || o.is_zero()) return Scalar();
    Scalar r;
    if (den_.is_one() && o.den_.is_one()) {
        r.num_ = num_ * o.num_;
        return r;
    }
    Poly g1 = o.den_.is_one() ? Poly(1) : Poly::gcd(num_, o.den_);
    Poly g2 = den_.is_one() ? Poly(1) : Poly::gcd(o.num_, den_);
    Poly n1 = g1.is_one() ? num_ : num_.exact_div(g1);
    Poly d2 = g1.is_one() ? o.den_ : o.den_.exact_div(g1);
    Poly n2 = g2.is_one() ? o.num_ : o.num_.exact_div(g2);
    Poly d1 = g2.is_one() ? den_ : den_.exact_div(g2);
    r.num_ = n1 * n2;
    r.den_ = d1 * d2;
    if (r.den_.is_constant()) {
        r.num_ = r.num_.scaled(1 / r.den_.constant_value());
        r.den_ = Poly(1);
    }
    return r;
}

Scalar Scalar::inverse() const {
    if (is_zero()) throw DivisionByZero();
    return Scalar(den_, num_);
}

Scalar Scalar::operator/(const Scalar& o) const { return *this * o.inverse(); }

Scalar Scalar::pow(long e) const {
    if (e < 0) return inverse().pow(-e);
    Scalar r;
    r.num_ = num_.pow(static_cast<unsigned>(e));
    r.den_ = den_.pow(static_cast<unsigned>(e));
    return r;
}

Scalar Scalar::partial(Var v) const {
    if (!has_var(v)) return Scalar();
    if (den_.is_one()) return Scalar(num_.partial(v));
    return Scalar(num_.partial(v) * den_ - num_ * den_.partial(v), den_ * den_);
}

std::string Scalar::str(const std::function<std::string(Var)>& name) const {
    if (den_.is_one()) return num_.str(name);
    auto wrap = [&](const Poly& p) {
        std::string s = p.str(name);
        bool atom = p.terms().size() == 1 &&
                    (p.is_constant() || (p.terms()[0].coef == 1 && p.terms()[0].mono.factors().size() == 1));
        if (!atom) return "(" + s + ")";
        return s;
    };
    return wrap(num_) + "/" + wrap(den_);
}

std::string Scalar::str(const Chart& chart) const { return str(chart.namer()); }

bool is_zero(const Scalar& s) { return s.is_zero(); }

Scalar partial(const Scalar& s, Var v) { return s.partial(v); }

Scalar substitute(const Poly& p, const Bindings& b) {
    std::map<Var, std::uint32_t> maxdeg;
    for (const auto& t : p.terms())
        for (const auto& [v, e] : t.mono.factors())
            if (b.count(v)) {
                auto& d = maxdeg[v];
                d = std::max(d, e);
            }
    if (maxdeg.empty()) return Scalar(p);
    std::map<Var, std::vector<Poly>> npow, dpow;
    for (const auto& [v, d] : maxdeg) {
        const Scalar& s = b.at(v);
        auto& np = npow[v];
        np.push_back(Poly(1));
        for (std::uint32_t k = 1; k <= d; ++k) np.push_back(np.back() * s.num());
        auto& dp = dpow[v];
        dp.push_back(Poly(1));
        if (!s.den().is_one())
            for (std::uint32_t k = 1; k <= d; ++k) dp.push_back(dp.back() * s.den());
    }
    auto den_power = [&](Var v, std::uint32_t k) -> const Poly& {
        const auto& dp = dpow[v];
        return dp.size() == 1 ? dp[0] : dp[k];
    };
    std::vector<Term> acc;
    for (const auto& t : p.terms()) {
        Monomial rest;
        Poly f(1);
        std::map<Var, std::uint32_t> seen;
        for (const auto& [v, e] : t.mono.factors()) {
            if (maxdeg.count(v)) {
                f = f * npow[v][e];
                seen[v] = e;
            } else {
                rest = rest * Monomial::var(v, e);
            }
        }
        for (const auto& [v, d] : maxdeg) {
            auto it = seen.find(v);
            std::uint32_t e = it == seen.end() ? 0 : it->second;
            if (d > e) f = f * den_power(v, d - e);
        }
        for (const auto& u : f.terms()) acc.push_back({u.mono * rest, u.coef * t.coef});
    }
    Poly num = Poly::from_terms(std::move(acc));
    Poly den(1);
    for (const auto& [v, d] : maxdeg) den = den * den_power(v, d);
    return Scalar(num, den);
}

Scalar substitute(const Scalar& s, const Bindings& b) {
    if (b.empty()) return s;
    Scalar n = substitute(s.num(), b);
    if (s.den().is_one()) return n;
    Scalar d = substitute(s.den(), b);
    if (d.is_zero()) throw DivisionByZero();
    return n / d;
}

Rational evaluate(const Scalar& s, const std::map<Var, Rational>& point) {
    Rational d = s.den().evaluate(point);
    if (d == 0) throw DivisionByZero();
    return s.num().evaluate(point) / d;
}

Poly constraint_key(const Scalar& s) { return s.num().primitive(); }

}  // namespace lepage
