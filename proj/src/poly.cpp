#include "lepage/poly.hpp"

#include <algorithm>
#include <stdexcept>

namespace lepage {

Monomial Monomial::var(Var v, std::uint32_t e) {
    Monomial m;
    if (e > 0) {
        m.f_.push_back({v, e});
        m.deg_ = e;
    }
    return m;
}

std::uint32_t Monomial::degree_in(Var v) const {
    for (const auto& [w, e] : f_) {
        if (w == v) return e;
        if (w > v) break;
    }
    return 0;
}

bool Monomial::divides(const Monomial& other) const {
    std::size_t j = 0;
    for (const auto& [v, e] : f_) {
        while (j < other.f_.size() && other.f_[j].first < v) ++j;
        if (j == other.f_.size() || other.f_[j].first != v || other.f_[j].second < e) return false;
    }
    return true;
}

Monomial Monomial::operator*(const Monomial& o) const {
    Monomial r;
    r.f_.reserve(f_.size() + o.f_.size());
    std::size_t i = 0, j = 0;
    while (i < f_.size() || j < o.f_.size()) {
        if (j == o.f_.size() || (i < f_.size() && f_[i].first < o.f_[j].first)) {
            r.f_.push_back(f_[i++]);
        } else if (i == f_.size() || o.f_[j].first < f_[i].first) {
            r.f_.push_back(o.f_[j++]);
        } else {
            r.f_.push_back({f_[i].first, f_[i].second + o.f_[j].second});
            ++i;
            ++j;
        }
    }
    r.deg_ = deg_ + o.deg_;
    return r;
}

Monomial Monomial::operator/(const Monomial& o) const {
    Monomial r;
    std::size_t j = 0;
    for (const auto& [v, e] : f_) {
        std::uint32_t sub = 0;
        if (j < o.f_.size() && o.f_[j].first == v) sub = o.f_[j++].second;
        if (e > sub) r.f_.push_back({v, e - sub});
    }
    r.deg_ = deg_ - o.deg_;
    return r;
}

Monomial Monomial::without(Var v) const {
    Monomial r;
    for (const auto& p : f_) {
        if (p.first != v) {
            r.f_.push_back(p);
            r.deg_ += p.second;
        }
    }
    return r;
}

Monomial Monomial::gcd(const Monomial& a, const Monomial& b) {
    Monomial r;
    std::size_t j = 0;
    for (const auto& [v, e] : a.f_) {
        while (j < b.f_.size() && b.f_[j].first < v) ++j;
        if (j < b.f_.size() && b.f_[j].first == v) {
            auto m = std::min(e, b.f_[j].second);
            r.f_.push_back({v, m});
            r.deg_ += m;
        }
    }
    return r;
}

int Monomial::compare(const Monomial& a, const Monomial& b) {
    if (a.deg_ != b.deg_) return a.deg_ > b.deg_ ? 1 : -1;
    std::size_t i = 0, j = 0;
    while (i < a.f_.size() && j < b.f_.size()) {
        const auto& [va, ea] = a.f_[i];
        const auto& [vb, eb] = b.f_[j];
        if (va == vb) {
            if (ea != eb) return ea > eb ? 1 : -1;
            ++i;
            ++j;
        } else {
            return va < vb ? 1 : -1;
        }
    }
    if (i < a.f_.size()) return 1;
    if (j < b.f_.size()) return -1;
    return 0;
}

namespace {

bool term_greater(const Term& a, const Term& b) { return Monomial::compare(a.mono, b.mono) > 0; }

}  // namespace

Poly::Poly(long c) {
    if (c != 0) t_.push_back({Monomial(), Rational(c)});
}

Poly::Poly(const Rational& c) {
    if (c != 0) t_.push_back({Monomial(), c});
}

Poly Poly::var(Var v) { return monomial(Monomial::var(v), 1); }

Poly Poly::monomial(const Monomial& m, const Rational& c) {
    Poly p;
    if (c != 0) p.t_.push_back({m, c});
    return p;
}

Poly Poly::from_terms(std::vector<Term> terms) {
    std::sort(terms.begin(), terms.end(), term_greater);
    Poly p;
    for (auto& t : terms) {
        if (!p.t_.empty() && p.t_.back().mono == t.mono) {
            p.t_.back().coef += t.coef;
        } else {
            if (!p.t_.empty() && p.t_.back().coef == 0) p.t_.pop_back();
            p.t_.push_back(std::move(t));
        }
    }
    if (!p.t_.empty() && p.t_.back().coef == 0) p.t_.pop_back();
    return p;
}

bool Poly::is_one() const { return is_constant() && !t_.empty() && t_[0].coef == 1; }

Rational Poly::constant_value() const {
    if (t_.empty()) return 0;
    if (!t_.back().mono.is_one()) return 0;
    return t_.back().coef;
}

std::uint32_t Poly::total_degree() const { return t_.empty() ? 0 : t_.front().mono.degree(); }

std::uint32_t Poly::degree_in(Var v) const {
    std::uint32_t d = 0;
    for (const auto& t : t_) d = std::max(d, t.mono.degree_in(v));
    return d;
}

void Poly::collect_variables(std::set<Var>& out) const {
    for (const auto& t : t_)
        for (const auto& f : t.mono.factors()) out.insert(f.first);
}

std::set<Var> Poly::variables() const {
    std::set<Var> s;
    collect_variables(s);
    return s;
}

bool Poly::has_var(Var v) const {
    for (const auto& t : t_)
        if (t.mono.degree_in(v) > 0) return true;
    return false;
}

Poly Poly::operator-() const {
    Poly r = *this;
    for (auto& t : r.t_) t.coef = -t.coef;
    return r;
}

Poly Poly::operator+(const Poly& o) const {
    if (o.t_.empty()) return *this;
    if (t_.empty()) return o;
    Poly r;
    r.t_.reserve(t_.size() + o.t_.size());
    std::size_t i = 0, j = 0;
    while (i < t_.size() && j < o.t_.size()) {
        int c = Monomial::compare(t_[i].mono, o.t_[j].mono);
        if (c > 0) {
            r.t_.push_back(t_[i++]);
        } else if (c < 0) {
            r.t_.push_back(o.t_[j++]);
        } else {
            Rational s = t_[i].coef + o.t_[j].coef;
            if (s != 0) r.t_.push_back({t_[i].mono, s});
            ++i;
            ++j;
        }
    }
    for (; i < t_.size(); ++i) r.t_.push_back(t_[i]);
    for (; j < o.t_.size(); ++j) r.t_.push_back(o.t_[j]);
    return r;
}

Poly Poly::operator-(const Poly& o) const { return *this + (-o); }

Poly Poly::operator*(const Poly& o) const {
    if (t_.empty() || o.t_.empty()) return Poly();
    if (o.is_constant()) return scaled(o.t_[0].coef);
    if (is_constant()) return o.scaled(t_[0].coef);
    const Poly& small = t_.size() <= o.t_.size() ? *this : o;
    const Poly& big = t_.size() <= o.t_.size() ? o : *this;
    Poly r;
    for (const auto& t : small.t_) {
        Poly part;
        part.t_.reserve(big.t_.size());
        for (const auto& u : big.t_) part.t_.push_back({t.mono * u.mono, t.coef * u.coef});
        r = r + part;
    }
    return r;
}

Poly Poly::scaled(const Rational& c) const {
    if (c == 0) return Poly();
    Poly r = *this;
    for (auto& t : r.t_) t.coef *= c;
    return r;
}

Poly Poly::times_monomial(const Monomial& m) const {
    Poly r = *this;
    for (auto& t : r.t_) t.mono = t.mono * m;
    return r;
}

Poly Poly::pow(unsigned e) const {
    Poly r(1), b = *this;
    while (e) {
        if (e & 1u) r = r * b;
        e >>= 1u;
        if (e) b = b * b;
    }
    return r;
}

bool Poly::operator==(const Poly& o) const {
    if (t_.size() != o.t_.size()) return false;
    for (std::size_t i = 0; i < t_.size(); ++i)
        if (t_[i].coef != o.t_[i].coef || t_[i].mono != o.t_[i].mono) return false;
    return true;
}

Poly Poly::partial(Var v) const {
    std::vector<Term> out;
    for (const auto& t : t_) {
        auto e = t.mono.degree_in(v);
        if (e == 0) continue;
        Monomial m = t.mono / Monomial::var(v);
        out.push_back({m, t.coef * e});
    }
    return from_terms(std::move(out));
}

std::map<std::uint32_t, Poly> Poly::coefficients_in(Var v) const {
    std::map<std::uint32_t, std::vector<Term>> parts;
    for (const auto& t : t_) parts[t.mono.degree_in(v)].push_back({t.mono.without(v), t.coef});
    std::map<std::uint32_t, Poly> out;
    for (auto& [e, ts] : parts) out.emplace(e, from_terms(std::move(ts)));
    return out;
}

Poly Poly::from_coefficients(Var v, const std::map<std::uint32_t, Poly>& c) {
    Poly r;
    for (const auto& [e, p] : c) r = r + p.times_monomial(Monomial::var(v, e));
    return r;
}

Rational Poly::evaluate(const std::map<Var, Rational>& point) const {
    Rational acc = 0;
    for (const auto& t : t_) {
        Rational x = t.coef;
        for (const auto& [v, e] : t.mono.factors()) {
            auto it = point.find(v);
            if (it == point.end()) throw std::out_of_range("evaluate: unbound variable");
            mpq_class p;
            mpz_pow_ui(p.get_num_mpz_t(), it->second.get_num_mpz_t(), e);
            mpz_pow_ui(p.get_den_mpz_t(), it->second.get_den_mpz_t(), e);
            p.canonicalize();
            x *= p;
        }
        acc += x;
    }
    return acc;
}

bool Poly::divides(const Poly& n, Poly* quotient) const {
    if (is_zero()) throw std::domain_error("division by zero polynomial");
    if (n.is_zero()) {
        if (quotient) *quotient = Poly();
        return true;
    }
    if (is_constant()) {
        if (quotient) *quotient = n.scaled(1 / t_[0].coef);
        return true;
    }
    const Term& lt = t_.front();
    Poly r = n;
    std::vector<Term> q;
    while (!r.is_zero()) {
        const Term& rt = r.t_.front();
        if (!lt.mono.divides(rt.mono)) return false;
        Term qt{rt.mono / lt.mono, rt.coef / lt.coef};
        Poly sub;
        sub.t_.reserve(t_.size());
        for (const auto& u : t_) sub.t_.push_back({u.mono * qt.mono, u.coef * qt.coef});
        r = r - sub;
        q.push_back(std::move(qt));
    }
    if (quotient) *quotient = from_terms(std::move(q));
    return true;
}

Poly Poly::exact_div(const Poly& d) const {
    Poly q;
    if (!d.divides(*this, &q)) throw std::domain_error("inexact polynomial division");
    return q;
}

Poly Poly::monic() const {
    if (t_.empty()) return *this;
    return scaled(1 / t_.front().coef);
}

Poly Poly::primitive() const {
    if (t_.empty()) return *this;
    mpz_class den = 1, num = 0;
    for (const auto& t : t_) {
        mpz_lcm(den.get_mpz_t(), den.get_mpz_t(), t.coef.get_den_mpz_t());
        mpz_gcd(num.get_mpz_t(), num.get_mpz_t(), t.coef.get_num_mpz_t());
    }
    Rational s(den, num);
    s.canonicalize();
    if (t_.front().coef < 0) s = -s;
    return scaled(s);
}

Monomial Poly::monomial_content() const {
    if (t_.empty()) return Monomial();
    Monomial g = t_.front().mono;
    for (const auto& t : t_) {
        if (g.is_one()) break;
        g = Monomial::gcd(g, t.mono);
    }
    return g;
}

namespace {

Poly content_in(const Poly& p, Var x);

Poly prem(const Poly& a, const Poly& b, Var x) {
    auto bc = b.coefficients_in(x);
    auto db = bc.rbegin()->first;
    const Poly& lcb = bc.rbegin()->second;
    Poly r = a;
    while (!r.is_zero()) {
        auto dr = r.degree_in(x);
        if (dr < db) break;
        auto rc = r.coefficients_in(x);
        const Poly& lcr = rc.rbegin()->second;
        r = (r * lcb - (b * lcr).times_monomial(Monomial::var(x, dr - db))).primitive();
    }
    return r;
}

Poly gcd_core(const Poly& a, const Poly& b);

Poly gcd_with_coefficients(const Poly& other, const Poly& split, Var v) {
    Poly g = other;
    for (const auto& [e, c] : split.coefficients_in(v)) {
        g = gcd_core(g, c);
        if (g.is_constant()) return Poly(1);
    }
    return g;
}

Poly strip_monomial(const Poly& p, const Monomial& m) {
    if (m.is_one()) return p;
    std::vector<Term> ts;
    for (const auto& t : p.terms()) ts.push_back({t.mono / m, t.coef});
    return Poly::from_terms(std::move(ts));
}

Poly gcd_core(const Poly& a0, const Poly& b0) {
    if (a0.is_zero()) return b0.monic();
    if (b0.is_zero()) return a0.monic();
    if (a0.is_constant() || b0.is_constant()) return Poly(1);
    Monomial ma = a0.monomial_content(), mb = b0.monomial_content();
    Monomial mg = Monomial::gcd(ma, mb);
    if (a0.is_monomial() || b0.is_monomial()) return Poly::monomial(mg, 1);
    Poly a = strip_monomial(a0, ma), b = strip_monomial(b0, mb);
    Poly mono_part = Poly::monomial(mg, 1);
    if (a == b) return (a * mono_part).monic();
    if (a.is_constant() || b.is_constant()) return mono_part;
    auto va = a.variables(), vb = b.variables();
    for (Var v : va)
        if (!vb.count(v)) return (gcd_with_coefficients(b, a, v) * mono_part).monic();
    for (Var v : vb)
        if (!va.count(v)) return (gcd_with_coefficients(a, b, v) * mono_part).monic();
    Var x = *va.begin();
    std::uint32_t best = ~0u;
    for (Var v : va) {
        auto d = std::max(a.degree_in(v), b.degree_in(v));
        if (d < best) {
            best = d;
            x = v;
        }
    }
    Poly ca = content_in(a, x), cb = content_in(b, x);
    Poly c = gcd_core(ca, cb);
    Poly pa = a.exact_div(ca), pb = b.exact_div(cb);
    if (pa.degree_in(x) < pb.degree_in(x)) std::swap(pa, pb);
    for (;;) {
        Poly r = prem(pa, pb, x);
        if (r.is_zero()) break;
        if (r.degree_in(x) == 0) {
            pb = Poly(1);
            break;
        }
        pa = pb;
        pb = r.exact_div(content_in(r, x));
    }
    pb = pb.exact_div(content_in(pb, x));
    return (c * pb * mono_part).monic();
}

Poly content_in(const Poly& p, Var x) {
    Poly g;
    for (const auto& [e, c] : p.coefficients_in(x)) {
        g = g.is_zero() ? c.monic() : gcd_core(g, c);
        if (g.is_constant()) return Poly(1);
    }
    return g;
}

}  // namespace

Poly Poly::gcd(const Poly& a, const Poly& b) { return gcd_core(a, b); }

namespace {

std::string rat_str(const Rational& r) {
    return r.get_den() == 1 ? r.get_num().get_str() : r.get_num().get_str() + "/" + r.get_den().get_str();
}

}  // namespace

std::string Poly::str(const std::function<std::string(Var)>& name) const {
    if (t_.empty()) return "0";
    std::string out;
    bool first = true;
    for (const auto& t : t_) {
        Rational c = t.coef;
        bool neg = c < 0;
        if (neg) c = -c;
        if (first) {
            if (neg) out += "-";
        } else {
            out += neg ? " - " : " + ";
        }
        first = false;
        std::string m;
        for (const auto& [v, e] : t.mono.factors()) {
            if (!m.empty()) m += "*";
            m += name(v);
            if (e > 1) m += "^" + std::to_string(e);
        }
        if (m.empty()) {
            out += rat_str(c);
        } else if (c == 1) {
            out += m;
        } else {
            out += rat_str(c) + "*" + m;
        }
    }
    return out;
}

}  // namespace lepage
