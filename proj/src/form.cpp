#include "lepage/form.hpp"

#include <algorithm>

#include "lepage/errors.hpp"
#include "lepage/linear.hpp"

namespace lepage {

Form Form::scalar(const Scalar& s) {
    Form f(0);
    if (!s.is_zero()) f.t_.emplace(IndexTuple{}, s);
    return f;
}

Form Form::dvar(Var v) {
    Form f(1);
    f.t_.emplace(IndexTuple{v}, Scalar(1));
    return f;
}

Scalar Form::coefficient(const IndexTuple& idx) const {
    auto it = t_.find(idx);
    return it == t_.end() ? Scalar() : it->second;
}

Scalar Form::as_scalar() const {
    if (deg_ != 0) throw Error("form of positive degree used as a scalar");
    return coefficient({});
}

void Form::add(const IndexTuple& idx, const Scalar& c) {
    if (c.is_zero()) return;
    auto it = t_.find(idx);
    if (it == t_.end()) {
        t_.emplace(idx, c);
        return;
    }
    it->second += c;
    if (it->second.is_zero()) t_.erase(it);
}

std::set<Var> Form::variables() const {
    std::set<Var> s;
    for (const auto& [idx, c] : t_) {
        s.insert(idx.begin(), idx.end());
        c.collect_variables(s);
    }
    return s;
}

Form Form::operator-() const {
    Form r = *this;
    for (auto& [k, c] : r.t_) c = -c;
    return r;
}

Form& Form::operator+=(const Form& o) {
    if (o.t_.empty()) return *this;
    if (t_.empty()) {
        *this = o;
        return *this;
    }
    if (o.deg_ != deg_) throw DegreeMismatch("adding forms of degree " + std::to_string(deg_) + " and " +
                                             std::to_string(o.deg_));
    for (const auto& [k, c] : o.t_) add(k, c);
    return *this;
}

Form Form::operator+(const Form& o) const {
    Form r = *this;
    r += o;
    return r;
}

Form Form::operator-(const Form& o) const { return *this + (-o); }

Form Form::scaled(const Scalar& s) const {
    Form r(deg_);
    if (s.is_zero()) return r;
    for (const auto& [k, c] : t_) r.add(k, c * s);
    return r;
}

Form operator*(const Scalar& s, const Form& a) { return a.scaled(s); }

std::string Form::str(const Chart& chart) const {
    if (t_.empty()) return "0";
    std::string out;
    for (const auto& [idx, c] : t_) {
        std::string body;
        for (Var v : idx) {
            if (!body.empty()) body += "/\\";
            body += "d(" + chart.name(v) + ")";
        }
        std::string cs = c.str(chart);
        std::string piece;
        if (body.empty()) {
            piece = cs;
        } else if (cs == "1") {
            piece = body;
        } else if (cs == "-1") {
            piece = "-" + body;
        } else if (cs.find(' ') == std::string::npos) {
            piece = cs + "*" + body;
        } else {
            piece = "(" + cs + ")*" + body;
        }
        if (out.empty()) {
            out = piece;
        } else if (piece[0] == '-') {
            out += " - " + piece.substr(1);
        } else {
            out += " + " + piece;
        }
    }
    return out;
}

namespace {

// Merges two sorted disjoint tuples; returns false on overlap.
bool merge_sign(const IndexTuple& a, const IndexTuple& b, IndexTuple& out, bool& negative) {
    out.clear();
    out.reserve(a.size() + b.size());
    std::size_t i = 0, j = 0, swaps = 0;
    while (i < a.size() || j < b.size()) {
        if (j == b.size() || (i < a.size() && a[i] < b[j])) {
            out.push_back(a[i++]);
        } else if (i == a.size() || b[j] < a[i]) {
            swaps += a.size() - i;
            out.push_back(b[j++]);
        } else {
            return false;
        }
    }
    negative = swaps % 2 == 1;
    return true;
}

}  // namespace

Form wedge(const Form& a, const Form& b) {
    Form r(a.degree() + b.degree());
    IndexTuple m;
    for (const auto& [i, c] : a.terms())
        for (const auto& [j, e] : b.terms()) {
            bool neg = false;
            if (!merge_sign(i, j, m, neg)) continue;
            Scalar p = c * e;
            r.add(m, neg ? -p : p);
        }
    return r;
}

Form d(const Scalar& f) {
    Form r(1);
    for (Var v : f.variables()) r.add({v}, f.partial(v));
    return r;
}

Form d(const Form& a) {
    Form r(a.degree() + 1);
    IndexTuple m;
    for (const auto& [idx, c] : a.terms()) {
        for (Var v : c.variables()) {
            if (std::binary_search(idx.begin(), idx.end(), v)) continue;
            bool neg = false;
            merge_sign({v}, idx, m, neg);
            Scalar p = c.partial(v);
            r.add(m, neg ? -p : p);
        }
    }
    return r;
}

Form contract_vector(const VectorField& x, const Form& a) {
    if (a.degree() == 0) return Form(0);
    Form r(a.degree() - 1);
    for (const auto& [idx, c] : a.terms()) {
        for (std::size_t p = 0; p < idx.size(); ++p) {
            auto it = x.find(idx[p]);
            if (it == x.end() || it->second.is_zero()) continue;
            IndexTuple rest;
            rest.reserve(idx.size() - 1);
            for (std::size_t q = 0; q < idx.size(); ++q)
                if (q != p) rest.push_back(idx[q]);
            Scalar v = c * it->second;
            r.add(rest, p % 2 ? -v : v);
        }
    }
    return r;
}

Form contract_multivector(const MultiVector& z, const Form& a) {
    Form r = a;
    for (const auto& f : z.factors) r = contract_vector(f, r);
    return r;
}

Substitution::Substitution(Bindings b) : b_(std::move(b)) {
    for (const auto& [v, e] : b_) db_.emplace(v, d(e));
}

Chart Substitution::retained(const Chart& chart) const {
    Chart c = chart;
    for (const auto& [v, e] : b_) c.deactivate(v);
    return c;
}

Substitution Substitution::then(const Substitution& later) const {
    Bindings out;
    for (const auto& [v, e] : b_) out.emplace(v, substitute(e, later.b_));
    for (const auto& [v, e] : later.b_) out.emplace(v, e);
    return Substitution(std::move(out));
}

Scalar substitute(const Scalar& s, const Substitution& sub) { return substitute(s, sub.bindings()); }

Form pullback(const Form& a, const Substitution& s) {
    if (s.empty()) return a;
    Form r(a.degree());
    for (const auto& [idx, c] : a.terms()) {
        Scalar c2 = substitute(c, s.bindings());
        if (c2.is_zero()) continue;
        bool touched = false;
        for (Var v : idx)
            if (s.binds(v)) touched = true;
        if (!touched) {
            r.add(idx, c2);
            continue;
        }
        Form acc = Form::scalar(c2);
        for (Var v : idx) {
            acc = wedge(acc, s.binds(v) ? s.differential(v) : Form::dvar(v));
            if (acc.is_zero()) break;
        }
        r += acc;
    }
    return r;
}

std::map<std::vector<int>, Scalar> coefficients(const Form& a, const std::vector<Form>& coframe, const Chart& chart,
                                                std::uint64_t seed) {
    std::vector<Var> vars = chart.active_vars();
    std::size_t n = vars.size();
    if (coframe.size() != n) throw CoframeDegenerate("coframe has " + std::to_string(coframe.size()) +
                                                     " elements for a chart of dimension " + std::to_string(n));
    std::map<Var, std::size_t> col;
    for (std::size_t j = 0; j < n; ++j) col.emplace(vars[j], j);
    ScalarMatrix m(n, std::vector<Scalar>(n));
    for (std::size_t k = 0; k < n; ++k) {
        if (coframe[k].degree() != 1) throw CoframeDegenerate("coframe element is not a 1-form");
        for (const auto& [idx, c] : coframe[k].terms()) {
            auto it = col.find(idx[0]);
            if (it == col.end()) throw CoframeDegenerate("coframe references an inactive coordinate");
            m[k][it->second] = c;
        }
    }
    if (random_rank(m, seed) != n) throw CoframeDegenerate("coframe is not a pointwise basis");
    // Gauss-Jordan on [M | I]; sigma = M dv gives dv = M^{-1} sigma.
    ScalarMatrix aug(n, std::vector<Scalar>(2 * n));
    for (std::size_t r = 0; r < n; ++r) {
        for (std::size_t k = 0; k < n; ++k) aug[r][k] = m[r][k];
        aug[r][n + r] = Scalar(1);
    }
    for (std::size_t c = 0; c < n; ++c) {
        std::size_t p = c;
        while (p < n && aug[p][c].is_zero()) ++p;
        if (p == n) throw CoframeDegenerate("coframe matrix is singular");
        std::swap(aug[p], aug[c]);
        Scalar inv = aug[c][c].inverse();
        for (auto& e : aug[c]) e *= inv;
        for (std::size_t r = 0; r < n; ++r) {
            if (r == c || aug[r][c].is_zero()) continue;
            Scalar f = aug[r][c];
            for (std::size_t k = 0; k < 2 * n; ++k)
                if (!aug[c][k].is_zero()) aug[r][k] -= f * aug[c][k];
        }
    }
    std::map<Var, Form> image;
    for (std::size_t v = 0; v < n; ++v) {
        Form f(1);
        for (std::size_t k = 0; k < n; ++k) f.add({static_cast<Var>(k)}, aug[v][n + k]);
        image.emplace(vars[v], f);
    }
    Form out(a.degree());
    for (const auto& [idx, c] : a.terms()) {
        Form acc = Form::scalar(c);
        for (Var v : idx) {
            auto it = image.find(v);
            if (it == image.end()) throw CoframeDegenerate("form references an inactive coordinate");
            acc = wedge(acc, it->second);
        }
        out += acc;
    }
    std::map<std::vector<int>, Scalar> res;
    for (const auto& [idx, c] : out.terms()) {
        std::vector<int> key(idx.begin(), idx.end());
        res.emplace(key, c);
    }
    return res;
}

}  // namespace lepage
