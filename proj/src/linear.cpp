#include "lepage/linear.hpp"

#include <algorithm>
#include <limits>

#include "lepage/errors.hpp"

namespace lepage {

namespace {

std::size_t weight(const Scalar& s) { return s.num().terms().size() + s.den().terms().size(); }

void axpy(LinearRow& r, const Scalar& f, const LinearRow& p) {
    for (const auto& [k, c] : p.coef) {
        auto it = r.coef.find(k);
        if (it == r.coef.end()) {
            r.coef.emplace(k, -(f * c));
        } else {
            it->second -= f * c;
            if (it->second.is_zero()) r.coef.erase(it);
        }
    }
    if (!p.constant.is_zero()) r.constant -= f * p.constant;
}

}  // namespace

Elimination eliminate(std::vector<LinearRow> rows, const std::vector<int>& order, PivotPolicy policy) {
    std::map<int, std::size_t> rank;
    for (std::size_t i = 0; i < order.size(); ++i) rank.emplace(order[i], i);
    std::vector<bool> used(rows.size(), false);
    std::vector<int> pivot_of(rows.size(), -1);
    Elimination out;
    for (;;) {
        std::size_t best_row = rows.size();
        int best_u = -1;
        std::size_t best_rank = std::numeric_limits<std::size_t>::max();
        std::size_t best_w = 0;
        bool best_const = false;
        for (std::size_t r = 0; r < rows.size(); ++r) {
            if (used[r]) continue;
            for (const auto& [u, c] : rows[r].coef) {
                auto it = rank.find(u);
                if (it == rank.end()) continue;
                bool cst = c.is_constant();
                std::size_t w = cst ? rows[r].coef.size() : weight(c) * 1000 + rows[r].coef.size();
                bool better = false;
                if (best_u < 0) {
                    better = true;
                } else if (policy == PivotPolicy::constant_first && cst != best_const) {
                    better = cst;
                } else if (it->second != best_rank) {
                    better = it->second < best_rank;
                } else if (cst != best_const) {
                    better = cst;
                } else {
                    better = w < best_w;
                }
                if (better) {
                    best_row = r;
                    best_u = u;
                    best_rank = it->second;
                    best_w = w;
                    best_const = cst;
                }
            }
        }
        if (best_u < 0) break;
        LinearRow& p = rows[best_row];
        Scalar c = p.coef.at(best_u);
        if (!c.is_constant()) out.pivots.push_back(c);
        if (!(c == Scalar(1))) {
            Scalar inv = c.inverse();
            for (auto& [k, v] : p.coef) v *= inv;
            p.constant *= inv;
        }
        p.coef[best_u] = Scalar(1);
        for (std::size_t r = 0; r < rows.size(); ++r) {
            if (r == best_row) continue;
            auto it = rows[r].coef.find(best_u);
            if (it == rows[r].coef.end()) continue;
            Scalar f = it->second;
            axpy(rows[r], f, p);
        }
        used[best_row] = true;
        pivot_of[best_row] = best_u;
        out.pivot_order.push_back(best_u);
    }
    std::set<int> pivoted(out.pivot_order.begin(), out.pivot_order.end());
    std::set<int> seen;
    for (std::size_t r = 0; r < rows.size(); ++r) {
        for (const auto& [u, c] : rows[r].coef) seen.insert(u);
        if (used[r]) {
            int u = pivot_of[r];
            LinearRow s;
            for (const auto& [k, c] : rows[r].coef)
                if (k != u) s.coef.emplace(k, -c);
            s.constant = -rows[r].constant;
            out.solved[u] = std::move(s);
        } else if (rows[r].coef.empty()) {
            if (!rows[r].constant.is_zero()) out.residual.push_back(rows[r].constant);
        } else {
            out.leftover.push_back(std::move(rows[r]));
        }
    }
    for (int u : order)
        if (!pivoted.count(u)) out.free.push_back(u);
    for (int u : seen)
        if (!pivoted.count(u) && !rank.count(u)) out.free.push_back(u);
    return out;
}

LinearRow linear_row(const Scalar& eq, const std::set<Var>& unknowns, const Chart& chart) {
    for (Var v : eq.den().variables())
        if (unknowns.count(v)) throw NonLinearInUnknowns(eq.str(chart));
    std::map<Var, std::vector<Term>> parts;
    std::vector<Term> rest;
    for (const auto& t : eq.num().terms()) {
        Var hit = 0;
        std::uint32_t deg = 0;
        for (const auto& [v, e] : t.mono.factors())
            if (unknowns.count(v)) {
                deg += e;
                hit = v;
            }
        if (deg > 1) throw NonLinearInUnknowns(eq.str(chart));
        if (deg == 0) {
            rest.push_back(t);
        } else {
            parts[hit].push_back({t.mono.without(hit), t.coef});
        }
    }
    LinearRow r;
    for (auto& [v, ts] : parts) {
        Poly p = Poly::from_terms(std::move(ts));
        if (!p.is_zero()) r.coef.emplace(static_cast<int>(v), Scalar(p));
    }
    r.constant = Scalar(Poly::from_terms(std::move(rest)));
    return r;
}

LinearSolveResult solve_linear(const std::vector<Scalar>& eqs, const std::vector<Var>& unknowns, const Chart& chart) {
    std::set<Var> uset(unknowns.begin(), unknowns.end());
    std::vector<LinearRow> rows;
    for (const auto& e : eqs) {
        if (e.is_zero()) continue;
        rows.push_back(linear_row(e, uset, chart));
    }
    std::vector<int> order;
    for (Var v : unknowns) order.push_back(static_cast<int>(v));
    Elimination el = eliminate(std::move(rows), order);
    LinearSolveResult res;
    for (int u : el.pivot_order) {
        const LinearRow& s = el.solved.at(u);
        Scalar val = s.constant;
        for (const auto& [k, c] : s.coef) val += c * Scalar::var(static_cast<Var>(k));
        res.solved.emplace(static_cast<Var>(u), val);
        res.solved_order.push_back(static_cast<Var>(u));
    }
    res.residual = std::move(el.residual);
    for (int u : el.free) res.free.push_back(static_cast<Var>(u));
    res.assumptions = std::move(el.pivots);
    return res;
}

std::vector<std::string> nonvanishing_conditions(const Scalar& pivot, const Chart& chart) {
    std::vector<std::string> out;
    const Poly& n = pivot.num();
    if (n.is_constant()) return out;
    Monomial m = n.monomial_content();
    for (const auto& [v, e] : m.factors()) out.push_back(chart.name(v) + " != 0");
    Poly rest = n.exact_div(Poly::monomial(m, 1));
    if (!rest.is_constant()) out.push_back(rest.primitive().str(chart.namer()) + " != 0");
    return out;
}

Sampler::Sampler(std::uint64_t seed, std::uint64_t stream) : rng_(seed * 0x9E3779B97F4A7C15ULL + stream * 0xBF58476D1CE4E5B9ULL + 1) {}

Rational Sampler::next() {
    std::uniform_int_distribution<long> num(1, 10000), den(1, 10000), sign(0, 1);
    long n = num(rng_);
    if (sign(rng_)) n = -n;
    Rational r(n, den(rng_));
    r.canonicalize();
    return r;
}

std::map<Var, Rational> Sampler::point(const std::set<Var>& vars) {
    std::map<Var, Rational> p;
    for (Var v : vars) p.emplace(v, next());
    return p;
}

constexpr int kRetries = 16;

std::map<Var, Rational> admissible_point(const std::set<Var>& vars, const std::vector<Poly>& denominators,
                                         Sampler& s) {
    for (int attempt = 0; attempt < kRetries; ++attempt) {
        auto p = s.point(vars);
        bool ok = true;
        for (const auto& d : denominators)
            if (d.evaluate(p) == 0) {
                ok = false;
                break;
            }
        if (ok) return p;
    }
    throw AllSamplesDegenerate();
}

std::vector<std::vector<Rational>> sample_matrix(const ScalarMatrix& m, Sampler& s) {
    std::set<Var> vars;
    std::vector<Poly> dens;
    for (const auto& row : m)
        for (const auto& e : row) {
            e.collect_variables(vars);
            if (!e.den().is_constant()) dens.push_back(e.den());
        }
    auto p = admissible_point(vars, dens, s);
    std::vector<std::vector<Rational>> out;
    out.reserve(m.size());
    for (const auto& row : m) {
        std::vector<Rational> r;
        r.reserve(row.size());
        for (const auto& e : row) r.push_back(e.is_constant() ? e.constant_value() : evaluate(e, p));
        out.push_back(std::move(r));
    }
    return out;
}

std::size_t exact_rank(std::vector<std::map<int, Rational>> rows) {
    std::map<int, std::map<int, Rational>> basis;
    for (auto& r : rows) {
        for (auto it = r.begin(); it != r.end();)
            it = it->second == 0 ? r.erase(it) : std::next(it);
        while (!r.empty()) {
            int c = r.begin()->first;
            auto b = basis.find(c);
            if (b == basis.end()) {
                Rational inv = 1 / r.begin()->second;
                for (auto& [k, v] : r) v *= inv;
                basis.emplace(c, std::move(r));
                break;
            }
            Rational f = r.begin()->second;
            for (const auto& [k, v] : b->second) {
                auto it = r.find(k);
                if (it == r.end()) {
                    r.emplace(k, -f * v);
                } else {
                    it->second -= f * v;
                    if (it->second == 0) r.erase(it);
                }
            }
        }
    }
    return basis.size();
}

std::size_t exact_rank(const std::vector<std::vector<Rational>>& m) {
    std::vector<std::map<int, Rational>> rows;
    for (const auto& row : m) {
        std::map<int, Rational> r;
        for (std::size_t j = 0; j < row.size(); ++j)
            if (row[j] != 0) r.emplace(static_cast<int>(j), row[j]);
        rows.push_back(std::move(r));
    }
    return exact_rank(std::move(rows));
}

std::size_t random_rank(const ScalarMatrix& m, std::uint64_t seed, int samples) {
    std::size_t best = 0;
    int degenerate = 0;
    for (int k = 0; k < samples; ++k) {
        Sampler s(seed, static_cast<std::uint64_t>(k));
        try {
            best = std::max(best, exact_rank(sample_matrix(m, s)));
        } catch (const AllSamplesDegenerate&) {
            ++degenerate;
        }
    }
    if (degenerate == samples) throw AllSamplesDegenerate();
    return best;
}

}  // namespace lepage
