#include "lepage/pfaffian.hpp"

#include <algorithm>
#include <optional>
#include <tuple>

#include "lepage/errors.hpp"

namespace lepage {

namespace {

void add_unique(std::vector<std::string>& out, const std::vector<std::string>& more) {
    for (const auto& s : more)
        if (std::find(out.begin(), out.end(), s) == out.end()) out.push_back(s);
}

std::vector<Var> by_level(const Chart& chart, std::vector<Var> vars) {
    std::stable_sort(vars.begin(), vars.end(), [&](Var a, Var b) {
        return std::make_tuple(chart.at(a).level, a) < std::make_tuple(chart.at(b).level, b);
    });
    return vars;
}

}  // namespace

std::vector<Form> PfaffianSystem::complement_forms() const {
    std::vector<Form> out;
    for (Var v : complement) out.push_back(Form::dvar(v));
    return out;
}

std::vector<Form> PfaffianSystem::coframe() const {
    std::vector<Form> out = generators;
    for (Var v : independence) out.push_back(Form::dvar(v));
    for (Var v : complement) out.push_back(Form::dvar(v));
    return out;
}

PfaffianSystem make_system(const Chart& chart, std::vector<Form> generators) {
    PfaffianSystem s;
    s.chart = chart;
    s.generators = std::move(generators);
    s.independence = chart.independents();
    return s;
}

std::vector<Scalar> canonical_constraints(const std::vector<Scalar>& cs) {
    std::vector<Poly> keys;
    std::vector<Scalar> out;
    for (const auto& c : cs) {
        if (c.is_zero()) continue;
        Poly k = constraint_key(c);
        if (std::find(keys.begin(), keys.end(), k) != keys.end()) continue;
        keys.push_back(k);
        out.emplace_back(k);
    }
    return out;
}

PfaffianSystem adapt_coframe(const PfaffianSystem& sys) {
    PfaffianSystem out = sys;
    const Chart& chart = sys.chart;
    std::vector<Var> deps = by_level(chart, chart.dependents());
    std::vector<int> order(deps.begin(), deps.end());
    std::vector<LinearRow> rows;
    for (const auto& g : sys.generators) {
        if (g.is_zero()) continue;
        if (g.degree() != 1) throw Error("Pfaffian generators must be 1-forms");
        LinearRow r;
        for (const auto& [idx, c] : g.terms()) {
            if (!chart.active(idx[0])) throw Error("generator references eliminated coordinate " + chart.name(idx[0]));
            r.coef.emplace(static_cast<int>(idx[0]), c);
        }
        rows.push_back(std::move(r));
    }
    Elimination el = eliminate(std::move(rows), order, PivotPolicy::constant_first);
    std::map<Var, std::size_t> rank;
    for (std::size_t i = 0; i < deps.size(); ++i) rank.emplace(deps[i], i);
    std::vector<int> pivots = el.pivot_order;
    std::sort(pivots.begin(), pivots.end(), [&](int a, int b) { return rank.at(a) < rank.at(b); });
    out.generators.clear();
    out.pivots.clear();
    for (int u : pivots) {
        const LinearRow& s = el.solved.at(u);
        Form g = Form::dvar(static_cast<Var>(u));
        for (const auto& [k, c] : s.coef) g.add({static_cast<Var>(k)}, -c);
        out.generators.push_back(std::move(g));
        out.pivots.push_back(static_cast<Var>(u));
    }
    std::vector<Scalar> zf = sys.zero_forms;
    for (const auto& r : el.leftover)
        for (const auto& [k, c] : r.coef) zf.push_back(c);
    out.zero_forms = canonical_constraints(zf);
    for (const auto& p : el.pivots) add_unique(out.assumptions, nonvanishing_conditions(p, chart));
    out.complement.clear();
    std::set<Var> piv(out.pivots.begin(), out.pivots.end());
    for (Var v : deps)
        if (!piv.count(v)) out.complement.push_back(v);
    out.independence = chart.independents();
    out.adapted = true;
    return out;
}

namespace {

struct Reducer {
    const Chart& chart;
    std::map<Var, std::size_t> indep, comp, piv;
    std::vector<std::map<std::size_t, Scalar>> R;
    std::vector<std::vector<Scalar>> S;
    std::size_t n_pi, m;

    // Components of df on (π, ω) modulo the generators.
    void reduce(const Scalar& f, std::vector<Scalar>& pi, std::vector<Scalar>& om) const {
        pi.assign(n_pi, Scalar());
        om.assign(m, Scalar());
        for (Var v : f.variables()) {
            Scalar df = f.partial(v);
            if (df.is_zero()) continue;
            if (auto it = indep.find(v); it != indep.end()) {
                om[it->second] += df;
            } else if (auto jt = comp.find(v); jt != comp.end()) {
                pi[jt->second] += df;
            } else if (auto kt = piv.find(v); kt != piv.end()) {
                for (const auto& [e, r] : R[kt->second]) pi[e] -= df * r;
                for (std::size_t i = 0; i < m; ++i)
                    if (!S[kt->second][i].is_zero()) om[i] -= df * S[kt->second][i];
            } else {
                throw Error("coefficient references eliminated coordinate " + chart.name(v));
            }
        }
    }
};

std::size_t pair_index(std::size_t j, std::size_t k, std::size_t m) {
    // (j, k) with j < k in lexicographic order.
    return j * m - j * (j + 1) / 2 + (k - j - 1);
}

}  // namespace

StructureEquations structure_equations(const PfaffianSystem& sys0) {
    PfaffianSystem sys = sys0.adapted ? sys0 : adapt_coframe(sys0);
    StructureEquations se;
    se.chart = sys.chart;
    se.complement = sys.complement;
    se.independence = sys.independence;
    se.n_theta = sys.generators.size();
    se.n_pi = sys.complement.size();
    se.m = sys.independence.size();
    for (std::size_t j = 0; j < se.m; ++j)
        for (std::size_t k = j + 1; k < se.m; ++k) se.pairs.push_back({j, k});
    Reducer red{sys.chart, {}, {}, {}, {}, {}, se.n_pi, se.m};
    for (std::size_t i = 0; i < se.m; ++i) red.indep.emplace(sys.independence[i], i);
    for (std::size_t e = 0; e < se.n_pi; ++e) red.comp.emplace(sys.complement[e], e);
    for (std::size_t a = 0; a < se.n_theta; ++a) {
        red.piv.emplace(sys.pivots[a], a);
        std::map<std::size_t, Scalar> r;
        std::vector<Scalar> s(se.m);
        for (const auto& [idx, c] : sys.generators[a].terms()) {
            Var v = idx[0];
            if (v == sys.pivots[a]) continue;
            if (auto it = red.indep.find(v); it != red.indep.end()) {
                s[it->second] = c;
            } else if (auto jt = red.comp.find(v); jt != red.comp.end()) {
                r.emplace(jt->second, c);
            } else {
                throw Error("adapted generator references another pivot");
            }
        }
        red.R.push_back(std::move(r));
        red.S.push_back(std::move(s));
    }
    se.tableau.assign(se.n_theta, std::vector<std::vector<Scalar>>(se.n_pi, std::vector<Scalar>(se.m)));
    se.torsion.assign(se.n_theta, std::vector<Scalar>(se.pairs.size()));
    std::vector<Scalar> pi, om;
    for (std::size_t a = 0; a < se.n_theta; ++a) {
        std::map<std::pair<std::size_t, std::size_t>, Scalar> pp;
        auto& A = se.tableau[a];
        for (const auto& [e, r] : red.R[a]) {
            red.reduce(r, pi, om);
            for (std::size_t dl = 0; dl < se.n_pi; ++dl) {
                if (pi[dl].is_zero() || dl == e) continue;
                if (dl < e) {
                    pp[{dl, e}] += pi[dl];
                } else {
                    pp[{e, dl}] -= pi[dl];
                }
            }
            for (std::size_t i = 0; i < se.m; ++i)
                if (!om[i].is_zero()) A[e][i] -= om[i];
        }
        for (std::size_t i = 0; i < se.m; ++i) {
            const Scalar& s = red.S[a][i];
            if (s.is_zero()) continue;
            red.reduce(s, pi, om);
            for (std::size_t e = 0; e < se.n_pi; ++e)
                if (!pi[e].is_zero()) A[e][i] += pi[e];
            for (std::size_t j = 0; j < se.m; ++j) {
                if (om[j].is_zero() || j == i) continue;
                if (j < i) {
                    se.torsion[a][pair_index(j, i, se.m)] += om[j];
                } else {
                    se.torsion[a][pair_index(i, j, se.m)] -= om[j];
                }
            }
        }
        for (const auto& [k, c] : pp)
            if (!c.is_zero())
                throw NotLinearPfaffian("d of generator " + std::to_string(a) + " has a term in d(" +
                                        sys.chart.name(sys.complement[k.first]) + ")/\\d(" +
                                        sys.chart.name(sys.complement[k.second]) + ")");
    }
    return se;
}

std::vector<LinearRow> integral_element_rows(const StructureEquations& se) {
    std::vector<LinearRow> rows;
    const std::size_t m = se.m;
    for (std::size_t a = 0; a < se.n_theta; ++a) {
        for (std::size_t p = 0; p < se.pairs.size(); ++p) {
            auto [j, k] = se.pairs[p];
            LinearRow r;
            for (std::size_t e = 0; e < se.n_pi; ++e) {
                const Scalar& ak = se.tableau[a][e][k];
                const Scalar& aj = se.tableau[a][e][j];
                if (!ak.is_zero()) r.coef.emplace(static_cast<int>(e * m + j), ak);
                if (!aj.is_zero()) r.coef.emplace(static_cast<int>(e * m + k), -aj);
            }
            r.constant = se.torsion[a][p];
            if (r.coef.empty() && r.constant.is_zero()) continue;
            rows.push_back(std::move(r));
        }
    }
    return rows;
}

TorsionAnalysis analyze_torsion(const StructureEquations& se) {
    std::vector<int> order;
    for (std::size_t u = 0; u < se.n_pi * se.m; ++u) order.push_back(static_cast<int>(u));
    TorsionAnalysis ta;
    ta.solution = eliminate(integral_element_rows(se), order, PivotPolicy::constant_first);
    ta.essential = canonical_constraints(ta.solution.residual);
    for (const auto& p : ta.solution.pivots) add_unique(ta.assumptions, nonvanishing_conditions(p, se.chart));
    return ta;
}

std::vector<Scalar> essential_torsion(const StructureEquations& se) { return analyze_torsion(se).essential; }

namespace {

struct NumericTableau {
    // A[a][e][i]
    std::vector<std::vector<std::vector<Rational>>> A;
};

NumericTableau sample_tableau(const StructureEquations& se, Sampler& smp) {
    std::set<Var> vars;
    std::vector<Poly> dens;
    for (const auto& ga : se.tableau)
        for (const auto& ge : ga)
            for (const auto& s : ge) {
                s.collect_variables(vars);
                if (!s.den().is_constant()) dens.push_back(s.den());
            }
    auto pt = admissible_point(vars, dens, smp);
    NumericTableau nt;
    nt.A.assign(se.n_theta, std::vector<std::vector<Rational>>(se.n_pi, std::vector<Rational>(se.m)));
    for (std::size_t a = 0; a < se.n_theta; ++a)
        for (std::size_t e = 0; e < se.n_pi; ++e)
            for (std::size_t i = 0; i < se.m; ++i) {
                const Scalar& s = se.tableau[a][e][i];
                if (!s.is_zero()) nt.A[a][e][i] = s.is_constant() ? s.constant_value() : evaluate(s, pt);
            }
    return nt;
}

}  // namespace

CharacterVector cartan_characters(const StructureEquations& se, std::uint64_t seed, int samples) {
    const std::size_t m = se.m;
    std::vector<std::size_t> best(m, 0);
    int ok = 0;
    for (int s = 0; s < samples; ++s) {
        Sampler smp(seed, 1000 + static_cast<std::uint64_t>(s));
        NumericTableau nt;
        try {
            nt = sample_tableau(se, smp);
        } catch (const AllSamplesDegenerate&) {
            continue;
        }
        ++ok;
        std::vector<std::vector<Rational>> w;
        for (int attempt = 0; attempt < 16; ++attempt) {
            w.assign(m, std::vector<Rational>(m));
            for (auto& row : w)
                for (auto& x : row) x = smp.next();
            if (exact_rank(w) == m) break;
        }
        for (std::size_t k = 1; k < m; ++k) {
            std::vector<std::map<int, Rational>> rows;
            for (std::size_t a = 0; a < se.n_theta; ++a)
                for (std::size_t j = 0; j < k; ++j) {
                    std::map<int, Rational> row;
                    for (std::size_t e = 0; e < se.n_pi; ++e) {
                        Rational x = 0;
                        for (std::size_t i = 0; i < m; ++i)
                            if (nt.A[a][e][i] != 0) x += nt.A[a][e][i] * w[j][i];
                        if (x != 0) row.emplace(static_cast<int>(e), x);
                    }
                    if (!row.empty()) rows.push_back(std::move(row));
                }
            best[k] = std::max(best[k], exact_rank(std::move(rows)));
        }
    }
    if (ok == 0) throw AllSamplesDegenerate();
    CharacterVector cv;
    cv.s0 = static_cast<int>(se.n_theta);
    cv.polar_codims.push_back(cv.s0);
    for (std::size_t k = 1; k < m; ++k) {
        cv.s.push_back(static_cast<int>(best[k] - best[k - 1]));
        cv.polar_codims.push_back(cv.s0 + static_cast<int>(best[k]));
    }
    cv.s.push_back(static_cast<int>(se.n_pi - best[m - 1]));
    return cv;
}

std::size_t prolongation_dim(const StructureEquations& se, std::uint64_t seed, int samples) {
    const std::size_t m = se.m;
    std::size_t best = 0;
    int ok = 0;
    for (int s = 0; s < samples; ++s) {
        Sampler smp(seed, 2000 + static_cast<std::uint64_t>(s));
        NumericTableau nt;
        try {
            nt = sample_tableau(se, smp);
        } catch (const AllSamplesDegenerate&) {
            continue;
        }
        ++ok;
        std::vector<std::map<int, Rational>> rows;
        for (std::size_t a = 0; a < se.n_theta; ++a)
            for (auto [j, k] : se.pairs) {
                std::map<int, Rational> row;
                for (std::size_t e = 0; e < se.n_pi; ++e) {
                    if (nt.A[a][e][k] != 0) row[static_cast<int>(e * m + j)] += nt.A[a][e][k];
                    if (nt.A[a][e][j] != 0) row[static_cast<int>(e * m + k)] -= nt.A[a][e][j];
                }
                if (!row.empty()) rows.push_back(std::move(row));
            }
        best = std::max(best, exact_rank(std::move(rows)));
    }
    if (ok == 0) throw AllSamplesDegenerate();
    return se.n_pi * m - best;
}

std::size_t cartan_sum(const CharacterVector& c) {
    std::size_t sum = 0;
    for (std::size_t k = 0; k < c.s.size(); ++k) sum += (k + 1) * static_cast<std::size_t>(c.s[k]);
    return sum;
}

InvolutivityReport cartan_test(const PfaffianSystem& sys, std::uint64_t seed, int samples) {
    PfaffianSystem a = sys.adapted ? sys : adapt_coframe(sys);
    if (!a.zero_forms.empty()) throw Error("cartan_test requires a system without zero-forms");
    StructureEquations se = structure_equations(a);
    TorsionAnalysis ta = analyze_torsion(se);
    InvolutivityReport rep;
    rep.torsion_essential = ta.essential;
    rep.assumptions = ta.assumptions;
    rep.characters = cartan_characters(se, seed, samples);
    rep.prolongation_dim = prolongation_dim(se, seed, samples);
    rep.cartan_sum = cartan_sum(rep.characters);
    rep.involutive = rep.torsion_essential.empty() && rep.prolongation_dim == rep.cartan_sum;
    return rep;
}

Prolongation prolong(const PfaffianSystem& sys) {
    PfaffianSystem base = sys.adapted ? sys : adapt_coframe(sys);
    StructureEquations se = structure_equations(base);
    TorsionAnalysis ta = analyze_torsion(se);
    if (!ta.essential.empty()) throw Error("prolongation requires vanishing essential torsion");
    Chart chart = base.chart;
    const std::size_t m = se.m;
    const int level = chart.max_level() + 1;
    Prolongation out;
    std::map<int, Scalar> P;
    for (int u : ta.solution.free) {
        const Coordinate& c = chart.at(se.complement[static_cast<std::size_t>(u) / m]);
        const Coordinate& x = chart.at(se.independence[static_cast<std::size_t>(u) % m]);
        Coordinate n;
        n.role = Role::grassmann;
        n.level = level;
        if (c.role == Role::grassmann && !c.origin.empty()) {
            n.origin = c.origin;
            n.derivs = c.derivs;
        } else {
            n.origin = c.name;
        }
        n.derivs.push_back(x.name);
        std::string name = "Z[" + n.origin + ";";
        for (std::size_t i = 0; i < n.derivs.size(); ++i) name += (i ? "," : "") + n.derivs[i];
        n.name = chart.unique_name(name + "]");
        out.added.push_back(n.name);
        P[u] = Scalar::var(chart.add(n));
    }
    for (const auto& [u, row] : ta.solution.solved) {
        Scalar v = row.constant;
        for (const auto& [k, c] : row.coef) v += c * P.at(k);
        P[u] = v;
    }
    std::vector<Form> gens = base.generators;
    for (std::size_t e = 0; e < se.n_pi; ++e) {
        Form g = Form::dvar(se.complement[e]);
        for (std::size_t i = 0; i < m; ++i) {
            auto it = P.find(static_cast<int>(e * m + i));
            if (it != P.end()) g.add({se.independence[i]}, -it->second);
        }
        gens.push_back(std::move(g));
    }
    PfaffianSystem next = make_system(chart, std::move(gens));
    next.zero_forms = base.zero_forms;
    next.assumptions = base.assumptions;
    add_unique(next.assumptions, ta.assumptions);
    out.assumptions = ta.assumptions;
    out.system = adapt_coframe(next);
    return out;
}

std::vector<Scalar> extract_zero_forms(const PfaffianSystem& sys) { return adapt_coframe(sys).zero_forms; }

std::vector<Var> default_elimination_order(const Chart& chart) {
    auto role_rank = [&](Var v) {
        const Coordinate& c = chart.at(v);
        if (c.level > 0) return 0;
        switch (c.role) {
            case Role::multiplier: return 0;
            case Role::jet: return 1;
            case Role::field: return 2;
            case Role::other: return 3;
            default: return 4;
        }
    };
    std::vector<Var> deps = chart.dependents();
    std::stable_sort(deps.begin(), deps.end(), [&](Var a, Var b) {
        return std::make_tuple(-chart.at(a).level, role_rank(a), a) <
               std::make_tuple(-chart.at(b).level, role_rank(b), b);
    });
    return deps;
}

namespace {

bool is_linear_in(const Scalar& c, const std::set<Var>& u, const Chart& chart) {
    try {
        linear_row(c, u, chart);
        return true;
    } catch (const NonLinearInUnknowns&) {
        return false;
    }
}

// c = g·h with h affine-linear in the unknowns and g nonconstant; or c
// replaced by a factor with the same zero set.
bool split_constraint(const Scalar& c, const std::vector<Var>& unknowns, const std::set<Var>& uset,
                      const Chart& chart, Scalar& replacement, std::optional<Poly>& assumed) {
    const Poly& n = c.num();
    for (Var z : unknowns) {
        auto deg = n.degree_in(z);
        if (deg == 0) continue;
        if (deg >= 2) {
            Poly g = Poly::gcd(n, n.partial(z));
            if (!g.is_constant() && g.degree_in(z) > 0) {
                replacement = Scalar(n.exact_div(g));
                assumed.reset();
                return true;
            }
            continue;
        }
        auto coeffs = n.coefficients_in(z);
        Poly a = coeffs.count(1) ? coeffs.at(1) : Poly();
        Poly b = coeffs.count(0) ? coeffs.at(0) : Poly();
        Poly g = b.is_zero() ? a.monic() : Poly::gcd(a, b);
        if (g.is_constant()) continue;
        Scalar h(n.exact_div(g));
        if (is_linear_in(h, uset, chart)) {
            replacement = h;
            assumed = g;
            return true;
        }
    }
    return false;
}

}  // namespace

ConstraintSolution solve_constraints(const std::vector<Scalar>& constraints, const std::vector<Var>& order,
                                     const Chart& chart) {
    ConstraintSolution out;
    std::vector<Scalar> pending = canonical_constraints(constraints);
    for (;;) {
        std::vector<Scalar> cur;
        for (const auto& c : pending) {
            Scalar c2 = substitute(c, out.bindings);
            if (c2.is_zero()) continue;
            if (c2.is_constant()) throw EmptyLocus("inconsistent constraint " + c2.str(chart) + " = 0");
            cur.push_back(c2);
        }
        cur = canonical_constraints(cur);
        if (cur.empty()) return out;
        std::vector<Var> unknowns;
        for (Var v : order)
            if (chart.active(v) && !out.bindings.count(v)) unknowns.push_back(v);
        std::set<Var> uset(unknowns.begin(), unknowns.end());
        std::vector<Scalar> linear, nonlinear;
        for (const auto& c : cur) {
            bool any = false;
            for (Var v : c.variables())
                if (uset.count(v)) any = true;
            if (!any) throw EmptyLocus("constraint " + c.str(chart) + " = 0 restricts the independent variables");
            (is_linear_in(c, uset, chart) ? linear : nonlinear).push_back(c);
        }
        if (!linear.empty()) {
            LinearSolveResult res = solve_linear(linear, unknowns, chart);
            for (const auto& r : res.residual)
                throw EmptyLocus("constraint " + r.str(chart) + " = 0 restricts the independent variables");
            for (auto& [v, e] : out.bindings) e = substitute(e, res.solved);
            for (Var v : res.solved_order) {
                out.bindings.emplace(v, res.solved.at(v));
                out.order.push_back(v);
            }
            for (const auto& p : res.assumptions) add_unique(out.assumptions, nonvanishing_conditions(p, chart));
            pending = nonlinear;
            continue;
        }
        bool progress = false;
        for (std::size_t k = 0; k < nonlinear.size() && !progress; ++k) {
            Scalar rep;
            std::optional<Poly> assumed;
            if (split_constraint(nonlinear[k], unknowns, uset, chart, rep, assumed)) {
                nonlinear[k] = rep;
                if (assumed) add_unique(out.assumptions, nonvanishing_conditions(Scalar(*assumed), chart));
                progress = true;
            }
        }
        if (!progress) throw NeedsUserBranch(nonlinear.front().str(chart));
        pending = nonlinear;
    }
}

Restriction restrict_system(const PfaffianSystem& sys, const std::vector<Scalar>& constraints,
                            const std::vector<Var>& elimination_order) {
    Restriction r;
    r.solution = solve_constraints(constraints, elimination_order, sys.chart);
    r.substitution = Substitution(r.solution.bindings);
    PfaffianSystem next = sys;
    next.chart = r.substitution.retained(sys.chart);
    next.generators.clear();
    for (const auto& g : sys.generators) {
        Form p = pullback(g, r.substitution);
        if (!p.is_zero()) next.generators.push_back(std::move(p));
    }
    std::vector<Scalar> zf;
    for (const auto& z : sys.zero_forms) zf.push_back(substitute(z, r.substitution));
    next.zero_forms = canonical_constraints(zf);
    add_unique(next.assumptions, r.solution.assumptions);
    next.adapted = false;
    r.system = adapt_coframe(next);
    return r;
}

Restriction restrict_system(const PfaffianSystem& sys, const std::vector<Scalar>& constraints) {
    return restrict_system(sys, constraints, default_elimination_order(sys.chart));
}

}  // namespace lepage
