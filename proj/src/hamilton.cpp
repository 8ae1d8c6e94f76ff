#include "lepage/hamilton.hpp"

#include "lepage/errors.hpp"

namespace lepage {

namespace {

VectorField coordinate_field(Var v) { return VectorField{{v, Scalar(1)}}; }

Var add_multiplier(Chart& chart, const std::string& name, const std::string& origin,
                   std::vector<std::string> derivs) {
    Coordinate c;
    c.name = name;
    c.role = Role::multiplier;
    c.origin = origin;
    c.derivs = std::move(derivs);
    return chart.add(std::move(c));
}

void finish(LepageSpace& ls) {
    ls.omega = d(ls.theta);
    if (ls.omega.is_zero()) {
        ls.vacuous = true;
        ls.diagnostics.push_back("Omega = d(Theta) vanishes: every m-vector solves the Hamilton equations");
    }
}

}  // namespace

const char* mode_name(LepageMode m) {
    switch (m) {
        case LepageMode::classical: return "classical";
        case LepageMode::griffiths: return "griffiths";
        case LepageMode::explicit_theta: return "explicit";
    }
    return "explicit";
}

Form volume_form(const Chart& chart) {
    Form eta = Form::scalar(Scalar(1));
    for (Var x : chart.independents()) eta = wedge(eta, Form::dvar(x));
    return eta;
}

Form eta(const Chart& chart, std::size_t i) {
    return contract_vector(coordinate_field(chart.independents().at(i)), volume_form(chart));
}

Form eta(const Chart& chart, std::size_t i, std::size_t j) {
    auto xs = chart.independents();
    return contract_vector(coordinate_field(xs.at(i)), contract_vector(coordinate_field(xs.at(j)), volume_form(chart)));
}

LepageSpace build_lepage_classical(const VariationalProblem& vp, const std::vector<std::string>& multiplier_names) {
    LepageSpace ls;
    ls.chart = vp.chart;
    ls.provenance = LepageMode::classical;
    auto xs = vp.chart.independents();
    const std::size_t m = xs.size();
    Form vol = volume_form(vp.chart);
    Scalar density;
    if (!vp.lagrangian.is_zero()) {
        if (vp.lagrangian.degree() != static_cast<int>(m) || vp.lagrangian.terms().size() != 1 ||
            vp.lagrangian.terms().begin()->first != xs)
            throw DegreeMismatch("classical Lagrangian must be L times the volume form");
        density = vp.lagrangian.terms().begin()->second;
    }
    Form theta = density * vol;
    std::size_t next_name = 0;
    for (Var u : vp.chart.dependents()) {
        const Coordinate& cu = vp.chart.at(u);
        if (cu.role != Role::field) continue;
        for (std::size_t k = 0; k < m; ++k) {
            const std::string& xn = vp.chart.name(xs[k]);
            std::optional<Var> jet;
            for (Var v : vp.chart.dependents()) {
                const Coordinate& c = vp.chart.at(v);
                if (c.role == Role::jet && c.origin == cu.name && c.derivs == std::vector<std::string>{xn}) jet = v;
            }
            if (!jet) throw MissingJetStructure("no jet coordinate for " + cu.name + " along " + xn);
            std::string name;
            if (next_name < multiplier_names.size()) {
                name = multiplier_names[next_name];
            } else {
                name = m == 1 ? "p_" + cu.name : "p_" + cu.name + "_" + xn;
            }
            ++next_name;
            Var p = add_multiplier(ls.chart, name, cu.name, {xn});
            ls.multipliers.push_back(p);
            Scalar pv = Scalar::var(p);
            theta += pv * wedge(Form::dvar(u), eta(vp.chart, k));
            theta += (-(pv * Scalar::var(*jet))) * vol;
        }
    }
    if (next_name < multiplier_names.size()) throw Error("more multiplier names than field components");
    ls.theta = std::move(theta);
    finish(ls);
    return ls;
}

LepageSpace build_lepage_griffiths(const VariationalProblem& vp, const std::vector<MultiplierShape>& shapes, int p) {
    LepageSpace ls;
    ls.chart = vp.chart;
    ls.provenance = LepageMode::griffiths;
    const int m = static_cast<int>(vp.chart.m());
    if (!vp.lagrangian.is_zero() && vp.lagrangian.degree() != m)
        throw DegreeMismatch("Lagrangian has degree " + std::to_string(vp.lagrangian.degree()) + ", expected " +
                             std::to_string(m));
    Form theta = vp.lagrangian.is_zero() ? Form(m) : vp.lagrangian;
    for (const auto& s : shapes) {
        if (s.generator >= vp.generators.size()) throw Error("multiplier " + s.name + " names no generator");
        const Form& beta = vp.generators[s.generator];
        if (s.shape.degree() + beta.degree() != m)
            throw DegreeMismatch("multiplier " + s.name + ": shape degree " + std::to_string(s.shape.degree()) +
                                 " plus generator degree " + std::to_string(beta.degree()) + " is not " +
                                 std::to_string(m));
        Form term = wedge(s.shape, beta);
        bool admissible = true;
        for (const auto& [idx, c] : term.terms()) {
            int vertical = 0;
            for (Var v : idx) {
                Role r = vp.chart.at(v).role;
                if (r == Role::jet) admissible = false;
                if (r != Role::independent) ++vertical;
            }
            if (vertical >= p) admissible = false;
        }
        if (!admissible) {
            ls.diagnostics.push_back("multiplier " + s.name + " dropped: " + term.str(vp.chart) +
                                     " is not " + std::to_string(p) + "-horizontal");
            continue;
        }
        Var mu = add_multiplier(ls.chart, ls.chart.unique_name(s.name), "", {});
        ls.multipliers.push_back(mu);
        theta += Scalar::var(mu) * term;
    }
    if (ls.multipliers.empty() && vp.lagrangian.is_zero()) {
        ls.theta = Form(m);
        ls.omega = Form(m + 1);
        ls.vacuous = true;
        ls.diagnostics.push_back("Lepage space is trivial: every m-vector solves the Hamilton equations");
        return ls;
    }
    ls.theta = std::move(theta);
    finish(ls);
    return ls;
}

LepageSpace build_lepage_explicit(const Chart& chart, const Form& theta) {
    LepageSpace ls;
    ls.chart = chart;
    ls.provenance = LepageMode::explicit_theta;
    if (!theta.is_zero() && theta.degree() != static_cast<int>(chart.m()))
        throw DegreeMismatch("Theta has degree " + std::to_string(theta.degree()) + ", expected " +
                             std::to_string(chart.m()));
    ls.theta = theta;
    finish(ls);
    return ls;
}

MultiVector GrassmannExtension::multivector() const {
    MultiVector mv;
    auto xs = chart.independents();
    for (std::size_t i = 0; i < xs.size(); ++i) {
        VectorField f = coordinate_field(xs[i]);
        for (std::size_t a = 0; a < dependents.size(); ++a) f.emplace(dependents[a], Scalar::var(z[a][i]));
        mv.factors.push_back(std::move(f));
    }
    return mv;
}

GrassmannExtension grassmann_extend(const LepageSpace& ls) {
    GrassmannExtension ext;
    ext.chart = ls.chart;
    ext.dependents = ls.chart.dependents();
    auto xs = ls.chart.independents();
    for (Var a : ext.dependents) {
        std::vector<Var> row;
        for (Var x : xs) {
            Coordinate c;
            c.name = ext.chart.unique_name("Z[" + ls.chart.name(a) + ";" + ls.chart.name(x) + "]");
            c.role = Role::grassmann;
            c.level = ls.chart.at(a).level + 1;
            c.origin = ls.chart.name(a);
            c.derivs = {ls.chart.name(x)};
            row.push_back(ext.chart.add(std::move(c)));
        }
        ext.z.push_back(std::move(row));
    }
    return ext;
}

std::vector<Scalar> HamiltonEquations::all() const {
    std::vector<Scalar> out = vertical;
    out.insert(out.end(), horizontal.begin(), horizontal.end());
    return out;
}

HamiltonEquations hamilton_equations(const LepageSpace& ls, const GrassmannExtension& ext) {
    HamiltonEquations out;
    if (ls.omega.is_zero()) return out;
    Form w = contract_multivector(ext.multivector(), ls.omega);
    for (Var a : ext.dependents) out.vertical.push_back(w.coefficient({a}));
    for (Var x : ext.chart.independents()) out.horizontal.push_back(w.coefficient({x}));
    return out;
}

HamiltonLocus solve_hamilton_locus(const GrassmannExtension& ext, const HamiltonEquations& eqs) {
    HamiltonLocus hl;
    hl.grassmann = ext;
    std::vector<Scalar> cs;
    for (const auto& e : eqs.vertical)
        if (!e.is_zero()) cs.push_back(e);
    hl.solution = solve_constraints(cs, default_elimination_order(ext.chart), ext.chart);
    hl.solved = Substitution(hl.solution.bindings);
    for (Var v : hl.solution.order) {
        Scalar rel = Scalar::var(v) - hl.solution.bindings.at(v);
        (ext.chart.at(v).level == 0 ? hl.base_constraints : hl.fiber_constraints).push_back(rel);
    }
    auto xs = ext.chart.independents();
    std::vector<Form> gens;
    for (std::size_t a = 0; a < ext.dependents.size(); ++a) {
        Form th = Form::dvar(ext.dependents[a]);
        for (std::size_t i = 0; i < xs.size(); ++i) th += (-Scalar::var(ext.z[a][i])) * Form::dvar(xs[i]);
        Form p = pullback(th, hl.solved);
        if (!p.is_zero()) gens.push_back(std::move(p));
    }
    hl.pfaffian = make_system(hl.solved.retained(ext.chart), std::move(gens));
    hl.pfaffian.assumptions = hl.solution.assumptions;
    return hl;
}

bool residual_check(const HamiltonLocus& hl, const LepageSpace& ls) {
    HamiltonEquations eqs = hamilton_equations(ls, hl.grassmann);
    for (const auto& e : eqs.all())
        if (!substitute(e, hl.solved).is_zero()) return false;
    return true;
}

}  // namespace lepage
