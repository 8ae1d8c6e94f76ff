#include <algorithm>
#include <random>

#include "doctest.h"
#include "lepage/errors.hpp"
#include "lepage/pfaffian.hpp"
#include "support.hpp"

using namespace lepage;
using testing_support::chart_of;
using testing_support::S;

namespace {

Form dv(const Chart& c, const std::string& n) { return Form::dvar(c.at_name(n)); }

std::string pname(std::size_t a, std::size_t i) { return "p" + std::to_string(a + 1) + "_" + std::to_string(i + 1); }

// Contact system on J¹(ℝⁿ, ℝ^q): θ^a = du^a − p^a_i dx^i.
PfaffianSystem contact(std::size_t n, std::size_t q) {
    std::vector<std::string> names;
    for (std::size_t i = 0; i < n; ++i) names.push_back("x" + std::to_string(i + 1));
    for (std::size_t a = 0; a < q; ++a) names.push_back("u" + std::to_string(a + 1));
    for (std::size_t a = 0; a < q; ++a)
        for (std::size_t i = 0; i < n; ++i) names.push_back(pname(a, i));
    Chart c = chart_of(names, n);
    std::vector<Form> gens;
    for (std::size_t a = 0; a < q; ++a) {
        Form t = dv(c, "u" + std::to_string(a + 1));
        for (std::size_t i = 0; i < n; ++i) t = t - S(pname(a, i), c) * dv(c, "x" + std::to_string(i + 1));
        gens.push_back(t);
    }
    return make_system(c, gens);
}

std::vector<std::string> names_of(const Chart& c, const std::vector<Var>& vs) {
    std::vector<std::string> out;
    for (Var v : vs) out.push_back(c.name(v));
    return out;
}

// Characters of a contact system straight from the definition: polar
// spaces of a random integral flag, evaluated on the 2-forms dθ^a at a
// random point. Uses no tableau.
std::vector<int> polar_oracle(const PfaffianSystem& sys, std::size_t n, std::size_t q, unsigned seed) {
    const Chart& c = sys.chart;
    std::mt19937 rng(seed);
    std::uniform_int_distribution<int> pick(-9, 9);
    auto rnd = [&] { return Rational(pick(rng), 1 + (pick(rng) + 9) % 7); };
    std::map<Var, Rational> point;
    for (Var v = 0; v < c.size(); ++v) point[v] = rnd();
    std::vector<std::vector<std::vector<Rational>>> h(q, std::vector<std::vector<Rational>>(n, std::vector<Rational>(n)));
    for (auto& ha : h)
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t k = i; k < n; ++k) ha[i][k] = ha[k][i] = rnd();
    std::size_t dim = c.size();
    std::vector<std::vector<Rational>> flag;
    for (std::size_t j = 0; j < n; ++j) {
        std::vector<Rational> w(n);
        for (auto& x : w) x = rnd();
        std::vector<Rational> e(dim);
        for (std::size_t i = 0; i < n; ++i) {
            e[c.at_name("x" + std::to_string(i + 1))] += w[i];
            for (std::size_t a = 0; a < q; ++a) {
                e[c.at_name("u" + std::to_string(a + 1))] += w[i] * point[c.at_name(pname(a, i))];
                for (std::size_t k = 0; k < n; ++k) e[c.at_name(pname(a, k))] += w[i] * h[a][i][k];
            }
        }
        flag.push_back(e);
    }
    std::vector<std::vector<Rational>> rows;
    for (const auto& g : sys.generators) {
        std::vector<Rational> r(dim);
        for (const auto& [idx, coef] : g.terms()) r[idx[0]] = evaluate(coef, point);
        rows.push_back(r);
    }
    std::vector<int> c_k{static_cast<int>(exact_rank(rows))};
    for (std::size_t j = 0; j + 1 < n; ++j) {
        for (const auto& g : sys.generators) {
            Form dg = d(g);
            std::vector<Rational> r(dim);
            for (const auto& [idx, coef] : dg.terms()) {
                Rational v = evaluate(coef, point);
                r[idx[1]] += v * flag[j][idx[0]];
                r[idx[0]] -= v * flag[j][idx[1]];
            }
            rows.push_back(r);
        }
        c_k.push_back(static_cast<int>(exact_rank(rows)));
    }
    std::vector<int> s;
    for (std::size_t k = 1; k < n; ++k) s.push_back(c_k[k] - c_k[k - 1]);
    s.push_back(static_cast<int>(dim - n) - c_k[n - 1]);
    return s;
}

// Random linear Pfaffian system on (x, y; u, v, w, a, b), mixed by a
// constant matrix so that adaptation has work to do.
PfaffianSystem random_linear(std::mt19937& rng, const Chart& c) {
    std::vector<std::string> all{"x", "y", "u", "v", "w", "a", "b"};
    auto poly = [&](const std::vector<std::string>& names) {
        return Scalar(testing_support::random_scalar(rng, c, names, 2).num());
    };
    std::uniform_int_distribution<int> k(-3, 3);
    Form t1 = dv(c, "u") - poly(all) * dv(c, "x") - poly(all) * dv(c, "y") - poly({"x", "y"}) * dv(c, "a");
    Form t2 = dv(c, "v") - poly(all) * dv(c, "x") - poly(all) * dv(c, "y") - Scalar(k(rng)) * dv(c, "b");
    Scalar m = Scalar(k(rng));
    return make_system(c, {t1 + m * t2, t2});
}

}  // namespace

TEST_SUITE("pfaffian") {

TEST_CASE("adapted coframe of contact systems") {
    Chart c = chart_of({"t", "q", "v"}, 1);
    auto sys = adapt_coframe(make_system(c, {dv(c, "q") - S("v", c) * dv(c, "t")}));
    CHECK(names_of(sys.chart, sys.complement) == std::vector<std::string>{"v"});
    CHECK(names_of(sys.chart, sys.pivots) == std::vector<std::string>{"q"});
    CHECK(sys.zero_forms.empty());

    Chart j = chart_of({"x", "y", "z", "u", "p", "q", "r"}, 3);
    Form theta = dv(j, "u") - S("p", j) * dv(j, "x") - S("q", j) * dv(j, "y") - S("r", j) * dv(j, "z");
    auto s3 = adapt_coframe(make_system(j, {theta}));
    CHECK(names_of(j, s3.complement) == std::vector<std::string>{"p", "q", "r"});
    CHECK(s3.generators.front() == theta);
    CHECK(coefficients(d(theta), s3.coframe(), j).size() == 3);
}

TEST_CASE("adaptation row-reduces and demotes degenerate generators") {
    Chart c = chart_of({"t", "q", "v"}, 1);
    auto sys = adapt_coframe(make_system(c, {dv(c, "q") - S("v", c) * dv(c, "t"), dv(c, "q") - S("q", c) * dv(c, "t")}));
    CHECK(sys.generators.size() == 1);
    REQUIRE(sys.zero_forms.size() == 1);
    CHECK(sys.zero_forms[0] == S("q - v", c));
    CHECK(extract_zero_forms(contact(2, 1)).empty());

    Chart k = chart_of({"x", "u", "v"}, 1);
    auto s2 = adapt_coframe(make_system(k, {S("x", k) * dv(k, "u") + dv(k, "v")}));
    CHECK(names_of(k, s2.pivots) == std::vector<std::string>{"v"});
    CHECK(s2.assumptions.empty());
}

TEST_CASE("structure equations of simple systems") {
    auto sys = adapt_coframe(contact(2, 1));
    auto se = structure_equations(sys);
    CHECK(se.n_theta == 1);
    CHECK(se.n_pi == 2);
    CHECK(se.tableau[0][0][0] == Scalar(-1));
    CHECK(se.tableau[0][0][1].is_zero());
    CHECK(se.tableau[0][1][1] == Scalar(-1));
    CHECK(se.tableau[0][1][0].is_zero());
    CHECK(se.torsion[0][0].is_zero());

    Chart c = chart_of({"x", "u", "v", "y"}, 1);
    auto se2 = structure_equations(make_system(c, {dv(c, "u") - S("y*v", c) * dv(c, "x")}));
    CHECK(names_of(c, se2.complement) == std::vector<std::string>{"v", "y"});
    CHECK(se2.tableau[0][0][0] == S("-y", c));
    CHECK(se2.tableau[0][1][0] == S("-v", c));

    Chart w = chart_of({"x", "u", "v", "z"}, 1);
    CHECK_THROWS_AS(structure_equations(make_system(w, {dv(w, "u") - S("v", w) * dv(w, "z")})), NotLinearPfaffian);
}

TEST_CASE("property: tableau and torsion reassemble d(theta)") {
    Chart c = chart_of({"x", "y", "u", "v", "w", "a", "b"}, 2);
    std::mt19937 rng(31);
    int checked = 0;
    for (int n = 0; checked < 60; ++n) {
        PfaffianSystem sys = adapt_coframe(random_linear(rng, c));
        if (sys.generators.size() != 2 || sys.complement.size() != 3) continue;
        StructureEquations se;
        std::map<std::vector<int>, Scalar> k0;
        try {
            se = structure_equations(sys);
            k0 = coefficients(d(sys.generators[0]), sys.coframe(), sys.chart);
        } catch (const CoframeDegenerate&) {
            continue;
        }
        for (std::size_t a = 0; a < se.n_theta; ++a) {
            auto k = a == 0 ? k0 : coefficients(d(sys.generators[a]), sys.coframe(), sys.chart);
            const int nt = static_cast<int>(se.n_theta), m = static_cast<int>(se.m);
            for (const auto& [idx, coef] : k) {
                if (idx[0] < nt) continue;
                if (idx[1] < nt + m) {
                    REQUIRE(se.torsion[a][0] == coef);
                } else {
                    REQUIRE(idx[0] < nt + m);
                    REQUIRE(se.tableau[a][idx[1] - nt - m][idx[0] - nt] == -coef);
                }
            }
            for (std::size_t e = 0; e < se.n_pi; ++e)
                for (std::size_t i = 0; i < se.m; ++i) {
                    std::vector<int> key{nt + static_cast<int>(i), nt + m + static_cast<int>(e)};
                    auto it = k.find(key);
                    REQUIRE(se.tableau[a][e][i] == (it == k.end() ? Scalar() : -it->second));
                }
            auto it = k.find({nt, nt + 1});
            REQUIRE(se.torsion[a][0] == (it == k.end() ? Scalar() : it->second));
        }
        ++checked;
    }
}

TEST_CASE("essential torsion") {
    Chart f = chart_of({"x", "y", "u"}, 2);
    CHECK(essential_torsion(structure_equations(make_system(f, {dv(f, "u")}))).empty());

    Chart c = chart_of({"x", "y", "u", "w", "v"}, 2);
    Form t1 = dv(c, "u") - S("v", c) * dv(c, "x");
    // Absorbable: p^v_y = 1.
    Form t2 = dv(c, "w") - S("v", c) * dv(c, "x") - S("x", c) * dv(c, "y");
    CHECK(essential_torsion(structure_equations(make_system(c, {t2}))).empty());
    // Not absorbable: p^v_y = 0 and p^v_y = v.
    Form t3 = dv(c, "w") - S("v", c) * dv(c, "x") - S("w", c) * dv(c, "y");
    auto ess = essential_torsion(structure_equations(make_system(c, {t1, t3})));
    REQUIRE(ess.size() == 1);
    CHECK(ess[0] == S("v", c));

    Chart g = chart_of({"x", "y", "u"}, 2);
    auto e2 = essential_torsion(structure_equations(make_system(g, {dv(g, "u") - S("y", g) * dv(g, "x")})));
    REQUIRE(e2.size() == 1);
    CHECK(e2[0] == Scalar(1));
}

TEST_CASE("characters of Frobenius systems") {
    Chart c = chart_of({"x", "y", "u", "v"}, 2);
    auto full = cartan_test(make_system(c, {dv(c, "u") - S("u", c) * dv(c, "x"), dv(c, "v") - S("y", c) * dv(c, "y")}), 7);
    CHECK(full.characters.s == std::vector<int>{0, 0});
    CHECK(full.prolongation_dim == 0);
    CHECK(full.involutive);
    CHECK(full.torsion_essential.empty());

    // One unconstrained complement direction: s_m counts it.
    auto partial = cartan_test(make_system(c, {dv(c, "u") - S("u", c) * dv(c, "x")}), 7);
    CHECK(partial.characters.s == std::vector<int>{0, 1});
    CHECK(partial.prolongation_dim == 2);
    CHECK(partial.involutive);
}

TEST_CASE("characters of contact systems agree with polar spaces") {
    for (auto [n, q] : std::vector<std::pair<std::size_t, std::size_t>>{{1, 1}, {2, 1}, {3, 1}, {2, 2}, {3, 2}}) {
        CAPTURE(n);
        CAPTURE(q);
        PfaffianSystem sys = contact(n, q);
        auto rep = cartan_test(sys, 11);
        CHECK(rep.characters.s == polar_oracle(sys, n, q, 5));
        CHECK(rep.characters.s0 == static_cast<int>(q));
        CHECK(rep.prolongation_dim == q * n * (n + 1) / 2);
        CHECK(rep.involutive);
    }
    auto j13 = cartan_test(contact(3, 1), 1);
    CHECK(j13.characters.s == std::vector<int>{1, 1, 1});
    CHECK(j13.characters.polar_codims == std::vector<int>{1, 2, 3});
    CHECK(j13.prolongation_dim == 6);
    CHECK(j13.cartan_sum == 6);
}

TEST_CASE("a non-involutive tableau") {
    // u_x = v_y = p, u_y = v_x = 0.
    Chart c = chart_of({"x", "y", "u", "v", "p"}, 2);
    Form t1 = dv(c, "u") - S("p", c) * dv(c, "x");
    Form t2 = dv(c, "v") - S("p", c) * dv(c, "y");
    auto rep = cartan_test(make_system(c, {t1, t2}), 3);
    CHECK(rep.torsion_essential.empty());
    CHECK(rep.characters.s == std::vector<int>{1, 0});
    CHECK(rep.prolongation_dim == 0);
    CHECK(rep.cartan_sum == 1);
    CHECK_FALSE(rep.involutive);
}

TEST_CASE("prolongation") {
    Chart c = chart_of({"x", "y", "u", "v"}, 2);
    auto fro = prolong(make_system(c, {dv(c, "u"), dv(c, "v")}));
    CHECK(fro.added.empty());

    auto pr = prolong(contact(2, 1));
    CHECK(pr.added.size() == 3);
    CHECK(pr.system.generators.size() == 3);
    CHECK(pr.system.chart.max_level() == 1);
    CHECK(pr.system.zero_forms.empty());
    for (const auto& name : pr.added) CHECK(name.rfind("Z[p1_", 0) == 0);
    auto rep = cartan_test(pr.system, 4);
    CHECK(rep.involutive);
    CHECK(rep.characters.s == std::vector<int>{2, 1});
    CHECK(rep.prolongation_dim == 4);

    auto pr2 = prolong(pr.system);
    CHECK(pr2.added.size() == 4);
    for (const auto& name : pr2.added) CHECK(std::count(name.begin(), name.end(), ',') == 1);
}

TEST_CASE("restriction") {
    Chart c = chart_of({"t", "q1", "q2", "v1", "v2"}, 1);
    auto sys = adapt_coframe(make_system(c, {dv(c, "q1") - S("v1", c) * dv(c, "t"), dv(c, "q2") - S("v2", c) * dv(c, "t")}));
    auto same = restrict_system(sys, {});
    CHECK(same.system.generators == sys.generators);
    CHECK(same.substitution.empty());

    auto r = restrict_system(sys, {S("q2 - q1", c)});
    REQUIRE(r.solution.bindings.size() == 1);
    CHECK(r.solution.bindings.begin()->first == c.at_name("q1"));
    CHECK(r.solution.bindings.begin()->second == S("q2", c));
    REQUIRE(r.system.zero_forms.size() == 1);
    CHECK(r.system.zero_forms[0] == S("v1 - v2", c));
    CHECK_FALSE(r.system.chart.active(c.at_name("q1")));

    CHECK_THROWS_AS(restrict_system(sys, {Scalar(3)}), EmptyLocus);
    CHECK_THROWS_AS(restrict_system(sys, {S("t - 1", c)}), EmptyLocus);
    CHECK_THROWS_AS(restrict_system(sys, {S("q1 - q2", c), S("q1 - q2 - 1", c)}), EmptyLocus);
}

TEST_CASE("restriction records pivots as assumptions") {
    std::vector<std::string> names{"x", "y", "q", "v_y", "w_y"};
    Chart c = chart_of(names, 2);
    Coordinate z1{"Z[w_y;y]", Role::grassmann, 1, "w_y", {"y"}};
    Coordinate z2{"Z[w_y;x]", Role::grassmann, 1, "w_y", {"x"}};
    c.add(z1);
    c.add(z2);
    auto sol = solve_constraints({S("y*Z[w_y;y] + 2*w_y", c), S("y*Z[w_y;x] - v_y - q", c)},
                                 default_elimination_order(c), c);
    CHECK(sol.bindings.count(c.at_name("Z[w_y;y]")));
    CHECK(sol.bindings.count(c.at_name("Z[w_y;x]")));
    CHECK(sol.assumptions == std::vector<std::string>{"y != 0"});
}

TEST_CASE("nonlinear constraints") {
    Chart c = chart_of({"t", "a", "b"}, 1);
    auto order = default_elimination_order(c);
    auto sq = solve_constraints({S("a^2", c)}, order, c);
    CHECK(sq.bindings.at(c.at_name("a")).is_zero());
    CHECK(sq.assumptions.empty());
    auto fac = solve_constraints({S("t*a + t*b", c)}, order, c);
    CHECK(fac.bindings.at(c.at_name("a")) == S("-b", c));
    CHECK(fac.assumptions == std::vector<std::string>{"t != 0"});
    auto split = solve_constraints({S("a*b + a", c)}, order, c);
    CHECK(split.bindings.at(c.at_name("a")).is_zero());
    CHECK(split.assumptions == std::vector<std::string>{"b + 1 != 0"});
    CHECK_THROWS_AS(solve_constraints({S("a^2 + b^2 - 1", c)}, order, c), NeedsUserBranch);
}

TEST_CASE("property: restricted generators are pullbacks") {
    Chart c = chart_of({"x", "y", "u", "v", "w", "a", "b"}, 2);
    std::mt19937 rng(33);
    for (int n = 0; n < 40; ++n) {
        PfaffianSystem sys = adapt_coframe(random_linear(rng, c));
        Scalar k = testing_support::random_scalar(rng, c, {"x", "y"}, 1);
        std::vector<Scalar> cons{S("a", c) - k};
        Restriction r;
        try {
            r = restrict_system(sys, cons);
        } catch (const DivisionByZero&) {
            continue;
        }
        std::vector<Form> pulled;
        for (const auto& g : sys.generators) pulled.push_back(pullback(g, r.substitution));
        for (const auto& g : r.system.generators) {
            for (Var v : g.variables()) REQUIRE(r.system.chart.active(v));
        }
        // Both sets span the same module over the restricted chart.
        std::vector<Form> frame = r.system.coframe();
        for (const auto& p : pulled) {
            if (p.is_zero()) continue;
            auto coef = coefficients(p, frame, r.system.chart);
            for (const auto& [idx, s] : coef) REQUIRE(idx[0] < static_cast<int>(r.system.generators.size()));
        }
    }
}

TEST_CASE("property: characters under random linear systems") {
    Chart c = chart_of({"x", "y", "u", "v", "w", "a", "b"}, 2);
    std::mt19937 rng(34);
    int checked = 0;
    for (int n = 0; n < 200 && checked < 40; ++n) {
        PfaffianSystem sys = random_linear(rng, c);
        InvolutivityReport rep;
        try {
            rep = cartan_test(sys, 9);
        } catch (const Error&) {
            continue;
        }
        if (!rep.torsion_essential.empty()) continue;
        REQUIRE(rep.prolongation_dim <= rep.cartan_sum);
        REQUIRE(rep.involutive == (rep.prolongation_dim == rep.cartan_sum));
        for (int s : rep.characters.s) REQUIRE(s >= 0);
        REQUIRE(cartan_test(sys, 9).characters.s == rep.characters.s);
        ++checked;
    }
    CHECK(checked > 0);
}

TEST_CASE("character monotonicity where complement directions are all used") {
    for (auto [n, q] : std::vector<std::pair<std::size_t, std::size_t>>{{2, 1}, {3, 1}, {3, 2}}) {
        auto pr = prolong(contact(n, q));
        auto s = cartan_test(pr.system, 2).characters.s;
        CHECK(std::is_sorted(s.rbegin(), s.rend()));
    }
}

TEST_CASE("seed determinism") {
    auto sys = prolong(contact(3, 1)).system;
    auto a = cartan_test(sys, 42), b = cartan_test(sys, 42);
    CHECK(a.characters.s == b.characters.s);
    CHECK(a.prolongation_dim == b.prolongation_dim);
}

}
