#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "lepage/form.hpp"
#include "lepage/linear.hpp"

namespace lepage {

// Linear Pfaffian system with independence condition dx^1 ∧ ... ∧ dx^m.
// Once adapted, generator a reads d(pivots[a]) + R dπ + S dx with π the
// differentials of `complement`.
struct PfaffianSystem {
    Chart chart;
    std::vector<Form> generators;
    std::vector<Var> independence;
    std::vector<Scalar> zero_forms;
    std::vector<Var> complement;
    std::vector<Var> pivots;
    std::vector<std::string> assumptions;
    bool adapted = false;

    std::vector<Form> complement_forms() const;
    std::vector<Form> coframe() const;
};

PfaffianSystem make_system(const Chart& chart, std::vector<Form> generators);

struct StructureEquations {
    std::size_t n_theta = 0;
    std::size_t n_pi = 0;
    std::size_t m = 0;
    // tableau[a][eps][i]: coefficient of π^eps ∧ ω^i in dθ^a.
    std::vector<std::vector<std::vector<Scalar>>> tableau;
    // torsion[a][p]: coefficient of ω^j ∧ ω^k in dθ^a, (j, k) = pairs[p], j < k.
    std::vector<std::vector<Scalar>> torsion;
    std::vector<std::pair<std::size_t, std::size_t>> pairs;
    Chart chart;
    std::vector<Var> complement;
    std::vector<Var> independence;
};

struct CharacterVector {
    int s0 = 0;
    std::vector<int> s;
    std::vector<int> polar_codims;
};

struct InvolutivityReport {
    CharacterVector characters;
    std::size_t prolongation_dim = 0;
    std::size_t cartan_sum = 0;
    bool involutive = false;
    std::vector<Scalar> torsion_essential;
    std::vector<std::string> assumptions;
};

// Row-reduces the generators over the dependent differentials, preferring
// low-level coordinates as pivots; generators that lose all dependent
// differentials are demoted to zero-forms.
PfaffianSystem adapt_coframe(const PfaffianSystem& sys);

// Throws NotLinearPfaffian on a π∧π term.
StructureEquations structure_equations(const PfaffianSystem& sys);

// Integral-element equations Σ_ε A^a_{εk} p^ε_j − A^a_{εj} p^ε_k + T^a_{jk} = 0,
// unknown (ε, i) at index ε·m + i.
std::vector<LinearRow> integral_element_rows(const StructureEquations& se);

struct TorsionAnalysis {
    Elimination solution;
    std::vector<Scalar> essential;
    std::vector<std::string> assumptions;
};

TorsionAnalysis analyze_torsion(const StructureEquations& se);
std::vector<Scalar> essential_torsion(const StructureEquations& se);

CharacterVector cartan_characters(const StructureEquations& se, std::uint64_t seed, int samples = kDefaultSamples);
std::size_t prolongation_dim(const StructureEquations& se, std::uint64_t seed, int samples = kDefaultSamples);
std::size_t cartan_sum(const CharacterVector& c);

InvolutivityReport cartan_test(const PfaffianSystem& sys, std::uint64_t seed, int samples = kDefaultSamples);

struct Prolongation {
    PfaffianSystem system;
    std::vector<std::string> added;
    std::vector<std::string> assumptions;
};

// Adds one coordinate per free parameter of the integral-element solution
// and the contact forms dπ^ε − P^ε_i dx^i.
Prolongation prolong(const PfaffianSystem& sys);

std::vector<Scalar> extract_zero_forms(const PfaffianSystem& sys);

// Result of imposing a list of scalar constraints.
struct ConstraintSolution {
    Bindings bindings;
    std::vector<Var> order;
    std::vector<std::string> assumptions;
};

// Solves linear constraints, substitutes into the rest and repeats. A
// constraint linear in no unknown is split as g·h with h linear, assuming
// g != 0. Throws EmptyLocus or NeedsUserBranch.
ConstraintSolution solve_constraints(const std::vector<Scalar>& constraints, const std::vector<Var>& order,
                                     const Chart& chart);

// Highest level first; at level 0 multipliers, then jets, then fields.
std::vector<Var> default_elimination_order(const Chart& chart);

struct Restriction {
    PfaffianSystem system;
    Substitution substitution;
    ConstraintSolution solution;
};

Restriction restrict_system(const PfaffianSystem& sys, const std::vector<Scalar>& constraints,
                            const std::vector<Var>& elimination_order);
Restriction restrict_system(const PfaffianSystem& sys, const std::vector<Scalar>& constraints);

// Primitive numerators, zeros dropped, duplicates removed.
std::vector<Scalar> canonical_constraints(const std::vector<Scalar>& cs);

}  // namespace lepage
