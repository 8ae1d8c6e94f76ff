#pragma once

#include <string>
#include <vector>

#include "lepage/form.hpp"
#include "lepage/pfaffian.hpp"

namespace lepage {

struct VariationalProblem {
    Chart chart;
    // The m-form λ; for classical builds λ = L·η.
    Form lagrangian;
    std::vector<Form> generators;
};

// η = dx¹ ∧ … ∧ dx^m over the chart's independent coordinates, in chart order.
Form volume_form(const Chart& chart);
// η_i = ∂_i ⌟ η.
Form eta(const Chart& chart, std::size_t i);
// η_ij = ∂_i ⌟ (∂_j ⌟ η).
Form eta(const Chart& chart, std::size_t i, std::size_t j);

enum class LepageMode { classical, griffiths, explicit_theta };
const char* mode_name(LepageMode m);

struct LepageSpace {
    Chart chart;
    Form theta;
    Form omega;
    LepageMode provenance = LepageMode::explicit_theta;
    std::vector<Var> multipliers;
    std::vector<std::string> diagnostics;
    // Θ carries no information: every m-vector solves the Hamilton equations.
    bool vacuous = false;
};

// Θ = p_A^k du^A ∧ η_k + (L − p_A^k u^A_k) η. Names default to p_<field>
// (m = 1) or p_<field>_<x>. Throws MissingJetStructure, or DegreeMismatch
// when λ is not a multiple of η.
LepageSpace build_lepage_classical(const VariationalProblem& vp,
                                   const std::vector<std::string>& multiplier_names = {});

struct MultiplierShape {
    std::string name;
    std::size_t generator = 0;
    Form shape;
};

// Θ = λ + Σ μ_s · shape_s ∧ β_s. Terms that are not p-horizontal, or that
// contain jet differentials, are dropped with a diagnostic. Throws DegreeMismatch.
LepageSpace build_lepage_griffiths(const VariationalProblem& vp, const std::vector<MultiplierShape>& shapes,
                                   int p = 2);

LepageSpace build_lepage_explicit(const Chart& chart, const Form& theta);

struct GrassmannExtension {
    Chart chart;
    std::vector<Var> dependents;
    // z[a][i] is the coordinate Z[dependents[a]; x_i].
    std::vector<std::vector<Var>> z;

    // Z_i = ∂_i + Σ_a z[a][i] ∂_a.
    MultiVector multivector() const;
};

GrassmannExtension grassmann_extend(const LepageSpace& ls);

// Coefficients of Z ⌟ Ω, empty when Ω = 0. The horizontal ones are
// Z-combinations of the vertical ones and are kept for verification only.
struct HamiltonEquations {
    std::vector<Scalar> vertical;
    std::vector<Scalar> horizontal;

    std::vector<Scalar> all() const;
};

HamiltonEquations hamilton_equations(const LepageSpace& ls, const GrassmannExtension& ext);

struct HamiltonLocus {
    GrassmannExtension grassmann;
    ConstraintSolution solution;
    Substitution solved;
    std::vector<Scalar> base_constraints;
    std::vector<Scalar> fiber_constraints;
    PfaffianSystem pfaffian;
};

// Solves for Z coordinates first, then multipliers, jets and fields.
// Generators of I₀ are the pulled-back θ^A = dA − Z^A_k dx^k.
HamiltonLocus solve_hamilton_locus(const GrassmannExtension& ext, const HamiltonEquations& eqs);

// Every Hamilton coefficient vanishes after substituting the locus bindings.
bool residual_check(const HamiltonLocus& hl, const LepageSpace& ls);

}  // namespace lepage
