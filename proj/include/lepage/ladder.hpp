#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "lepage/hamilton.hpp"
#include "lepage/pfaffian.hpp"

namespace lepage {

enum class StepKind { hamilton, zero_forms, torsion, prolongation, involutive, empty_locus };
const char* kind_name(StepKind k);

struct LadderStep {
    int level = 0;
    StepKind kind = StepKind::zero_forms;
    std::vector<Scalar> base_constraints;
    std::vector<Scalar> fiber_constraints;
    std::optional<CharacterVector> characters;
    std::vector<std::string> assumptions;
    std::vector<std::string> added_coordinates;
    // Chart the constraints are written on.
    Chart chart;
    // Every restriction so far, Hamilton locus included.
    Substitution locus;
};

enum class Verdict { involutive, empty, budget_exceeded, needs_user_branch };
const char* verdict_name(Verdict v);

struct ConstraintLadder {
    std::vector<LadderStep> steps;
    std::optional<PfaffianSystem> final_system;
    Verdict verdict = Verdict::budget_exceeded;
    std::string diagnostic;
    // Composition of every restriction since the last prolongation.
    Substitution substitution;
    // Composition of every restriction, Hamilton locus included.
    Substitution locus;
};

struct LadderOptions {
    std::uint64_t seed = 1;
    int max_prolongations = 4;
    int max_steps = 32;
    int samples = kDefaultSamples;
    // Called with every system that reaches the torsion stage.
    std::function<void(const PfaffianSystem&, const StructureEquations&)> visit;
};

// Zero-forms to exhaustion, then torsion, then the Cartan test, then prolong.
// The first step records the Hamilton locus G₀.
ConstraintLadder run(const HamiltonLocus& hl, const LadderOptions& opts = {});
ConstraintLadder run(const PfaffianSystem& sys, const LadderOptions& opts = {});

struct ConstraintClass {
    bool base = true;
    int level = 0;
};

// Base iff only level-0 coordinates occur; otherwise fiber at the highest level.
ConstraintClass classify_constraint(const Scalar& c, const Chart& chart);

struct StepSummary {
    int level = 0;
    std::string kind;
    std::vector<std::string> base_constraints;
    std::vector<std::string> fiber_constraints;
    std::vector<int> characters;
    std::vector<std::string> assumptions;
    std::vector<std::string> added_coordinates;
};

struct LadderSummary {
    std::string verdict;
    std::string diagnostic;
    std::vector<StepSummary> steps;
    std::vector<std::string> final_generators;
};

// Deterministic text of every step; constraints are printed as canonical
// polynomials understood as "= 0".
LadderSummary summarize(const ConstraintLadder& l);

}  // namespace lepage
