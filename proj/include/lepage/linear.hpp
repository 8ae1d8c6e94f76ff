#pragma once

#include <cstdint>
#include <map>
#include <random>
#include <set>
#include <string>
#include <vector>

#include "lepage/scalar.hpp"

namespace lepage {

// Sum of coef[j] * u_j + constant = 0 over abstract unknowns u_j.
struct LinearRow {
    std::map<int, Scalar> coef;
    Scalar constant;
};

struct Elimination {
    // u_j = sum of expr.coef[k] * u_k (k free) + expr.constant
    std::map<int, LinearRow> solved;
    std::vector<int> pivot_order;
    std::vector<Scalar> residual;
    // Rows left with entries only in unknowns outside `order`.
    std::vector<LinearRow> leftover;
    std::vector<int> free;
    // Nonconstant pivots the elimination divided by.
    std::vector<Scalar> pivots;
};

enum class PivotPolicy {
    // Earliest unknown in `order` first; a constant coefficient preferred among its rows.
    order_first,
    // Any constant pivot before any nonconstant one, then by `order`.
    constant_first,
};

// Gauss-Jordan elimination. Unknowns missing from `order` are never pivoted.
Elimination eliminate(std::vector<LinearRow> rows, const std::vector<int>& order,
                      PivotPolicy policy = PivotPolicy::order_first);

struct LinearSolveResult {
    std::map<Var, Scalar> solved;
    std::vector<Var> solved_order;
    std::vector<Scalar> residual;
    std::vector<Var> free;
    std::vector<Scalar> assumptions;
};

// Throws NonLinearInUnknowns when an equation is not affine-linear in `unknowns`.
LinearSolveResult solve_linear(const std::vector<Scalar>& eqs, const std::vector<Var>& unknowns, const Chart& chart);

// Affine decomposition of eq's numerator in the unknowns; throws NonLinearInUnknowns.
LinearRow linear_row(const Scalar& eq, const std::set<Var>& unknowns, const Chart& chart);

// Human-readable non-vanishing conditions for a pivot, one per factor we can see.
std::vector<std::string> nonvanishing_conditions(const Scalar& pivot, const Chart& chart);

// Seeded generator of rational sample points, numerator and denominator bounded by 10^4.
class Sampler {
public:
    explicit Sampler(std::uint64_t seed, std::uint64_t stream = 0);
    Rational next();
    std::map<Var, Rational> point(const std::set<Var>& vars);

private:
    std::mt19937_64 rng_;
};

std::size_t exact_rank(const std::vector<std::vector<Rational>>& m);
std::size_t exact_rank(std::vector<std::map<int, Rational>> rows);

using ScalarMatrix = std::vector<std::vector<Scalar>>;

constexpr int kDefaultSamples = 3;

// Generic rank: maximum over seeded samples of the exact rank at a random point.
std::size_t random_rank(const ScalarMatrix& m, std::uint64_t seed, int samples = kDefaultSamples);

// A sample point where none of `denominators` vanishes. Throws
// AllSamplesDegenerate after a bounded number of retries.
std::map<Var, Rational> admissible_point(const std::set<Var>& vars, const std::vector<Poly>& denominators,
                                         Sampler& s);

// Evaluates a matrix of scalars at an admissible point.
std::vector<std::vector<Rational>> sample_matrix(const ScalarMatrix& m, Sampler& s);

}  // namespace lepage
