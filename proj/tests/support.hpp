#pragma once

#include <random>
#include <string>
#include <vector>

#include "lepage/chart.hpp"
#include "lepage/expr.hpp"
#include "lepage/scalar.hpp"

namespace testing_support {

using namespace lepage;

// First `m` names are independent, the rest fields.
inline Chart chart_of(const std::vector<std::string>& names, std::size_t m = 0) {
    Chart c;
    for (std::size_t i = 0; i < names.size(); ++i) {
        Coordinate k;
        k.name = names[i];
        k.role = i < m ? Role::independent : Role::field;
        c.add(k);
    }
    return c;
}

inline Scalar S(const std::string& text, const Chart& c) { return normalize(text, c); }

// Random expression text over the given names.
inline std::string random_expr(std::mt19937& rng, const std::vector<std::string>& names, int depth) {
    std::uniform_int_distribution<int> pick(0, 9);
    int k = pick(rng);
    if (depth <= 0 || k < 3) {
        if (k % 2 == 0) {
            std::uniform_int_distribution<int> c(-5, 5);
            int v = c(rng);
            return v < 0 ? "(" + std::to_string(v) + ")" : std::to_string(v);
        }
        std::uniform_int_distribution<std::size_t> n(0, names.size() - 1);
        return names[n(rng)];
    }
    std::string a = random_expr(rng, names, depth - 1), b = random_expr(rng, names, depth - 1);
    switch (k) {
        case 3:
        case 4: return "(" + a + " + " + b + ")";
        case 5: return "(" + a + " - " + b + ")";
        case 6:
        case 7: return "(" + a + ")*(" + b + ")";
        case 8: return "(" + a + ")/(" + b + ")";
        default: return "(" + a + ")^2";
    }
}

// Random scalar; retries on division by zero.
inline Scalar random_scalar(std::mt19937& rng, const Chart& c, const std::vector<std::string>& names, int depth) {
    for (;;) {
        try {
            return S(random_expr(rng, names, depth), c);
        } catch (const std::exception&) {
        }
    }
}

}  // namespace testing_support
