#pragma once

#include <functional>
#include <map>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include "lepage/poly.hpp"

namespace lepage {

enum class Role { independent, field, jet, multiplier, grassmann, other };

const char* role_name(Role r);

struct Coordinate {
    std::string name;
    Role role = Role::other;
    int level = 0;
    // For jets and fiber coordinates: the coordinate being differentiated
    // and the independent names it is differentiated by.
    std::string origin;
    std::vector<std::string> derivs;
};

// Append-only coordinate table. Variable indices are stable; eliminated
// coordinates stay in the table but are marked inactive.
class Chart {
public:
    Var add(Coordinate c);
    std::optional<Var> find(const std::string& name) const;
    Var at_name(const std::string& name) const;

    const Coordinate& at(Var v) const { return coords_[v]; }
    const std::string& name(Var v) const { return coords_[v].name; }
    std::size_t size() const { return coords_.size(); }
    bool active(Var v) const { return active_[v]; }
    void deactivate(Var v) { active_[v] = false; }

    std::vector<Var> independents() const;
    std::vector<Var> dependents() const;
    std::vector<Var> active_vars() const;
    std::size_t m() const;
    int max_level() const;

    // Fresh name derived from base, unique in this chart.
    std::string unique_name(const std::string& base) const;

    std::function<std::string(Var)> namer() const;

    std::map<std::string, Rational> parameters;

private:
    std::vector<Coordinate> coords_;
    std::vector<bool> active_;
    std::unordered_map<std::string, Var> index_;
};

}  // namespace lepage
