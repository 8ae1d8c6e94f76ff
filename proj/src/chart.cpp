#include "lepage/chart.hpp"

#include <algorithm>

#include "lepage/errors.hpp"

namespace lepage {

const char* role_name(Role r) {
    switch (r) {
        case Role::independent: return "independent";
        case Role::field: return "field";
        case Role::jet: return "jet";
        case Role::multiplier: return "multiplier";
        case Role::grassmann: return "grassmann";
        case Role::other: return "other";
    }
    return "other";
}

Var Chart::add(Coordinate c) {
    if (index_.count(c.name) || parameters.count(c.name)) throw Error("duplicate name '" + c.name + "'");
    Var v = static_cast<Var>(coords_.size());
    index_.emplace(c.name, v);
    coords_.push_back(std::move(c));
    active_.push_back(true);
    return v;
}

std::optional<Var> Chart::find(const std::string& name) const {
    auto it = index_.find(name);
    if (it == index_.end()) return std::nullopt;
    return it->second;
}

Var Chart::at_name(const std::string& name) const {
    auto v = find(name);
    if (!v) throw UnknownName(name);
    return *v;
}

std::vector<Var> Chart::independents() const {
    std::vector<Var> out;
    for (Var v = 0; v < coords_.size(); ++v)
        if (coords_[v].role == Role::independent) out.push_back(v);
    return out;
}

std::vector<Var> Chart::dependents() const {
    std::vector<Var> out;
    for (Var v = 0; v < coords_.size(); ++v)
        if (active_[v] && coords_[v].role != Role::independent) out.push_back(v);
    return out;
}

std::vector<Var> Chart::active_vars() const {
    std::vector<Var> out;
    for (Var v = 0; v < coords_.size(); ++v)
        if (active_[v]) out.push_back(v);
    return out;
}

std::size_t Chart::m() const {
    return static_cast<std::size_t>(std::count_if(coords_.begin(), coords_.end(),
                                                  [](const Coordinate& c) { return c.role == Role::independent; }));
}

int Chart::max_level() const {
    int l = 0;
    for (const auto& c : coords_) l = std::max(l, c.level);
    return l;
}

std::string Chart::unique_name(const std::string& base) const {
    std::string n = base;
    while (index_.count(n) || parameters.count(n)) n += "'";
    return n;
}

std::function<std::string(Var)> Chart::namer() const {
    return [this](Var v) { return coords_[v].name; };
}

}  // namespace lepage
