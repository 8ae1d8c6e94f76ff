#pragma once

#include <array>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "lepage/expr.hpp"
#include "lepage/hamilton.hpp"

namespace lepage {

// One line of the [chart] section, in file order.
struct ChartItem {
    enum class Kind { coordinates, jet, jets, family, range, metric };
    Kind kind = Kind::coordinates;
    Role role = Role::field;
    // coordinates: the names; jets: the fields to differentiate; range: index names.
    std::vector<std::string> names;
    // jet: (name, origin, independent) triples.
    std::vector<std::array<std::string, 3>> jet_specs;
    // family: name[indices].
    std::string family;
    std::vector<std::string> indices;
    bool antisym = false;
    int lo = 0, hi = 0;
    std::vector<Rational> diagonal;
    int line = 0;

    bool operator==(const ChartItem& o) const;
};

struct NamedText {
    std::string name;
    // Canonical expression text.
    std::string text;
    int line = 0;
    // Text as written and its column, for diagnostics only.
    std::string source;
    int column = 1;
    bool operator==(const NamedText& o) const { return name == o.name && text == o.text; }
};

struct MultDecl {
    std::string name;
    std::vector<std::string> indices;
    bool antisym = false;
    std::string generator;
    std::string shape;
    int line = 0;
    std::string shape_source;
    int shape_column = 1;
    bool operator==(const MultDecl& o) const {
        return name == o.name && indices == o.indices && antisym == o.antisym && generator == o.generator &&
               shape == o.shape;
    }
};

struct ProblemDocument {
    std::string name;
    std::vector<ChartItem> chart;
    std::vector<std::pair<std::string, Rational>> params;
    std::optional<NamedText> lagrangian;
    std::vector<NamedText> generators;
    std::optional<NamedText> theta;
    LepageMode mode = LepageMode::classical;
    std::vector<std::string> multiplier_names;
    int horizontal = 2;
    std::vector<MultDecl> mults;
    std::uint64_t seed = 1;
    int max_prolong = 4;
    int max_steps = 32;
    // Verdict the fixture runner compares against.
    std::string expect;

    bool operator==(const ProblemDocument& o) const;
};

// Throws ParseError with the line and column of the offending text. The
// document is validated by building its problem once.
ProblemDocument parse_problem(const std::string& text);
std::string serialize_problem(const ProblemDocument& doc);

// Overrides or adds a parameter value.
void set_param(ProblemDocument& doc, const std::string& name, const Rational& value);

struct BuiltProblem {
    VariationalProblem vp;
    std::vector<MultiplierShape> shapes;
    Form theta;
};

BuiltProblem build_problem(const ProblemDocument& doc);
LepageSpace build_lepage(const ProblemDocument& doc);

}  // namespace lepage
