#include "lepage/problem.hpp"

#include <algorithm>
#include <cctype>
#include <sstream>

#include "lepage/errors.hpp"

namespace lepage {

bool ChartItem::operator==(const ChartItem& o) const {
    return kind == o.kind && role == o.role && names == o.names && jet_specs == o.jet_specs && family == o.family &&
           indices == o.indices && antisym == o.antisym && lo == o.lo && hi == o.hi && diagonal == o.diagonal;
}

bool ProblemDocument::operator==(const ProblemDocument& o) const {
    return name == o.name && chart == o.chart && params == o.params && lagrangian == o.lagrangian &&
           generators == o.generators && theta == o.theta && mode == o.mode &&
           multiplier_names == o.multiplier_names && horizontal == o.horizontal && mults == o.mults &&
           seed == o.seed && max_prolong == o.max_prolong && max_steps == o.max_steps && expect == o.expect;
}

namespace {

std::string trim(const std::string& s) {
    std::size_t a = 0, b = s.size();
    while (a < b && std::isspace(static_cast<unsigned char>(s[a]))) ++a;
    while (b > a && std::isspace(static_cast<unsigned char>(s[b - 1]))) --b;
    return s.substr(a, b - a);
}

bool is_identifier(const std::string& s) {
    if (s.empty() || !std::isalpha(static_cast<unsigned char>(s[0]))) return false;
    return std::all_of(s.begin(), s.end(), [](char c) { return std::isalnum(static_cast<unsigned char>(c)) || c == '_'; });
}

std::optional<Role> role_of(const std::string& key) {
    if (key == "independent") return Role::independent;
    if (key == "field") return Role::field;
    if (key == "jet") return Role::jet;
    if (key == "multiplier") return Role::multiplier;
    if (key == "other") return Role::other;
    return std::nullopt;
}

const char* mode_key(LepageMode m) { return mode_name(m); }

// A piece of a line with its 1-based column.
struct Span {
    std::string text;
    int column = 1;
};

Span sub(const Span& s, std::size_t from, std::size_t len = std::string::npos) {
    std::string t = s.text.substr(from, len);
    std::size_t lead = 0;
    while (lead < t.size() && std::isspace(static_cast<unsigned char>(t[lead]))) ++lead;
    return {trim(t), s.column + static_cast<int>(from + lead)};
}

std::vector<Span> split_list(const Span& s, char sep) {
    std::vector<Span> out;
    std::size_t start = 0;
    int depth = 0;
    for (std::size_t i = 0; i <= s.text.size(); ++i) {
        char c = i < s.text.size() ? s.text[i] : sep;
        if (c == '(' || c == '[') ++depth;
        if (c == ')' || c == ']') --depth;
        if (c == sep && depth == 0) {
            out.push_back(sub(s, start, i - start));
            start = i + 1;
        }
    }
    return out;
}

Rational parse_rational(const Span& s, int line) {
    ExprPtr e = parse_expr(s.text, line, s.column);
    Chart empty;
    try {
        Scalar v = normalize(*e, empty);
        if (v.is_constant()) return v.constant_value();
    } catch (const ParseError&) {
        throw;
    } catch (const Error&) {
    }
    throw ParseError("expected a rational number", line, s.column);
}

int parse_int(const Span& s, int line) {
    Rational r = parse_rational(s, line);
    if (r.get_den() != 1 || !r.get_num().fits_sint_p()) throw ParseError("expected an integer", line, s.column);
    return static_cast<int>(r.get_num().get_si());
}

std::string canonical(const Span& s, int line) { return print_expr(*parse_expr(s.text, line, s.column)); }

// name[i, j] with optional trailing words.
void parse_family_head(const Span& s, int line, std::string& name, std::vector<std::string>& idx,
                       std::vector<std::string>& words) {
    auto open = s.text.find('[');
    auto close = s.text.find(']');
    if (open == std::string::npos || close == std::string::npos || close < open)
        throw ParseError("expected name[indices]", line, s.column);
    name = trim(s.text.substr(0, open));
    if (!is_identifier(name)) throw ParseError("bad family name '" + name + "'", line, s.column);
    for (const auto& p : split_list(sub(s, open + 1, close - open - 1), ',')) {
        if (!is_identifier(p.text)) throw ParseError("bad index name '" + p.text + "'", line, p.column);
        idx.push_back(p.text);
    }
    std::istringstream rest(s.text.substr(close + 1));
    std::string w;
    while (rest >> w) words.push_back(w);
}

struct Family {
    std::vector<std::string> indices;
    bool antisym = false;
    std::map<std::vector<int>, std::string> element;
};

std::string element_name(const std::string& fam, const std::vector<int>& v) {
    bool small = std::all_of(v.begin(), v.end(), [](int k) { return k >= 0 && k <= 9; });
    std::string s = fam + "_";
    for (std::size_t i = 0; i < v.size(); ++i) {
        if (i && !small) s += "_";
        s += std::to_string(v[i]);
    }
    return s;
}

// Index tuples over the declared ranges, first index slowest.
std::vector<std::vector<int>> tuples(const std::vector<std::pair<int, int>>& ranges) {
    std::vector<std::vector<int>> out = {{}};
    for (const auto& [lo, hi] : ranges) {
        std::vector<std::vector<int>> next;
        for (const auto& t : out)
            for (int k = lo; k <= hi; ++k) {
                auto u = t;
                u.push_back(k);
                next.push_back(std::move(u));
            }
        out = std::move(next);
    }
    return out;
}

struct Context {
    Chart chart;
    std::map<std::string, std::pair<int, int>> ranges;
    std::map<std::string, Family> families;
    std::vector<Rational> metric;
    std::map<std::string, int> env;
};

std::pair<int, int> range_of(const Context& cx, const std::string& idx, int line, int col) {
    auto it = cx.ranges.find(idx);
    if (it == cx.ranges.end()) throw ParseError("index '" + idx + "' has no declared range", line, col);
    return it->second;
}

int eval_index(const Context& cx, const Expr& e) {
    switch (e.kind) {
        case Expr::Kind::number:
            if (e.value.get_den() == 1 && e.value.get_num().fits_sint_p())
                return static_cast<int>(e.value.get_num().get_si());
            break;
        case Expr::Kind::name: {
            auto it = cx.env.find(e.name);
            if (it != cx.env.end()) return it->second;
            break;
        }
        case Expr::Kind::add: return eval_index(cx, *e.args[0]) + eval_index(cx, *e.args[1]);
        case Expr::Kind::sub: return eval_index(cx, *e.args[0]) - eval_index(cx, *e.args[1]);
        case Expr::Kind::neg: return -eval_index(cx, *e.args[0]);
        default: break;
    }
    throw ParseError("expected an integer index: " + print_expr(e), e.line, e.column);
}

Form eval_form(Context& cx, const Expr& e);

Form scalar_form(const Scalar& s) { return Form::scalar(s); }

Form independent_eta(const Context& cx, const Expr& e, const std::vector<int>& idx) {
    std::size_t m = cx.chart.m();
    for (int k : idx)
        if (k < 1 || static_cast<std::size_t>(k) > m)
            throw ParseError("eta index out of range 1.." + std::to_string(m), e.line, e.column);
    if (idx.empty()) return volume_form(cx.chart);
    if (idx.size() == 1) return eta(cx.chart, static_cast<std::size_t>(idx[0] - 1));
    return eta(cx.chart, static_cast<std::size_t>(idx[0] - 1), static_cast<std::size_t>(idx[1] - 1));
}

Form sum_with(const Form& a, const Form& b, const Expr& e) {
    if (a.is_zero()) return b;
    if (b.is_zero()) return a;
    if (a.degree() != b.degree())
        throw ParseError("adding forms of degree " + std::to_string(a.degree()) + " and " + std::to_string(b.degree()),
                         e.line, e.column);
    return a + b;
}

Form product(const Form& a, const Form& b, const Expr& e) {
    if (a.degree() == 0) return a.as_scalar() * b;
    if (b.degree() == 0) return b.as_scalar() * a;
    throw ParseError("use /\\ to multiply forms of positive degree", e.line, e.column);
}

Form eval_form(Context& cx, const Expr& e) {
    switch (e.kind) {
        case Expr::Kind::number: return scalar_form(Scalar(e.value));
        case Expr::Kind::name: {
            auto ev = cx.env.find(e.name);
            if (ev != cx.env.end()) return scalar_form(Scalar(ev->second));
            auto p = cx.chart.parameters.find(e.name);
            if (p != cx.chart.parameters.end()) return scalar_form(Scalar(p->second));
            auto v = cx.chart.find(e.name);
            if (!v) throw ParseError("undeclared name '" + e.name + "'", e.line, e.column);
            return scalar_form(Scalar::var(*v));
        }
        case Expr::Kind::index: {
            std::vector<int> idx;
            for (const auto& a : e.args) idx.push_back(eval_index(cx, *a));
            if (e.name == "g" && !cx.families.count("g")) {
                if (cx.metric.empty()) throw ParseError("no metric declared", e.line, e.column);
                if (idx.size() != 2) throw ParseError("g takes two indices", e.line, e.column);
                int n = static_cast<int>(cx.metric.size());
                if (idx[0] < 1 || idx[0] > n || idx[1] < 1 || idx[1] > n)
                    throw ParseError("metric index out of range", e.line, e.column);
                return scalar_form(idx[0] == idx[1] ? Scalar(cx.metric[idx[0] - 1]) : Scalar(0));
            }
            auto f = cx.families.find(e.name);
            if (f == cx.families.end()) throw ParseError("undeclared family '" + e.name + "'", e.line, e.column);
            if (idx.size() != f->second.indices.size())
                throw ParseError("family '" + e.name + "' takes " + std::to_string(f->second.indices.size()) +
                                     " indices",
                                 e.line, e.column);
            Scalar sign(1);
            if (f->second.antisym) {
                if (idx[0] == idx[1]) return scalar_form(Scalar(0));
                if (idx[0] > idx[1]) {
                    std::swap(idx[0], idx[1]);
                    sign = Scalar(-1);
                }
            }
            auto el = f->second.element.find(idx);
            if (el == f->second.element.end()) throw ParseError("index out of range for '" + e.name + "'", e.line, e.column);
            return scalar_form(sign * Scalar::var(cx.chart.at_name(el->second)));
        }
        case Expr::Kind::call: {
            if (e.name == "d") {
                if (e.args.size() != 1) throw ParseError("d takes one argument", e.line, e.column);
                return d(eval_form(cx, *e.args[0]));
            }
            if (e.name == "eta") {
                if (e.args.size() > 2) throw ParseError("eta takes at most two indices", e.line, e.column);
                std::vector<int> idx;
                for (const auto& a : e.args) idx.push_back(eval_index(cx, *a));
                return independent_eta(cx, e, idx);
            }
            throw ParseError("unknown function '" + e.name + "'", e.line, e.column);
        }
        case Expr::Kind::sum: {
            std::vector<std::string> names;
            std::vector<std::pair<int, int>> rs;
            for (std::size_t i = 0; i + 1 < e.args.size(); ++i) {
                names.push_back(e.args[i]->name);
                rs.push_back(range_of(cx, e.args[i]->name, e.args[i]->line, e.args[i]->column));
            }
            auto saved = cx.env;
            Form total;
            for (const auto& t : tuples(rs)) {
                for (std::size_t i = 0; i < names.size(); ++i) cx.env[names[i]] = t[i];
                total = sum_with(total, eval_form(cx, *e.args.back()), e);
            }
            cx.env = saved;
            return total;
        }
        case Expr::Kind::neg: return -eval_form(cx, *e.args[0]);
        case Expr::Kind::add: return sum_with(eval_form(cx, *e.args[0]), eval_form(cx, *e.args[1]), e);
        case Expr::Kind::sub: return sum_with(eval_form(cx, *e.args[0]), -eval_form(cx, *e.args[1]), e);
        case Expr::Kind::mul: return product(eval_form(cx, *e.args[0]), eval_form(cx, *e.args[1]), e);
        case Expr::Kind::div: {
            Form den = eval_form(cx, *e.args[1]);
            if (den.degree() != 0) throw ParseError("division by a form", e.line, e.column);
            Scalar s = den.as_scalar();
            if (s.is_zero()) throw ParseError("division by zero", e.line, e.column);
            return s.inverse() * eval_form(cx, *e.args[0]);
        }
        case Expr::Kind::pow: {
            Form b = eval_form(cx, *e.args[0]);
            if (b.degree() != 0) throw ParseError("power of a form", e.line, e.column);
            long k = eval_index(cx, *e.args[1]);
            Scalar s = b.as_scalar();
            if (k < 0 && s.is_zero()) throw ParseError("division by zero", e.line, e.column);
            return scalar_form(s.pow(k));
        }
        case Expr::Kind::wedge: return wedge(eval_form(cx, *e.args[0]), eval_form(cx, *e.args[1]));
    }
    throw ParseError("bad expression", e.line, e.column);
}

Form eval_text(Context& cx, const NamedText& t) {
    if (!t.source.empty()) return eval_form(cx, *parse_expr(t.source, t.line, t.column));
    return eval_form(cx, *parse_expr(t.text, t.line, 1));
}

Context chart_context(const ProblemDocument& doc) {
    Context cx;
    for (const auto& [n, v] : doc.params) cx.chart.parameters[n] = v;
    auto add = [&](Coordinate c, int line) {
        try {
            cx.chart.add(std::move(c));
        } catch (const ParseError&) {
            throw;
        } catch (const Error& e) {
            throw ParseError(e.what(), line, 1);
        }
    };
    for (const auto& it : doc.chart) {
        switch (it.kind) {
            case ChartItem::Kind::coordinates:
                for (const auto& n : it.names) {
                    Coordinate c;
                    c.name = n;
                    c.role = it.role;
                    add(c, it.line);
                }
                break;
            case ChartItem::Kind::jet:
                for (const auto& [n, o, x] : it.jet_specs) {
                    auto ov = cx.chart.find(o);
                    auto xv = cx.chart.find(x);
                    if (!ov) throw ParseError("jet origin '" + o + "' is not declared", it.line, 1);
                    if (!xv || cx.chart.at(*xv).role != Role::independent)
                        throw ParseError("'" + x + "' is not an independent coordinate", it.line, 1);
                    Coordinate c;
                    c.name = n;
                    c.role = Role::jet;
                    c.origin = o;
                    c.derivs = {x};
                    add(c, it.line);
                }
                break;
            case ChartItem::Kind::jets:
                for (const auto& f : it.names) {
                    if (!cx.chart.find(f)) throw ParseError("field '" + f + "' is not declared", it.line, 1);
                    for (Var x : cx.chart.independents()) {
                        Coordinate c;
                        c.name = f + "_" + cx.chart.name(x);
                        c.role = Role::jet;
                        c.origin = f;
                        c.derivs = {cx.chart.name(x)};
                        add(c, it.line);
                    }
                }
                break;
            case ChartItem::Kind::family: {
                Family fam;
                fam.indices = it.indices;
                fam.antisym = it.antisym;
                if (it.antisym && it.indices.size() != 2)
                    throw ParseError("antisym needs exactly two indices", it.line, 1);
                std::vector<std::pair<int, int>> rs;
                for (const auto& i : it.indices) rs.push_back(range_of(cx, i, it.line, 1));
                for (const auto& t : tuples(rs)) {
                    if (it.antisym && t[0] >= t[1]) continue;
                    Coordinate c;
                    c.name = element_name(it.family, t);
                    c.role = it.role;
                    add(c, it.line);
                    fam.element.emplace(t, c.name);
                }
                cx.families[it.family] = std::move(fam);
                break;
            }
            case ChartItem::Kind::range:
                for (const auto& n : it.names) cx.ranges[n] = {it.lo, it.hi};
                break;
            case ChartItem::Kind::metric: cx.metric = it.diagonal; break;
        }
    }
    if (cx.chart.m() == 0) throw ParseError("at least one independent coordinate is required", 1, 1);
    return cx;
}

void require_degree(const Form& f, int deg, const NamedText& t, const std::string& what) {
    if (!f.is_zero() && f.degree() != deg)
        throw ParseError(what + " has degree " + std::to_string(f.degree()) + ", expected " + std::to_string(deg),
                         t.line, 1);
}

}  // namespace

BuiltProblem build_problem(const ProblemDocument& doc) {
    Context cx = chart_context(doc);
    BuiltProblem out;
    const int m = static_cast<int>(cx.chart.m());
    out.vp.chart = cx.chart;
    if (doc.lagrangian) {
        Form l = eval_text(cx, *doc.lagrangian);
        if (l.degree() == 0) l = l.as_scalar() * volume_form(cx.chart);
        require_degree(l, m, *doc.lagrangian, "lagrangian");
        for (const auto& [idx, c] : l.terms())
            for (Var v : idx)
                if (cx.chart.at(v).role != Role::independent)
                    throw ParseError("lagrangian must be a function times the volume form", doc.lagrangian->line,
                                     doc.lagrangian->column);
        out.vp.lagrangian = l;
    }
    std::map<std::string, std::size_t> gen_index;
    for (const auto& g : doc.generators) {
        gen_index[g.name] = out.vp.generators.size();
        out.vp.generators.push_back(eval_text(cx, g));
    }
    if (doc.theta) {
        out.theta = eval_text(cx, *doc.theta);
        require_degree(out.theta, m, *doc.theta, "theta");
    }
    for (const auto& md : doc.mults) {
        auto gi = gen_index.find(md.generator);
        if (gi == gen_index.end()) throw ParseError("unknown generator '" + md.generator + "'", md.line, 1);
        ExprPtr shape = md.shape_source.empty() ? parse_expr(md.shape, md.line, 1)
                                                : parse_expr(md.shape_source, md.line, md.shape_column);
        std::vector<std::pair<int, int>> rs;
        for (const auto& i : md.indices) rs.push_back(range_of(cx, i, md.line, 1));
        if (md.antisym && md.indices.size() != 2) throw ParseError("antisym needs exactly two indices", md.line, 1);
        for (const auto& t : tuples(rs)) {
            if (md.antisym && t[0] >= t[1]) continue;
            for (std::size_t i = 0; i < t.size(); ++i) cx.env[md.indices[i]] = t[i];
            Form f = eval_form(cx, *shape);
            if (md.antisym) {
                cx.env[md.indices[0]] = t[1];
                cx.env[md.indices[1]] = t[0];
                f = sum_with(f, -eval_form(cx, *shape), *shape);
            }
            cx.env.clear();
            std::string name = md.indices.empty() ? md.name : element_name(md.name, t);
            if (cx.chart.find(name)) throw ParseError("multiplier '" + name + "' clashes with a coordinate", md.line, 1);
            out.shapes.push_back({name, gi->second, f});
        }
    }
    return out;
}

LepageSpace build_lepage(const ProblemDocument& doc) {
    BuiltProblem b = build_problem(doc);
    switch (doc.mode) {
        case LepageMode::classical: return build_lepage_classical(b.vp, doc.multiplier_names);
        case LepageMode::griffiths: return build_lepage_griffiths(b.vp, b.shapes, doc.horizontal);
        case LepageMode::explicit_theta: return build_lepage_explicit(b.vp.chart, b.theta);
    }
    throw Error("unknown mode");
}

ProblemDocument parse_problem(const std::string& text) {
    ProblemDocument doc;
    std::istringstream in(text);
    std::string raw, section;
    int line = 0;
    bool named = false;
    while (std::getline(in, raw)) {
        ++line;
        auto hash = raw.find('#');
        if (hash != std::string::npos) raw = raw.substr(0, hash);
        Span whole = sub({raw, 1}, 0);
        if (whole.text.empty()) continue;
        const std::string& s = whole.text;
        if (s.front() == '[' && s.back() == ']') {
            section = trim(s.substr(1, s.size() - 2));
            static const char* known[] = {"chart", "forms", "lepage", "params", "run"};
            if (std::find(std::begin(known), std::end(known), section) == std::end(known))
                throw ParseError("unknown section [" + section + "]", line, whole.column);
            continue;
        }
        auto eq = s.find('=');
        if (eq == std::string::npos) throw ParseError("expected 'key = value'", line, whole.column);
        Span lhs = sub(whole, 0, eq), rhs = sub(whole, eq + 1);
        std::string key = lhs.text;
        std::string head = key.substr(0, key.find_first_of(" \t["));
        if (section.empty()) {
            if (key != "name") throw ParseError("only 'name' may precede the first section", line, lhs.column);
            doc.name = rhs.text;
            named = true;
        } else if (section == "chart") {
            ChartItem it;
            it.line = line;
            if (auto r = role_of(key); r && key != "jet") {
                it.kind = ChartItem::Kind::coordinates;
                it.role = *r;
                for (const auto& p : split_list(rhs, ',')) {
                    if (!is_identifier(p.text)) throw ParseError("bad coordinate name '" + p.text + "'", line, p.column);
                    it.names.push_back(p.text);
                }
            } else if (key == "jet") {
                it.kind = ChartItem::Kind::jet;
                for (const auto& p : split_list(rhs, ',')) {
                    auto colon = p.text.find(':'), slash = p.text.find('/');
                    if (colon == std::string::npos || slash == std::string::npos || slash < colon)
                        throw ParseError("expected 'name : origin / independent'", line, p.column);
                    std::array<std::string, 3> spec = {trim(p.text.substr(0, colon)),
                                                       trim(p.text.substr(colon + 1, slash - colon - 1)),
                                                       trim(p.text.substr(slash + 1))};
                    for (const auto& w : spec)
                        if (!is_identifier(w)) throw ParseError("bad name '" + w + "'", line, p.column);
                    it.jet_specs.push_back(spec);
                }
            } else if (key == "jets") {
                it.kind = ChartItem::Kind::jets;
                for (const auto& p : split_list(rhs, ',')) {
                    if (!is_identifier(p.text)) throw ParseError("bad field name '" + p.text + "'", line, p.column);
                    it.names.push_back(p.text);
                }
            } else if (head == "range") {
                it.kind = ChartItem::Kind::range;
                for (const auto& p : split_list(sub(lhs, 5), ',')) {
                    if (!is_identifier(p.text)) throw ParseError("bad index name '" + p.text + "'", line, p.column);
                    it.names.push_back(p.text);
                }
                auto dots = rhs.text.find("..");
                if (dots == std::string::npos) throw ParseError("expected 'lo..hi'", line, rhs.column);
                it.lo = parse_int(sub(rhs, 0, dots), line);
                it.hi = parse_int(sub(rhs, dots + 2), line);
                if (it.hi < it.lo) throw ParseError("empty index range", line, rhs.column);
            } else if (key == "metric") {
                it.kind = ChartItem::Kind::metric;
                if (rhs.text.rfind("diag(", 0) != 0 || rhs.text.back() != ')')
                    throw ParseError("expected diag(...)", line, rhs.column);
                for (const auto& p : split_list(sub(rhs, 5, rhs.text.size() - 6), ','))
                    it.diagonal.push_back(parse_rational(p, line));
            } else if (head == "family") {
                it.kind = ChartItem::Kind::family;
                std::vector<std::string> words;
                // family F[i,j] = field antisym
                parse_family_head(sub(lhs, 6), line, it.family, it.indices, words);
                if (!words.empty()) throw ParseError("unexpected '" + words[0] + "'", line, lhs.column);
                std::istringstream ws(rhs.text);
                std::string w;
                bool have_role = false;
                while (ws >> w) {
                    if (w == "antisym") {
                        it.antisym = true;
                    } else if (auto r = role_of(w); r && !have_role) {
                        it.role = *r;
                        have_role = true;
                    } else {
                        throw ParseError("unexpected '" + w + "'", line, rhs.column);
                    }
                }
                if (!have_role) throw ParseError("family needs a role", line, rhs.column);
            } else {
                throw ParseError("unknown chart key '" + key + "'", line, lhs.column);
            }
            doc.chart.push_back(std::move(it));
        } else if (section == "params") {
            if (!is_identifier(key)) throw ParseError("bad parameter name '" + key + "'", line, lhs.column);
            set_param(doc, key, parse_rational(rhs, line));
        } else if (section == "forms") {
            if (key == "lagrangian") {
                doc.lagrangian = NamedText{"lagrangian", canonical(rhs, line), line, rhs.text, rhs.column};
            } else if (key == "theta") {
                doc.theta = NamedText{"theta", canonical(rhs, line), line, rhs.text, rhs.column};
            } else if (head == "generator") {
                std::string n = trim(key.substr(9));
                if (!is_identifier(n)) throw ParseError("bad generator name '" + n + "'", line, lhs.column);
                doc.generators.push_back({n, canonical(rhs, line), line, rhs.text, rhs.column});
            } else {
                throw ParseError("unknown forms key '" + key + "'", line, lhs.column);
            }
        } else if (section == "lepage") {
            if (key == "mode") {
                if (rhs.text == "classical") doc.mode = LepageMode::classical;
                else if (rhs.text == "griffiths") doc.mode = LepageMode::griffiths;
                else if (rhs.text == "explicit") doc.mode = LepageMode::explicit_theta;
                else throw ParseError("mode must be classical, griffiths or explicit", line, rhs.column);
            } else if (key == "multipliers") {
                for (const auto& p : split_list(rhs, ',')) {
                    if (!is_identifier(p.text)) throw ParseError("bad multiplier name '" + p.text + "'", line, p.column);
                    doc.multiplier_names.push_back(p.text);
                }
            } else if (key == "horizontal") {
                doc.horizontal = parse_int(rhs, line);
            } else if (head == "mult") {
                // mult name[idx] antisym : generator = shape
                MultDecl md;
                md.line = line;
                Span rest = sub(lhs, 4);
                auto colon = rest.text.find(':');
                if (colon == std::string::npos) throw ParseError("expected 'mult name : generator'", line, lhs.column);
                Span target = sub(rest, 0, colon);
                md.generator = trim(rest.text.substr(colon + 1));
                if (target.text.find('[') != std::string::npos) {
                    std::vector<std::string> words;
                    parse_family_head(target, line, md.name, md.indices, words);
                    for (const auto& w : words) {
                        if (w != "antisym") throw ParseError("unexpected '" + w + "'", line, target.column);
                        md.antisym = true;
                    }
                } else {
                    md.name = target.text;
                }
                if (!is_identifier(md.name)) throw ParseError("bad multiplier name '" + md.name + "'", line, target.column);
                md.shape = canonical(rhs, line);
                md.shape_source = rhs.text;
                md.shape_column = rhs.column;
                doc.mults.push_back(std::move(md));
            } else {
                throw ParseError("unknown lepage key '" + key + "'", line, lhs.column);
            }
        } else if (section == "run") {
            if (key == "seed") {
                Rational r = parse_rational(rhs, line);
                if (r.get_den() != 1 || r < 0 || !r.get_num().fits_ulong_p())
                    throw ParseError("seed must be a non-negative integer", line, rhs.column);
                doc.seed = r.get_num().get_ui();
            } else if (key == "max_prolong") {
                doc.max_prolong = parse_int(rhs, line);
            } else if (key == "max_steps") {
                doc.max_steps = parse_int(rhs, line);
            } else if (key == "expect") {
                static const char* verdicts[] = {"involutive", "empty", "budget_exceeded", "needs_user_branch"};
                if (std::find(std::begin(verdicts), std::end(verdicts), rhs.text) == std::end(verdicts))
                    throw ParseError("unknown verdict '" + rhs.text + "'", line, rhs.column);
                doc.expect = rhs.text;
            } else {
                throw ParseError("unknown run key '" + key + "'", line, lhs.column);
            }
        }
    }
    if (!named) throw ParseError("missing 'name = ...'", 1, 1);
    build_problem(doc);
    return doc;
}

void set_param(ProblemDocument& doc, const std::string& name, const Rational& value) {
    for (auto& [n, v] : doc.params)
        if (n == name) {
            v = value;
            return;
        }
    doc.params.emplace_back(name, value);
}

std::string serialize_problem(const ProblemDocument& doc) {
    std::ostringstream o;
    auto list = [](const std::vector<std::string>& v) {
        std::string s;
        for (std::size_t i = 0; i < v.size(); ++i) s += (i ? ", " : "") + v[i];
        return s;
    };
    auto rat = [](const Rational& r) { return r.get_str(); };
    o << "name = " << doc.name << "\n\n[chart]\n";
    for (const auto& it : doc.chart) {
        switch (it.kind) {
            case ChartItem::Kind::coordinates: o << role_name(it.role) << " = " << list(it.names) << "\n"; break;
            case ChartItem::Kind::jet: {
                o << "jet = ";
                for (std::size_t i = 0; i < it.jet_specs.size(); ++i)
                    o << (i ? ", " : "") << it.jet_specs[i][0] << " : " << it.jet_specs[i][1] << " / "
                      << it.jet_specs[i][2];
                o << "\n";
                break;
            }
            case ChartItem::Kind::jets: o << "jets = " << list(it.names) << "\n"; break;
            case ChartItem::Kind::family:
                o << "family " << it.family << "[" << list(it.indices) << "] = " << role_name(it.role)
                  << (it.antisym ? " antisym" : "") << "\n";
                break;
            case ChartItem::Kind::range: o << "range " << list(it.names) << " = " << it.lo << ".." << it.hi << "\n"; break;
            case ChartItem::Kind::metric: {
                std::vector<std::string> d;
                for (const auto& r : it.diagonal) d.push_back(rat(r));
                o << "metric = diag(" << list(d) << ")\n";
                break;
            }
        }
    }
    if (!doc.params.empty()) {
        o << "\n[params]\n";
        for (const auto& [n, v] : doc.params) o << n << " = " << rat(v) << "\n";
    }
    o << "\n[forms]\n";
    if (doc.lagrangian) o << "lagrangian = " << doc.lagrangian->text << "\n";
    for (const auto& g : doc.generators) o << "generator " << g.name << " = " << g.text << "\n";
    if (doc.theta) o << "theta = " << doc.theta->text << "\n";
    o << "\n[lepage]\nmode = " << mode_key(doc.mode) << "\n";
    if (!doc.multiplier_names.empty()) o << "multipliers = " << list(doc.multiplier_names) << "\n";
    if (doc.horizontal != 2) o << "horizontal = " << doc.horizontal << "\n";
    for (const auto& md : doc.mults) {
        o << "mult " << md.name;
        if (!md.indices.empty()) o << "[" << list(md.indices) << "]" << (md.antisym ? " antisym" : "");
        o << " : " << md.generator << " = " << md.shape << "\n";
    }
    o << "\n[run]\nseed = " << doc.seed << "\nmax_prolong = " << doc.max_prolong << "\nmax_steps = " << doc.max_steps
      << "\n";
    if (!doc.expect.empty()) o << "expect = " << doc.expect << "\n";
    return o.str();
}

}  // namespace lepage
