#include "lepage/report.hpp"

#include <sstream>

#include "json.hpp"
#include "lepage/errors.hpp"

namespace lepage {

using ojson = nlohmann::ordered_json;

bool ReportDocument::operator==(const ReportDocument& o) const {
    auto same_step = [](const StepSummary& a, const StepSummary& b) {
        return a.level == b.level && a.kind == b.kind && a.base_constraints == b.base_constraints &&
               a.fiber_constraints == b.fiber_constraints && a.characters == b.characters &&
               a.assumptions == b.assumptions && a.added_coordinates == b.added_coordinates;
    };
    if (problem != o.problem || seed != o.seed || ladder.verdict != o.ladder.verdict ||
        ladder.final_generators != o.ladder.final_generators || ladder.steps.size() != o.ladder.steps.size())
        return false;
    for (std::size_t i = 0; i < ladder.steps.size(); ++i)
        if (!same_step(ladder.steps[i], o.ladder.steps[i])) return false;
    return true;
}

Analysis analyze(const ProblemDocument& doc, const AnalyzeOptions& opts) {
    Analysis a;
    a.doc = doc;
    a.seed = opts.seed.value_or(doc.seed);
    LadderOptions lo;
    lo.seed = a.seed;
    lo.max_prolongations = opts.max_prolong.value_or(doc.max_prolong);
    lo.max_steps = opts.max_steps.value_or(doc.max_steps);
    lo.visit = opts.visit;
    a.lepage = build_lepage(doc);
    a.diagnostics = a.lepage->diagnostics;
    if (a.lepage->vacuous) {
        a.verdict = Verdict::needs_user_branch;
        a.ladder.verdict = a.verdict;
        a.diagnostics.push_back("no Hamilton system to analyze; declare admissible multipliers or another Lepage form");
        return a;
    }
    GrassmannExtension ext = grassmann_extend(*a.lepage);
    HamiltonEquations eqs = hamilton_equations(*a.lepage, ext);
    try {
        a.locus = solve_hamilton_locus(ext, eqs);
    } catch (const EmptyLocus& e) {
        LadderStep st;
        st.kind = StepKind::empty_locus;
        st.chart = ext.chart;
        a.ladder.steps.push_back(st);
        a.ladder.verdict = a.verdict = Verdict::empty;
        a.diagnostics.push_back(e.what());
        return a;
    } catch (const NeedsUserBranch& e) {
        a.ladder.verdict = a.verdict = Verdict::needs_user_branch;
        a.diagnostics.push_back(e.what());
        return a;
    } catch (const NonLinearInUnknowns& e) {
        a.ladder.verdict = a.verdict = Verdict::needs_user_branch;
        a.diagnostics.push_back(e.what());
        return a;
    }
    a.ladder = run(*a.locus, lo);
    a.verdict = a.ladder.verdict;
    if (!a.ladder.diagnostic.empty()) a.diagnostics.push_back(a.ladder.diagnostic);
    return a;
}

ReportDocument make_report(const Analysis& a) {
    ReportDocument r;
    r.problem = a.doc.name;
    r.seed = a.seed;
    r.ladder = summarize(a.ladder);
    r.ladder.verdict = verdict_name(a.verdict);
    r.diagnostics = a.diagnostics;
    return r;
}

namespace {

std::string text_list(const std::vector<int>& v) {
    std::string s = "[";
    for (std::size_t i = 0; i < v.size(); ++i) s += (i ? ", " : "") + std::to_string(v[i]);
    return s + "]";
}

std::string emit_text(const ReportDocument& r) {
    std::ostringstream o;
    o << "problem: " << r.problem << "\nseed: " << r.seed << "\nverdict: " << r.ladder.verdict << "\n";
    for (const auto& d : r.diagnostics) o << "diagnostic: " << d << "\n";
    for (const auto& s : r.ladder.steps) {
        o << "\n== step " << s.level << ": " << s.kind << " ==\n";
        for (const auto& c : s.base_constraints) o << "base: " << c << " = 0\n";
        for (const auto& c : s.fiber_constraints) o << "fiber: " << c << " = 0\n";
        if (!s.characters.empty()) o << "characters: " << text_list(s.characters) << "\n";
        for (const auto& c : s.assumptions) o << "assume: " << c << "\n";
        for (const auto& c : s.added_coordinates) o << "added: " << c << "\n";
    }
    if (!r.ladder.final_generators.empty()) {
        o << "\nfinal generators:\n";
        for (const auto& g : r.ladder.final_generators) o << "  " << g << "\n";
    }
    return o.str();
}

std::string emit_json(const ReportDocument& r) {
    ojson j;
    j["problem"] = r.problem;
    j["seed"] = r.seed;
    j["verdict"] = r.ladder.verdict;
    j["steps"] = ojson::array();
    for (const auto& s : r.ladder.steps) {
        ojson st;
        st["level"] = s.level;
        st["kind"] = s.kind;
        st["base_constraints"] = s.base_constraints;
        st["fiber_constraints"] = s.fiber_constraints;
        st["characters"] = s.characters;
        st["assumptions"] = s.assumptions;
        st["added_coordinates"] = s.added_coordinates;
        j["steps"].push_back(std::move(st));
    }
    j["final_generators"] = r.ladder.final_generators;
    return j.dump(2) + "\n";
}

}  // namespace

std::string emit(const ReportDocument& r, Format f) { return f == Format::text ? emit_text(r) : emit_json(r); }

ReportDocument parse_report(const std::string& text) {
    ojson j = ojson::parse(text);
    ReportDocument r;
    r.problem = j.at("problem").get<std::string>();
    r.seed = j.at("seed").get<std::uint64_t>();
    r.ladder.verdict = j.at("verdict").get<std::string>();
    for (const auto& st : j.at("steps")) {
        StepSummary s;
        s.level = st.at("level").get<int>();
        s.kind = st.at("kind").get<std::string>();
        s.base_constraints = st.at("base_constraints").get<std::vector<std::string>>();
        s.fiber_constraints = st.at("fiber_constraints").get<std::vector<std::string>>();
        s.characters = st.at("characters").get<std::vector<int>>();
        s.assumptions = st.at("assumptions").get<std::vector<std::string>>();
        s.added_coordinates = st.at("added_coordinates").get<std::vector<std::string>>();
        r.ladder.steps.push_back(std::move(s));
    }
    r.ladder.final_generators = j.at("final_generators").get<std::vector<std::string>>();
    return r;
}

int exit_code(Verdict v) {
    switch (v) {
        case Verdict::involutive: return 0;
        case Verdict::empty: return 1;
        case Verdict::needs_user_branch: return 2;
        case Verdict::budget_exceeded: return 3;
    }
    return 3;
}

}  // namespace lepage
