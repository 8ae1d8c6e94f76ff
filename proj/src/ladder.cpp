#include "lepage/ladder.hpp"

#include "lepage/errors.hpp"

namespace lepage {

namespace {

bool base_only(const Scalar& s, const Chart& chart) {
    for (Var v : s.variables())
        if (chart.at(v).level > 0) return false;
    return true;
}

// Fiber constraints that differ by a base factor are listed once, in the
// lower degree form.
void split(const std::vector<Scalar>& cs, const Chart& chart, LadderStep& step) {
    for (const auto& c : canonical_constraints(cs)) {
        if (classify_constraint(c, chart).base) {
            step.base_constraints.push_back(c);
            continue;
        }
        bool keep = true;
        for (auto& k : step.fiber_constraints) {
            Scalar r = c / k;
            if (!base_only(r, chart)) continue;
            if (r.den().is_constant()) {
                keep = false;
            } else if (r.num().is_constant()) {
                k = c;
                keep = false;
            }
            if (!keep) break;
        }
        if (keep) step.fiber_constraints.push_back(c);
    }
}

class Driver {
public:
    Driver(const LadderOptions& o) : opts_(o) {}

    ConstraintLadder go(PfaffianSystem sys) {
        int prolongations = 0;
        sys = adapt_coframe(sys);
        for (;;) {
            if (static_cast<int>(out_.steps.size()) >= opts_.max_steps) {
                out_.verdict = Verdict::budget_exceeded;
                out_.diagnostic = "step budget of " + std::to_string(opts_.max_steps) + " exhausted";
                return std::move(out_);
            }
            if (!sys.zero_forms.empty()) {
                if (!restrict_to(sys, sys.zero_forms, StepKind::zero_forms, std::nullopt)) return std::move(out_);
                continue;
            }
            StructureEquations se;
            try {
                se = structure_equations(sys);
            } catch (const NotLinearPfaffian& e) {
                out_.verdict = Verdict::needs_user_branch;
                out_.diagnostic = e.what();
                return std::move(out_);
            }
            if (opts_.visit) opts_.visit(sys, se);
            TorsionAnalysis ta = analyze_torsion(se);
            if (!ta.essential.empty()) {
                CharacterVector ch = cartan_characters(se, opts_.seed, opts_.samples);
                if (!restrict_to(sys, ta.essential, StepKind::torsion, ch)) return std::move(out_);
                continue;
            }
            InvolutivityReport rep = cartan_test(sys, opts_.seed, opts_.samples);
            if (rep.involutive) {
                LadderStep st = step(StepKind::involutive, sys.chart);
                st.characters = rep.characters;
                out_.steps.push_back(std::move(st));
                out_.final_system = sys;
                out_.verdict = Verdict::involutive;
                return std::move(out_);
            }
            if (prolongations >= opts_.max_prolongations) {
                out_.verdict = Verdict::budget_exceeded;
                out_.diagnostic = "prolongation budget of " + std::to_string(opts_.max_prolongations) + " exhausted";
                out_.final_system = sys;
                return std::move(out_);
            }
            Prolongation p = prolong(sys);
            ++prolongations;
            LadderStep st = step(StepKind::prolongation, p.system.chart);
            st.characters = rep.characters;
            st.added_coordinates = p.added;
            st.assumptions = p.assumptions;
            out_.steps.push_back(std::move(st));
            out_.substitution = Substitution();
            sys = p.system;
        }
    }

    void hamilton(const HamiltonLocus& hl) {
        LadderStep st = step(StepKind::hamilton, hl.grassmann.chart);
        std::vector<Scalar> rel = hl.base_constraints;
        rel.insert(rel.end(), hl.fiber_constraints.begin(), hl.fiber_constraints.end());
        split(rel, hl.grassmann.chart, st);
        st.assumptions = hl.solution.assumptions;
        st.locus = hl.solved;
        out_.steps.push_back(std::move(st));
        out_.substitution = hl.solved;
        out_.locus = hl.solved;
    }

private:
    LadderStep step(StepKind k, const Chart& chart) {
        LadderStep st;
        st.level = static_cast<int>(out_.steps.size());
        st.kind = k;
        st.chart = chart;
        st.locus = out_.locus;
        return st;
    }

    bool restrict_to(PfaffianSystem& sys, const std::vector<Scalar>& cs, StepKind kind,
                     const std::optional<CharacterVector>& ch) {
        LadderStep st = step(kind, sys.chart);
        split(cs, sys.chart, st);
        st.characters = ch;
        try {
            Restriction r = restrict_system(sys, cs);
            // Base constraints implied by the whole set, not only the visible ones.
            std::vector<Scalar> base;
            for (const auto& [v, e] : r.solution.bindings)
                if (sys.chart.at(v).level == 0) base.push_back(Scalar::var(v) - e);
            st.base_constraints = canonical_constraints(base);
            st.assumptions = r.solution.assumptions;
            out_.steps.push_back(std::move(st));
            out_.substitution = out_.substitution.then(r.substitution);
            out_.locus = out_.locus.then(r.substitution);
            out_.steps.back().locus = out_.locus;
            sys = r.system;
            return true;
        } catch (const EmptyLocus& e) {
            out_.steps.push_back(std::move(st));
            LadderStep end = step(StepKind::empty_locus, sys.chart);
            out_.steps.push_back(std::move(end));
            out_.verdict = Verdict::empty;
            out_.diagnostic = e.what();
        } catch (const NeedsUserBranch& e) {
            out_.steps.push_back(std::move(st));
            out_.verdict = Verdict::needs_user_branch;
            out_.diagnostic = e.what();
        }
        return false;
    }

    LadderOptions opts_;
    ConstraintLadder out_;
};

}  // namespace

const char* kind_name(StepKind k) {
    switch (k) {
        case StepKind::hamilton: return "hamilton";
        case StepKind::zero_forms: return "zero_forms";
        case StepKind::torsion: return "torsion";
        case StepKind::prolongation: return "prolongation";
        case StepKind::involutive: return "involutive";
        case StepKind::empty_locus: return "empty_locus";
    }
    return "zero_forms";
}

const char* verdict_name(Verdict v) {
    switch (v) {
        case Verdict::involutive: return "involutive";
        case Verdict::empty: return "empty";
        case Verdict::budget_exceeded: return "budget_exceeded";
        case Verdict::needs_user_branch: return "needs_user_branch";
    }
    return "budget_exceeded";
}

ConstraintLadder run(const HamiltonLocus& hl, const LadderOptions& opts) {
    if (opts.max_prolongations < 1 || opts.max_steps < 1) throw Error("ladder budgets must be at least 1");
    Driver d(opts);
    d.hamilton(hl);
    return d.go(hl.pfaffian);
}

ConstraintLadder run(const PfaffianSystem& sys, const LadderOptions& opts) {
    if (opts.max_prolongations < 1 || opts.max_steps < 1) throw Error("ladder budgets must be at least 1");
    return Driver(opts).go(sys);
}

ConstraintClass classify_constraint(const Scalar& c, const Chart& chart) {
    ConstraintClass out;
    for (Var v : c.variables()) out.level = std::max(out.level, chart.at(v).level);
    out.base = out.level == 0;
    return out;
}

LadderSummary summarize(const ConstraintLadder& l) {
    LadderSummary s;
    s.verdict = verdict_name(l.verdict);
    s.diagnostic = l.diagnostic;
    for (const auto& st : l.steps) {
        StepSummary o;
        o.level = st.level;
        o.kind = kind_name(st.kind);
        auto nm = st.chart.namer();
        for (const auto& c : st.base_constraints) o.base_constraints.push_back(constraint_key(c).str(nm));
        for (const auto& c : st.fiber_constraints) o.fiber_constraints.push_back(constraint_key(c).str(nm));
        if (st.characters) o.characters = st.characters->s;
        o.assumptions = st.assumptions;
        o.added_coordinates = st.added_coordinates;
        s.steps.push_back(std::move(o));
    }
    if (l.final_system)
        for (const auto& g : l.final_system->generators) s.final_generators.push_back(g.str(l.final_system->chart));
    return s;
}

}  // namespace lepage
