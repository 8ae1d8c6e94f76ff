#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "lepage/ladder.hpp"
#include "lepage/problem.hpp"

namespace lepage {

struct AnalyzeOptions {
    std::optional<std::uint64_t> seed;
    std::optional<int> max_prolong;
    std::optional<int> max_steps;
    // Forwarded to the ladder.
    std::function<void(const PfaffianSystem&, const StructureEquations&)> visit;
};

struct Analysis {
    ProblemDocument doc;
    std::uint64_t seed = 1;
    std::optional<LepageSpace> lepage;
    std::optional<HamiltonLocus> locus;
    ConstraintLadder ladder;
    Verdict verdict = Verdict::budget_exceeded;
    std::vector<std::string> diagnostics;
};

// Builds the Lepage space, the Hamilton locus and runs the ladder. Failures
// of the algorithm become verdicts; malformed problems throw.
Analysis analyze(const ProblemDocument& doc, const AnalyzeOptions& opts = {});

struct ReportDocument {
    std::string problem;
    std::uint64_t seed = 1;
    LadderSummary ladder;
    std::vector<std::string> diagnostics;

    bool operator==(const ReportDocument& o) const;
};

ReportDocument make_report(const Analysis& a);

enum class Format { text, structured };

std::string emit(const ReportDocument& r, Format f);
// Inverse of the structured format; diagnostics are not part of it.
ReportDocument parse_report(const std::string& json);

int exit_code(Verdict v);

}  // namespace lepage
