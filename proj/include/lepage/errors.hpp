#pragma once

#include <stdexcept>
#include <string>

namespace lepage {

struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct UnknownName : Error {
    explicit UnknownName(const std::string& n) : Error("unknown name '" + n + "'"), name(n) {}
    std::string name;
};

struct DivisionByZero : Error {
    DivisionByZero() : Error("division by the zero polynomial") {}
};

struct NonLinearInUnknowns : Error {
    explicit NonLinearInUnknowns(const std::string& eq)
        : Error("equation is not affine-linear in the unknowns: " + eq), equation(eq) {}
    std::string equation;
};

struct AllSamplesDegenerate : Error {
    AllSamplesDegenerate() : Error("every sample point hit a vanishing denominator") {}
};

struct CoframeDegenerate : Error {
    using Error::Error;
};

struct NotLinearPfaffian : Error {
    using Error::Error;
};

struct EmptyLocus : Error {
    using Error::Error;
};

struct NeedsUserBranch : Error {
    explicit NeedsUserBranch(const std::string& c)
        : Error("constraint needs a user-chosen branch: " + c), constraint(c) {}
    std::string constraint;
};

struct MissingJetStructure : Error {
    using Error::Error;
};

struct DegreeMismatch : Error {
    using Error::Error;
};

struct ParseError : Error {
    ParseError(const std::string& msg, int l, int c)
        : Error(std::to_string(l) + ":" + std::to_string(c) + ": " + msg), line(l), column(c) {}
    int line;
    int column;
};

}  // namespace lepage
