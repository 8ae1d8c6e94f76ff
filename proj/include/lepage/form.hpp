#pragma once

#include <map>
#include <set>
#include <string>
#include <vector>

#include "lepage/chart.hpp"
#include "lepage/scalar.hpp"

namespace lepage {

using IndexTuple = std::vector<Var>;

// Sparse differential form: strictly increasing index tuples to nonzero coefficients.
class Form {
public:
    Form() = default;
    explicit Form(int degree) : deg_(degree) {}
    static Form scalar(const Scalar& s);
    static Form dvar(Var v);

    int degree() const { return deg_; }
    const std::map<IndexTuple, Scalar>& terms() const { return t_; }
    bool is_zero() const { return t_.empty(); }
    Scalar coefficient(const IndexTuple& idx) const;
    Scalar as_scalar() const;
    // Adds c to the coefficient of idx, which must already be sorted.
    void add(const IndexTuple& idx, const Scalar& c);
    std::set<Var> variables() const;

    Form operator-() const;
    Form operator+(const Form& o) const;
    Form operator-(const Form& o) const;
    Form& operator+=(const Form& o);
    Form scaled(const Scalar& s) const;
    bool operator==(const Form& o) const { return deg_ == o.deg_ && t_ == o.t_; }
    bool operator!=(const Form& o) const { return !(*this == o); }

    std::string str(const Chart& chart) const;

private:
    int deg_ = 0;
    std::map<IndexTuple, Scalar> t_;
};

Form operator*(const Scalar& s, const Form& a);

Form wedge(const Form& a, const Form& b);
Form d(const Form& a);
Form d(const Scalar& f);

using VectorField = std::map<Var, Scalar>;

// Decomposable multivector Z_1 ∧ ... ∧ Z_k.
struct MultiVector {
    std::vector<VectorField> factors;
};

Form contract_vector(const VectorField& x, const Form& a);
// Contracts Z_1 first, then Z_2, and so on: (dx∧dy)⌟(dx∧dy∧dz) = dz.
Form contract_multivector(const MultiVector& z, const Form& a);

class Substitution {
public:
    Substitution() = default;
    explicit Substitution(Bindings b);

    const Bindings& bindings() const { return b_; }
    bool empty() const { return b_.empty(); }
    bool binds(Var v) const { return b_.count(v) > 0; }
    const Form& differential(Var v) const { return db_.at(v); }
    // Chart with the bound coordinates marked inactive.
    Chart retained(const Chart& chart) const;
    // First this, then `later`.
    Substitution then(const Substitution& later) const;

private:
    Bindings b_;
    std::map<Var, Form> db_;
};

Scalar substitute(const Scalar& s, const Substitution& sub);
Form pullback(const Form& a, const Substitution& s);

// Expansion of `a` in wedges of `coframe`; keys index into coframe.
// Throws CoframeDegenerate unless coframe is a pointwise basis of the active coordinates.
std::map<std::vector<int>, Scalar> coefficients(const Form& a, const std::vector<Form>& coframe, const Chart& chart,
                                                std::uint64_t seed = 1);

}  // namespace lepage
