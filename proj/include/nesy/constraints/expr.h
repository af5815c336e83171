#pragma once

#include <cstdint>
#include <map>
#include <memory>
#include <string>
#include <vector>

namespace nesy::constraints {

/** Probability vector per concept variable: [p(false), p(true)] for binary, one entry per class otherwise. */
using Assignments = std::map<std::string, std::vector<double>>;
/** Chosen value per concept variable. */
using HardAssignment = std::map<std::string, std::size_t>;

struct Binding {
    std::string head;
    std::size_t row = 0;
};

/** A concept variable linked to one output row of a neural head. */
struct ConceptVar {
    std::string name;
    std::size_t domain = 2;  // 2 for binary
    Binding binding;

    static ConceptVar binary(std::string name, Binding b = {}) {
        return {std::move(name), 2, std::move(b)};
    }
    static ConceptVar categorical(std::string name, std::size_t n, Binding b = {});
};

/** Immutable constraint expression; cheap to copy. */
class Expr {
public:
    enum class Kind { Leaf, And, Or, Not, If, Exists, Exact };

    Kind kind() const;
    /** Leaf only. */
    const std::string& var() const;
    std::size_t value() const;
    const std::vector<Expr>& children() const;

    std::string toString() const;

    static Expr make(Kind kind, std::vector<Expr> children, std::string var = {}, std::size_t value = 0);

private:
    struct Node;
    std::shared_ptr<const Node> node_;
};

/** var = value. */
Expr leaf(std::string var, std::size_t value);
/** Binary var = true. */
inline Expr is(std::string var) {
    return leaf(std::move(var), 1);
}
Expr andL(std::vector<Expr> children);
Expr orL(std::vector<Expr> children);
Expr notL(Expr child);
Expr ifL(Expr antecedent, Expr consequent);
/** Disjunction over an explicit finite candidate set. */
Expr existsL(std::vector<Expr> candidates);
template <class T, class F>
Expr existsL(const std::vector<T>& candidates, F&& body) {
    std::vector<Expr> out;
    for (const auto& c : candidates) {
        out.push_back(body(c));
    }
    return existsL(std::move(out));
}
/** Exactly one child holds. */
Expr exactL(std::vector<Expr> children);
/** exactL over every value of one variable. */
Expr exactL(const ConceptVar& var);

/** Variables mentioned by leaves, sorted. */
std::vector<std::string> variablesOf(const Expr& e);

/**
 * Throws UnboundVariable for a leaf naming an undeclared variable and
 * TypeMismatch for a leaf value outside its domain.
 */
void checkWellTyped(const Expr& e, const std::vector<ConceptVar>& vars);

/** True when an exactL covers each value of one variable exactly once (always satisfied). */
bool isStructuralExact(const Expr& e, const Assignments& a);

}  // namespace nesy::constraints
