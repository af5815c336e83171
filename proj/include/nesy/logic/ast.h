#pragma once

#include "nesy/value.h"

#include <cstddef>
#include <string>
#include <vector>

namespace nesy::logic {

struct SourcePos {
    int line = 0;
    int column = 0;
};

/*
 * AST node equality compares structure only; source positions are ignored so
 * that a pretty-printed and re-parsed program compares equal to the original.
 */

struct Term {
    enum class Kind { Variable, Constant };
    Kind kind = Kind::Constant;
    std::string variable;  // "_" is the anonymous wildcard
    Value constant;
    SourcePos pos;

    static Term var(std::string name, SourcePos pos = {}) {
        Term t;
        t.kind = Kind::Variable;
        t.variable = std::move(name);
        t.pos = pos;
        return t;
    }
    static Term constantOf(Value v, SourcePos pos = {}) {
        Term t;
        t.kind = Kind::Constant;
        t.constant = std::move(v);
        t.pos = pos;
        return t;
    }
    bool isVariable() const {
        return kind == Kind::Variable;
    }
    bool isWildcard() const {
        return kind == Kind::Variable && variable == "_";
    }
    friend bool operator==(const Term& a, const Term& b);
};

struct Atom {
    std::string relation;
    std::vector<Term> args;
    SourcePos pos;

    bool isGround() const;
    friend bool operator==(const Atom& a, const Atom& b) {
        return a.relation == b.relation && a.args == b.args;
    }
};

struct Expr {
    enum class Kind { Variable, Constant, Add, Sub, Mul, Neg };
    Kind kind = Kind::Constant;
    std::string variable;
    Value constant;
    std::vector<Expr> operands;
    SourcePos pos;

    friend bool operator==(const Expr& a, const Expr& b);
};

enum class CmpOp { Eq, Ne, Lt, Le, Gt, Ge };

std::string_view cmpOpSymbol(CmpOp op);

struct Guard {
    Expr lhs;
    CmpOp op = CmpOp::Eq;
    Expr rhs;

    friend bool operator==(const Guard& a, const Guard& b) {
        return a.op == b.op && a.lhs == b.lhs && a.rhs == b.rhs;
    }
};

struct Literal {
    enum class Kind { Positive, Negative, Guard };
    Kind kind = Kind::Positive;
    Atom atom;    // Positive / Negative
    Guard guard;  // Guard
    SourcePos pos;

    friend bool operator==(const Literal& a, const Literal& b);
};

struct Rule {
    Atom head;
    std::vector<Literal> body;  // empty for a plain fact `p(1).`
    SourcePos pos;

    friend bool operator==(const Rule& a, const Rule& b) {
        return a.head == b.head && a.body == b.body;
    }
};

struct ProbSlot {
    enum class Kind { Constant, Neural };
    Kind kind = Kind::Constant;
    double probability = 1.0;  // Constant
    std::string head;          // Neural: head id
    std::size_t index = 0;     // Neural: output index
    SourcePos pos;

    static ProbSlot constantOf(double p) {
        ProbSlot s;
        s.probability = p;
        return s;
    }
    static ProbSlot neural(std::string head, std::size_t index) {
        ProbSlot s;
        s.kind = Kind::Neural;
        s.head = std::move(head);
        s.index = index;
        return s;
    }
    friend bool operator==(const ProbSlot& a, const ProbSlot& b);
};

struct FactMember {
    Atom atom;
    ProbSlot slot;

    friend bool operator==(const FactMember& a, const FactMember& b) {
        return a.atom == b.atom && a.slot == b.slot;
    }
};

enum class FactGroupKind { Independent, CategoricalAD };

/** One fact line: a single probabilistic fact, or a `;`-chained annotated disjunction. */
struct FactGroup {
    FactGroupKind kind = FactGroupKind::Independent;
    std::string relation;
    std::vector<FactMember> members;
    SourcePos pos;

    friend bool operator==(const FactGroup& a, const FactGroup& b) {
        return a.kind == b.kind && a.relation == b.relation && a.members == b.members;
    }
};

struct RelationDecl {
    std::string name;
    std::vector<ValueType> columnTypes;
    SourcePos pos;

    std::size_t arity() const {
        return columnTypes.size();
    }
    friend bool operator==(const RelationDecl& a, const RelationDecl& b) {
        return a.name == b.name && a.columnTypes == b.columnTypes;
    }
};

struct QueryDecl {
    /** Queries are addressed by their relation name. */
    std::string name;
    Atom atom;
    SourcePos pos;

    friend bool operator==(const QueryDecl& a, const QueryDecl& b) {
        return a.name == b.name && a.atom == b.atom;
    }
};

struct Program {
    std::vector<RelationDecl> relations;
    std::vector<Rule> rules;
    std::vector<FactGroup> factGroups;
    std::vector<QueryDecl> queries;

    friend bool operator==(const Program& a, const Program& b) {
        return a.relations == b.relations && a.rules == b.rules && a.factGroups == b.factGroups &&
               a.queries == b.queries;
    }
};

/** Variables occurring in an expression, in first-occurrence order. */
std::vector<std::string> exprVariables(const Expr& e);

}  // namespace nesy::logic
