#pragma once

#include "nesy/reasoner/eval.h"

namespace nesy::reasoner {

inline constexpr int kWildcard = -1;

struct CTerm {
    int var = kWildcard;  // variable slot, or kWildcard; ignored when constant
    bool constant = false;
    Value value;
};

struct CExpr {
    logic::Expr::Kind kind = logic::Expr::Kind::Constant;
    int var = 0;
    Value value;
    std::vector<CExpr> operands;
};

struct CLiteral {
    logic::Literal::Kind kind = logic::Literal::Kind::Positive;
    std::string relation;
    std::vector<CTerm> args;
    CExpr lhs;
    logic::CmpOp op = logic::CmpOp::Eq;
    CExpr rhs;
    std::vector<int> vars;  // distinct variables the literal mentions
};

struct CRule {
    std::string headRelation;
    std::vector<CTerm> head;
    std::vector<ValueType> headTypes;
    std::vector<CLiteral> body;
    std::vector<std::string> varNames;
    int stratum = 0;
    std::string text;
};

class CompiledProgram {
public:
    logic::ValidatedProgram program;
    /** Rules sorted by printed form, so that evaluation ignores source order. */
    std::vector<CRule> rules;
    std::vector<std::vector<std::size_t>> rulesByStratum;
    std::vector<std::pair<std::string, Tuple>> certainFacts;
    std::size_t maxArity = 0;
    std::size_t constantCount = 0;
};

/** Evaluates an arithmetic expression under a binding; throws TypeMismatch on symbols. */
Value evalExpr(const CExpr& e, const std::vector<Value>& binding);
bool compare(const Value& a, logic::CmpOp op, const Value& b);

}  // namespace nesy::reasoner
