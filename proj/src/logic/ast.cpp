#include "nesy/logic/ast.h"

#include <algorithm>

namespace nesy::logic {

bool operator==(const Term& a, const Term& b) {
    if (a.kind != b.kind) {
        return false;
    }
    return a.kind == Term::Kind::Variable ? a.variable == b.variable : a.constant == b.constant;
}

bool Atom::isGround() const {
    return std::none_of(args.begin(), args.end(), [](const Term& t) { return t.isVariable(); });
}

bool operator==(const Expr& a, const Expr& b) {
    if (a.kind != b.kind) {
        return false;
    }
    switch (a.kind) {
        case Expr::Kind::Variable: return a.variable == b.variable;
        case Expr::Kind::Constant: return a.constant == b.constant;
        default: return a.operands == b.operands;
    }
}

std::string_view cmpOpSymbol(CmpOp op) {
    switch (op) {
        case CmpOp::Eq: return "==";
        case CmpOp::Ne: return "!=";
        case CmpOp::Lt: return "<";
        case CmpOp::Le: return "<=";
        case CmpOp::Gt: return ">";
        case CmpOp::Ge: return ">=";
    }
    return "?";
}

bool operator==(const Literal& a, const Literal& b) {
    if (a.kind != b.kind) {
        return false;
    }
    return a.kind == Literal::Kind::Guard ? a.guard == b.guard : a.atom == b.atom;
}

bool operator==(const ProbSlot& a, const ProbSlot& b) {
    if (a.kind != b.kind) {
        return false;
    }
    if (a.kind == ProbSlot::Kind::Constant) {
        return a.probability == b.probability;
    }
    return a.head == b.head && a.index == b.index;
}

namespace {

void collect(const Expr& e, std::vector<std::string>& out) {
    if (e.kind == Expr::Kind::Variable) {
        if (std::find(out.begin(), out.end(), e.variable) == out.end()) {
            out.push_back(e.variable);
        }
        return;
    }
    for (const auto& op : e.operands) {
        collect(op, out);
    }
}

}  // namespace

std::vector<std::string> exprVariables(const Expr& e) {
    std::vector<std::string> out;
    collect(e, out);
    return out;
}

}  // namespace nesy::logic
