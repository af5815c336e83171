#include "nesy/logic/printer.h"

namespace nesy::logic {

namespace {

std::string printTerm(const Term& t) {
    return t.isVariable() ? t.variable : t.constant.toString();
}

bool isLeaf(const Expr& e) {
    return e.kind == Expr::Kind::Variable || e.kind == Expr::Kind::Constant;
}

std::string printOperand(const Expr& e) {
    return isLeaf(e) ? printExpr(e) : "(" + printExpr(e) + ")";
}

}  // namespace

std::string printAtom(const Atom& atom) {
    std::string out = atom.relation + "(";
    for (std::size_t i = 0; i < atom.args.size(); ++i) {
        if (i > 0) {
            out += ", ";
        }
        out += printTerm(atom.args[i]);
    }
    return out + ")";
}

std::string printExpr(const Expr& e) {
    switch (e.kind) {
        case Expr::Kind::Variable: return e.variable;
        case Expr::Kind::Constant: return e.constant.toString();
        case Expr::Kind::Add: return printOperand(e.operands[0]) + " + " + printOperand(e.operands[1]);
        case Expr::Kind::Sub: return printOperand(e.operands[0]) + " - " + printOperand(e.operands[1]);
        case Expr::Kind::Mul: return printOperand(e.operands[0]) + " * " + printOperand(e.operands[1]);
        case Expr::Kind::Neg: {
            // "-3" would re-parse as a constant, so a negated constant is bracketed.
            const Expr& inner = e.operands[0];
            return inner.kind == Expr::Kind::Variable ? "-" + inner.variable : "-(" + printExpr(inner) + ")";
        }
    }
    return {};
}

std::string printLiteral(const Literal& lit) {
    switch (lit.kind) {
        case Literal::Kind::Positive: return printAtom(lit.atom);
        case Literal::Kind::Negative: return "not " + printAtom(lit.atom);
        case Literal::Kind::Guard:
            return printExpr(lit.guard.lhs) + " " + std::string(cmpOpSymbol(lit.guard.op)) + " " +
                   printExpr(lit.guard.rhs);
    }
    return {};
}

std::string printRule(const Rule& rule) {
    std::string out = printAtom(rule.head);
    for (std::size_t i = 0; i < rule.body.size(); ++i) {
        out += i == 0 ? " :- " : ", ";
        out += printLiteral(rule.body[i]);
    }
    return out + ".";
}

std::string printFactGroup(const FactGroup& group) {
    std::string out;
    for (std::size_t i = 0; i < group.members.size(); ++i) {
        if (i > 0) {
            out += "; ";
        }
        const auto& m = group.members[i];
        if (m.slot.kind == ProbSlot::Kind::Constant) {
            out += formatFloat(m.slot.probability);
        } else {
            out += "nn(" + m.slot.head + ", " + std::to_string(m.slot.index) + ")";
        }
        out += "::" + printAtom(m.atom);
    }
    return out + ".";
}

std::string printProgram(const Program& program) {
    std::string out;
    for (const auto& d : program.relations) {
        out += "rel " + d.name + "(";
        for (std::size_t i = 0; i < d.columnTypes.size(); ++i) {
            if (i > 0) {
                out += ", ";
            }
            out += valueTypeName(d.columnTypes[i]);
        }
        out += ").\n";
    }
    for (const auto& g : program.factGroups) {
        out += printFactGroup(g) + "\n";
    }
    for (const auto& r : program.rules) {
        out += printRule(r) + "\n";
    }
    for (const auto& q : program.queries) {
        out += "query " + printAtom(q.atom) + ".\n";
    }
    return out;
}

namespace {

std::string at(const SourcePos& pos) {
    return std::to_string(pos.line) + ":" + std::to_string(pos.column);
}

std::string dumpValue(const Value& v) {
    return "(" + std::string(valueTypeName(v.type())) + " " + v.toString() + ")";
}

std::string dumpTerm(const Term& t) {
    return t.isVariable() ? "(var " + t.variable + ")" : dumpValue(t.constant);
}

std::string dumpAtom(const Atom& atom) {
    std::string out = "(" + atom.relation;
    for (const auto& t : atom.args) {
        out += " " + dumpTerm(t);
    }
    return out + ")";
}

std::string dumpExpr(const Expr& e) {
    switch (e.kind) {
        case Expr::Kind::Variable: return "(var " + e.variable + ")";
        case Expr::Kind::Constant: return dumpValue(e.constant);
        case Expr::Kind::Add: return "(add " + dumpExpr(e.operands[0]) + " " + dumpExpr(e.operands[1]) + ")";
        case Expr::Kind::Sub: return "(sub " + dumpExpr(e.operands[0]) + " " + dumpExpr(e.operands[1]) + ")";
        case Expr::Kind::Mul: return "(mul " + dumpExpr(e.operands[0]) + " " + dumpExpr(e.operands[1]) + ")";
        case Expr::Kind::Neg: return "(neg " + dumpExpr(e.operands[0]) + ")";
    }
    return {};
}

std::string dumpLiteral(const Literal& lit) {
    switch (lit.kind) {
        case Literal::Kind::Positive: return "(pos " + at(lit.pos) + " " + dumpAtom(lit.atom) + ")";
        case Literal::Kind::Negative: return "(neg " + at(lit.pos) + " " + dumpAtom(lit.atom) + ")";
        case Literal::Kind::Guard:
            return "(guard " + at(lit.pos) + " " + dumpExpr(lit.guard.lhs) + " " +
                   std::string(cmpOpSymbol(lit.guard.op)) + " " + dumpExpr(lit.guard.rhs) + ")";
    }
    return {};
}

}  // namespace

std::string dumpProgram(const Program& program) {
    std::string out;
    for (const auto& d : program.relations) {
        out += "(rel " + d.name + " " + at(d.pos);
        for (auto t : d.columnTypes) {
            out += " " + std::string(valueTypeName(t));
        }
        out += ")\n";
    }
    for (const auto& g : program.factGroups) {
        out += std::string("(facts ") + (g.kind == FactGroupKind::CategoricalAD ? "ad " : "independent ") +
               g.relation + " " + at(g.pos);
        for (const auto& m : g.members) {
            out += m.slot.kind == ProbSlot::Kind::Constant
                           ? " (" + formatFloat(m.slot.probability)
                           : " ((nn " + m.slot.head + " " + std::to_string(m.slot.index) + ")";
            out += " " + dumpAtom(m.atom) + ")";
        }
        out += ")\n";
    }
    for (const auto& r : program.rules) {
        out += "(rule " + at(r.pos) + " " + dumpAtom(r.head);
        for (const auto& l : r.body) {
            out += " " + dumpLiteral(l);
        }
        out += ")\n";
    }
    for (const auto& q : program.queries) {
        out += "(query " + q.name + " " + at(q.pos) + " " + dumpAtom(q.atom) + ")\n";
    }
    return out;
}

}  // namespace nesy::logic
