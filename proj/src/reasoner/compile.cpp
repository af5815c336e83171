#include "compiled.h"

#include "nesy/error.h"
#include "nesy/logic/printer.h"

#include <algorithm>
#include <set>

namespace nesy::reasoner {

namespace {

using logic::CmpOp;
using logic::Expr;

class RuleCompiler {
public:
    explicit RuleCompiler(const logic::ValidatedProgram& vp) : vp_(vp) {}

    CRule compile(const logic::Rule& rule) {
        vars_.clear();
        names_.clear();
        CRule out;
        out.headRelation = rule.head.relation;
        out.head = terms(rule.head.args);
        out.headTypes = vp_.relation(rule.head.relation).columnTypes;
        for (const auto& lit : rule.body) {
            CLiteral c;
            c.kind = lit.kind;
            if (lit.kind == logic::Literal::Kind::Guard) {
                c.lhs = expr(lit.guard.lhs);
                c.op = lit.guard.op;
                c.rhs = expr(lit.guard.rhs);
                for (const auto* side : {&lit.guard.lhs, &lit.guard.rhs}) {
                    for (const auto& v : logic::exprVariables(*side)) {
                        addVar(c.vars, slot(v));
                    }
                }
            } else {
                c.relation = lit.atom.relation;
                c.args = terms(lit.atom.args);
                for (const auto& t : c.args) {
                    if (!t.constant && t.var != kWildcard) {
                        addVar(c.vars, t.var);
                    }
                }
            }
            out.body.push_back(std::move(c));
        }
        out.varNames = names_;
        out.stratum = vp_.strata.at(rule.head.relation);
        out.text = logic::printRule(rule);
        return out;
    }

private:
    static void addVar(std::vector<int>& vars, int v) {
        if (std::find(vars.begin(), vars.end(), v) == vars.end()) {
            vars.push_back(v);
        }
    }

    int slot(const std::string& name) {
        auto [it, fresh] = vars_.emplace(name, static_cast<int>(names_.size()));
        if (fresh) {
            names_.push_back(name);
        }
        return it->second;
    }

    std::vector<CTerm> terms(const std::vector<logic::Term>& args) {
        std::vector<CTerm> out;
        for (const auto& t : args) {
            CTerm c;
            if (!t.isVariable()) {
                c.constant = true;
                c.value = t.constant;
            } else if (!t.isWildcard()) {
                c.var = slot(t.variable);
            }
            out.push_back(std::move(c));
        }
        return out;
    }

    CExpr expr(const Expr& e) {
        CExpr c;
        c.kind = e.kind;
        if (e.kind == Expr::Kind::Variable) {
            c.var = slot(e.variable);
        } else if (e.kind == Expr::Kind::Constant) {
            c.value = e.constant;
        }
        for (const auto& op : e.operands) {
            c.operands.push_back(expr(op));
        }
        return c;
    }

    const logic::ValidatedProgram& vp_;
    std::map<std::string, int> vars_;
    std::vector<std::string> names_;
};

template <typename Op>
Value checkedInt(Op op, std::int64_t x, std::int64_t y) {
    std::int64_t r = 0;
    if (op(x, y, &r)) {
        throw Error(ErrorCode::DataError, "integer overflow in rule arithmetic");
    }
    return Value::integer(r);
}

constexpr auto kAdd = [](std::int64_t x, std::int64_t y, std::int64_t* r) { return __builtin_add_overflow(x, y, r); };
constexpr auto kSub = [](std::int64_t x, std::int64_t y, std::int64_t* r) { return __builtin_sub_overflow(x, y, r); };
constexpr auto kMul = [](std::int64_t x, std::int64_t y, std::int64_t* r) { return __builtin_mul_overflow(x, y, r); };

}  // namespace

Value evalExpr(const CExpr& e, const std::vector<Value>& binding) {
    switch (e.kind) {
    case Expr::Kind::Constant:
        return e.value;
    case Expr::Kind::Variable:
        return binding[static_cast<std::size_t>(e.var)];
    case Expr::Kind::Neg: {
        Value v = evalExpr(e.operands[0], binding);
        if (v.type() == ValueType::Int) {
            return checkedInt(kSub, 0, v.asInt());
        }
        if (v.type() == ValueType::Float) {
            return Value::real(-v.asFloat());
        }
        throw Error(ErrorCode::TypeMismatch, "arithmetic on symbol " + v.toString());
    }
    default:
        break;
    }
    Value a = evalExpr(e.operands[0], binding);
    Value b = evalExpr(e.operands[1], binding);
    if (!a.isNumeric() || !b.isNumeric()) {
        throw Error(ErrorCode::TypeMismatch, "arithmetic on symbol " + (a.isNumeric() ? b : a).toString());
    }
    if (a.type() == ValueType::Int && b.type() == ValueType::Int) {
        switch (e.kind) {
        case Expr::Kind::Add:
            return checkedInt(kAdd, a.asInt(), b.asInt());
        case Expr::Kind::Sub:
            return checkedInt(kSub, a.asInt(), b.asInt());
        default:
            return checkedInt(kMul, a.asInt(), b.asInt());
        }
    }
    double x = a.numeric();
    double y = b.numeric();
    switch (e.kind) {
    case Expr::Kind::Add:
        return Value::real(x + y);
    case Expr::Kind::Sub:
        return Value::real(x - y);
    default:
        return Value::real(x * y);
    }
}

bool compare(const Value& a, CmpOp op, const Value& b) {
    if (a.isNumeric() != b.isNumeric()) {
        return op == CmpOp::Ne;
    }
    int c = 0;
    if (a.type() == ValueType::Int && b.type() == ValueType::Int) {
        c = a.asInt() < b.asInt() ? -1 : (a.asInt() > b.asInt() ? 1 : 0);
    } else if (a.isNumeric()) {
        double x = a.numeric();
        double y = b.numeric();
        c = x < y ? -1 : (x > y ? 1 : 0);
    } else {
        c = a.asSymbol().compare(b.asSymbol());
    }
    switch (op) {
    case CmpOp::Eq:
        return c == 0;
    case CmpOp::Ne:
        return c != 0;
    case CmpOp::Lt:
        return c < 0;
    case CmpOp::Le:
        return c <= 0;
    case CmpOp::Gt:
        return c > 0;
    case CmpOp::Ge:
        return c >= 0;
    }
    return false;
}

std::shared_ptr<const CompiledProgram> compile(logic::ValidatedProgram program) {
    auto out = std::make_shared<CompiledProgram>();
    out->program = std::move(program);
    const auto& vp = out->program;
    RuleCompiler rc(vp);
    std::set<Value> constants;
    for (const auto& r : vp.program.rules) {
        if (r.body.empty()) {
            Tuple t;
            for (const auto& a : r.head.args) {
                t.push_back(a.constant);
                constants.insert(a.constant);
            }
            out->certainFacts.emplace_back(r.head.relation, std::move(t));
            continue;
        }
        out->rules.push_back(rc.compile(r));
        for (const auto& lit : r.body) {
            for (const auto& a : lit.atom.args) {
                if (!a.isVariable()) {
                    constants.insert(a.constant);
                }
            }
        }
        for (const auto& a : r.head.args) {
            if (!a.isVariable()) {
                constants.insert(a.constant);
            }
        }
    }
    for (const auto& g : vp.program.factGroups) {
        for (const auto& m : g.members) {
            for (const auto& a : m.atom.args) {
                constants.insert(a.constant);
            }
        }
    }
    std::stable_sort(out->rules.begin(), out->rules.end(),
            [](const CRule& a, const CRule& b) { return a.text < b.text; });
    out->rulesByStratum.assign(static_cast<std::size_t>(std::max(vp.stratumCount, 1)), {});
    for (std::size_t i = 0; i < out->rules.size(); ++i) {
        out->rulesByStratum[static_cast<std::size_t>(out->rules[i].stratum)].push_back(i);
    }
    for (const auto& d : vp.program.relations) {
        out->maxArity = std::max(out->maxArity, d.arity());
    }
    out->constantCount = constants.size();
    return out;
}

const logic::ValidatedProgram& programOf(const CompiledProgram& compiled) {
    return compiled.program;
}

}  // namespace nesy::reasoner
