#include "nesy/oracle/oracle.h"

#include "nesy/error.h"

#include <algorithm>
#include <optional>

namespace nesy::oracle {

namespace {

using logic::CmpOp;
using logic::Expr;
using logic::Literal;
using Env = std::map<std::string, Value>;

std::optional<Value> evalExpr(const Expr& e, const Env& env) {
    switch (e.kind) {
    case Expr::Kind::Constant:
        return e.constant;
    case Expr::Kind::Variable: {
        auto it = env.find(e.variable);
        if (it == env.end()) {
            return std::nullopt;
        }
        return it->second;
    }
    case Expr::Kind::Neg: {
        auto v = evalExpr(e.operands[0], env);
        if (!v) {
            return std::nullopt;
        }
        if (v->type() == ValueType::Int) {
            return Value::integer(-v->asInt());
        }
        if (v->type() == ValueType::Float) {
            return Value::real(-v->asFloat());
        }
        throw Error(ErrorCode::TypeMismatch, "negation of symbol " + v->toString());
    }
    default: {
        auto a = evalExpr(e.operands[0], env);
        auto b = evalExpr(e.operands[1], env);
        if (!a || !b) {
            return std::nullopt;
        }
        if (!a->isNumeric() || !b->isNumeric()) {
            throw Error(ErrorCode::TypeMismatch, "arithmetic on a symbol");
        }
        if (a->type() == ValueType::Int && b->type() == ValueType::Int) {
            std::int64_t x = a->asInt();
            std::int64_t y = b->asInt();
            return Value::integer(e.kind == Expr::Kind::Add ? x + y : e.kind == Expr::Kind::Sub ? x - y : x * y);
        }
        double x = a->numeric();
        double y = b->numeric();
        return Value::real(e.kind == Expr::Kind::Add ? x + y : e.kind == Expr::Kind::Sub ? x - y : x * y);
    }
    }
}

bool holds(const Value& a, CmpOp op, const Value& b) {
    if (a.isNumeric() != b.isNumeric()) {
        return op == CmpOp::Ne;
    }
    bool lt = false;
    bool eq = false;
    if (a.type() == ValueType::Int && b.type() == ValueType::Int) {
        lt = a.asInt() < b.asInt();
        eq = a.asInt() == b.asInt();
    } else if (a.isNumeric()) {
        lt = a.numeric() < b.numeric();
        eq = a.numeric() == b.numeric();
    } else {
        lt = a.asSymbol() < b.asSymbol();
        eq = a.asSymbol() == b.asSymbol();
    }
    switch (op) {
    case CmpOp::Eq:
        return eq;
    case CmpOp::Ne:
        return !eq;
    case CmpOp::Lt:
        return lt;
    case CmpOp::Le:
        return lt || eq;
    case CmpOp::Gt:
        return !lt && !eq;
    case CmpOp::Ge:
        return !lt;
    }
    return false;
}

Value toColumn(const Value& v, ValueType type) {
    if (type == ValueType::Float && v.type() == ValueType::Int) {
        return Value::real(static_cast<double>(v.asInt()));
    }
    if (type == ValueType::Int && v.type() == ValueType::Float && v.asFloat() == static_cast<double>(static_cast<std::int64_t>(v.asFloat()))) {
        return Value::integer(static_cast<std::int64_t>(v.asFloat()));
    }
    return v;
}

/** Unifies atom arguments with a tuple, extending env; false on mismatch. */
bool unify(const logic::Atom& atom, const Tuple& t, Env& env) {
    for (std::size_t i = 0; i < atom.args.size(); ++i) {
        const auto& a = atom.args[i];
        if (!a.isVariable()) {
            if (!(a.constant == t[i])) {
                return false;
            }
        } else if (!a.isWildcard()) {
            auto [it, fresh] = env.emplace(a.variable, t[i]);
            if (!fresh && !(it->second == t[i])) {
                return false;
            }
        }
    }
    return true;
}

class NaiveEvaluator {
public:
    NaiveEvaluator(const logic::ValidatedProgram& vp, BooleanModel model) : vp_(vp), model_(std::move(model)) {
        for (const auto& d : vp.program.relations) {
            model_[d.name];
        }
        for (const auto& r : vp.program.rules) {
            if (r.body.empty()) {
                Tuple t;
                for (const auto& a : r.head.args) {
                    t.push_back(a.constant);
                }
                model_[r.head.relation].insert(std::move(t));
            }
        }
    }

    BooleanModel run() {
        for (int s = 0; s < vp_.stratumCount; ++s) {
            bool changed = true;
            while (changed) {
                changed = false;
                for (const auto& r : vp_.program.rules) {
                    if (r.body.empty() || vp_.strata.at(r.head.relation) != s) {
                        continue;
                    }
                    std::vector<Tuple> derived;
                    std::vector<std::size_t> remaining(r.body.size());
                    for (std::size_t i = 0; i < remaining.size(); ++i) {
                        remaining[i] = i;
                    }
                    Env env;
                    solve(r, remaining, env, derived);
                    for (auto& t : derived) {
                        changed |= model_[r.head.relation].insert(std::move(t)).second;
                    }
                }
            }
        }
        return std::move(model_);
    }

private:
    bool ready(const Literal& lit, const Env& env) const {
        auto bound = [&](const std::string& v) { return env.count(v) > 0; };
        switch (lit.kind) {
        case Literal::Kind::Positive:
            return true;
        case Literal::Kind::Negative:
            return std::all_of(lit.atom.args.begin(), lit.atom.args.end(),
                    [&](const logic::Term& t) { return !t.isVariable() || t.isWildcard() || bound(t.variable); });
        case Literal::Kind::Guard: {
            auto lv = logic::exprVariables(lit.guard.lhs);
            auto rv = logic::exprVariables(lit.guard.rhs);
            bool lb = std::all_of(lv.begin(), lv.end(), bound);
            bool rb = std::all_of(rv.begin(), rv.end(), bound);
            if (lb && rb) {
                return true;
            }
            if (lit.guard.op != CmpOp::Eq) {
                return false;
            }
            return (lit.guard.lhs.kind == Expr::Kind::Variable && rb) ||
                   (lit.guard.rhs.kind == Expr::Kind::Variable && lb);
        }
        }
        return false;
    }

    void solve(const logic::Rule& r, std::vector<std::size_t> remaining, Env& env, std::vector<Tuple>& out) {
        if (remaining.empty()) {
            Tuple t;
            const auto& types = vp_.relation(r.head.relation).columnTypes;
            for (std::size_t i = 0; i < r.head.args.size(); ++i) {
                const auto& a = r.head.args[i];
                t.push_back(toColumn(a.isVariable() ? env.at(a.variable) : a.constant, types[i]));
            }
            out.push_back(std::move(t));
            return;
        }
        auto pick = std::find_if(remaining.begin(), remaining.end(),
                [&](std::size_t i) { return ready(r.body[i], env); });
        if (pick == remaining.end()) {
            throw Error(ErrorCode::UnboundGuardVariable, "no literal can be evaluated");
        }
        const Literal& lit = r.body[*pick];
        remaining.erase(pick);
        switch (lit.kind) {
        case Literal::Kind::Positive:
            for (const auto& t : model_[lit.atom.relation]) {
                Env next = env;
                if (unify(lit.atom, t, next)) {
                    solve(r, remaining, next, out);
                }
            }
            break;
        case Literal::Kind::Negative: {
            bool found = false;
            for (const auto& t : model_[lit.atom.relation]) {
                Env probe = env;
                if (unify(lit.atom, t, probe)) {
                    found = true;
                    break;
                }
            }
            if (!found) {
                solve(r, remaining, env, out);
            }
            break;
        }
        case Literal::Kind::Guard: {
            auto l = evalExpr(lit.guard.lhs, env);
            auto rv = evalExpr(lit.guard.rhs, env);
            if (l && rv) {
                if (holds(*l, lit.guard.op, *rv)) {
                    solve(r, remaining, env, out);
                }
            } else {
                Env next = env;
                if (!l) {
                    next[lit.guard.lhs.variable] = *rv;
                } else {
                    next[lit.guard.rhs.variable] = *l;
                }
                solve(r, remaining, next, out);
            }
            break;
        }
        }
    }

    const logic::ValidatedProgram& vp_;
    BooleanModel model_;
};

struct Var {
    std::uint32_t group = 0;
    std::uint32_t member = 0;  // independent facts only
    bool categorical = false;
    std::vector<double> probs;
};

std::vector<Var> variables(const logic::Program& program, const FactWeights* weights) {
    std::vector<Var> vars;
    for (std::uint32_t g = 0; g < program.factGroups.size(); ++g) {
        const auto& group = program.factGroups[g];
        if (group.kind == logic::FactGroupKind::CategoricalAD) {
            Var v{g, 0, true, {}};
            if (weights) {
                v.probs = weights->groups.at(g).probs;
            }
            vars.push_back(std::move(v));
            continue;
        }
        for (std::uint32_t m = 0; m < group.members.size(); ++m) {
            Var v{g, m, false, {}};
            if (weights) {
                double p = weights->prob(FactId{g, m});
                v.probs = {1.0 - p, p};
            }
            vars.push_back(std::move(v));
        }
    }
    return vars;
}

void checkSize(std::size_t n) {
    if (n > kMaxOracleVariables) {
        throw Error(ErrorCode::TooManyWorlds,
                "program has " + std::to_string(n) + " probabilistic variables, oracle limit is " +
                        std::to_string(kMaxOracleVariables));
    }
}

bool matches(const logic::Atom& atom, const Tuple& t) {
    Env env;
    return unify(atom, t, env);
}

/** Shared world loop: per-tuple probabilities, existence probability and its state partials. */
struct Enumeration {
    std::map<Tuple, double> perTuple;
    double exists = 0.0;
    std::vector<Var> vars;
    std::vector<std::vector<double>> dState;
};

Enumeration enumerate(const logic::ValidatedProgram& vp, const FactWeights& weights, const logic::Atom& query,
        bool withGrad) {
    const auto& program = vp.program;
    vp.relation(query.relation);
    Enumeration out;
    out.vars = variables(program, &weights);
    checkSize(out.vars.size());
    const std::size_t n = out.vars.size();

    std::set<std::string> relevant{query.relation};
    for (const auto& r : program.rules) {
        for (const auto& lit : r.body) {
            if (lit.kind != Literal::Kind::Guard) {
                relevant.insert(lit.atom.relation);
            }
        }
    }
    // Memo key: the relevant input tuples that are true in the world.
    std::map<std::pair<std::string, Tuple>, std::size_t> tupleIds;
    std::vector<std::vector<std::vector<std::size_t>>> setsTrue(n);
    for (std::size_t i = 0; i < n; ++i) {
        const Var& v = out.vars[i];
        const auto& group = program.factGroups[v.group];
        auto idOf = [&](std::uint32_t m) -> std::optional<std::size_t> {
            if (!relevant.count(group.relation)) {
                return std::nullopt;
            }
            Tuple t;
            for (const auto& a : group.members[m].atom.args) {
                t.push_back(a.constant);
            }
            auto [it, fresh] = tupleIds.emplace(std::make_pair(group.relation, t), tupleIds.size());
            return it->second;
        };
        setsTrue[i].resize(v.probs.size());
        if (v.categorical) {
            for (std::uint32_t m = 0; m < group.members.size(); ++m) {
                if (auto id = idOf(m)) {
                    setsTrue[i][m].push_back(*id);
                }
            }
        } else if (auto id = idOf(v.member)) {
            setsTrue[i][1].push_back(*id);
        }
    }
    std::vector<std::pair<std::string, Tuple>> tupleById(tupleIds.size());
    for (const auto& [key, id] : tupleIds) {
        tupleById[id] = key;
    }

    std::map<std::vector<bool>, std::vector<Tuple>> memo;
    std::vector<std::uint32_t> state(n, 0);
    std::vector<double> prefix(n + 1, 1.0);
    std::vector<double> suffix(n + 1, 1.0);
    if (withGrad) {
        out.dState.resize(n);
        for (std::size_t i = 0; i < n; ++i) {
            out.dState[i].assign(out.vars[i].probs.size(), 0.0);
        }
    }
    while (true) {
        std::vector<bool> key(tupleIds.size(), false);
        for (std::size_t i = 0; i < n; ++i) {
            for (std::size_t id : setsTrue[i][state[i]]) {
                key[id] = true;
            }
        }
        auto it = memo.find(key);
        if (it == memo.end()) {
            BooleanModel inputs;
            for (std::size_t id = 0; id < key.size(); ++id) {
                if (key[id]) {
                    inputs[tupleById[id].first].insert(tupleById[id].second);
                }
            }
            BooleanModel model = NaiveEvaluator(vp, std::move(inputs)).run();
            std::vector<Tuple> hits;
            for (const auto& t : model[query.relation]) {
                if (matches(query, t)) {
                    hits.push_back(t);
                }
            }
            it = memo.emplace(std::move(key), std::move(hits)).first;
        }
        if (!it->second.empty()) {
            for (std::size_t i = 0; i < n; ++i) {
                prefix[i + 1] = prefix[i] * out.vars[i].probs[state[i]];
            }
            double w = prefix[n];
            out.exists += w;
            for (const auto& t : it->second) {
                out.perTuple[t] += w;
            }
            if (withGrad) {
                for (std::size_t i = n; i-- > 0;) {
                    suffix[i] = suffix[i + 1] * out.vars[i].probs[state[i]];
                }
                for (std::size_t i = 0; i < n; ++i) {
                    out.dState[i][state[i]] += prefix[i] * suffix[i + 1];
                }
            }
        }
        std::size_t i = 0;
        for (; i < n; ++i) {
            if (++state[i] < out.vars[i].probs.size()) {
                break;
            }
            state[i] = 0;
        }
        if (i == n) {
            break;
        }
    }
    return out;
}

}  // namespace

BooleanModel evaluateBoolean(const logic::ValidatedProgram& program, const BooleanModel& inputs) {
    return NaiveEvaluator(program, inputs).run();
}

BooleanModel worldFacts(const logic::Program& program, const WorldAssignment& world) {
    BooleanModel out;
    for (std::uint32_t g = 0; g < program.factGroups.size(); ++g) {
        const auto& group = program.factGroups[g];
        for (std::uint32_t m = 0; m < group.members.size(); ++m) {
            bool on = false;
            if (group.kind == logic::FactGroupKind::CategoricalAD) {
                auto it = world.nadChoices.find(g);
                on = it != world.nadChoices.end() && it->second == m;
            } else {
                auto it = world.independentChoices.find(FactId{g, m});
                on = it != world.independentChoices.end() && it->second;
            }
            if (on) {
                Tuple t;
                for (const auto& a : group.members[m].atom.args) {
                    t.push_back(a.constant);
                }
                out[group.relation].insert(std::move(t));
            }
        }
    }
    return out;
}

std::vector<std::pair<WorldAssignment, double>> enumerateWorlds(const logic::Program& program,
        const FactWeights& weights) {
    auto vars = variables(program, &weights);
    checkSize(vars.size());
    std::vector<std::pair<WorldAssignment, double>> out;
    std::vector<std::uint32_t> state(vars.size(), 0);
    while (true) {
        WorldAssignment w;
        double p = 1.0;
        for (std::size_t i = 0; i < vars.size(); ++i) {
            p *= vars[i].probs[state[i]];
            if (vars[i].categorical) {
                w.nadChoices[vars[i].group] = state[i];
            } else {
                w.independentChoices[FactId{vars[i].group, vars[i].member}] = state[i] == 1;
            }
        }
        out.emplace_back(std::move(w), p);
        std::size_t i = 0;
        for (; i < vars.size(); ++i) {
            if (++state[i] < vars[i].probs.size()) {
                break;
            }
            state[i] = 0;
        }
        if (i == vars.size()) {
            break;
        }
    }
    return out;
}

double enumerate_prob(const logic::ValidatedProgram& program, const FactWeights& weights, const logic::Atom& query) {
    return enumerate(program, weights, query, false).exists;
}

std::map<Tuple, double> enumerate_all(const logic::ValidatedProgram& program, const FactWeights& weights,
        const logic::Atom& query) {
    auto e = enumerate(program, weights, query, false);
    std::map<Tuple, double> out;
    for (const auto& [t, p] : e.perTuple) {
        if (p > 0.0) {
            out.emplace(t, p);
        }
    }
    return out;
}

GradProb enumerate_grad(const logic::ValidatedProgram& program, const FactWeights& weights,
        const logic::Atom& query) {
    auto e = enumerate(program, weights, query, true);
    GradProb out;
    out.value = e.exists;
    for (std::size_t i = 0; i < e.vars.size(); ++i) {
        const Var& v = e.vars[i];
        if (v.categorical) {
            for (std::uint32_t m = 0; m < v.probs.size(); ++m) {
                out.grad[FactId{v.group, m}] = e.dState[i][m];
            }
        } else {
            out.grad[FactId{v.group, v.member}] = e.dState[i][1] - e.dState[i][0];
        }
    }
    return out;
}

std::size_t variableCount(const logic::Program& program) {
    return variables(program, nullptr).size();
}

}  // namespace nesy::oracle
