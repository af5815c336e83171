#include "nesy/logic/validate.h"

#include "nesy/error.h"
#include "nesy/logic/printer.h"

#include <algorithm>
#include <cmath>
#include <functional>
#include <vector>

namespace nesy::logic {

const RelationDecl& ValidatedProgram::relation(const std::string& name) const {
    for (const auto& d : program.relations) {
        if (d.name == name) {
            return d;
        }
    }
    throw Error(ErrorCode::UnknownRelation, "relation '" + name + "' is not declared", name);
}

const QueryDecl& ValidatedProgram::query(const std::string& name) const {
    for (const auto& q : program.queries) {
        if (q.name == name) {
            return q;
        }
    }
    throw Error(ErrorCode::UnknownQuery, "no query named '" + name + "'", name);
}

namespace {

using DeclMap = std::map<std::string, const RelationDecl*>;

void checkAtom(const Atom& atom, const DeclMap& decls) {
    auto it = decls.find(atom.relation);
    if (it == decls.end()) {
        throw Error(ErrorCode::UnknownRelation, "relation '" + atom.relation + "' is not declared", atom.relation,
                atom.pos.line, atom.pos.column);
    }
    const RelationDecl& decl = *it->second;
    if (atom.args.size() != decl.arity()) {
        throw Error(ErrorCode::ArityMismatch,
                "'" + atom.relation + "' expects " + std::to_string(decl.arity()) + " arguments, got " +
                        std::to_string(atom.args.size()),
                atom.relation, atom.pos.line, atom.pos.column);
    }
    for (std::size_t i = 0; i < atom.args.size(); ++i) {
        const Term& t = atom.args[i];
        if (!t.isVariable() && t.constant.type() != decl.columnTypes[i]) {
            throw Error(ErrorCode::TypeMismatch,
                    "column " + std::to_string(i) + " of '" + atom.relation + "' is " +
                            std::string(valueTypeName(decl.columnTypes[i])) + ", got " + t.constant.toString(),
                    atom.relation, t.pos.line, t.pos.column);
        }
    }
}

void checkFactGroup(const FactGroup& g) {
    double constantSum = 0;
    bool allConstant = true;
    for (const auto& m : g.members) {
        if (m.atom.relation != g.relation) {
            throw Error(ErrorCode::MixedFactGroup, "annotated disjunction mixes relations '" + g.relation +
                    "' and '" + m.atom.relation + "'", m.atom.relation, m.atom.pos.line, m.atom.pos.column);
        }
        if (!m.atom.isGround()) {
            throw Error(ErrorCode::NonGroundFact, "probabilistic fact " + printAtom(m.atom) + " is not ground",
                    m.atom.relation, m.atom.pos.line, m.atom.pos.column);
        }
        if (m.slot.kind == ProbSlot::Kind::Constant) {
            double p = m.slot.probability;
            if (!(p >= 0.0 && p <= 1.0)) {
                throw Error(ErrorCode::InvalidProbability, "probability " + formatFloat(p) + " outside [0, 1]",
                        m.atom.relation, m.slot.pos.line, m.slot.pos.column);
            }
            constantSum += p;
        } else {
            allConstant = false;
        }
    }
    if (g.kind == FactGroupKind::CategoricalAD && allConstant && std::abs(constantSum - 1.0) > 1e-9) {
        throw Error(ErrorCode::InvalidProbability,
                "annotated disjunction probabilities sum to " + formatFloat(constantSum) + ", expected 1",
                g.relation, g.pos.line, g.pos.column);
    }
}

struct Edge {
    std::string to;
    bool negative;
};

/** Tarjan SCC; components come out dependencies-first. */
class SccFinder {
public:
    SccFinder(const std::vector<std::string>& nodes, const std::map<std::string, std::vector<Edge>>& edges)
            : nodes_(nodes), edges_(edges) {}

    std::vector<std::vector<std::string>> run() {
        for (const auto& n : nodes_) {
            if (!index_.count(n)) {
                visit(n);
            }
        }
        return comps_;
    }

private:
    void visit(const std::string& v) {
        index_[v] = low_[v] = counter_++;
        stack_.push_back(v);
        onStack_.insert(v);
        if (auto it = edges_.find(v); it != edges_.end()) {
            for (const auto& e : it->second) {
                if (!index_.count(e.to)) {
                    visit(e.to);
                    low_[v] = std::min(low_[v], low_[e.to]);
                } else if (onStack_.count(e.to)) {
                    low_[v] = std::min(low_[v], index_[e.to]);
                }
            }
        }
        if (low_[v] == index_[v]) {
            std::vector<std::string> comp;
            std::string w;
            do {
                w = stack_.back();
                stack_.pop_back();
                onStack_.erase(w);
                comp.push_back(w);
            } while (w != v);
            std::sort(comp.begin(), comp.end());
            comps_.push_back(std::move(comp));
        }
    }

    const std::vector<std::string>& nodes_;
    const std::map<std::string, std::vector<Edge>>& edges_;
    std::map<std::string, int> index_;
    std::map<std::string, int> low_;
    std::vector<std::string> stack_;
    std::set<std::string> onStack_;
    std::vector<std::vector<std::string>> comps_;
    int counter_ = 0;
};

void stratify(ValidatedProgram& vp) {
    std::vector<std::string> nodes;
    for (const auto& d : vp.program.relations) {
        nodes.push_back(d.name);
    }
    std::map<std::string, std::vector<Edge>> edges;
    for (const auto& r : vp.program.rules) {
        for (const auto& lit : r.body) {
            if (lit.kind != Literal::Kind::Guard) {
                edges[r.head.relation].push_back({lit.atom.relation, lit.kind == Literal::Kind::Negative});
            }
        }
    }
    auto comps = SccFinder(nodes, edges).run();
    std::map<std::string, std::size_t> compOf;
    for (std::size_t c = 0; c < comps.size(); ++c) {
        for (const auto& n : comps[c]) {
            compOf[n] = c;
        }
    }
    std::vector<int> compStratum(comps.size(), 0);
    for (std::size_t c = 0; c < comps.size(); ++c) {
        for (const auto& n : comps[c]) {
            for (const auto& e : edges[n]) {
                std::size_t target = compOf.at(e.to);
                if (target == c) {
                    if (e.negative) {
                        std::string cycle;
                        for (const auto& m : comps[c]) {
                            cycle += (cycle.empty() ? "" : " -> ") + m;
                        }
                        throw Error(ErrorCode::UnstratifiableNegation,
                                "relation '" + n + "' depends negatively on itself through {" + cycle + "}",
                                cycle);
                    }
                    continue;
                }
                compStratum[c] = std::max(compStratum[c], compStratum[target] + (e.negative ? 1 : 0));
            }
        }
    }
    vp.stratumCount = 0;
    for (std::size_t c = 0; c < comps.size(); ++c) {
        for (const auto& n : comps[c]) {
            vp.strata[n] = compStratum[c];
        }
        vp.stratumCount = std::max(vp.stratumCount, compStratum[c] + 1);
    }
}

void checkSafety(const Rule& rule) {
    std::set<std::string> bound;
    auto bindAtom = [&](const Atom& a) {
        for (const auto& t : a.args) {
            if (t.isVariable() && !t.isWildcard()) {
                bound.insert(t.variable);
            }
        }
    };
    for (const auto& lit : rule.body) {
        if (lit.kind == Literal::Kind::Positive) {
            bindAtom(lit.atom);
        }
    }
    auto allBound = [&](const Expr& e) {
        auto vars = exprVariables(e);
        return std::all_of(vars.begin(), vars.end(), [&](const std::string& v) { return bound.count(v) > 0; });
    };
    bool changed = true;
    while (changed) {
        changed = false;
        for (const auto& lit : rule.body) {
            if (lit.kind != Literal::Kind::Guard || lit.guard.op != CmpOp::Eq) {
                continue;
            }
            const Guard& g = lit.guard;
            if (g.lhs.kind == Expr::Kind::Variable && !bound.count(g.lhs.variable) && allBound(g.rhs)) {
                bound.insert(g.lhs.variable);
                changed = true;
            } else if (g.rhs.kind == Expr::Kind::Variable && !bound.count(g.rhs.variable) && allBound(g.lhs)) {
                bound.insert(g.rhs.variable);
                changed = true;
            }
        }
    }

    for (const auto& t : rule.head.args) {
        if (t.isVariable() && (t.isWildcard() || !bound.count(t.variable))) {
            throw Error(ErrorCode::RangeRestrictionViolation,
                    "head variable " + t.variable + " of " + printRule(rule) + " is not bound by a positive literal",
                    t.variable, t.pos.line, t.pos.column);
        }
    }
    for (const auto& lit : rule.body) {
        if (lit.kind == Literal::Kind::Negative) {
            for (const auto& t : lit.atom.args) {
                if (t.isVariable() && !t.isWildcard() && !bound.count(t.variable)) {
                    throw Error(ErrorCode::RangeRestrictionViolation,
                            "variable " + t.variable + " in negated literal " + printAtom(lit.atom) +
                                    " is not bound by a positive literal",
                            t.variable, t.pos.line, t.pos.column);
                }
            }
        } else if (lit.kind == Literal::Kind::Guard) {
            for (const auto* side : {&lit.guard.lhs, &lit.guard.rhs}) {
                for (const auto& v : exprVariables(*side)) {
                    if (v == "_" || !bound.count(v)) {
                        throw Error(ErrorCode::UnboundGuardVariable,
                                "variable " + v + " in guard " + printLiteral(lit) + " is never bound", v,
                                lit.pos.line, lit.pos.column);
                    }
                }
            }
        }
    }
}

void markProbabilistic(ValidatedProgram& vp) {
    for (const auto& g : vp.program.factGroups) {
        vp.probabilistic.insert(g.relation);
    }
    bool changed = true;
    while (changed) {
        changed = false;
        for (const auto& r : vp.program.rules) {
            if (vp.probabilistic.count(r.head.relation)) {
                continue;
            }
            for (const auto& lit : r.body) {
                if (lit.kind == Literal::Kind::Positive && vp.probabilistic.count(lit.atom.relation)) {
                    vp.probabilistic.insert(r.head.relation);
                    changed = true;
                    break;
                }
            }
        }
    }
    for (const auto& r : vp.program.rules) {
        for (const auto& lit : r.body) {
            if (lit.kind == Literal::Kind::Negative && vp.probabilistic.count(lit.atom.relation)) {
                throw Error(ErrorCode::ProbabilisticNegation,
                        "negation of '" + lit.atom.relation + "', which depends on probabilistic facts",
                        lit.atom.relation, lit.pos.line, lit.pos.column);
            }
        }
    }
}

}  // namespace

ValidatedProgram validate(const Program& program) {
    ValidatedProgram vp;
    vp.program = program;
    const Program& p = vp.program;

    DeclMap decls;
    for (const auto& d : p.relations) {
        if (!decls.emplace(d.name, &d).second) {
            throw Error(ErrorCode::DuplicateRelation, "relation '" + d.name + "' is declared more than once",
                    d.name, d.pos.line, d.pos.column);
        }
    }
    for (const auto& r : p.rules) {
        checkAtom(r.head, decls);
        for (const auto& lit : r.body) {
            if (lit.kind != Literal::Kind::Guard) {
                checkAtom(lit.atom, decls);
            }
        }
    }
    for (const auto& g : p.factGroups) {
        for (const auto& m : g.members) {
            checkAtom(m.atom, decls);
        }
        checkFactGroup(g);
    }
    std::set<std::string> queryNames;
    for (const auto& q : p.queries) {
        checkAtom(q.atom, decls);
        if (!queryNames.insert(q.name).second) {
            throw Error(ErrorCode::DuplicateQuery, "more than one query over '" + q.name + "'", q.name,
                    q.pos.line, q.pos.column);
        }
    }

    stratify(vp);
    for (const auto& r : p.rules) {
        checkSafety(r);
    }
    markProbabilistic(vp);
    return vp;
}

}  // namespace nesy::logic
