#include "nesy/constraints/expr.h"

#include "nesy/error.h"

#include <algorithm>
#include <set>

namespace nesy::constraints {

struct Expr::Node {
    Kind kind = Kind::Leaf;
    std::string var;
    std::size_t value = 0;
    std::vector<Expr> children;
};

ConceptVar ConceptVar::categorical(std::string name, std::size_t n, Binding b) {
    if (n < 2) {
        throw Error(ErrorCode::ConfigError, "categorical concept needs at least 2 values", name);
    }
    return {std::move(name), n, std::move(b)};
}

Expr Expr::make(Kind kind, std::vector<Expr> children, std::string var, std::size_t value) {
    auto n = std::make_shared<Node>();
    n->kind = kind;
    n->children = std::move(children);
    n->var = std::move(var);
    n->value = value;
    Expr e;
    e.node_ = std::move(n);
    return e;
}

Expr::Kind Expr::kind() const {
    return node_->kind;
}

const std::string& Expr::var() const {
    return node_->var;
}

std::size_t Expr::value() const {
    return node_->value;
}

const std::vector<Expr>& Expr::children() const {
    return node_->children;
}

std::string Expr::toString() const {
    auto list = [&](const char* name) {
        std::string s = std::string(name) + "(";
        for (std::size_t i = 0; i < children().size(); ++i) {
            s += (i ? ", " : "") + children()[i].toString();
        }
        return s + ")";
    };
    switch (kind()) {
    case Kind::Leaf:
        return var() + "=" + std::to_string(value());
    case Kind::And:
        return list("andL");
    case Kind::Or:
        return list("orL");
    case Kind::Not:
        return list("notL");
    case Kind::If:
        return list("ifL");
    case Kind::Exists:
        return list("existsL");
    case Kind::Exact:
        return list("exactL");
    }
    return {};
}

Expr leaf(std::string var, std::size_t value) {
    return Expr::make(Expr::Kind::Leaf, {}, std::move(var), value);
}

Expr andL(std::vector<Expr> children) {
    return Expr::make(Expr::Kind::And, std::move(children));
}

Expr orL(std::vector<Expr> children) {
    return Expr::make(Expr::Kind::Or, std::move(children));
}

Expr notL(Expr child) {
    return Expr::make(Expr::Kind::Not, {std::move(child)});
}

Expr ifL(Expr antecedent, Expr consequent) {
    return Expr::make(Expr::Kind::If, {std::move(antecedent), std::move(consequent)});
}

Expr existsL(std::vector<Expr> candidates) {
    return Expr::make(Expr::Kind::Exists, std::move(candidates));
}

Expr exactL(std::vector<Expr> children) {
    return Expr::make(Expr::Kind::Exact, std::move(children));
}

Expr exactL(const ConceptVar& var) {
    std::vector<Expr> leaves;
    for (std::size_t v = 0; v < var.domain; ++v) {
        leaves.push_back(leaf(var.name, v));
    }
    return exactL(std::move(leaves));
}

namespace {

void collect(const Expr& e, std::set<std::string>& out) {
    if (e.kind() == Expr::Kind::Leaf) {
        out.insert(e.var());
    }
    for (const auto& c : e.children()) {
        collect(c, out);
    }
}

}  // namespace

std::vector<std::string> variablesOf(const Expr& e) {
    std::set<std::string> s;
    collect(e, s);
    return {s.begin(), s.end()};
}

void checkWellTyped(const Expr& e, const std::vector<ConceptVar>& vars) {
    if (e.kind() == Expr::Kind::Leaf) {
        auto it = std::find_if(vars.begin(), vars.end(), [&](const ConceptVar& v) { return v.name == e.var(); });
        if (it == vars.end()) {
            throw Error(ErrorCode::UnboundVariable, "constraint mentions undeclared concept", e.var());
        }
        if (e.value() >= it->domain) {
            throw Error(ErrorCode::TypeMismatch,
                    "value " + std::to_string(e.value()) + " outside the domain of " + e.var(), e.var());
        }
    }
    if (e.kind() == Expr::Kind::Not && e.children().size() != 1) {
        throw Error(ErrorCode::TypeMismatch, "notL takes one operand");
    }
    if (e.kind() == Expr::Kind::If && e.children().size() != 2) {
        throw Error(ErrorCode::TypeMismatch, "ifL takes two operands");
    }
    for (const auto& c : e.children()) {
        checkWellTyped(c, vars);
    }
}

bool isStructuralExact(const Expr& e, const Assignments& a) {
    if (e.kind() != Expr::Kind::Exact || e.children().empty()) {
        return false;
    }
    const std::string& var = e.children().front().var();
    std::set<std::size_t> seen;
    for (const auto& c : e.children()) {
        if (c.kind() != Expr::Kind::Leaf || c.var() != var || !seen.insert(c.value()).second) {
            return false;
        }
    }
    auto it = a.find(var);
    return it != a.end() && seen.size() == it->second.size();
}

}  // namespace nesy::constraints
