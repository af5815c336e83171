#pragma once

#include "nesy/logic/ast.h"

#include <string>

namespace nesy::logic {

std::string printAtom(const Atom& atom);
std::string printExpr(const Expr& expr);
std::string printLiteral(const Literal& lit);
std::string printRule(const Rule& rule);
std::string printFactGroup(const FactGroup& group);

/**
 * Canonical source for a program: declarations, fact lines, rules, then
 * queries, one item per line. Re-parsing the output yields a structurally
 * equal Program.
 */
std::string printProgram(const Program& program);

/**
 * S-expression form of the AST with line:column of every declaration,
 * fact line, rule, literal and query, e.g.
 * (rule 3:1 (p (var X)) (pos 3:9 (q (var X))) (guard 3:15 (var X) > (int 0))).
 */
std::string dumpProgram(const Program& program);

}  // namespace nesy::logic
