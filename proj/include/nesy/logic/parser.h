#pragma once

#include "nesy/logic/ast.h"
#include "nesy/logic/lexer.h"

#include <span>
#include <string_view>
#include <vector>

namespace nesy::logic {

/**
 * Parses a token stream into a Program.
 *
 *   program   := (decl | rule | factline | query)*
 *   decl      := "rel" IDENT "(" [type ("," type)*] ")" "."
 *   type      := "int" | "sym" | "float"
 *   rule      := atom [":-" literal ("," literal)*] "."
 *   literal   := atom | "not" atom | expr cmp expr
 *   factline  := prob "::" atom (";" prob "::" atom)* "."
 *   prob      := FLOAT | INT | "nn" "(" IDENT "," INT ")"
 *   query     := "query" atom "."
 *
 * A rule without a body is a plain (certain) fact. Variables start with an
 * upper-case letter or '_'; symbols are double-quoted. Aggregation syntax
 * (`V = agg(...)`, `x: body`) raises UnsupportedFeature; every other
 * deviation raises ParseError whose detail names the expected token.
 */
Program parseProgram(std::span<const Token> tokens);

/** tokenize + parseProgram. */
Program parseSource(std::string_view source);

}  // namespace nesy::logic
