#pragma once

#include "nanolog/error.hpp"
#include "nanolog/term.hpp"

#include <string_view>
#include <vector>

namespace nanolog {

// Concrete syntax:
//
//   program := rule*
//   rule    := term '.' | term ':-' term (',' term)* '.'
//   query   := term (',' term)* '.'?
//   term    := VAR | IDENT | IDENT '(' term (',' term)* ')'
//
// VAR is [A-Z][A-Za-z0-9_]*, IDENT is [a-z][A-Za-z0-9_]*. Whitespace may
// appear between tokens and '%' comments run to end of line. All functions
// consume the entire input and throw ParseError on the first violation.
// parse_rule/parse_program throw Error(BareVariableHead) for `X :- ...`.

Term parse_term(std::string_view src);
Rule parse_rule(std::string_view src);
Program parse_program(std::string_view src);
std::vector<Term> parse_query(std::string_view src);

}  // namespace nanolog
