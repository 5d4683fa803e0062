#pragma once

#include "mz/mql/ast.hpp"
#include "mz/mql/lexer.hpp"

#include <string>
#include <string_view>
#include <vector>

namespace mz::mql {

class SyntaxError : public QueryError {
public:
    SyntaxError(const std::string& what, SourcePos pos, std::vector<std::string> expected)
        : QueryError(what, pos), expected_(std::move(expected)) {}
    // Token descriptions that would have been accepted at pos().
    [[nodiscard]] const std::vector<std::string>& expected() const { return expected_; }

private:
    std::vector<std::string> expected_;
};

// Grammar:
//   query      := FIND (MODELS|DATASETS) [WHERE expr]
//                 [ORDER BY operand [ASC|DESC]] [LIMIT integer]
//   expr       := and_expr (OR and_expr)*
//   and_expr   := unary (AND unary)*
//   unary      := NOT unary | atom
//   atom       := '(' expr ')'
//               | (ANY|ALL) '(' INSTANCES ',' expr ')'
//               | path IN '(' literal (',' literal)* ')'
//               | path CONTAINS literal
//               | operand cmp operand            -- non-associative
//   operand    := literal | path | METRIC '(' [key '=' literal (',' ...)*] ')'
//   path       := ident ('.' ident)*
// AND and OR build left-nested binary trees.
Query parse(const std::vector<Token>& tokens);
Query parse(std::string_view text);

// Canonical text; parse(pretty_print(q)) == q.
std::string pretty_print(const Query& q);
std::string pretty_print(const Expr& e);
std::string pretty_print(const Operand& o);
std::string pretty_print(const Literal& l);

}  // namespace mz::mql
