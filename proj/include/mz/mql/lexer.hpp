#pragma once

#include "mz/metamodel.hpp"
#include "mz/mql/ast.hpp"

#include <string>
#include <string_view>
#include <vector>

namespace mz::mql {

enum class TokenType {
    // keywords
    Find,
    Models,
    Datasets,
    Where,
    Order,
    By,
    Asc,
    Desc,
    Limit,
    And,
    Or,
    Not,
    In,
    Contains,
    Any,
    All,
    Instances,
    Metric,
    True,
    False,
    // values
    Ident,
    String,
    Number,
    // punctuation
    LParen,
    RParen,
    Comma,
    Dot,
    Eq,
    Ne,
    Lt,
    Le,
    Gt,
    Ge,
    End,
};

// Human-readable spelling used in diagnostics, e.g. "FIND", "identifier", "'('".
std::string describe(TokenType t);

struct Token {
    TokenType type = TokenType::End;
    // Identifier spelling, decoded string contents, or number lexeme.
    std::string text;
    double number = 0.0;
    SourcePos pos;

    friend bool operator==(const Token& a, const Token& b) {
        return a.type == b.type && a.text == b.text && a.number == b.number;
    }
};

// Base for lexer, parser and analyzer diagnostics; positions are 1-based.
class QueryError : public Error {
public:
    QueryError(const std::string& what, SourcePos pos)
        : Error(std::to_string(pos.line) + ":" + std::to_string(pos.column) + ": " + what),
          message_(what),
          pos_(pos) {}
    [[nodiscard]] SourcePos pos() const { return pos_; }
    [[nodiscard]] const std::string& message() const { return message_; }

private:
    std::string message_;
    SourcePos pos_;
};

class LexError : public QueryError {
public:
    using QueryError::QueryError;
};

// Keywords are case-insensitive. Strings are double-quoted with backslash
// escapes. A number followed by '%' is divided by 100. The returned list does
// not include the End token.
std::vector<Token> tokenize(std::string_view text);

}  // namespace mz::mql
