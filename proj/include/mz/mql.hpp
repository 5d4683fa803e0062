#pragma once
// Query language: lexer, parser and printer, analyzer, evaluator.

#include "mz/mql/analyzer.hpp"
#include "mz/mql/ast.hpp"
#include "mz/mql/evaluator.hpp"
#include "mz/mql/lexer.hpp"
#include "mz/mql/parser.hpp"
