#include "mql_gen.hpp"
#include "support.hpp"

#include "mz/mql.hpp"

#include <gtest/gtest.h>

namespace mz::mql {
namespace {

std::vector<TokenType> types(const std::vector<Token>& tokens) {
    std::vector<TokenType> out;
    for (const auto& t : tokens) out.push_back(t.type);
    return out;
}

std::string canned(int n) { return test::read_text(test::fixtures_dir() / "queries" / ("q" + std::to_string(n) + ".mql")); }

TEST(Lexer, FindModels) {
    EXPECT_EQ(types(tokenize("FIND MODELS")), (std::vector<TokenType>{TokenType::Find, TokenType::Models}));
}

TEST(Lexer, MetricComparisonIsTwelveTokens) {
    auto tokens = tokenize(R"(metric(dataset="ImageNet", name="accuracy") > 0.90)");
    using T = TokenType;
    EXPECT_EQ(types(tokens), (std::vector<T>{T::Metric, T::LParen, T::Ident, T::Eq, T::String, T::Comma, T::Ident,
                                             T::Eq, T::String, T::RParen, T::Gt, T::Number}));
    EXPECT_EQ(tokens.back().number, 0.90);
    EXPECT_EQ(tokens[4].text, "ImageNet");
}

TEST(Lexer, KeywordsAreCaseInsensitive) {
    EXPECT_EQ(types(tokenize("find Models wHeRe")), types(tokenize("FIND MODELS WHERE")));
    // Identifiers keep their spelling.
    EXPECT_EQ(tokenize("Architecture")[0].text, "Architecture");
}

TEST(Lexer, PositionsAreOneBased) {
    auto tokens = tokenize("FIND\n  MODELS");
    EXPECT_EQ(tokens[0].pos.line, 1);
    EXPECT_EQ(tokens[0].pos.column, 1);
    EXPECT_EQ(tokens[1].pos.line, 2);
    EXPECT_EQ(tokens[1].pos.column, 3);
}

TEST(Lexer, UnclosedStringAtOneOne) {
    try {
        tokenize("\"unclosed");
        FAIL();
    } catch (const LexError& e) {
        EXPECT_EQ(e.pos().line, 1);
        EXPECT_EQ(e.pos().column, 1);
        EXPECT_EQ(std::string(e.what()).rfind("1:1:", 0), 0u);
    }
}

TEST(Lexer, IllegalCharacterCarriesPosition) {
    try {
        tokenize("FIND MODELS WHERE a # 1");
        FAIL();
    } catch (const LexError& e) {
        EXPECT_EQ(e.pos().column, 21);
    }
}

TEST(Lexer, EscapesAndPercent) {
    auto tokens = tokenize(R"("a\"b\\c\né" 90% 1e-3 -2.5)");
    EXPECT_EQ(tokens[0].text, "a\"b\\c\n\xc3\xa9");
    EXPECT_DOUBLE_EQ(tokens[1].number, 0.90);
    EXPECT_DOUBLE_EQ(tokens[2].number, 0.001);
    EXPECT_DOUBLE_EQ(tokens[3].number, -2.5);
}

TEST(Lexer, PercentLiteralEqualsDecimal) {
    auto a = analyze(R"(FIND MODELS WHERE metric(dataset="ImageNet", name="accuracy") > 90%)");
    auto b = analyze(R"(FIND MODELS WHERE metric(dataset="ImageNet", name="accuracy") > 0.90)");
    EXPECT_EQ(a.query, b.query);
}

TEST(Parser, QueryThreeRootIsAnd) {
    auto q = parse(canned(3));
    ASSERT_TRUE(q.where);
    EXPECT_TRUE(std::holds_alternative<And>(q.where->node));
    EXPECT_EQ(q.target, Target::Models);
}

TEST(Parser, QueryOneParses) {
    auto q = parse(canned(1));
    ASSERT_TRUE(q.where);
    // Left-nested: ((task AND collection_method) AND annotator_count).
    const auto& top = std::get<And>(q.where->node);
    EXPECT_TRUE(std::holds_alternative<And>(top.lhs->node));
    const auto& last = std::get<Comparison>(top.rhs->node);
    EXPECT_EQ(last.op, CmpOp::Ge);
    EXPECT_EQ(std::get<double>(std::get<Literal>(last.rhs).value), 50.0);
}

TEST(Parser, AllCannedQueriesParse) {
    for (int i = 1; i <= 7; ++i) EXPECT_NO_THROW(parse(canned(i))) << "q" << i;
}

TEST(Parser, WhereAndListsExpectedAtoms) {
    try {
        parse("FIND MODELS WHERE AND");
        FAIL();
    } catch (const SyntaxError& e) {
        EXPECT_EQ(e.pos().column, 19);
        const auto& ex = e.expected();
        EXPECT_NE(std::find(ex.begin(), ex.end(), describe(TokenType::Ident)), ex.end());
        EXPECT_NE(std::find(ex.begin(), ex.end(), describe(TokenType::LParen)), ex.end());
        EXPECT_NE(std::find(ex.begin(), ex.end(), describe(TokenType::Not)), ex.end());
    }
}

TEST(Parser, BareFindExpectsTarget) {
    try {
        parse("FIND");
        FAIL();
    } catch (const SyntaxError& e) {
        EXPECT_EQ(e.expected(), (std::vector<std::string>{describe(TokenType::Models), describe(TokenType::Datasets)}));
    }
}

TEST(Parser, PrecedenceNotAndOr) {
    auto q = parse("FIND MODELS WHERE NOT a = 1 OR b = 2 AND c = 3");
    const auto& root = std::get<Or>(q.where->node);
    EXPECT_TRUE(std::holds_alternative<Not>(root.lhs->node));
    EXPECT_TRUE(std::holds_alternative<And>(root.rhs->node));
}

TEST(Parser, ComparisonIsNonAssociative) {
    EXPECT_THROW(parse("FIND MODELS WHERE a = b = c"), SyntaxError);
    EXPECT_THROW(parse("FIND MODELS WHERE a < 1 < 2"), SyntaxError);
}

TEST(Parser, RejectsMalformedClauses) {
    EXPECT_THROW(parse("FIND MODELS LIMIT 0"), SyntaxError);
    EXPECT_THROW(parse("FIND MODELS LIMIT 1.5"), SyntaxError);
    EXPECT_THROW(parse("FIND MODELS ORDER name"), SyntaxError);
    EXPECT_THROW(parse("FIND MODELS WHERE \"x\" IN (\"a\")"), SyntaxError);
    EXPECT_THROW(parse("FIND MODELS WHERE a IN ()"), SyntaxError);
    EXPECT_THROW(parse("FIND MODELS WHERE ANY(a = 1)"), SyntaxError);
    EXPECT_THROW(parse("FIND MODELS trailing"), SyntaxError);
}

TEST(Parser, CannedQueriesRoundTrip) {
    for (int i = 1; i <= 7; ++i) {
        auto q = parse(canned(i));
        auto printed = pretty_print(q);
        EXPECT_EQ(parse(printed), q) << printed;
        EXPECT_EQ(pretty_print(parse(printed)), printed);
    }
}

TEST(Parser, ThousandRandomAstsRoundTrip) {
    test::AstGen gen(20240601);
    int failures = 0;
    for (int i = 0; i < 1000; ++i) {
        Query q = gen.query();
        std::string text = pretty_print(q);
        Query back;
        try {
            back = parse(text);
        } catch (const QueryError& e) {
            ++failures;
            ADD_FAILURE() << text << "\n" << e.what();
            continue;
        }
        if (!(back == q)) {
            ++failures;
            ADD_FAILURE() << text << "\nreprinted: " << pretty_print(back);
        }
    }
    EXPECT_EQ(failures, 0);
}

TEST(Analyzer, ArchitectureFamilyBindsAsString) {
    auto t = analyze("FIND MODELS WHERE architecture.family = \"cnn\"");
    const auto& c = std::get<Comparison>(t.query.where->node);
    const auto& p = std::get<Path>(c.lhs);
    ASSERT_TRUE(p.binding);
    EXPECT_EQ(p.binding->type, ValueKind::String);
    EXPECT_FALSE(p.binding->multi);
}

TEST(Analyzer, AllCannedQueriesAnalyze) {
    for (int i = 1; i <= 7; ++i) EXPECT_NO_THROW(analyze(canned(i))) << "q" << i;
}

TEST(Analyzer, TypeMismatchNamesField) {
    try {
        analyze(R"(FIND DATASETS WHERE annotator_count > "fifty")");
        FAIL();
    } catch (const AnalysisError& e) {
        EXPECT_EQ(e.field_path(), "annotator_count");
        EXPECT_NE(std::string(e.what()).find("type mismatch"), std::string::npos);
    }
}

TEST(Analyzer, UnknownFieldIsError) {
    try {
        analyze("FIND MODELS WHERE architecture.colour = \"red\"");
        FAIL();
    } catch (const AnalysisError& e) {
        EXPECT_EQ(e.field_path(), "architecture.colour");
        EXPECT_EQ(e.pos().column, 19);
    }
    // Dataset-only fields are not visible on models without trained_on.
    EXPECT_THROW(analyze("FIND MODELS WHERE annotator_count > 1"), AnalysisError);
}

TEST(Analyzer, MetricArgumentChecks) {
    EXPECT_THROW(analyze(R"(FIND MODELS WHERE metric(name="accuracy") > 0.5)"), AnalysisError);
    EXPECT_THROW(analyze(R"(FIND MODELS WHERE metric(dataset="d", name="a", colour="x") > 0.5)"), AnalysisError);
    EXPECT_THROW(analyze(R"(FIND MODELS WHERE metric(dataset="d", name="a", name="b") > 0.5)"), AnalysisError);
    EXPECT_THROW(analyze(R"(FIND MODELS WHERE metric(dataset="d", name=1) > 0.5)"), AnalysisError);
    EXPECT_THROW(analyze(R"(FIND MODELS WHERE metric(dataset="d", name="a") = "high")"), AnalysisError);
    EXPECT_THROW(analyze(R"(FIND DATASETS WHERE metric(dataset="d", name="a") > 1)"), AnalysisError);
    EXPECT_NO_THROW(analyze(R"(FIND MODELS WHERE metric(dataset="d", name="a", hardware="edge", slice="s") > 1)"));
}

TEST(Analyzer, QuantifierPlacement) {
    EXPECT_NO_THROW(analyze(R"(FIND DATASETS WHERE ANY(INSTANCES, labels CONTAINS "dog"))"));
    EXPECT_NO_THROW(analyze(R"(FIND MODELS WHERE ALL(INSTANCES, split = "train"))"));
    EXPECT_THROW(analyze(R"(FIND DATASETS WHERE ANY(INSTANCES, ALL(INSTANCES, sensitive = TRUE)))"), AnalysisError);
    EXPECT_THROW(analyze(R"(FIND DATASETS WHERE ANY(INSTANCES, name = "x"))"), AnalysisError);
    EXPECT_THROW(analyze(R"(FIND MODELS WHERE ANY(INSTANCES, metric(dataset="d", name="a") > 1))"), AnalysisError);
}

TEST(Analyzer, ContainsAndMembershipTyping) {
    EXPECT_THROW(analyze(R"(FIND MODELS WHERE task CONTAINS "x")"), AnalysisError);
    EXPECT_THROW(analyze(R"(FIND MODELS WHERE tags CONTAINS 3)"), AnalysisError);
    EXPECT_THROW(analyze(R"(FIND DATASETS WHERE source IN ("a", 1))"), AnalysisError);
    EXPECT_THROW(analyze(R"(FIND MODELS WHERE tags > "a" ORDER BY tags)"), AnalysisError);
    EXPECT_THROW(analyze(R"(FIND DATASETS WHERE contains_sensitive_data < TRUE)"), AnalysisError);
}

TEST(Analyzer, CatalogPathsAllBind) {
    for (const auto& f : field_catalog()) {
        if (f.scope == Scope::Instance) continue;
        std::string lit = f.type == ValueKind::String ? "\"v\"" : f.type == ValueKind::Number ? "1" : "TRUE";
        std::string q = std::string(f.scope == Scope::Model ? "FIND MODELS" : "FIND DATASETS") + " WHERE " + f.path +
                        (f.multi ? " CONTAINS " : " = ") + lit;
        EXPECT_NO_THROW(analyze(q)) << q;
    }
}

}  // namespace
}  // namespace mz::mql
