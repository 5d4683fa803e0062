#pragma once
// Random MQL syntax trees for round-trip testing. Trees are syntactic only;
// they need not pass analysis.

#include "mz/mql/ast.hpp"

#include <cmath>
#include <random>
#include <string>
#include <vector>

namespace mz::test {

class AstGen {
public:
    explicit AstGen(std::uint64_t seed) : rng_(seed) {}

    mql::Query query() {
        mql::Query q;
        q.target = coin() ? mql::Target::Models : mql::Target::Datasets;
        if (pick(0, 9) > 0) q.where = expr(pick(0, 4));
        if (coin()) q.order_by = mql::OrderBy{operand(), coin()};
        if (coin()) q.limit = pick(1, 1'000'000'000);
        return q;
    }

    mql::Expr expr(int depth) {
        int choice = depth <= 0 ? pick(4, 6) : pick(0, 7);
        switch (choice) {
            case 0: return {mql::And{expr(depth - 1), expr(depth - 1)}};
            case 1: return {mql::Or{expr(depth - 1), expr(depth - 1)}};
            case 2: return {mql::Not{expr(depth - 1)}};
            case 3: return {mql::Quantified{coin() ? mql::Quantifier::Any : mql::Quantifier::All, expr(depth - 1), {}}};
            case 4: {
                std::vector<mql::Literal> values;
                int n = pick(1, 4);
                for (int i = 0; i < n; ++i) values.push_back(literal());
                return {mql::Membership{path(), std::move(values)}};
            }
            case 5: return {mql::Contains{path(), literal()}};
            default: return {mql::Comparison{static_cast<mql::CmpOp>(pick(0, 5)), operand(), operand()}};
        }
    }

    mql::Operand operand() {
        switch (pick(0, 2)) {
            case 0: return literal();
            case 1: return path();
            default: {
                static const char* kKeys[] = {"dataset", "name", "hardware", "slice", "other"};
                mql::MetricCall call;
                int n = pick(0, 4);
                for (int i = 0; i < n; ++i) call.args.push_back({kKeys[pick(0, 4)], literal()});
                return call;
            }
        }
    }

    mql::Path path() {
        static const char* kSegments[] = {"name", "task", "architecture", "family", "trained_on",
                                          "labels", "x1", "source", "annotator_count", "_tags"};
        mql::Path p;
        int n = pick(1, 3);
        for (int i = 0; i < n; ++i) p.segments.emplace_back(kSegments[pick(0, 9)]);
        return p;
    }

    mql::Literal literal() {
        switch (pick(0, 2)) {
            case 0: return {string()};
            case 1: return {number()};
            default: return {coin()};
        }
    }

private:
    int pick(int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng_); }
    bool coin() { return pick(0, 1) == 1; }

    double number() {
        switch (pick(0, 4)) {
            case 0: return pick(-1000, 1000);
            case 1: return std::uniform_real_distribution<double>(-1, 1)(rng_);
            case 2: return std::uniform_real_distribution<double>(-1e300, 1e300)(rng_);
            case 3: return std::ldexp(std::uniform_real_distribution<double>(0.5, 1)(rng_), -pick(100, 1000));
            default: return pick(0, 100) / 100.0;
        }
    }

    std::string string() {
        static const std::vector<std::string> kPieces = {"a", "Z", " ", "\"", "\\", "\n", "\t", "\r", "\x01",
                                                         "é", "犬", "dog", "90%", "'", "/", "(", ")"};
        std::string s;
        int n = pick(0, 8);
        for (int i = 0; i < n; ++i) s += kPieces[static_cast<std::size_t>(pick(0, static_cast<int>(kPieces.size()) - 1))];
        return s;
    }

    std::mt19937_64 rng_;
};

}  // namespace mz::test
