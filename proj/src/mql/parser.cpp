#include "mz/mql/parser.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>

namespace mz::mql {

// ---------------------------------------------------------------------------
// AST helpers
// ---------------------------------------------------------------------------

const char* to_string(TriBool t) {
    switch (t) {
        case TriBool::True: return "TRUE";
        case TriBool::False: return "FALSE";
        default: return "UNKNOWN";
    }
}

const char* to_string(CmpOp op) {
    switch (op) {
        case CmpOp::Eq: return "=";
        case CmpOp::Ne: return "!=";
        case CmpOp::Lt: return "<";
        case CmpOp::Le: return "<=";
        case CmpOp::Gt: return ">";
        case CmpOp::Ge: return ">=";
    }
    return "?";
}

const char* to_string(ValueKind k) {
    switch (k) {
        case ValueKind::String: return "string";
        case ValueKind::Number: return "number";
        case ValueKind::Bool: return "bool";
    }
    return "?";
}

std::string Path::dotted() const {
    std::string out;
    for (const auto& s : segments) {
        if (!out.empty()) out += '.';
        out += s;
    }
    return out;
}

const Literal* MetricCall::arg(std::string_view key) const {
    for (const auto& a : args) {
        if (a.key == key) return &a.value;
    }
    return nullptr;
}

std::optional<std::string> MetricCall::string_arg(std::string_view key) const {
    const Literal* l = arg(key);
    if (!l) return std::nullopt;
    if (const auto* s = std::get_if<std::string>(&l->value)) return *s;
    return std::nullopt;
}

// ---------------------------------------------------------------------------
// Parser
// ---------------------------------------------------------------------------

namespace {

class Parser {
public:
    explicit Parser(const std::vector<Token>& tokens) : tokens_(tokens) {
        end_.type = TokenType::End;
        if (!tokens_.empty()) {
            end_.pos = tokens_.back().pos;
            end_.pos.column += static_cast<int>(std::max<std::size_t>(1, tokens_.back().text.size()));
        } else {
            end_.pos = {1, 1};
        }
    }

    Query query() {
        Query q;
        expect(TokenType::Find);
        if (accept(TokenType::Models)) {
            q.target = Target::Models;
        } else if (accept(TokenType::Datasets)) {
            q.target = Target::Datasets;
        } else {
            fail({TokenType::Models, TokenType::Datasets});
        }
        if (accept(TokenType::Where)) q.where = expr();
        if (accept(TokenType::Order)) {
            expect(TokenType::By);
            OrderBy ob{operand(), false};
            if (accept(TokenType::Desc)) {
                ob.descending = true;
            } else {
                accept(TokenType::Asc);
            }
            q.order_by = std::move(ob);
        }
        if (accept(TokenType::Limit)) {
            const Token& t = peek();
            if (t.type != TokenType::Number) fail({TokenType::Number});
            double v = t.number;
            if (!(v >= 1.0) || v != std::floor(v) || v > 9.0e15 ||
                t.text.find_first_not_of("0123456789") != std::string::npos) {
                throw SyntaxError("LIMIT requires a positive integer", t.pos, {"positive integer"});
            }
            q.limit = static_cast<std::int64_t>(v);
            ++i_;
        }
        if (peek().type != TokenType::End) {
            std::vector<TokenType> expected{TokenType::End};
            if (!q.order_by && !q.limit) expected.push_back(TokenType::Order);
            if (!q.limit) expected.push_back(TokenType::Limit);
            if (q.where && !q.order_by && !q.limit) {
                expected.insert(expected.begin(), {TokenType::And, TokenType::Or});
            }
            if (!q.where && !q.order_by && !q.limit) expected.push_back(TokenType::Where);
            fail(expected);
        }
        return q;
    }

private:
    const Token& peek() const { return i_ < tokens_.size() ? tokens_[i_] : end_; }

    bool accept(TokenType t) {
        if (peek().type == t) {
            ++i_;
            return true;
        }
        return false;
    }

    const Token& expect(TokenType t) {
        if (peek().type != t) fail({t});
        return tokens_[i_++];
    }

    [[noreturn]] void fail(const std::vector<TokenType>& expected) const {
        std::vector<std::string> names;
        for (auto t : expected) names.push_back(describe(t));
        const Token& got = peek();
        std::string msg = "expected ";
        for (std::size_t k = 0; k < names.size(); ++k) {
            if (k) msg += k + 1 == names.size() ? " or " : ", ";
            msg += names[k];
        }
        msg += ", found " + (got.type == TokenType::End ? describe(got.type)
                                                         : "'" + spelling(got) + "'");
        throw SyntaxError(msg, got.pos, std::move(names));
    }

    static std::string spelling(const Token& t) {
        if (t.type == TokenType::String) return "\"" + t.text + "\"";
        return t.text;
    }

    static const std::vector<TokenType>& atom_starts() {
        static const std::vector<TokenType> kStarts{
            TokenType::Not,    TokenType::LParen, TokenType::Any,  TokenType::All,
            TokenType::Ident,  TokenType::Metric, TokenType::String, TokenType::Number,
            TokenType::True,   TokenType::False};
        return kStarts;
    }

    Expr expr() {
        Expr lhs = and_expr();
        while (accept(TokenType::Or)) {
            Expr rhs = and_expr();
            lhs = Expr{Or{std::move(lhs), std::move(rhs)}};
        }
        return lhs;
    }

    Expr and_expr() {
        Expr lhs = unary();
        while (accept(TokenType::And)) {
            Expr rhs = unary();
            lhs = Expr{And{std::move(lhs), std::move(rhs)}};
        }
        return lhs;
    }

    Expr unary() {
        if (accept(TokenType::Not)) return Expr{Not{unary()}};
        return atom();
    }

    Expr atom() {
        const Token& t = peek();
        switch (t.type) {
            case TokenType::LParen: {
                ++i_;
                Expr inner = expr();
                expect(TokenType::RParen);
                return inner;
            }
            case TokenType::Any:
            case TokenType::All: {
                SourcePos pos = t.pos;
                Quantifier q = t.type == TokenType::Any ? Quantifier::Any : Quantifier::All;
                ++i_;
                expect(TokenType::LParen);
                expect(TokenType::Instances);
                expect(TokenType::Comma);
                Expr body = expr();
                expect(TokenType::RParen);
                return Expr{Quantified{q, std::move(body), pos}};
            }
            case TokenType::Ident:
            case TokenType::Metric:
            case TokenType::String:
            case TokenType::Number:
            case TokenType::True:
            case TokenType::False: break;
            default: fail(atom_starts());
        }

        Operand lhs = operand();
        const Token& op = peek();
        if (op.type == TokenType::In || op.type == TokenType::Contains) {
            auto* path = std::get_if<Path>(&lhs);
            if (!path) {
                throw SyntaxError(describe(op.type) + " requires a field path on its left", op.pos,
                                  {"comparison operator"});
            }
            ++i_;
            if (op.type == TokenType::Contains) return Expr{Contains{std::move(*path), literal()}};
            expect(TokenType::LParen);
            Membership m{std::move(*path), {}};
            m.values.push_back(literal());
            while (accept(TokenType::Comma)) m.values.push_back(literal());
            expect(TokenType::RParen);
            return Expr{std::move(m)};
        }
        CmpOp cmp;
        switch (op.type) {
            case TokenType::Eq: cmp = CmpOp::Eq; break;
            case TokenType::Ne: cmp = CmpOp::Ne; break;
            case TokenType::Lt: cmp = CmpOp::Lt; break;
            case TokenType::Le: cmp = CmpOp::Le; break;
            case TokenType::Gt: cmp = CmpOp::Gt; break;
            case TokenType::Ge: cmp = CmpOp::Ge; break;
            default: {
                std::vector<TokenType> expected{TokenType::Eq, TokenType::Ne, TokenType::Lt,
                                                TokenType::Le, TokenType::Gt, TokenType::Ge};
                if (std::holds_alternative<Path>(lhs)) {
                    expected.push_back(TokenType::In);
                    expected.push_back(TokenType::Contains);
                }
                fail(expected);
            }
        }
        ++i_;
        Operand rhs = operand();
        return Expr{Comparison{cmp, std::move(lhs), std::move(rhs)}};
    }

    Operand operand() {
        const Token& t = peek();
        switch (t.type) {
            case TokenType::String:
            case TokenType::Number:
            case TokenType::True:
            case TokenType::False: return literal();
            case TokenType::Ident: return path();
            case TokenType::Metric: return metric();
            default:
                fail({TokenType::Ident, TokenType::Metric, TokenType::String, TokenType::Number,
                      TokenType::True, TokenType::False});
        }
    }

    Literal literal() {
        const Token& t = peek();
        switch (t.type) {
            case TokenType::String: ++i_; return Literal{t.text};
            case TokenType::Number: ++i_; return Literal{t.number};
            case TokenType::True: ++i_; return Literal{true};
            case TokenType::False: ++i_; return Literal{false};
            default:
                fail({TokenType::String, TokenType::Number, TokenType::True, TokenType::False});
        }
    }

    Path path() {
        Path p;
        p.pos = peek().pos;
        p.segments.push_back(expect(TokenType::Ident).text);
        while (accept(TokenType::Dot)) p.segments.push_back(expect(TokenType::Ident).text);
        return p;
    }

    MetricCall metric() {
        MetricCall call;
        call.pos = peek().pos;
        expect(TokenType::Metric);
        expect(TokenType::LParen);
        if (accept(TokenType::RParen)) return call;
        do {
            MetricArg arg;
            arg.key = expect(TokenType::Ident).text;
            expect(TokenType::Eq);
            arg.value = literal();
            call.args.push_back(std::move(arg));
        } while (accept(TokenType::Comma));
        expect(TokenType::RParen);
        return call;
    }

    const std::vector<Token>& tokens_;
    std::size_t i_ = 0;
    Token end_;
};

// ---------------------------------------------------------------------------
// Printer
// ---------------------------------------------------------------------------

std::string quote(const std::string& s) {
    std::string out = "\"";
    for (unsigned char c : s) {
        switch (c) {
            case '"': out += "\\\""; break;
            case '\\': out += "\\\\"; break;
            case '\n': out += "\\n"; break;
            case '\t': out += "\\t"; break;
            case '\r': out += "\\r"; break;
            default:
                if (c < 0x20) {
                    char buf[8];
                    std::snprintf(buf, sizeof buf, "\\u%04x", c);
                    out += buf;
                } else {
                    out += static_cast<char>(c);
                }
        }
    }
    out += '"';
    return out;
}

std::string format_number(double v) {
    char buf[64];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, ptr);
}

constexpr int kPrecOr = 1;
constexpr int kPrecAnd = 2;
constexpr int kPrecNot = 3;

std::string print(const Expr& e, int parent_prec, bool right_child);

std::string print_binary(const Expr& lhs, const Expr& rhs, const char* op, int prec, int parent_prec,
                         bool right_child) {
    std::string s = print(lhs, prec, false) + " " + op + " " + print(rhs, prec, true);
    if (parent_prec > prec || (parent_prec == prec && right_child)) return "(" + s + ")";
    return s;
}

std::string print(const Expr& e, int parent_prec, bool right_child) {
    return std::visit(
        [&](const auto& n) -> std::string {
            using T = std::decay_t<decltype(n)>;
            if constexpr (std::is_same_v<T, Or>) {
                return print_binary(*n.lhs, *n.rhs, "OR", kPrecOr, parent_prec, right_child);
            } else if constexpr (std::is_same_v<T, And>) {
                return print_binary(*n.lhs, *n.rhs, "AND", kPrecAnd, parent_prec, right_child);
            } else if constexpr (std::is_same_v<T, Not>) {
                return "NOT " + print(*n.operand, kPrecNot, false);
            } else if constexpr (std::is_same_v<T, Comparison>) {
                return pretty_print(n.lhs) + " " + to_string(n.op) + " " + pretty_print(n.rhs);
            } else if constexpr (std::is_same_v<T, Membership>) {
                std::string s = n.path.dotted() + " IN (";
                for (std::size_t i = 0; i < n.values.size(); ++i) {
                    if (i) s += ", ";
                    s += pretty_print(n.values[i]);
                }
                return s + ")";
            } else if constexpr (std::is_same_v<T, Contains>) {
                return n.path.dotted() + " CONTAINS " + pretty_print(n.value);
            } else {
                return std::string(n.quantifier == Quantifier::Any ? "ANY" : "ALL") +
                       "(INSTANCES, " + print(*n.body, 0, false) + ")";
            }
        },
        e.node);
}

}  // namespace

Query parse(const std::vector<Token>& tokens) { return Parser(tokens).query(); }

Query parse(std::string_view text) { return parse(tokenize(text)); }

std::string pretty_print(const Literal& l) {
    return std::visit(
        [](const auto& v) -> std::string {
            using T = std::decay_t<decltype(v)>;
            if constexpr (std::is_same_v<T, std::string>) {
                return quote(v);
            } else if constexpr (std::is_same_v<T, double>) {
                return format_number(v);
            } else {
                return v ? "TRUE" : "FALSE";
            }
        },
        l.value);
}

std::string pretty_print(const Operand& o) {
    return std::visit(
        [](const auto& v) -> std::string {
            using T = std::decay_t<decltype(v)>;
            if constexpr (std::is_same_v<T, Literal>) {
                return pretty_print(v);
            } else if constexpr (std::is_same_v<T, Path>) {
                return v.dotted();
            } else {
                std::string s = "metric(";
                for (std::size_t i = 0; i < v.args.size(); ++i) {
                    if (i) s += ", ";
                    s += v.args[i].key + "=" + pretty_print(v.args[i].value);
                }
                return s + ")";
            }
        },
        o);
}

std::string pretty_print(const Expr& e) { return print(e, 0, false); }

std::string pretty_print(const Query& q) {
    std::string s = q.target == Target::Models ? "FIND MODELS" : "FIND DATASETS";
    if (q.where) s += " WHERE " + pretty_print(*q.where);
    if (q.order_by) {
        s += " ORDER BY " + pretty_print(q.order_by->key) + (q.order_by->descending ? " DESC" : " ASC");
    }
    if (q.limit) s += " LIMIT " + std::to_string(*q.limit);
    return s;
}

}  // namespace mz::mql
