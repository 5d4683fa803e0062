#include "mz/mql/lexer.hpp"

#include <array>
#include <cctype>
#include <charconv>
#include <utility>

namespace mz::mql {

namespace {

constexpr std::array<std::pair<std::string_view, TokenType>, 20> kKeywords{{
    {"FIND", TokenType::Find},         {"MODELS", TokenType::Models},
    {"DATASETS", TokenType::Datasets}, {"WHERE", TokenType::Where},
    {"ORDER", TokenType::Order},       {"BY", TokenType::By},
    {"ASC", TokenType::Asc},           {"DESC", TokenType::Desc},
    {"LIMIT", TokenType::Limit},       {"AND", TokenType::And},
    {"OR", TokenType::Or},             {"NOT", TokenType::Not},
    {"IN", TokenType::In},             {"CONTAINS", TokenType::Contains},
    {"ANY", TokenType::Any},           {"ALL", TokenType::All},
    {"INSTANCES", TokenType::Instances}, {"METRIC", TokenType::Metric},
    {"TRUE", TokenType::True},         {"FALSE", TokenType::False},
}};

bool ident_start(char c) { return std::isalpha(static_cast<unsigned char>(c)) || c == '_'; }
bool ident_char(char c) { return std::isalnum(static_cast<unsigned char>(c)) || c == '_'; }
bool digit(char c) { return std::isdigit(static_cast<unsigned char>(c)) != 0; }

void append_utf8(std::string& out, std::uint32_t cp) {
    if (cp < 0x80) {
        out += static_cast<char>(cp);
    } else if (cp < 0x800) {
        out += static_cast<char>(0xC0 | (cp >> 6));
        out += static_cast<char>(0x80 | (cp & 0x3F));
    } else {
        out += static_cast<char>(0xE0 | (cp >> 12));
        out += static_cast<char>(0x80 | ((cp >> 6) & 0x3F));
        out += static_cast<char>(0x80 | (cp & 0x3F));
    }
}

class Lexer {
public:
    explicit Lexer(std::string_view text) : text_(text) {}

    std::vector<Token> run() {
        std::vector<Token> out;
        while (true) {
            skip_space();
            if (at_end()) break;
            out.push_back(next());
        }
        return out;
    }

private:
    [[nodiscard]] bool at_end() const { return i_ >= text_.size(); }
    [[nodiscard]] char peek(std::size_t ahead = 0) const {
        return i_ + ahead < text_.size() ? text_[i_ + ahead] : '\0';
    }

    // Columns count code points, not bytes.
    char advance() {
        char c = text_[i_++];
        if (c == '\n') {
            ++line_;
            col_ = 1;
        } else if ((static_cast<unsigned char>(c) & 0xC0) != 0x80) {
            ++col_;
        }
        return c;
    }

    void skip_space() {
        while (!at_end() && std::isspace(static_cast<unsigned char>(peek()))) advance();
    }

    Token make(TokenType type, SourcePos pos, std::string text = {}) {
        Token t;
        t.type = type;
        t.pos = pos;
        t.text = std::move(text);
        return t;
    }

    Token next() {
        SourcePos pos{line_, col_};
        char c = peek();
        if (c == '"') return string_literal(pos);
        if (digit(c) || ((c == '-' || c == '.') && digit(peek(1))) ||
            (c == '-' && peek(1) == '.' && digit(peek(2)))) {
            return number(pos);
        }
        if (ident_start(c)) return word(pos);
        advance();
        switch (c) {
            case '(': return make(TokenType::LParen, pos, "(");
            case ')': return make(TokenType::RParen, pos, ")");
            case ',': return make(TokenType::Comma, pos, ",");
            case '.': return make(TokenType::Dot, pos, ".");
            case '=': return make(TokenType::Eq, pos, "=");
            case '!':
                if (peek() == '=') {
                    advance();
                    return make(TokenType::Ne, pos, "!=");
                }
                break;
            case '<':
                if (peek() == '=') {
                    advance();
                    return make(TokenType::Le, pos, "<=");
                }
                return make(TokenType::Lt, pos, "<");
            case '>':
                if (peek() == '=') {
                    advance();
                    return make(TokenType::Ge, pos, ">=");
                }
                return make(TokenType::Gt, pos, ">");
            default: break;
        }
        std::string shown = (static_cast<unsigned char>(c) >= 0x20 && static_cast<unsigned char>(c) < 0x7F)
                                ? std::string(1, c)
                                : "\\x" + std::to_string(static_cast<unsigned char>(c));
        throw LexError("illegal character '" + shown + "'", pos);
    }

    Token word(SourcePos pos) {
        std::size_t start = i_;
        while (!at_end() && ident_char(peek())) advance();
        std::string spelling(text_.substr(start, i_ - start));
        std::string upper = spelling;
        for (auto& ch : upper) ch = static_cast<char>(std::toupper(static_cast<unsigned char>(ch)));
        for (const auto& [kw, type] : kKeywords) {
            if (kw == upper) return make(type, pos, upper);
        }
        return make(TokenType::Ident, pos, std::move(spelling));
    }

    Token number(SourcePos pos) {
        std::size_t start = i_;
        if (peek() == '-') advance();
        while (digit(peek())) advance();
        if (peek() == '.' && digit(peek(1))) {
            advance();
            while (digit(peek())) advance();
        }
        if ((peek() == 'e' || peek() == 'E') &&
            (digit(peek(1)) || ((peek(1) == '+' || peek(1) == '-') && digit(peek(2))))) {
            advance();
            if (peek() == '+' || peek() == '-') advance();
            while (digit(peek())) advance();
        }
        std::string lexeme(text_.substr(start, i_ - start));
        double value = 0.0;
        auto [ptr, ec] = std::from_chars(lexeme.data(), lexeme.data() + lexeme.size(), value);
        if (ec != std::errc() || ptr != lexeme.data() + lexeme.size()) {
            throw LexError("malformed number '" + lexeme + "'", pos);
        }
        if (peek() == '%') {
            advance();
            lexeme += '%';
            value /= 100.0;
        }
        if (ident_start(peek())) {
            throw LexError("malformed number '" + lexeme + peek() + "'", pos);
        }
        Token t = make(TokenType::Number, pos, std::move(lexeme));
        t.number = value;
        return t;
    }

    Token string_literal(SourcePos pos) {
        advance();  // opening quote
        std::string out;
        while (true) {
            if (at_end()) throw LexError("unterminated string", pos);
            char c = advance();
            if (c == '"') break;
            if (c == '\n') throw LexError("unterminated string", pos);
            if (c != '\\') {
                out += c;
                continue;
            }
            if (at_end()) throw LexError("unterminated string", pos);
            SourcePos esc_pos{line_, col_ - 1};
            char e = advance();
            switch (e) {
                case '"': out += '"'; break;
                case '\\': out += '\\'; break;
                case '/': out += '/'; break;
                case 'n': out += '\n'; break;
                case 't': out += '\t'; break;
                case 'r': out += '\r'; break;
                case 'u': {
                    std::uint32_t cp = 0;
                    for (int k = 0; k < 4; ++k) {
                        char h = at_end() ? '\0' : advance();
                        int v = std::isdigit(static_cast<unsigned char>(h)) ? h - '0'
                                : (h >= 'a' && h <= 'f')                    ? h - 'a' + 10
                                : (h >= 'A' && h <= 'F')                    ? h - 'A' + 10
                                                                            : -1;
                        if (v < 0) throw LexError("malformed \\u escape", esc_pos);
                        cp = cp * 16 + static_cast<std::uint32_t>(v);
                    }
                    append_utf8(out, cp);
                    break;
                }
                default: throw LexError(std::string("unknown escape '\\") + e + "'", esc_pos);
            }
        }
        return make(TokenType::String, pos, std::move(out));
    }

    std::string_view text_;
    std::size_t i_ = 0;
    int line_ = 1;
    int col_ = 1;
};

}  // namespace

std::string describe(TokenType t) {
    for (const auto& [kw, type] : kKeywords) {
        if (type == t) return std::string(kw);
    }
    switch (t) {
        case TokenType::Ident: return "identifier";
        case TokenType::String: return "string";
        case TokenType::Number: return "number";
        case TokenType::LParen: return "'('";
        case TokenType::RParen: return "')'";
        case TokenType::Comma: return "','";
        case TokenType::Dot: return "'.'";
        case TokenType::Eq: return "'='";
        case TokenType::Ne: return "'!='";
        case TokenType::Lt: return "'<'";
        case TokenType::Le: return "'<='";
        case TokenType::Gt: return "'>'";
        case TokenType::Ge: return "'>='";
        case TokenType::End: return "end of query";
        default: return "?";
    }
}

std::vector<Token> tokenize(std::string_view text) { return Lexer(text).run(); }

}  // namespace mz::mql
