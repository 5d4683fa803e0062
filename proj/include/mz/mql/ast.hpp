#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <utility>
#include <variant>
#include <vector>

namespace mz::mql {

// Owning pointer with value semantics (deep copy, deep equality).
template <typename T>
class Box {
public:
    Box(T value) : ptr_(std::make_unique<T>(std::move(value))) {}  // NOLINT(implicit)
    Box(const Box& other) : ptr_(std::make_unique<T>(*other.ptr_)) {}
    Box(Box&&) noexcept = default;
    Box& operator=(const Box& other) {
        if (this != &other) ptr_ = std::make_unique<T>(*other.ptr_);
        return *this;
    }
    Box& operator=(Box&&) noexcept = default;
    ~Box() = default;

    T& operator*() { return *ptr_; }
    const T& operator*() const { return *ptr_; }
    T* operator->() { return ptr_.get(); }
    const T* operator->() const { return ptr_.get(); }

    friend bool operator==(const Box& a, const Box& b) { return *a.ptr_ == *b.ptr_; }

private:
    std::unique_ptr<T> ptr_;
};

// ---------------------------------------------------------------------------
// Three-valued logic
// ---------------------------------------------------------------------------

enum class TriBool : std::uint8_t { False, Unknown, True };

constexpr TriBool operator!(TriBool a) {
    switch (a) {
        case TriBool::True: return TriBool::False;
        case TriBool::False: return TriBool::True;
        default: return TriBool::Unknown;
    }
}

constexpr TriBool operator&&(TriBool a, TriBool b) {
    if (a == TriBool::False || b == TriBool::False) return TriBool::False;
    if (a == TriBool::True && b == TriBool::True) return TriBool::True;
    return TriBool::Unknown;
}

constexpr TriBool operator||(TriBool a, TriBool b) {
    if (a == TriBool::True || b == TriBool::True) return TriBool::True;
    if (a == TriBool::False && b == TriBool::False) return TriBool::False;
    return TriBool::Unknown;
}

constexpr TriBool to_tribool(bool b) { return b ? TriBool::True : TriBool::False; }

const char* to_string(TriBool t);

// ---------------------------------------------------------------------------
// Syntax tree
// ---------------------------------------------------------------------------

enum class Target { Models, Datasets };
enum class CmpOp { Eq, Ne, Lt, Le, Gt, Ge };

const char* to_string(CmpOp op);

enum class ValueKind { String, Number, Bool };

const char* to_string(ValueKind k);

// Attached by the analyzer. Index into the field catalog.
struct FieldBinding {
    std::size_t field = 0;
    ValueKind type = ValueKind::String;
    bool multi = false;
};

struct SourcePos {
    int line = 0;
    int column = 0;
};

struct Literal {
    std::variant<std::string, double, bool> value;

    friend bool operator==(const Literal&, const Literal&) = default;
};

struct Path {
    std::vector<std::string> segments;
    SourcePos pos;
    std::optional<FieldBinding> binding;

    [[nodiscard]] std::string dotted() const;
    // Position and binding are annotations, not structure.
    friend bool operator==(const Path& a, const Path& b) { return a.segments == b.segments; }
};

struct MetricArg {
    std::string key;
    Literal value;

    friend bool operator==(const MetricArg&, const MetricArg&) = default;
};

struct MetricCall {
    std::vector<MetricArg> args;
    SourcePos pos;

    [[nodiscard]] const Literal* arg(std::string_view key) const;
    // String value of `key`, if present and a string.
    [[nodiscard]] std::optional<std::string> string_arg(std::string_view key) const;
    friend bool operator==(const MetricCall& a, const MetricCall& b) { return a.args == b.args; }
};

using Operand = std::variant<Literal, Path, MetricCall>;

struct Expr;

struct Comparison {
    CmpOp op = CmpOp::Eq;
    Operand lhs;
    Operand rhs;

    friend bool operator==(const Comparison&, const Comparison&) = default;
};

struct And {
    Box<Expr> lhs;
    Box<Expr> rhs;

    friend bool operator==(const And&, const And&) = default;
};

struct Or {
    Box<Expr> lhs;
    Box<Expr> rhs;

    friend bool operator==(const Or&, const Or&) = default;
};

struct Not {
    Box<Expr> operand;

    friend bool operator==(const Not&, const Not&) = default;
};

struct Membership {
    Path path;
    std::vector<Literal> values;

    friend bool operator==(const Membership&, const Membership&) = default;
};

struct Contains {
    Path path;
    Literal value;

    friend bool operator==(const Contains&, const Contains&) = default;
};

enum class Quantifier { Any, All };

struct Quantified {
    Quantifier quantifier = Quantifier::Any;
    Box<Expr> body;
    SourcePos pos;

    friend bool operator==(const Quantified& a, const Quantified& b) {
        return a.quantifier == b.quantifier && a.body == b.body;
    }
};

struct Expr {
    std::variant<Comparison, And, Or, Not, Membership, Contains, Quantified> node;

    friend bool operator==(const Expr&, const Expr&) = default;
};

struct OrderBy {
    Operand key;
    bool descending = false;

    friend bool operator==(const OrderBy&, const OrderBy&) = default;
};

struct Query {
    Target target = Target::Models;
    std::optional<Expr> where;
    std::optional<OrderBy> order_by;
    std::optional<std::int64_t> limit;

    friend bool operator==(const Query&, const Query&) = default;
};

}  // namespace mz::mql
