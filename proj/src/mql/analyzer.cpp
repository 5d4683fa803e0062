#include "mz/mql/analyzer.hpp"

#include "catalog.hpp"
#include "mz/mql/parser.hpp"

#include <set>

namespace mz::mql {

namespace {

struct OperandType {
    ValueKind type;
    bool multi;
};

const char* scope_name(Scope s) {
    switch (s) {
        case Scope::Model: return "MODELS";
        case Scope::Dataset: return "DATASETS";
        case Scope::Instance: return "INSTANCES";
    }
    return "?";
}

ValueKind literal_type(const Literal& l) {
    switch (l.value.index()) {
        case 0: return ValueKind::String;
        case 1: return ValueKind::Number;
        default: return ValueKind::Bool;
    }
}

class Analyzer {
public:
    explicit Analyzer(Target target)
        : top_scope_(target == Target::Models ? Scope::Model : Scope::Dataset) {}

    void query(Query& q) {
        if (q.where) expr(*q.where, top_scope_, false);
        if (q.order_by) {
            auto t = operand(q.order_by->key, top_scope_);
            if (t.multi) {
                throw AnalysisError("ORDER BY key must be single-valued",
                                    position(q.order_by->key), describe(q.order_by->key));
            }
        }
    }

private:
    static SourcePos position(const Operand& o) {
        if (const auto* p = std::get_if<Path>(&o)) return p->pos;
        if (const auto* m = std::get_if<MetricCall>(&o)) return m->pos;
        return {};
    }

    static std::string describe(const Operand& o) { return pretty_print(o); }

    void bind(Path& p, Scope scope) {
        auto dotted = p.dotted();
        auto idx = detail::find_field(scope, dotted);
        if (!idx) {
            throw AnalysisError("unknown field '" + dotted + "' for " + scope_name(scope), p.pos,
                                dotted);
        }
        const auto& info = detail::catalog()[*idx].info;
        p.binding = FieldBinding{*idx, info.type, info.multi};
    }

    OperandType operand(Operand& o, Scope scope) {
        if (auto* l = std::get_if<Literal>(&o)) return {literal_type(*l), false};
        if (auto* p = std::get_if<Path>(&o)) {
            bind(*p, scope);
            return {p->binding->type, p->binding->multi};
        }
        metric(std::get<MetricCall>(o), scope);
        return {ValueKind::Number, false};
    }

    void metric(const MetricCall& call, Scope scope) {
        if (scope != Scope::Model) {
            throw AnalysisError(scope == Scope::Instance
                                    ? "metric() is not allowed inside a quantifier"
                                    : "metric() is only available for FIND MODELS",
                                call.pos, "metric");
        }
        static const std::set<std::string> kAllowed{"dataset", "name", "hardware", "slice"};
        std::set<std::string> seen;
        for (const auto& arg : call.args) {
            if (!kAllowed.count(arg.key)) {
                throw AnalysisError("unknown metric argument '" + arg.key + "'", call.pos,
                                    "metric." + arg.key);
            }
            if (!seen.insert(arg.key).second) {
                throw AnalysisError("duplicate metric argument '" + arg.key + "'", call.pos,
                                    "metric." + arg.key);
            }
            if (literal_type(arg.value) != ValueKind::String) {
                throw AnalysisError("type mismatch: metric argument '" + arg.key +
                                        "' must be a string",
                                    call.pos, "metric." + arg.key);
            }
        }
        for (const char* required : {"dataset", "name"}) {
            if (!seen.count(required)) {
                throw AnalysisError(std::string("metric() requires argument '") + required + "'",
                                    call.pos, std::string("metric.") + required);
            }
        }
    }

    void expr(Expr& e, Scope scope, bool in_quantifier) {
        std::visit(
            [&](auto& n) {
                using T = std::decay_t<decltype(n)>;
                if constexpr (std::is_same_v<T, And> || std::is_same_v<T, Or>) {
                    expr(*n.lhs, scope, in_quantifier);
                    expr(*n.rhs, scope, in_quantifier);
                } else if constexpr (std::is_same_v<T, Not>) {
                    expr(*n.operand, scope, in_quantifier);
                } else if constexpr (std::is_same_v<T, Comparison>) {
                    comparison(n, scope);
                } else if constexpr (std::is_same_v<T, Membership>) {
                    bind(n.path, scope);
                    for (const auto& v : n.values) {
                        if (literal_type(v) != n.path.binding->type) {
                            throw AnalysisError(
                                std::string("type mismatch: IN list for ") + to_string(n.path.binding->type) +
                                    " field '" + n.path.dotted() + "' contains a " +
                                    to_string(literal_type(v)),
                                n.path.pos, n.path.dotted());
                        }
                    }
                } else if constexpr (std::is_same_v<T, Contains>) {
                    bind(n.path, scope);
                    if (!n.path.binding->multi) {
                        throw AnalysisError("CONTAINS requires a collection field, '" +
                                                n.path.dotted() + "' is single-valued",
                                            n.path.pos, n.path.dotted());
                    }
                    if (literal_type(n.value) != n.path.binding->type) {
                        throw AnalysisError(std::string("type mismatch: ") + to_string(n.path.binding->type) +
                                                " collection '" + n.path.dotted() + "' CONTAINS " +
                                                to_string(literal_type(n.value)),
                                            n.path.pos, n.path.dotted());
                    }
                } else {
                    if (in_quantifier || scope == Scope::Instance) {
                        throw AnalysisError("quantifier outside legal context (nested quantifier)",
                                            n.pos, "INSTANCES");
                    }
                    expr(*n.body, Scope::Instance, true);
                }
            },
            e.node);
    }

    void comparison(Comparison& c, Scope scope) {
        auto lt = operand(c.lhs, scope);
        auto rt = operand(c.rhs, scope);
        if (lt.type != rt.type) {
            throw AnalysisError(std::string("type mismatch: cannot compare ") + to_string(lt.type) +
                                    " with " + to_string(rt.type),
                                position(std::holds_alternative<Literal>(c.lhs) ? c.rhs : c.lhs),
                                describe(std::holds_alternative<Literal>(c.lhs) ? c.rhs : c.lhs));
        }
        if (lt.type == ValueKind::Bool && c.op != CmpOp::Eq && c.op != CmpOp::Ne) {
            throw AnalysisError(std::string("type mismatch: operator ") + to_string(c.op) +
                                    " is not defined for bool",
                                position(c.lhs), describe(c.lhs));
        }
    }

    Scope top_scope_;
};

}  // namespace

TypedQuery analyze(Query q) {
    Analyzer(q.target).query(q);
    return TypedQuery{std::move(q)};
}

TypedQuery analyze(std::string_view text) { return analyze(parse(text)); }

}  // namespace mz::mql
