#include "mz/mql/evaluator.hpp"

#include "catalog.hpp"
#include "mz/codec.hpp"
#include "mz/mql/parser.hpp"

#include <algorithm>
#include <chrono>
#include <sstream>

namespace mz::mql {

using detail::Value;
using detail::Values;

bool hardware_matches(const HardwareProfile& hw, std::string_view selector) {
    return hw.id == selector || hw.name == selector || to_string(hw.device_class) == selector;
}

std::optional<ResolvedMetric> resolve_metric(const StoreView& store, std::string_view model_id,
                                             const MetricQuery& query,
                                             std::optional<Timestamp> as_of) {
    const DatasetRecord* dataset = nullptr;
    if (query.dataset) {
        const Record* d = store.latest(Kind::Dataset, *query.dataset);
        if (!d) return std::nullopt;
        dataset = &std::get<DatasetRecord>(*d);
    }
    std::optional<ResolvedMetric> best;
    for (const Record* r : store.scan(Kind::Evaluation, ScanFilter{IndexedField::ModelId, std::string(model_id)})) {
        const auto& run = std::get<EvaluationRun>(*r);
        if (dataset && (run.dataset_id.id != dataset->id || run.dataset_id.version != dataset->version)) {
            continue;
        }
        if (as_of && run.executed_at > *as_of) continue;
        if (query.hardware) {
            const Record* hw = store.find(Kind::Hardware, run.hardware_id);
            if (!hw || !hardware_matches(std::get<HardwareProfile>(*hw), *query.hardware)) continue;
        }
        const MetricValue* found = nullptr;
        for (const auto& m : run.metrics) {
            if (m.name == query.name && m.slice == query.slice) {
                found = &m;
                break;
            }
        }
        if (!found) continue;
        // Insertion order is scan order, so >= lets a later insert win a tie.
        if (!best || run.executed_at >= best->run->executed_at) {
            best = ResolvedMetric{found->value, found->higher_is_better, &run};
        }
    }
    return best;
}

namespace {

Scope scope_of(const Record& r) {
    return std::holds_alternative<ModelRecord>(r) ? Scope::Model : Scope::Dataset;
}

MetricQuery metric_query(const MetricCall& call) {
    return MetricQuery{call.string_arg("dataset"), call.string_arg("name").value_or(""),
                       call.string_arg("hardware"), call.string_arg("slice")};
}

Value literal_value(const Literal& l) {
    return std::visit([](const auto& v) { return Value{v}; }, l.value);
}

TriBool compare(const Value& a, CmpOp op, const Value& b) {
    if (a.index() != b.index()) return TriBool::Unknown;
    auto apply = [op](const auto& x, const auto& y) {
        switch (op) {
            case CmpOp::Eq: return x == y;
            case CmpOp::Ne: return x != y;
            case CmpOp::Lt: return x < y;
            case CmpOp::Le: return x <= y;
            case CmpOp::Gt: return x > y;
            case CmpOp::Ge: return x >= y;
        }
        return false;
    };
    return std::visit(
        [&](const auto& x) -> TriBool {
            using T = std::decay_t<decltype(x)>;
            return to_tribool(apply(x, std::get<T>(b)));
        },
        a);
}

// Existential combination: TRUE if any TRUE, else UNKNOWN if any UNKNOWN.
class AnyOf {
public:
    void add(TriBool t) { acc_ = acc_ || t; }
    [[nodiscard]] TriBool result() const { return acc_; }

private:
    TriBool acc_ = TriBool::False;
};

class Evaluator {
public:
    explicit Evaluator(const EvalContext& ctx) : ctx_(ctx) {}

    TriBool eval(const Expr& e, const Record& rec) const {
        return std::visit(
            [&](const auto& n) -> TriBool {
                using T = std::decay_t<decltype(n)>;
                if constexpr (std::is_same_v<T, And>) {
                    TriBool l = eval(*n.lhs, rec);
                    if (l == TriBool::False) return l;
                    return l && eval(*n.rhs, rec);
                } else if constexpr (std::is_same_v<T, Or>) {
                    TriBool l = eval(*n.lhs, rec);
                    if (l == TriBool::True) return l;
                    return l || eval(*n.rhs, rec);
                } else if constexpr (std::is_same_v<T, Not>) {
                    return !eval(*n.operand, rec);
                } else if constexpr (std::is_same_v<T, Comparison>) {
                    Values lhs = operand(n.lhs, rec);
                    Values rhs = operand(n.rhs, rec);
                    AnyOf any;
                    for (const auto& a : lhs) {
                        for (const auto& b : rhs) {
                            any.add(a && b ? compare(*a, n.op, *b) : TriBool::Unknown);
                        }
                    }
                    return any.result();
                } else if constexpr (std::is_same_v<T, Membership>) {
                    AnyOf any;
                    for (const auto& a : path(n.path, rec)) {
                        if (!a) {
                            any.add(TriBool::Unknown);
                            continue;
                        }
                        for (const auto& lit : n.values) any.add(compare(*a, CmpOp::Eq, literal_value(lit)));
                    }
                    return any.result();
                } else if constexpr (std::is_same_v<T, Contains>) {
                    AnyOf any;
                    Value needle = literal_value(n.value);
                    for (const auto& a : path(n.path, rec)) {
                        any.add(a ? compare(*a, CmpOp::Eq, needle) : TriBool::Unknown);
                    }
                    return any.result();
                } else {
                    return quantified(n, rec);
                }
            },
            e.node);
    }

    Values operand(const Operand& o, const Record& rec) const {
        if (const auto* l = std::get_if<Literal>(&o)) return {literal_value(*l)};
        if (const auto* p = std::get_if<Path>(&o)) return path(*p, rec);
        const auto& call = std::get<MetricCall>(o);
        const auto* model = std::get_if<ModelRecord>(&rec);
        if (!model) return {std::nullopt};
        auto m = resolve_metric(ctx_.store, model->id, metric_query(call), ctx_.as_of);
        if (!m) return {std::nullopt};
        return {Value{m->value}};
    }

    Values path(const Path& p, const Record& rec) const {
        Values out;
        std::size_t field = p.binding ? p.binding->field
                                      : detail::find_field(scope_for(rec), p.dotted()).value_or(SIZE_MAX);
        if (field == SIZE_MAX) return {std::nullopt};
        detail::catalog()[field].extract(rec, ctx_.store, out);
        return out;
    }

private:
    static Scope scope_for(const Record& rec) {
        if (std::holds_alternative<DataInstance>(rec)) return Scope::Instance;
        return scope_of(rec);
    }

    void instances_of(const DatasetRecord& ds, std::vector<const Record*>& out) const {
        for (const Record* r : ctx_.store.scan(Kind::Instance, ScanFilter{IndexedField::DatasetId, ds.id})) {
            if (std::get<DataInstance>(*r).dataset_id.version == ds.version) out.push_back(r);
        }
    }

    // ALL over zero instances is TRUE, ANY over zero is FALSE. Under MODELS
    // the instances are those of every trained_on dataset; an empty or
    // unresolvable trained_on contributes UNKNOWN.
    TriBool quantified(const Quantified& q, const Record& rec) const {
        std::vector<const Record*> instances;
        bool missing = false;
        if (const auto* ds = std::get_if<DatasetRecord>(&rec)) {
            instances_of(*ds, instances);
        } else if (const auto* m = std::get_if<ModelRecord>(&rec)) {
            if (m->trained_on.empty()) missing = true;
            for (const auto& ref : m->trained_on) {
                const Record* d = ctx_.store.find(Kind::Dataset, ref.id);
                if (!d || std::get<DatasetRecord>(*d).version != ref.version) {
                    missing = true;
                    continue;
                }
                instances_of(std::get<DatasetRecord>(*d), instances);
            }
        } else {
            return TriBool::Unknown;
        }

        bool all = q.quantifier == Quantifier::All;
        TriBool acc = all ? TriBool::True : TriBool::False;
        if (missing) acc = TriBool::Unknown;
        for (const Record* inst : instances) {
            TriBool t = eval(*q.body, *inst);
            acc = all ? (acc && t) : (acc || t);
            if (all ? acc == TriBool::False : acc == TriBool::True) break;
        }
        return acc;
    }

    const EvalContext& ctx_;
};

// Top-level AND conjuncts.
void conjuncts(const Expr& e, std::vector<const Expr*>& out) {
    if (const auto* a = std::get_if<And>(&e.node)) {
        conjuncts(*a->lhs, out);
        conjuncts(*a->rhs, out);
    } else {
        out.push_back(&e);
    }
}

std::optional<std::string> equality_on(const Expr& e, std::string_view field) {
    const auto* c = std::get_if<Comparison>(&e.node);
    if (!c || c->op != CmpOp::Eq) return std::nullopt;
    auto match = [&](const Operand& a, const Operand& b) -> std::optional<std::string> {
        const auto* p = std::get_if<Path>(&a);
        const auto* l = std::get_if<Literal>(&b);
        if (!p || !l || p->dotted() != field) return std::nullopt;
        if (const auto* s = std::get_if<std::string>(&l->value)) return *s;
        return std::nullopt;
    };
    if (auto v = match(c->lhs, c->rhs)) return v;
    return match(c->rhs, c->lhs);
}

void collect_metrics(const Expr& e, std::vector<const MetricCall*>& out) {
    std::visit(
        [&](const auto& n) {
            using T = std::decay_t<decltype(n)>;
            if constexpr (std::is_same_v<T, And> || std::is_same_v<T, Or>) {
                collect_metrics(*n.lhs, out);
                collect_metrics(*n.rhs, out);
            } else if constexpr (std::is_same_v<T, Not>) {
                collect_metrics(*n.operand, out);
            } else if constexpr (std::is_same_v<T, Comparison>) {
                for (const Operand* o : {&n.lhs, &n.rhs}) {
                    if (const auto* m = std::get_if<MetricCall>(o)) out.push_back(m);
                }
            }
        },
        e.node);
}

std::string scan_description(const ScanPlan& plan) {
    std::string s = "scan " + std::string(kind_name(plan.kind));
    if (!plan.filter) return s + " (full scan)";
    switch (plan.filter->field) {
        case IndexedField::Task: s += " via index task"; break;
        case IndexedField::Name: s += " via index (kind, name)"; break;
        case IndexedField::DatasetId: s += " via index dataset_id"; break;
        case IndexedField::ModelId: s += " via index model_id"; break;
    }
    return s + " = " + pretty_print(Literal{plan.filter->value});
}

std::string describe_metric(const MetricCall& call) {
    auto q = metric_query(call);
    std::string s = pretty_print(Operand{call}) + ": runs of candidate (index model_id)";
    s += " -> dataset name " + pretty_print(Literal{q.dataset.value_or("")}) + " at latest version";
    s += q.hardware ? " -> hardware id/name/device_class = " + pretty_print(Literal{*q.hardware})
                    : std::string(" -> any hardware");
    s += q.slice ? " -> slice = " + pretty_print(Literal{*q.slice}) : std::string(" -> unsliced value");
    s += " -> most recent executed_at; UNKNOWN if no run matches";
    return s;
}

}  // namespace

ScanPlan plan_scan(const TypedQuery& q) {
    ScanPlan plan;
    plan.kind = q.query.target == Target::Models ? Kind::Model : Kind::Dataset;
    if (!q.query.where) return plan;
    std::vector<const Expr*> parts;
    conjuncts(*q.query.where, parts);
    if (plan.kind == Kind::Model) {
        for (const Expr* e : parts) {
            if (auto v = equality_on(*e, "task")) {
                plan.filter = ScanFilter{IndexedField::Task, *v};
                return plan;
            }
        }
    }
    for (const Expr* e : parts) {
        if (auto v = equality_on(*e, "name")) {
            plan.filter = ScanFilter{IndexedField::Name, *v};
            return plan;
        }
    }
    return plan;
}

TriBool evaluate_predicate(const Expr& where, const Record& record, const EvalContext& ctx) {
    return Evaluator(ctx).eval(where, record);
}

QueryResult evaluate(const TypedQuery& tq, const EvalContext& ctx) {
    auto start = std::chrono::steady_clock::now();
    const Query& q = tq.query;
    Evaluator ev(ctx);
    ScanPlan plan = plan_scan(tq);

    QueryResult result;
    for (const Record* rec : ctx.store.scan(plan.kind, plan.filter)) {
        if (!q.where || ev.eval(*q.where, *rec) == TriBool::True) result.records.push_back(rec);
    }

    if (q.order_by) {
        struct Keyed {
            const Record* rec;
            std::optional<Value> key;
        };
        std::vector<Keyed> keyed;
        keyed.reserve(result.records.size());
        for (const Record* rec : result.records) {
            Values v = ev.operand(q.order_by->key, *rec);
            keyed.push_back({rec, v.empty() ? std::nullopt : v.front()});
        }
        bool desc = q.order_by->descending;
        std::stable_sort(keyed.begin(), keyed.end(), [desc](const Keyed& a, const Keyed& b) {
            if (a.key.has_value() != b.key.has_value()) return a.key.has_value();
            if (a.key && *a.key != *b.key) return desc ? *b.key < *a.key : *a.key < *b.key;
            auto na = name_of(*a.rec);
            auto nb = name_of(*b.rec);
            if (na != nb) return na < nb;
            return compare_versions(version_of(*a.rec), version_of(*b.rec)) < 0;
        });
        for (std::size_t i = 0; i < keyed.size(); ++i) result.records[i] = keyed[i].rec;
    }
    if (q.limit && result.records.size() > static_cast<std::size_t>(*q.limit)) {
        result.records.resize(static_cast<std::size_t>(*q.limit));
    }
    result.plan = explain(tq);
    result.elapsed_ms =
        std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
    return result;
}

std::string explain(const TypedQuery& tq) {
    const Query& q = tq.query;
    std::ostringstream out;
    out << (q.target == Target::Models ? "FIND MODELS" : "FIND DATASETS") << "\n";
    out << "  " << scan_description(plan_scan(tq)) << "\n";
    if (q.where) {
        out << "  filter (Kleene; UNKNOWN excludes): " << pretty_print(*q.where) << "\n";
        std::vector<const MetricCall*> metrics;
        collect_metrics(*q.where, metrics);
        if (q.order_by) {
            if (const auto* m = std::get_if<MetricCall>(&q.order_by->key)) metrics.push_back(m);
        }
        for (const auto* m : metrics) out << "    resolve " << describe_metric(*m) << "\n";
    } else if (q.order_by) {
        if (const auto* m = std::get_if<MetricCall>(&q.order_by->key)) {
            out << "    resolve " << describe_metric(*m) << "\n";
        }
    }
    if (q.order_by) {
        out << "  order by " << pretty_print(q.order_by->key)
            << (q.order_by->descending ? " DESC" : " ASC")
            << ", UNKNOWN last, ties by (name, version) ascending\n";
    } else {
        out << "  order: insertion order\n";
    }
    if (q.limit) out << "  limit " << *q.limit << "\n";
    return out.str();
}

Json to_json(const QueryResult& result) {
    Json records = Json::array();
    for (const Record* r : result.records) records.push_back(encode_envelope(*r));
    return Json{{"count", result.records.size()},
                {"elapsed_ms", result.elapsed_ms},
                {"plan", result.plan},
                {"results", std::move(records)}};
}

}  // namespace mz::mql
