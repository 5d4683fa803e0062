#pragma once

#include "mz/mql/analyzer.hpp"
#include "mz/store.hpp"

#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace mz::mql {

enum class MetricPolicy {
    // The matching run with the latest executed_at; ties go to the later insert.
    MostRecent,
};

struct EvalContext {
    const StoreView& store;
    MetricPolicy policy = MetricPolicy::MostRecent;
    // Runs executed after this instant are invisible.
    std::optional<Timestamp> as_of;
};

struct MetricQuery {
    // Dataset name, resolved to its latest version. Unset matches any dataset.
    std::optional<std::string> dataset;
    std::string name;
    // Hardware profile id, name, or device class.
    std::optional<std::string> hardware;
    // Unset matches only unsliced values.
    std::optional<std::string> slice;
};

struct ResolvedMetric {
    double value = 0.0;
    bool higher_is_better = true;
    const EvaluationRun* run = nullptr;
};

bool hardware_matches(const HardwareProfile& hw, std::string_view selector);

std::optional<ResolvedMetric> resolve_metric(const StoreView& store, std::string_view model_id,
                                             const MetricQuery& query,
                                             std::optional<Timestamp> as_of = std::nullopt);

struct ScanPlan {
    Kind kind = Kind::Model;
    std::optional<ScanFilter> filter;
};

// Picks an index from a top-level `task = "..."` or `name = "..."` conjunct.
ScanPlan plan_scan(const TypedQuery& q);

struct QueryResult {
    // Pointers into the StoreView the query was evaluated against.
    std::vector<const Record*> records;
    std::string plan;
    double elapsed_ms = 0.0;
};

// Predicate over a ModelRecord or DatasetRecord under Kleene logic.
TriBool evaluate_predicate(const Expr& where, const Record& record, const EvalContext& ctx);

QueryResult evaluate(const TypedQuery& q, const EvalContext& ctx);

// Deterministic, human-readable plan: index usage, filter, metric resolution
// steps, ordering and limit.
std::string explain(const TypedQuery& q);

// {"count", "elapsed_ms", "plan", "results": [envelope...]}
Json to_json(const QueryResult& result);

}  // namespace mz::mql
