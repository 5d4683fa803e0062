#pragma once
// Model composition for multi-task inference pipelines.
//
// A pipeline is a DAG of task nodes. A plan assigns one model to every node.
// Aggregates of a plan:
//   score      = sum_i w_i * accuracy_i           (weights normalized to 1)
//   latency_ms = max over source->sink paths of the summed node latencies
//   memory_mb  = sum of node memory footprints
//
// Plans are ordered by higher score, then lower latency, lower memory, then
// the lexicographic sequence of (name, version, id) in node order. Scores
// within kScoreTolerance (relative) count as equal so that rescaling the
// weights cannot flip a tie through rounding.

#include "mz/store.hpp"

#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace mz {

struct TaskNode {
    std::string id;
    std::string task;
    // Required primary input / output semantic types, when set.
    std::optional<std::string> input_type;
    std::optional<std::string> output_type;
    // MQL predicate over MODELS, e.g. `architecture.family = "transformer"`.
    std::optional<std::string> filter;
    // Dataset name the metrics are resolved against; unset accepts any.
    std::optional<std::string> dataset;

    friend bool operator==(const TaskNode&, const TaskNode&) = default;
};

struct TaskEdge {
    std::string from;
    std::string to;

    friend bool operator==(const TaskEdge&, const TaskEdge&) = default;
};

struct TaskGraph {
    std::vector<TaskNode> nodes;
    std::vector<TaskEdge> edges;

    // Unique ids, edges between known nodes, acyclic, non-empty.
    [[nodiscard]] ValidationReport validate() const;
    // Node indices in topological order; ties keep declaration order.
    [[nodiscard]] std::vector<std::size_t> topological_order() const;
    [[nodiscard]] std::optional<std::size_t> index_of(std::string_view id) const;
};

struct Constraints {
    double latency_budget_ms = 0.0;
    double memory_budget_mb = 0.0;
    // HardwareProfile id or name.
    std::string hardware;
};

struct Objective {
    // Node id -> non-negative weight. Empty means uniform.
    std::map<std::string, double> weights;
};

inline constexpr const char* kAccuracyMetric = "accuracy";
inline constexpr const char* kLatencyMetric = "latency_ms";
inline constexpr const char* kMemoryMetric = "memory_footprint_mb";

struct ModelRef {
    std::string id;
    std::string name;
    std::string version;

    friend bool operator==(const ModelRef&, const ModelRef&) = default;
};

struct Candidate {
    ModelRef model;
    double accuracy = 0.0;
    double latency_ms = 0.0;
    double memory_mb = 0.0;
    // Primary input / output semantic types; edges compare these.
    std::optional<std::string> input_type;
    std::optional<std::string> output_type;

    friend bool operator==(const Candidate&, const Candidate&) = default;
};

struct ExcludedModel {
    ModelRef model;
    std::vector<std::string> missing_metrics;
};

struct CandidateReport {
    std::vector<Candidate> candidates;
    // Models that matched but lack a metric on the requested hardware.
    std::vector<ExcludedModel> excluded;
};

CandidateReport candidates(const TaskNode& node, const HardwareProfile& hardware,
                           const StoreView& store);

struct CompatibilityViolation {
    TaskEdge edge;
    std::optional<std::string> produced;
    std::optional<std::string> expected;
};

// One violation per edge whose producer output type differs from the consumer
// input type. `assignment` maps node id -> candidate.
std::vector<CompatibilityViolation> check_compatibility(
    const TaskGraph& graph, const std::map<std::string, Candidate>& assignment);

// Store-independent instance.
struct CompositionProblem {
    TaskGraph graph;
    // Parallel to graph.nodes.
    std::vector<std::vector<Candidate>> candidates;
    // Parallel to graph.nodes. normalize_weights() produces these.
    std::vector<double> weights;
    double latency_budget_ms = 0.0;
    double memory_budget_mb = 0.0;
};

std::vector<double> normalize_weights(const TaskGraph& graph, const Objective& objective);

inline constexpr double kScoreTolerance = 1e-12;
inline constexpr std::size_t kExactMaxNodes = 12;
inline constexpr std::size_t kExactMaxCandidates = 16;
inline constexpr std::size_t kBruteForceLimit = 1'000'000;

enum class SearchMode { Exact, Heuristic };

struct PlanAggregate {
    double score = 0.0;
    double latency_ms = 0.0;
    double memory_mb = 0.0;

    friend bool operator==(const PlanAggregate&, const PlanAggregate&) = default;
};

struct CompositionPlan {
    bool feasible = false;
    SearchMode mode = SearchMode::Exact;
    // Parallel to graph.nodes when feasible.
    std::vector<std::string> nodes;
    std::vector<Candidate> assignment;
    PlanAggregate aggregate;
    // Binding constraints when infeasible: "latency", "memory",
    // "compatibility", "no_candidates:<node>".
    std::vector<std::string> binding;
    // Models skipped for missing metrics, keyed by node id.
    std::map<std::string, std::vector<ExcludedModel>> excluded;

    // Same feasibility and same models per node.
    [[nodiscard]] bool same_plan(const CompositionPlan& other) const;
};

// Aggregate of a full choice vector (index per node).
PlanAggregate aggregate(const CompositionProblem& p, const std::vector<std::size_t>& choice);

// True when `a` ranks strictly before `b`.
bool better(const CompositionProblem& p, const PlanAggregate& a, const std::vector<std::size_t>& ca,
            const PlanAggregate& b, const std::vector<std::size_t>& cb);

// Branch and bound within the exact limits, greedy beyond them.
CompositionPlan optimize(const CompositionProblem& p);
// Exhaustive enumeration. Throws std::length_error above kBruteForceLimit.
CompositionPlan brute_force(const CompositionProblem& p);
// Budget-free non-dominated plans on (score max, latency min, memory min),
// sorted by descending score then the plan order.
std::vector<CompositionPlan> pareto(const CompositionProblem& p);

// Builds the instance from the store. Throws ValidationError for an invalid
// graph, unknown hardware, non-positive budgets or bad weights, and
// mql::QueryError for an invalid node filter.
CompositionProblem build_problem(const TaskGraph& graph, const Constraints& constraints,
                                 const Objective& objective, const StoreView& store,
                                 std::map<std::string, std::vector<ExcludedModel>>* excluded = nullptr);

CompositionPlan optimize(const TaskGraph& graph, const Constraints& constraints,
                         const Objective& objective, const StoreView& store);
CompositionPlan brute_force(const TaskGraph& graph, const Constraints& constraints,
                            const Objective& objective, const StoreView& store);
std::vector<CompositionPlan> pareto(const TaskGraph& graph, const std::string& hardware,
                                    const StoreView& store, const Objective& objective = {});

// Request document:
// {"nodes": [{"id", "task", "input_type"?, "output_type"?, "filter"?, "dataset"?}],
//  "edges": [{"from", "to"}] or [[from, to]],
//  "budgets": {"latency_ms", "memory_mb"}, "hardware": "...", "weights": {node: w}}
struct CompositionRequest {
    TaskGraph graph;
    Constraints constraints;
    Objective objective;
};

CompositionRequest parse_composition_request(const Json& j);
Json to_json(const TaskGraph& graph);
Json to_json(const CompositionPlan& plan);

}  // namespace mz
