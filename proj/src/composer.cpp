#include "mz/composer.hpp"

#include "mz/mql/evaluator.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <set>
#include <stdexcept>

namespace mz {

namespace {

constexpr std::size_t kUnassigned = std::numeric_limits<std::size_t>::max();
constexpr double kInf = std::numeric_limits<double>::infinity();

// Slack for bounds, which are summed in a different order than the leaf
// aggregate and may differ from it in the last bits.
double above(double budget) { return budget + 1e-9 * std::max(1.0, std::abs(budget)); }

bool scores_equal(double a, double b) {
    return std::abs(a - b) <= kScoreTolerance * std::max({1.0, std::abs(a), std::abs(b)});
}

bool compatible(const Candidate& producer, const Candidate& consumer) {
    return producer.output_type && consumer.input_type && *producer.output_type == *consumer.input_type;
}

// Predecessor node indices per node.
std::vector<std::vector<std::size_t>> predecessors(const TaskGraph& g) {
    std::vector<std::vector<std::size_t>> preds(g.nodes.size());
    for (const auto& e : g.edges) {
        auto u = g.index_of(e.from);
        auto v = g.index_of(e.to);
        if (u && v) preds[*v].push_back(*u);
    }
    return preds;
}

ValidationError invalid(std::string path, std::string reason) {
    ValidationReport r;
    r.violations.push_back({std::move(path), std::move(reason)});
    return ValidationError(std::move(r));
}

std::optional<std::string> primary_type(const std::vector<IOSpec>& sig) {
    if (sig.empty()) return std::nullopt;
    return sig.front().semantic_type;
}

ModelRef ref_of(const ModelRecord& m) { return ModelRef{m.id, m.name, m.version}; }

// Shared search state for branch and bound and the infeasibility probes.
class Search {
public:
    Search(const CompositionProblem& p, double latency_budget, double memory_budget)
        : p_(p),
          lat_budget_(latency_budget),
          mem_budget_(memory_budget),
          n_(p.graph.nodes.size()),
          order_(p.graph.topological_order()),
          preds_(predecessors(p.graph)),
          choice_(n_, kUnassigned) {
        min_lat_.resize(n_);
        min_mem_.resize(n_);
        max_acc_.resize(n_);
        for (std::size_t i = 0; i < n_; ++i) {
            min_lat_[i] = min_mem_[i] = kInf;
            max_acc_[i] = -kInf;
            for (const auto& c : p.candidates[i]) {
                min_lat_[i] = std::min(min_lat_[i], c.latency_ms);
                min_mem_[i] = std::min(min_mem_[i], c.memory_mb);
                max_acc_[i] = std::max(max_acc_[i], c.accuracy);
            }
        }
        // Suffix sums over the topological order for the remaining-node bounds.
        rest_mem_.assign(n_ + 1, 0.0);
        rest_acc_.assign(n_ + 1, 0.0);
        for (std::size_t k = n_; k-- > 0;) {
            std::size_t v = order_[k];
            rest_mem_[k] = rest_mem_[k + 1] + min_mem_[v];
            rest_acc_[k] = rest_acc_[k + 1] + p.weights[v] * max_acc_[v];
        }
    }

    // Best feasible choice vector, if any.
    std::optional<std::vector<std::size_t>> run() {
        for (std::size_t i = 0; i < n_; ++i) {
            if (p_.candidates[i].empty()) return std::nullopt;
        }
        // Visit candidates by descending accuracy so good incumbents come early.
        ranked_.resize(n_);
        for (std::size_t i = 0; i < n_; ++i) {
            auto& r = ranked_[i];
            r.resize(p_.candidates[i].size());
            std::iota(r.begin(), r.end(), 0);
            std::stable_sort(r.begin(), r.end(), [&](std::size_t a, std::size_t b) {
                return p_.candidates[i][a].accuracy > p_.candidates[i][b].accuracy;
            });
        }
        dfs(0, 0.0, 0.0);
        return best_;
    }

    // Longest path where unassigned nodes take their minimum latency.
    double latency_lower_bound() const {
        std::vector<double> f(n_, 0.0);
        double longest = 0.0;
        for (std::size_t v : order_) {
            double start = 0.0;
            for (std::size_t u : preds_[v]) start = std::max(start, f[u]);
            double lat = choice_[v] == kUnassigned ? min_lat_[v] : p_.candidates[v][choice_[v]].latency_ms;
            f[v] = start + lat;
            longest = std::max(longest, f[v]);
        }
        return longest;
    }

private:
    void dfs(std::size_t depth, double mem, double score) {
        if (depth == n_) {
            PlanAggregate agg = aggregate(p_, choice_);
            if (agg.latency_ms > lat_budget_ || agg.memory_mb > mem_budget_) return;
            if (!best_ || better(p_, agg, choice_, best_agg_, *best_)) {
                best_ = choice_;
                best_agg_ = agg;
            }
            return;
        }
        std::size_t v = order_[depth];
        for (std::size_t c : ranked_[v]) {
            const Candidate& cand = p_.candidates[v][c];
            bool ok = true;
            for (std::size_t u : preds_[v]) {
                if (!compatible(p_.candidates[u][choice_[u]], cand)) {
                    ok = false;
                    break;
                }
            }
            if (!ok) continue;
            double m = mem + cand.memory_mb;
            if (m + rest_mem_[depth + 1] > above(mem_budget_)) continue;
            double s = score + p_.weights[v] * cand.accuracy;
            if (best_) {
                double ub = s + rest_acc_[depth + 1];
                if (ub < best_agg_.score - 1e-9 * std::max(1.0, std::abs(best_agg_.score))) continue;
            }
            choice_[v] = c;
            if (latency_lower_bound() <= above(lat_budget_)) dfs(depth + 1, m, s);
            choice_[v] = kUnassigned;
        }
    }

    const CompositionProblem& p_;
    double lat_budget_;
    double mem_budget_;
    std::size_t n_;
    std::vector<std::size_t> order_;
    std::vector<std::vector<std::size_t>> preds_;
    std::vector<std::size_t> choice_;
    std::vector<double> min_lat_, min_mem_, max_acc_;
    std::vector<double> rest_mem_, rest_acc_;
    std::vector<std::vector<std::size_t>> ranked_;
    std::optional<std::vector<std::size_t>> best_;
    PlanAggregate best_agg_;
};

CompositionPlan make_plan(const CompositionProblem& p, const std::vector<std::size_t>& choice,
                          SearchMode mode) {
    CompositionPlan plan;
    plan.feasible = true;
    plan.mode = mode;
    for (std::size_t i = 0; i < p.graph.nodes.size(); ++i) {
        plan.nodes.push_back(p.graph.nodes[i].id);
        plan.assignment.push_back(p.candidates[i][choice[i]]);
    }
    plan.aggregate = aggregate(p, choice);
    return plan;
}

// Which constraints make the instance infeasible.
std::vector<std::string> diagnose(const CompositionProblem& p) {
    std::vector<std::string> binding;
    for (std::size_t i = 0; i < p.graph.nodes.size(); ++i) {
        if (p.candidates[i].empty()) binding.push_back("no_candidates:" + p.graph.nodes[i].id);
    }
    if (!binding.empty()) return binding;

    Search unbounded(p, kInf, kInf);
    double min_latency = unbounded.latency_lower_bound();
    double min_memory = 0.0;
    for (const auto& cands : p.candidates) {
        double m = kInf;
        for (const auto& c : cands) m = std::min(m, c.memory_mb);
        min_memory += m;
    }
    if (min_latency > p.latency_budget_ms) binding.push_back("latency");
    if (min_memory > p.memory_budget_mb) binding.push_back("memory");
    if (!binding.empty()) return binding;

    if (!unbounded.run()) return {"compatibility"};
    bool latency_alone = Search(p, p.latency_budget_ms, kInf).run().has_value();
    bool memory_alone = Search(p, kInf, p.memory_budget_mb).run().has_value();
    if (!latency_alone) binding.push_back("latency");
    if (!memory_alone) binding.push_back("memory");
    if (binding.empty()) binding = {"latency", "memory"};
    return binding;
}

CompositionPlan infeasible(const CompositionProblem& p, SearchMode mode) {
    CompositionPlan plan;
    plan.mode = mode;
    plan.binding = diagnose(p);
    return plan;
}

// Topological walk taking, per node, the compatible candidate with the best
// accuracy per millisecond that keeps both budget lower bounds satisfiable.
CompositionPlan greedy(const CompositionProblem& p) {
    std::size_t n = p.graph.nodes.size();
    auto order = p.graph.topological_order();
    auto preds = predecessors(p.graph);
    std::vector<std::size_t> choice(n, kUnassigned);
    std::vector<double> min_mem(n, kInf), min_lat(n, kInf);
    for (std::size_t i = 0; i < n; ++i) {
        for (const auto& c : p.candidates[i]) {
            min_mem[i] = std::min(min_mem[i], c.memory_mb);
            min_lat[i] = std::min(min_lat[i], c.latency_ms);
        }
    }
    auto latency_bound = [&] {
        std::vector<double> f(n, 0.0);
        double longest = 0.0;
        for (std::size_t v : order) {
            double start = 0.0;
            for (std::size_t u : preds[v]) start = std::max(start, f[u]);
            f[v] = start + (choice[v] == kUnassigned ? min_lat[v] : p.candidates[v][choice[v]].latency_ms);
            longest = std::max(longest, f[v]);
        }
        return longest;
    };
    double mem = 0.0;
    for (std::size_t k = 0; k < n; ++k) {
        std::size_t v = order[k];
        double rest = 0.0;
        for (std::size_t j = k + 1; j < n; ++j) rest += min_mem[order[j]];
        std::size_t pick = kUnassigned;
        double pick_ratio = -kInf;
        for (std::size_t c = 0; c < p.candidates[v].size(); ++c) {
            const auto& cand = p.candidates[v][c];
            bool ok = std::all_of(preds[v].begin(), preds[v].end(), [&](std::size_t u) {
                return compatible(p.candidates[u][choice[u]], cand);
            });
            if (!ok || mem + cand.memory_mb + rest > p.memory_budget_mb) continue;
            choice[v] = c;
            bool fits = latency_bound() <= p.latency_budget_ms;
            choice[v] = kUnassigned;
            if (!fits) continue;
            double ratio = cand.accuracy / std::max(cand.latency_ms, 1e-9);
            if (ratio > pick_ratio) {
                pick_ratio = ratio;
                pick = c;
            }
        }
        if (pick == kUnassigned) return infeasible(p, SearchMode::Heuristic);
        choice[v] = pick;
        mem += p.candidates[v][pick].memory_mb;
    }
    auto plan = make_plan(p, choice, SearchMode::Heuristic);
    if (plan.aggregate.latency_ms > p.latency_budget_ms || plan.aggregate.memory_mb > p.memory_budget_mb) {
        return infeasible(p, SearchMode::Heuristic);
    }
    return plan;
}

bool dominates(const PlanAggregate& a, const PlanAggregate& b) {
    bool no_worse = a.score >= b.score && a.latency_ms <= b.latency_ms && a.memory_mb <= b.memory_mb;
    bool strictly = a.score > b.score || a.latency_ms < b.latency_ms || a.memory_mb < b.memory_mb;
    return no_worse && strictly;
}

const Json& require(const Json& j, const char* key, const std::string& path) {
    if (!j.is_object() || !j.contains(key)) throw invalid(path + "." + key, "required");
    return j.at(key);
}

std::string require_string(const Json& j, const char* key, const std::string& path) {
    const Json& v = require(j, key, path);
    if (!v.is_string()) throw invalid(path + "." + key, "must be a string");
    return v.get<std::string>();
}

std::optional<std::string> optional_string(const Json& j, const char* key, const std::string& path) {
    if (!j.contains(key) || j.at(key).is_null()) return std::nullopt;
    if (!j.at(key).is_string()) throw invalid(path + "." + key, "must be a string");
    return j.at(key).get<std::string>();
}

double require_number(const Json& j, const char* key, const std::string& path) {
    const Json& v = require(j, key, path);
    if (!v.is_number()) throw invalid(path + "." + key, "must be a number");
    return v.get<double>();
}

Json candidate_json(const Candidate& c) {
    Json j{{"id", c.model.id},
           {"name", c.model.name},
           {"version", c.model.version},
           {"accuracy", c.accuracy},
           {"latency_ms", c.latency_ms},
           {"memory_mb", c.memory_mb}};
    if (c.input_type) j["input_type"] = *c.input_type;
    if (c.output_type) j["output_type"] = *c.output_type;
    return j;
}

}  // namespace

// ---------------------------------------------------------------------------
// Graph
// ---------------------------------------------------------------------------

std::optional<std::size_t> TaskGraph::index_of(std::string_view id) const {
    for (std::size_t i = 0; i < nodes.size(); ++i) {
        if (nodes[i].id == id) return i;
    }
    return std::nullopt;
}

ValidationReport TaskGraph::validate() const {
    ValidationReport r;
    if (nodes.empty()) r.violations.push_back({"nodes", "must not be empty"});
    std::set<std::string> ids;
    for (std::size_t i = 0; i < nodes.size(); ++i) {
        std::string p = "nodes[" + std::to_string(i) + "]";
        if (nodes[i].id.empty()) r.violations.push_back({p + ".id", "must not be empty"});
        if (nodes[i].task.empty()) r.violations.push_back({p + ".task", "must not be empty"});
        if (!ids.insert(nodes[i].id).second) r.violations.push_back({p + ".id", "duplicate node id"});
    }
    std::set<std::pair<std::string, std::string>> seen;
    for (std::size_t i = 0; i < edges.size(); ++i) {
        std::string p = "edges[" + std::to_string(i) + "]";
        if (!ids.count(edges[i].from)) r.violations.push_back({p + ".from", "unknown node"});
        if (!ids.count(edges[i].to)) r.violations.push_back({p + ".to", "unknown node"});
        if (edges[i].from == edges[i].to) r.violations.push_back({p, "self loop"});
        if (!seen.emplace(edges[i].from, edges[i].to).second) r.violations.push_back({p, "duplicate edge"});
    }
    if (r.ok() && topological_order().size() != nodes.size()) {
        r.violations.push_back({"edges", "graph contains a cycle"});
    }
    return r;
}

std::vector<std::size_t> TaskGraph::topological_order() const {
    std::vector<std::size_t> indegree(nodes.size(), 0);
    std::vector<std::vector<std::size_t>> succ(nodes.size());
    for (const auto& e : edges) {
        auto u = index_of(e.from);
        auto v = index_of(e.to);
        if (!u || !v) continue;
        succ[*u].push_back(*v);
        ++indegree[*v];
    }
    std::set<std::size_t> ready;
    for (std::size_t i = 0; i < nodes.size(); ++i) {
        if (indegree[i] == 0) ready.insert(i);
    }
    std::vector<std::size_t> order;
    while (!ready.empty()) {
        std::size_t v = *ready.begin();
        ready.erase(ready.begin());
        order.push_back(v);
        for (std::size_t w : succ[v]) {
            if (--indegree[w] == 0) ready.insert(w);
        }
    }
    return order;
}

// ---------------------------------------------------------------------------
// Candidates and compatibility
// ---------------------------------------------------------------------------

CandidateReport candidates(const TaskNode& node, const HardwareProfile& hardware,
                           const StoreView& store) {
    std::optional<mql::TypedQuery> filter;
    if (node.filter) filter = mql::analyze("FIND MODELS WHERE " + *node.filter);
    mql::EvalContext ctx{store, mql::MetricPolicy::MostRecent, std::nullopt};

    CandidateReport report;
    for (const Record* r : store.scan(Kind::Model, ScanFilter{IndexedField::Task, node.task})) {
        const auto& m = std::get<ModelRecord>(*r);
        auto in = primary_type(m.input_signature);
        auto out = primary_type(m.output_signature);
        if (node.input_type && in != node.input_type) continue;
        if (node.output_type && out != node.output_type) continue;
        if (filter && mql::evaluate_predicate(*filter->query.where, *r, ctx) != mql::TriBool::True) continue;

        Candidate c{ref_of(m), 0.0, 0.0, 0.0, in, out};
        std::vector<std::string> missing;
        for (auto [metric, slot] : {std::pair{kAccuracyMetric, &c.accuracy},
                                    std::pair{kLatencyMetric, &c.latency_ms},
                                    std::pair{kMemoryMetric, &c.memory_mb}}) {
            auto v = mql::resolve_metric(store, m.id,
                                         mql::MetricQuery{node.dataset, metric, hardware.id, std::nullopt});
            if (v) {
                *slot = v->value;
            } else {
                missing.emplace_back(metric);
            }
        }
        if (missing.empty()) {
            report.candidates.push_back(std::move(c));
        } else {
            report.excluded.push_back({ref_of(m), std::move(missing)});
        }
    }
    return report;
}

std::vector<CompatibilityViolation> check_compatibility(
    const TaskGraph& graph, const std::map<std::string, Candidate>& assignment) {
    std::vector<CompatibilityViolation> out;
    for (const auto& e : graph.edges) {
        auto u = assignment.find(e.from);
        auto v = assignment.find(e.to);
        if (u == assignment.end() || v == assignment.end()) continue;
        if (!compatible(u->second, v->second)) {
            out.push_back({e, u->second.output_type, v->second.input_type});
        }
    }
    return out;
}

// ---------------------------------------------------------------------------
// Aggregates and ordering
// ---------------------------------------------------------------------------

std::vector<double> normalize_weights(const TaskGraph& graph, const Objective& objective) {
    std::size_t n = graph.nodes.size();
    if (objective.weights.empty()) return std::vector<double>(n, n ? 1.0 / static_cast<double>(n) : 0.0);
    std::vector<double> w(n, 0.0);
    for (const auto& [node, weight] : objective.weights) {
        auto idx = graph.index_of(node);
        if (!idx) throw invalid("weights." + node, "unknown node");
        if (!std::isfinite(weight) || weight < 0) throw invalid("weights." + node, "must be a finite non-negative number");
        w[*idx] = weight;
    }
    double sum = 0.0;
    for (double x : w) sum += x;
    if (!(sum > 0)) throw invalid("weights", "must not all be zero");
    for (double& x : w) x /= sum;
    return w;
}

PlanAggregate aggregate(const CompositionProblem& p, const std::vector<std::size_t>& choice) {
    PlanAggregate a;
    std::size_t n = p.graph.nodes.size();
    auto preds = predecessors(p.graph);
    std::vector<double> finish(n, 0.0);
    for (std::size_t v : p.graph.topological_order()) {
        double start = 0.0;
        for (std::size_t u : preds[v]) start = std::max(start, finish[u]);
        finish[v] = start + p.candidates[v][choice[v]].latency_ms;
        a.latency_ms = std::max(a.latency_ms, finish[v]);
    }
    for (std::size_t i = 0; i < n; ++i) {
        const auto& c = p.candidates[i][choice[i]];
        a.score += p.weights[i] * c.accuracy;
        a.memory_mb += c.memory_mb;
    }
    return a;
}

bool better(const CompositionProblem& p, const PlanAggregate& a, const std::vector<std::size_t>& ca,
            const PlanAggregate& b, const std::vector<std::size_t>& cb) {
    if (!scores_equal(a.score, b.score)) return a.score > b.score;
    if (a.latency_ms != b.latency_ms) return a.latency_ms < b.latency_ms;
    if (a.memory_mb != b.memory_mb) return a.memory_mb < b.memory_mb;
    for (std::size_t i = 0; i < ca.size(); ++i) {
        const auto& x = p.candidates[i][ca[i]].model;
        const auto& y = p.candidates[i][cb[i]].model;
        auto kx = std::tie(x.name, x.version, x.id);
        auto ky = std::tie(y.name, y.version, y.id);
        if (kx != ky) return kx < ky;
    }
    return false;
}

bool CompositionPlan::same_plan(const CompositionPlan& other) const {
    if (feasible != other.feasible || nodes != other.nodes) return false;
    if (assignment.size() != other.assignment.size()) return false;
    for (std::size_t i = 0; i < assignment.size(); ++i) {
        if (!(assignment[i].model == other.assignment[i].model)) return false;
    }
    return true;
}

// ---------------------------------------------------------------------------
// Solvers
// ---------------------------------------------------------------------------

CompositionPlan optimize(const CompositionProblem& p) {
    std::size_t widest = 0;
    for (const auto& c : p.candidates) widest = std::max(widest, c.size());
    if (p.graph.nodes.size() > kExactMaxNodes || widest > kExactMaxCandidates) return greedy(p);
    auto best = Search(p, p.latency_budget_ms, p.memory_budget_mb).run();
    if (!best) return infeasible(p, SearchMode::Exact);
    return make_plan(p, *best, SearchMode::Exact);
}

CompositionPlan brute_force(const CompositionProblem& p) {
    std::size_t n = p.graph.nodes.size();
    double total = 1.0;
    for (const auto& c : p.candidates) total *= static_cast<double>(c.size());
    if (total > static_cast<double>(kBruteForceLimit)) {
        throw std::length_error("brute force limited to " + std::to_string(kBruteForceLimit) + " assignments");
    }
    std::optional<std::vector<std::size_t>> best;
    PlanAggregate best_agg;
    if (total > 0) {
        std::vector<std::size_t> choice(n, 0);
        auto preds = predecessors(p.graph);
        auto all_compatible = [&] {
            for (std::size_t v = 0; v < n; ++v) {
                for (std::size_t u : preds[v]) {
                    if (!compatible(p.candidates[u][choice[u]], p.candidates[v][choice[v]])) return false;
                }
            }
            return true;
        };
        while (true) {
            if (all_compatible()) {
                PlanAggregate agg = aggregate(p, choice);
                if (agg.latency_ms <= p.latency_budget_ms && agg.memory_mb <= p.memory_budget_mb &&
                    (!best || better(p, agg, choice, best_agg, *best))) {
                    best = choice;
                    best_agg = agg;
                }
            }
            std::size_t i = 0;
            while (i < n && ++choice[i] == p.candidates[i].size()) choice[i++] = 0;
            if (i == n) break;
        }
    }
    if (!best) return infeasible(p, SearchMode::Exact);
    return make_plan(p, *best, SearchMode::Exact);
}

std::vector<CompositionPlan> pareto(const CompositionProblem& p) {
    std::size_t n = p.graph.nodes.size();
    for (const auto& c : p.candidates) {
        if (c.empty()) return {};
    }
    auto order = p.graph.topological_order();
    auto preds = predecessors(p.graph);
    Search bounds(p, kInf, kInf);

    struct Point {
        PlanAggregate agg;
        std::vector<std::size_t> choice;
    };
    std::vector<Point> frontier;
    std::vector<std::size_t> choice(n, kUnassigned);

    std::vector<double> min_mem(n, kInf), min_lat(n, kInf), max_acc(n, -kInf);
    for (std::size_t i = 0; i < n; ++i) {
        for (const auto& c : p.candidates[i]) {
            min_mem[i] = std::min(min_mem[i], c.memory_mb);
            min_lat[i] = std::min(min_lat[i], c.latency_ms);
            max_acc[i] = std::max(max_acc[i], c.accuracy);
        }
    }
    auto optimistic = [&] {
        PlanAggregate o;
        std::vector<double> f(n, 0.0);
        for (std::size_t v : order) {
            double start = 0.0;
            for (std::size_t u : preds[v]) start = std::max(start, f[u]);
            bool set = choice[v] != kUnassigned;
            f[v] = start + (set ? p.candidates[v][choice[v]].latency_ms : min_lat[v]);
            o.latency_ms = std::max(o.latency_ms, f[v]);
        }
        for (std::size_t i = 0; i < n; ++i) {
            bool set = choice[i] != kUnassigned;
            o.score += p.weights[i] * (set ? p.candidates[i][choice[i]].accuracy : max_acc[i]);
            o.memory_mb += set ? p.candidates[i][choice[i]].memory_mb : min_mem[i];
        }
        return o;
    };
    // A frontier point clearly better on every axis than the optimistic
    // completion dominates every completion.
    auto hopeless = [&](const PlanAggregate& o) {
        for (const auto& pt : frontier) {
            if (pt.agg.score > above(o.score) && above(pt.agg.latency_ms) < o.latency_ms &&
                above(pt.agg.memory_mb) < o.memory_mb) {
                return true;
            }
        }
        return false;
    };

    auto dfs = [&](auto&& self, std::size_t depth) -> void {
        if (depth == n) {
            PlanAggregate agg = aggregate(p, choice);
            for (const auto& pt : frontier) {
                if (dominates(pt.agg, agg)) return;
            }
            std::erase_if(frontier, [&](const Point& pt) { return dominates(agg, pt.agg); });
            frontier.push_back({agg, choice});
            return;
        }
        std::size_t v = order[depth];
        for (std::size_t c = 0; c < p.candidates[v].size(); ++c) {
            bool ok = std::all_of(preds[v].begin(), preds[v].end(), [&](std::size_t u) {
                return compatible(p.candidates[u][choice[u]], p.candidates[v][c]);
            });
            if (!ok) continue;
            choice[v] = c;
            if (!hopeless(optimistic())) self(self, depth + 1);
            choice[v] = kUnassigned;
        }
    };
    dfs(dfs, 0);

    std::sort(frontier.begin(), frontier.end(), [&](const Point& a, const Point& b) {
        if (a.agg.score != b.agg.score) return a.agg.score > b.agg.score;
        return better(p, a.agg, a.choice, b.agg, b.choice);
    });
    std::vector<CompositionPlan> out;
    for (const auto& pt : frontier) out.push_back(make_plan(p, pt.choice, SearchMode::Exact));
    return out;
}

// ---------------------------------------------------------------------------
// Store-backed entry points
// ---------------------------------------------------------------------------

CompositionProblem build_problem(const TaskGraph& graph, const Constraints& constraints,
                                 const Objective& objective, const StoreView& store,
                                 std::map<std::string, std::vector<ExcludedModel>>* excluded) {
    if (auto r = graph.validate(); !r.ok()) throw ValidationError(std::move(r));
    if (!(constraints.latency_budget_ms > 0)) throw invalid("budgets.latency_ms", "must be positive");
    if (!(constraints.memory_budget_mb > 0)) throw invalid("budgets.memory_mb", "must be positive");

    const Record* hw = store.find(Kind::Hardware, constraints.hardware);
    if (!hw) {
        auto by_name = store.scan(Kind::Hardware, ScanFilter{IndexedField::Name, constraints.hardware});
        if (!by_name.empty()) hw = by_name.front();
    }
    if (!hw) throw invalid("hardware", "unknown hardware profile '" + constraints.hardware + "'");
    const auto& profile = std::get<HardwareProfile>(*hw);

    CompositionProblem p;
    p.graph = graph;
    p.weights = normalize_weights(graph, objective);
    p.latency_budget_ms = constraints.latency_budget_ms;
    p.memory_budget_mb = constraints.memory_budget_mb;
    for (const auto& node : graph.nodes) {
        auto report = candidates(node, profile, store);
        p.candidates.push_back(std::move(report.candidates));
        if (excluded && !report.excluded.empty()) (*excluded)[node.id] = std::move(report.excluded);
    }
    return p;
}

CompositionPlan optimize(const TaskGraph& graph, const Constraints& constraints,
                         const Objective& objective, const StoreView& store) {
    std::map<std::string, std::vector<ExcludedModel>> excluded;
    auto plan = optimize(build_problem(graph, constraints, objective, store, &excluded));
    plan.excluded = std::move(excluded);
    return plan;
}

CompositionPlan brute_force(const TaskGraph& graph, const Constraints& constraints,
                            const Objective& objective, const StoreView& store) {
    std::map<std::string, std::vector<ExcludedModel>> excluded;
    auto plan = brute_force(build_problem(graph, constraints, objective, store, &excluded));
    plan.excluded = std::move(excluded);
    return plan;
}

std::vector<CompositionPlan> pareto(const TaskGraph& graph, const std::string& hardware,
                                    const StoreView& store, const Objective& objective) {
    Constraints unbounded{kInf, kInf, hardware};
    return pareto(build_problem(graph, unbounded, objective, store));
}

// ---------------------------------------------------------------------------
// JSON
// ---------------------------------------------------------------------------

CompositionRequest parse_composition_request(const Json& j) {
    if (!j.is_object()) throw invalid("$", "must be an object");
    CompositionRequest req;
    const Json& nodes = require(j, "nodes", "$");
    if (!nodes.is_array()) throw invalid("$.nodes", "must be an array");
    for (std::size_t i = 0; i < nodes.size(); ++i) {
        std::string p = "$.nodes[" + std::to_string(i) + "]";
        const Json& n = nodes[i];
        if (!n.is_object()) throw invalid(p, "must be an object");
        req.graph.nodes.push_back(TaskNode{require_string(n, "id", p), require_string(n, "task", p),
                                           optional_string(n, "input_type", p),
                                           optional_string(n, "output_type", p),
                                           optional_string(n, "filter", p), optional_string(n, "dataset", p)});
    }
    if (j.contains("edges")) {
        const Json& edges = j.at("edges");
        if (!edges.is_array()) throw invalid("$.edges", "must be an array");
        for (std::size_t i = 0; i < edges.size(); ++i) {
            std::string p = "$.edges[" + std::to_string(i) + "]";
            const Json& e = edges[i];
            if (e.is_array() && e.size() == 2 && e[0].is_string() && e[1].is_string()) {
                req.graph.edges.push_back({e[0].get<std::string>(), e[1].get<std::string>()});
            } else if (e.is_object()) {
                req.graph.edges.push_back({require_string(e, "from", p), require_string(e, "to", p)});
            } else {
                throw invalid(p, "must be {\"from\", \"to\"} or a [from, to] pair");
            }
        }
    }
    const Json& budgets = require(j, "budgets", "$");
    req.constraints.latency_budget_ms = require_number(budgets, "latency_ms", "$.budgets");
    req.constraints.memory_budget_mb = require_number(budgets, "memory_mb", "$.budgets");
    req.constraints.hardware = require_string(j, "hardware", "$");
    if (j.contains("weights")) {
        const Json& w = j.at("weights");
        if (!w.is_object()) throw invalid("$.weights", "must be an object");
        for (const auto& [node, value] : w.items()) {
            if (!value.is_number()) throw invalid("$.weights." + node, "must be a number");
            req.objective.weights[node] = value.get<double>();
        }
    }
    return req;
}

Json to_json(const TaskGraph& graph) {
    Json nodes = Json::array();
    for (const auto& n : graph.nodes) {
        Json j{{"id", n.id}, {"task", n.task}};
        if (n.input_type) j["input_type"] = *n.input_type;
        if (n.output_type) j["output_type"] = *n.output_type;
        if (n.filter) j["filter"] = *n.filter;
        if (n.dataset) j["dataset"] = *n.dataset;
        nodes.push_back(std::move(j));
    }
    Json edges = Json::array();
    for (const auto& e : graph.edges) edges.push_back({{"from", e.from}, {"to", e.to}});
    return Json{{"nodes", std::move(nodes)}, {"edges", std::move(edges)}};
}

Json to_json(const CompositionPlan& plan) {
    Json j{{"feasible", plan.feasible}, {"mode", plan.mode == SearchMode::Exact ? "EXACT" : "HEURISTIC"}};
    if (plan.feasible) {
        j["aggregate"] = Json{{"score", plan.aggregate.score},
                              {"latency_ms", plan.aggregate.latency_ms},
                              {"memory_mb", plan.aggregate.memory_mb}};
        Json assignment = Json::object();
        for (std::size_t i = 0; i < plan.nodes.size(); ++i) {
            assignment[plan.nodes[i]] = candidate_json(plan.assignment[i]);
        }
        j["assignment"] = std::move(assignment);
    } else {
        j["binding"] = plan.binding;
    }
    Json excluded = Json::object();
    for (const auto& [node, models] : plan.excluded) {
        Json list = Json::array();
        for (const auto& m : models) {
            list.push_back({{"id", m.model.id},
                            {"name", m.model.name},
                            {"version", m.model.version},
                            {"missing_metrics", m.missing_metrics}});
        }
        excluded[node] = std::move(list);
    }
    j["excluded"] = std::move(excluded);
    return j;
}

}  // namespace mz
