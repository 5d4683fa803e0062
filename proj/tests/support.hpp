#pragma once
// Shared test helpers and independent oracles.
//
// The oracles here deliberately avoid the library's planner, indexes and
// evaluators: they scan every record and re-implement the semantics directly.

#include "mz/codec.hpp"
#include "mz/composer.hpp"
#include "mz/store.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <optional>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <tuple>
#include <vector>

namespace mz::test {

namespace fs = std::filesystem;

inline fs::path fixtures_dir() { return fs::path(MZ_FIXTURES_DIR); }
inline fs::path seed_zoo_path() { return fixtures_dir() / "seed_zoo.json"; }
inline fs::path cards_dir() { return fixtures_dir() / "cards" / "huggingface"; }
inline fs::path manifest_path() { return fixtures_dir() / "manifest.json"; }
inline fs::path pipeline_path() { return fixtures_dir() / "pipelines" / "text_pos_mobile.json"; }

inline std::string read_text(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

inline void write_text(const fs::path& p, const std::string& s) {
    std::ofstream out(p, std::ios::binary | std::ios::trunc);
    out << s;
}

// Fresh directory removed on scope exit.
class TempDir {
public:
    TempDir() {
        static std::mt19937_64 rng{std::random_device{}()};
        path_ = fs::temp_directory_path() / ("mz-test-" + std::to_string(rng()));
        fs::create_directories(path_);
    }
    ~TempDir() {
        std::error_code ec;
        fs::remove_all(path_, ec);
    }
    TempDir(const TempDir&) = delete;
    TempDir& operator=(const TempDir&) = delete;

    [[nodiscard]] const fs::path& path() const { return path_; }
    [[nodiscard]] fs::path operator/(const std::string& s) const { return path_ / s; }

private:
    fs::path path_;
};

inline std::vector<Record> seed_records() {
    Json j = Json::parse(read_text(seed_zoo_path()));
    std::vector<Record> out;
    for (const auto& e : j) out.push_back(decode_envelope(e));
    return out;
}

// Puts the seed zoo as authored, provenance included.
inline void load_seed(Store& store) {
    for (const auto& r : seed_records()) store.put(r);
}

// ---------------------------------------------------------------------------
// Minimal record builders
// ---------------------------------------------------------------------------

inline HardwareProfile hardware(std::string id, std::string name, DeviceClass cls) {
    HardwareProfile h;
    h.id = std::move(id);
    h.name = std::move(name);
    h.device_class = cls;
    h.cpu = "cpu";
    h.memory_mb = 1024;
    return h;
}

inline DatasetRecord dataset(std::string id, std::string name, std::string version) {
    DatasetRecord d;
    d.id = std::move(id);
    d.name = std::move(name);
    d.version = std::move(version);
    d.source = {"src"};
    d.collection_method = CollectionMethod::Curated;
    d.modality = Modality::Image;
    return d;
}

inline ModelRecord model(std::string id, std::string name, std::string version, std::string task,
                         std::vector<DatasetRef> trained_on = {}) {
    ModelRecord m;
    m.id = std::move(id);
    m.name = std::move(name);
    m.version = std::move(version);
    m.task = std::move(task);
    m.input_signature = {IOSpec{"in", DType::Float32, {std::nullopt, 3}, "image"}};
    m.output_signature = {IOSpec{"out", DType::Float32, {std::nullopt}, "class-label"}};
    m.architecture = Architecture{"cnn", 1000, std::nullopt};
    m.trained_on = std::move(trained_on);
    m.created_at = Timestamp::from_millis(1'600'000'000'000);
    return m;
}

inline EvaluationRun eval_run(std::string id, std::string model_id, DatasetRef ds, std::string hw,
                              std::vector<MetricValue> metrics, std::int64_t executed_ms) {
    EvaluationRun r;
    r.id = std::move(id);
    r.model_id = std::move(model_id);
    r.dataset_id = std::move(ds);
    r.hardware_id = std::move(hw);
    r.metrics = std::move(metrics);
    r.executed_at = Timestamp::from_millis(executed_ms);
    r.executor = Provenance{Origin::EvaluationHarness, "test", std::nullopt, std::nullopt, std::nullopt};
    return r;
}

inline MetricValue metric(std::string name, double value, std::optional<std::string> slice = std::nullopt) {
    MetricValue m;
    m.name = std::move(name);
    m.value = value;
    m.slice = std::move(slice);
    m.higher_is_better = known_metric_polarity(m.name).value_or(true);
    return m;
}

// ---------------------------------------------------------------------------
// Store oracle: full scans only
// ---------------------------------------------------------------------------

class Oracle {
public:
    explicit Oracle(std::vector<Record> records) : records_(std::move(records)) {}

    template <typename T>
    std::vector<const T*> all() const {
        std::vector<const T*> out;
        for (const auto& r : records_) {
            if (const auto* t = std::get_if<T>(&r)) out.push_back(t);
        }
        return out;
    }

    template <typename T>
    const T* by_id(const std::string& id) const {
        for (const auto* t : all<T>()) {
            if (t->id == id) return t;
        }
        return nullptr;
    }

    const DatasetRecord* dataset_of(const DatasetRef& ref) const {
        const auto* d = by_id<DatasetRecord>(ref.id);
        return d && d->version == ref.version ? d : nullptr;
    }

    // Latest version of a dataset name by dotted numeric comparison.
    const DatasetRecord* latest_dataset(const std::string& name) const {
        const DatasetRecord* best = nullptr;
        for (const auto* d : all<DatasetRecord>()) {
            if (d->name != name) continue;
            if (!best || compare_versions(d->version, best->version) > 0) best = d;
        }
        return best;
    }

    // Most recent unambiguous value: latest executed_at, later record wins ties.
    std::optional<double> metric(const std::string& model_id, const std::string& dataset_name,
                                 const std::string& name, std::optional<std::string> hardware = std::nullopt,
                                 std::optional<std::string> slice = std::nullopt) const {
        const DatasetRecord* ds = latest_dataset(dataset_name);
        if (!ds) return std::nullopt;
        std::optional<double> value;
        std::optional<Timestamp> when;
        for (const auto* run : all<EvaluationRun>()) {
            if (run->model_id != model_id || run->dataset_id.id != ds->id || run->dataset_id.version != ds->version) {
                continue;
            }
            if (hardware) {
                const auto* hw = by_id<HardwareProfile>(run->hardware_id);
                if (!hw) continue;
                std::string cls(to_string(hw->device_class));
                if (hw->id != *hardware && hw->name != *hardware && cls != *hardware) continue;
            }
            for (const auto& m : run->metrics) {
                if (m.name == name && m.slice == slice && (!when || run->executed_at >= *when)) {
                    value = m.value;
                    when = run->executed_at;
                }
            }
        }
        return value;
    }

    std::vector<const DatasetRecord*> trained_on(const ModelRecord& m) const {
        std::vector<const DatasetRecord*> out;
        for (const auto& ref : m.trained_on) out.push_back(dataset_of(ref));
        return out;
    }

    std::vector<const DataInstance*> instances(const DatasetRecord& d) const {
        std::vector<const DataInstance*> out;
        for (const auto* i : all<DataInstance>()) {
            if (i->dataset_id.id == d.id && i->dataset_id.version == d.version) out.push_back(i);
        }
        return out;
    }

    bool has_label(const DataInstance& inst, const std::string& label) const {
        for (const auto& iri : inst.labels) {
            if (iri == label) return true;
            for (const auto* c : all<SemanticConcept>()) {
                if (c->iri == iri && c->label == label) return true;
            }
        }
        return false;
    }

    [[nodiscard]] const std::vector<Record>& records() const { return records_; }

private:
    std::vector<Record> records_;
};

inline std::vector<std::string> ids_of(const std::vector<const Record*>& records) {
    std::vector<std::string> out;
    for (const auto* r : records) out.push_back(id_of(*r));
    return out;
}

// Expected result ids of the canned queries q1..q7 by exhaustive scan. Each
// conjunct follows the missing-metadata rule: a missing value never satisfies
// a condition.
inline std::vector<std::string> canned_expectation(const Oracle& o, int n) {
    std::vector<std::string> out;
    auto any_trained = [&](const ModelRecord& m, auto pred) {
        for (const auto* d : o.trained_on(m)) {
            if (d && pred(*d)) return true;
        }
        return false;
    };
    auto models = o.all<ModelRecord>();
    switch (n) {
        case 1:
            for (const auto* m : models) {
                if (m->task == "text-classification" &&
                    any_trained(*m, [](const DatasetRecord& d) { return d.collection_method == CollectionMethod::Crowdsourced; }) &&
                    any_trained(*m, [](const DatasetRecord& d) { return d.annotator_count && *d.annotator_count >= 50; })) {
                    out.push_back(m->id);
                }
            }
            break;
        case 2:
            for (const auto* d : o.all<DatasetRecord>()) {
                bool src = std::count(d->source.begin(), d->source.end(), "COCO") ||
                           std::count(d->source.begin(), d->source.end(), "OpenImage");
                bool all_dog = true;
                for (const auto* i : o.instances(*d)) all_dog = all_dog && o.has_label(*i, "dog");
                if (src && all_dog) out.push_back(d->id);
            }
            break;
        case 3:
            for (const auto* m : models) {
                auto acc = o.metric(m->id, "ImageNet", "accuracy");
                if (any_trained(*m, [](const DatasetRecord& d) { return d.name == "ImageNet"; }) && acc && *acc > 0.90) {
                    out.push_back(m->id);
                }
            }
            break;
        case 4: {
            // Best mAP among person detectors; missing values rank last, ties by (name, version).
            const ModelRecord* best = nullptr;
            std::optional<double> best_map;
            for (const auto* m : models) {
                if (m->task != "person-detection") continue;
                auto map = o.metric(m->id, "COCO", "map");
                bool wins = !best || (map && !best_map) ||
                            (map && best_map && *map > *best_map) ||
                            (map.has_value() == best_map.has_value() && (!map || *map == *best_map) &&
                             (m->name < best->name ||
                              (m->name == best->name && compare_versions(m->version, best->version) < 0)));
                if (wins) {
                    best = m;
                    best_map = map;
                }
            }
            if (best) out.push_back(best->id);
            break;
        }
        case 5:
            for (const auto* m : models) {
                auto gap = o.metric(m->id, "fairness-faces", "demographic_parity_gap");
                if (m->task == "person-detection" && gap && *gap <= 0.01) out.push_back(m->id);
            }
            break;
        case 6:
            for (const auto* m : models) {
                auto rate = o.metric(m->id, "toxicity-bench", "hate_speech_rate");
                if (m->task == "text-generation" && rate && *rate == 0) out.push_back(m->id);
            }
            break;
        case 7:
            for (const auto* m : models) {
                auto lat = o.metric(m->id, "ImageNet", "latency_ms", "edge");
                auto mem = o.metric(m->id, "ImageNet", "memory_footprint_mb", "edge");
                if (m->task == "image-classification" && lat && *lat <= 50 && mem && *mem <= 512) out.push_back(m->id);
            }
            break;
        default: break;
    }
    return out;
}

inline std::string canned_query(int n) {
    return read_text(fixtures_dir() / "queries" / ("q" + std::to_string(n) + ".mql"));
}

// ---------------------------------------------------------------------------
// Composition oracle: plain enumeration with explicit path latencies
// ---------------------------------------------------------------------------

struct OraclePlan {
    std::vector<std::size_t> choice;
    double score = 0, latency = 0, memory = 0;
};

inline std::vector<std::vector<std::size_t>> all_paths(const TaskGraph& g) {
    std::size_t n = g.nodes.size();
    std::vector<std::vector<std::size_t>> succ(n);
    std::vector<int> indeg(n, 0);
    for (const auto& e : g.edges) {
        auto u = *g.index_of(e.from);
        auto v = *g.index_of(e.to);
        succ[u].push_back(v);
        ++indeg[v];
    }
    std::vector<std::vector<std::size_t>> paths;
    std::vector<std::size_t> cur;
    std::function<void(std::size_t)> walk = [&](std::size_t v) {
        cur.push_back(v);
        if (succ[v].empty()) paths.push_back(cur);
        for (auto w : succ[v]) walk(w);
        cur.pop_back();
    };
    for (std::size_t v = 0; v < n; ++v) {
        if (indeg[v] == 0) walk(v);
    }
    return paths;
}

inline OraclePlan oracle_eval(const CompositionProblem& p, const std::vector<std::size_t>& choice) {
    OraclePlan o;
    o.choice = choice;
    for (const auto& path : all_paths(p.graph)) {
        double sum = 0;
        for (auto v : path) sum += p.candidates[v][choice[v]].latency_ms;
        o.latency = std::max(o.latency, sum);
    }
    for (std::size_t i = 0; i < choice.size(); ++i) {
        o.score += p.weights[i] * p.candidates[i][choice[i]].accuracy;
        o.memory += p.candidates[i][choice[i]].memory_mb;
    }
    return o;
}

inline bool oracle_compatible(const CompositionProblem& p, const std::vector<std::size_t>& choice) {
    for (const auto& e : p.graph.edges) {
        const auto& a = p.candidates[*p.graph.index_of(e.from)][choice[*p.graph.index_of(e.from)]];
        const auto& b = p.candidates[*p.graph.index_of(e.to)][choice[*p.graph.index_of(e.to)]];
        if (!a.output_type || !b.input_type || *a.output_type != *b.input_type) return false;
    }
    return true;
}

// Ranking contract: score (relative tolerance 1e-12), latency, memory, then
// (name, version, id) per node in node order.
inline bool oracle_better(const CompositionProblem& p, const OraclePlan& a, const OraclePlan& b) {
    double tol = 1e-12 * std::max({1.0, std::abs(a.score), std::abs(b.score)});
    if (std::abs(a.score - b.score) > tol) return a.score > b.score;
    if (a.latency != b.latency) return a.latency < b.latency;
    if (a.memory != b.memory) return a.memory < b.memory;
    for (std::size_t i = 0; i < a.choice.size(); ++i) {
        const auto& x = p.candidates[i][a.choice[i]].model;
        const auto& y = p.candidates[i][b.choice[i]].model;
        if (std::tie(x.name, x.version, x.id) != std::tie(y.name, y.version, y.id)) {
            return std::tie(x.name, x.version, x.id) < std::tie(y.name, y.version, y.id);
        }
    }
    return false;
}

template <typename F>
void for_each_assignment(const CompositionProblem& p, F&& f) {
    std::size_t n = p.graph.nodes.size();
    for (const auto& c : p.candidates) {
        if (c.empty()) return;
    }
    std::vector<std::size_t> choice(n, 0);
    while (true) {
        f(choice);
        std::size_t i = 0;
        while (i < n && ++choice[i] == p.candidates[i].size()) choice[i++] = 0;
        if (i == n) return;
    }
}

inline std::optional<OraclePlan> oracle_optimum(const CompositionProblem& p) {
    std::optional<OraclePlan> best;
    for_each_assignment(p, [&](const std::vector<std::size_t>& choice) {
        if (!oracle_compatible(p, choice)) return;
        auto o = oracle_eval(p, choice);
        if (o.latency > p.latency_budget_ms || o.memory > p.memory_budget_mb) return;
        if (!best || oracle_better(p, o, *best)) best = o;
    });
    return best;
}

// Budget-free non-dominated set as sets of choice vectors.
inline std::set<std::vector<std::size_t>> oracle_pareto(const CompositionProblem& p) {
    std::vector<OraclePlan> all;
    for_each_assignment(p, [&](const std::vector<std::size_t>& choice) {
        if (oracle_compatible(p, choice)) all.push_back(oracle_eval(p, choice));
    });
    std::set<std::vector<std::size_t>> out;
    for (const auto& a : all) {
        bool dominated = false;
        for (const auto& b : all) {
            bool no_worse = b.score >= a.score && b.latency <= a.latency && b.memory <= a.memory;
            bool strict = b.score > a.score || b.latency < a.latency || b.memory < a.memory;
            if (no_worse && strict) {
                dominated = true;
                break;
            }
        }
        if (!dominated) out.insert(a.choice);
    }
    return out;
}

// Store-backed pipeline solved from raw records: candidates by task, primary
// types and metrics on the hardware, then exhaustive search. Ignores filters.
struct OraclePipelinePlan {
    std::vector<std::string> model_ids;
    double score = 0, latency = 0, memory = 0;
};

inline std::optional<OraclePipelinePlan> oracle_pipeline(const Oracle& o, const CompositionRequest& req) {
    const auto& g = req.graph;
    CompositionProblem p;
    p.graph = g;
    double wsum = 0;
    for (const auto& n : g.nodes) {
        auto it = req.objective.weights.find(n.id);
        double w = req.objective.weights.empty() ? 1.0 : it == req.objective.weights.end() ? 0.0 : it->second;
        p.weights.push_back(w);
        wsum += w;
    }
    for (double& w : p.weights) w /= wsum;
    p.latency_budget_ms = req.constraints.latency_budget_ms;
    p.memory_budget_mb = req.constraints.memory_budget_mb;
    for (const auto& n : g.nodes) {
        std::vector<Candidate> cands;
        for (const auto* m : o.all<ModelRecord>()) {
            if (m->task != n.task) continue;
            std::optional<std::string> in, out;
            if (!m->input_signature.empty()) in = m->input_signature.front().semantic_type;
            if (!m->output_signature.empty()) out = m->output_signature.front().semantic_type;
            if (n.input_type && in != n.input_type) continue;
            if (n.output_type && out != n.output_type) continue;
            auto acc = o.metric(m->id, *n.dataset, "accuracy", req.constraints.hardware);
            auto lat = o.metric(m->id, *n.dataset, "latency_ms", req.constraints.hardware);
            auto mem = o.metric(m->id, *n.dataset, "memory_footprint_mb", req.constraints.hardware);
            if (!acc || !lat || !mem) continue;
            cands.push_back(Candidate{ModelRef{m->id, m->name, m->version}, *acc, *lat, *mem, in, out});
        }
        p.candidates.push_back(std::move(cands));
    }
    auto best = oracle_optimum(p);
    if (!best) return std::nullopt;
    OraclePipelinePlan out{{}, best->score, best->latency, best->memory};
    for (std::size_t i = 0; i < best->choice.size(); ++i) out.model_ids.push_back(p.candidates[i][best->choice[i]].model.id);
    return out;
}

// Index of each assigned candidate within its node's candidate list.
inline std::vector<std::size_t> choice_of(const CompositionProblem& p, const CompositionPlan& plan) {
    std::vector<std::size_t> out;
    for (std::size_t i = 0; i < plan.assignment.size(); ++i) {
        const auto& cands = p.candidates[i];
        for (std::size_t c = 0; c < cands.size(); ++c) {
            if (cands[c] == plan.assignment[i]) {
                out.push_back(c);
                break;
            }
        }
    }
    return out;
}

// Random DAG instance. Small value alphabets make exact ties common.
inline CompositionProblem random_problem(std::mt19937_64& rng, std::size_t max_nodes, std::size_t max_candidates) {
    auto uni = [&](std::size_t lo, std::size_t hi) { return std::uniform_int_distribution<std::size_t>(lo, hi)(rng); };
    auto real = [&](double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(rng); };
    bool coarse = uni(0, 1) == 0;
    static const char* kTypes[] = {"a", "b", "c"};
    std::size_t n_types = uni(1, 3);

    CompositionProblem p;
    std::size_t n = uni(1, max_nodes);
    for (std::size_t i = 0; i < n; ++i) p.graph.nodes.push_back(TaskNode{"n" + std::to_string(i), "task", {}, {}, {}, {}});
    for (std::size_t u = 0; u < n; ++u) {
        for (std::size_t v = u + 1; v < n; ++v) {
            if (uni(0, 99) < 35) p.graph.edges.push_back({"n" + std::to_string(u), "n" + std::to_string(v)});
        }
    }
    for (std::size_t i = 0; i < n; ++i) {
        std::vector<Candidate> cands;
        std::size_t k = uni(1, max_candidates);
        for (std::size_t c = 0; c < k; ++c) {
            Candidate cand;
            std::string name = "m" + std::to_string(uni(0, 5));
            cand.model = ModelRef{"id-" + std::to_string(i) + "-" + std::to_string(c), name, std::to_string(uni(1, 2))};
            cand.accuracy = coarse ? 0.5 + 0.1 * static_cast<double>(uni(0, 4)) : real(0.3, 1.0);
            cand.latency_ms = coarse ? static_cast<double>(uni(1, 5) * 10) : real(1.0, 100.0);
            cand.memory_mb = coarse ? static_cast<double>(uni(1, 4) * 50) : real(10.0, 500.0);
            cand.input_type = kTypes[uni(0, n_types - 1)];
            cand.output_type = kTypes[uni(0, n_types - 1)];
            cands.push_back(std::move(cand));
        }
        p.candidates.push_back(std::move(cands));
    }
    Objective obj;
    for (const auto& node : p.graph.nodes) obj.weights[node.id] = coarse ? static_cast<double>(uni(1, 3)) : real(0.1, 1.0);
    p.weights = normalize_weights(p.graph, obj);
    p.latency_budget_ms = coarse ? static_cast<double>(uni(1, 20) * 10) : real(10.0, 300.0);
    p.memory_budget_mb = coarse ? static_cast<double>(uni(1, 20) * 50) : real(50.0, 2000.0);
    return p;
}

}  // namespace mz::test
