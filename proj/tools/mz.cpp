// mz: command-line access to a metadata store.
//
// Exit codes: 0 ok, 1 other error, 2 ingest validation failure,
// 3 query syntax/analysis error, 4 infeasible composition, 5 corruption.

#include "mz/codec.hpp"
#include "mz/compare.hpp"
#include "mz/composer.hpp"
#include "mz/ingest.hpp"
#include "mz/mql.hpp"
#include "mz/store.hpp"

#include <CLI11.hpp>
#include <spdlog/spdlog.h>

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>

namespace {

using namespace mz;

enum Exit : int {
    kOk = 0,
    kFailure = 1,
    kInvalid = 2,
    kQueryError = 3,
    kInfeasible = 4,
    kCorrupt = 5,
};

struct Config {
    std::string store;
    std::string format = "table";
    int verbosity = 0;
};

bool json_output(const Config& c) { return c.format == "json"; }

Store open_store(const Config& c) {
    if (c.store.empty()) throw std::runtime_error("no store: pass --store or set MZ_STORE");
    auto store = Store::open(c.store);
    for (const auto& w : store.warnings()) spdlog::warn("{}", w);
    return store;
}

void print_table(std::ostream& out, const std::vector<std::string>& header,
                 const std::vector<std::vector<std::string>>& rows) {
    std::vector<std::size_t> width(header.size());
    for (std::size_t i = 0; i < header.size(); ++i) width[i] = header[i].size();
    for (const auto& r : rows) {
        for (std::size_t i = 0; i < r.size(); ++i) width[i] = std::max(width[i], r[i].size());
    }
    auto line = [&](const std::vector<std::string>& cells) {
        std::string s;
        for (std::size_t i = 0; i < cells.size(); ++i) {
            s += cells[i];
            if (i + 1 < cells.size()) s += std::string(width[i] - cells[i].size() + 2, ' ');
        }
        out << s << "\n";
    };
    line(header);
    for (const auto& r : rows) line(r);
}

std::string fmt_number(double v) {
    std::ostringstream ss;
    ss << v;
    return ss.str();
}

void print_query_table(std::ostream& out, const mql::QueryResult& result) {
    std::vector<std::vector<std::string>> rows;
    bool models = !result.records.empty() && std::holds_alternative<ModelRecord>(*result.records.front());
    for (const Record* r : result.records) {
        if (const auto* m = std::get_if<ModelRecord>(r)) {
            rows.push_back({m->name, m->version, m->task, m->id});
        } else if (const auto* d = std::get_if<DatasetRecord>(r)) {
            std::string sources;
            for (const auto& s : d->source) sources += (sources.empty() ? "" : ",") + s;
            rows.push_back({d->name, d->version, std::string(to_string(d->collection_method)), sources});
        }
    }
    if (models || result.records.empty()) {
        print_table(out, {"NAME", "VERSION", "TASK", "ID"}, rows);
    } else {
        print_table(out, {"NAME", "VERSION", "COLLECTION", "SOURCE"}, rows);
    }
    out << result.records.size() << " result(s)\n";
}

int cmd_ingest(const Config& c, const std::string& file) {
    auto store = open_store(c);
    std::vector<Record> records;
    try {
        records = read_envelopes(file);
    } catch (const DecodeError& e) {
        std::cerr << "invalid record: " << e.what() << "\n";
        return kInvalid;
    }
    std::size_t created = 0;
    Json keys = Json::array();
    for (auto& r : records) {
        try {
            auto res = ingest_manual(store, std::move(r));
            created += res.created ? 1 : 0;
            keys.push_back({{"kind", kind_name(res.key.kind)}, {"id", res.key.id}, {"created", res.created}});
        } catch (const ValidationError& e) {
            std::cerr << "validation failed for " << kind_name(kind_of(r)) << " '" << id_of(r) << "':\n";
            for (const auto& v : e.report().violations) std::cerr << "  " << v.path << ": " << v.reason << "\n";
            return kInvalid;
        }
    }
    if (json_output(c)) {
        std::cout << Json{{"records", keys}, {"created", created}}.dump() << "\n";
    } else {
        std::cout << "ingested " << records.size() << " record(s), " << created << " new\n";
    }
    return kOk;
}

int cmd_query(const Config& c, const std::string& text, bool explain_only) {
    auto typed = mql::analyze(text);
    if (explain_only) {
        std::cout << mql::explain(typed);
        return kOk;
    }
    auto store = open_store(c);
    auto view = store.view();
    auto result = mql::evaluate(typed, mql::EvalContext{view, mql::MetricPolicy::MostRecent, std::nullopt});
    if (json_output(c)) {
        std::cout << mql::to_json(result).dump() << "\n";
    } else {
        print_query_table(std::cout, result);
    }
    return kOk;
}

int cmd_parse(const std::string& text) {
    std::cout << mql::pretty_print(mql::parse(text)) << "\n";
    return kOk;
}

int cmd_crawl(const Config& c, const std::string& zoo, const std::string& fixtures) {
    auto adapter = make_adapter(zoo);
    if (!adapter) {
        std::cerr << "unknown zoo '" << zoo << "'\n";
        return kFailure;
    }
    auto store = open_store(c);
    auto summary = crawl(store, *adapter, fixtures);
    if (json_output(c)) {
        std::cout << to_json(summary).dump() << "\n";
    } else {
        std::cout << "zoo " << summary.zoo << ": " << summary.cards << " card(s), " << summary.stored
                  << " stored, " << summary.quarantined.size() << " quarantined, " << summary.new_records
                  << " new record(s)\n";
        for (const auto& q : summary.quarantined) std::cout << "  quarantined " << q.file << ": " << q.reason << "\n";
        for (const auto& r : summary.reports) {
            if (r.unmapped.empty()) continue;
            std::cout << "  " << r.identifier << " unmapped:";
            for (const auto& u : r.unmapped) std::cout << " " << u;
            std::cout << "\n";
        }
    }
    return kOk;
}

int cmd_eval(const Config& c, const std::string& model, const std::string& dataset, const std::string& hardware,
             const std::string& manifest, std::uint64_t seed) {
    auto store = open_store(c);
    auto executor = SimulatedExecutor::from_file(manifest);
    auto key = run_evaluation(store, executor, model, dataset, hardware, seed);
    if (json_output(c)) {
        std::cout << Json{{"kind", kind_name(key.kind)}, {"id", key.id}}.dump() << "\n";
    } else {
        std::cout << "stored " << to_string(key) << "\n";
    }
    return kOk;
}

int cmd_compose(const Config& c, const std::string& file, bool frontier) {
    std::ifstream in(file);
    if (!in) throw std::runtime_error("cannot read " + file);
    auto req = parse_composition_request(Json::parse(in));
    auto store = open_store(c);
    auto view = store.view();
    if (frontier) {
        auto plans = pareto(req.graph, req.constraints.hardware, view, req.objective);
        Json out = Json::array();
        for (const auto& p : plans) out.push_back(to_json(p));
        std::cout << (json_output(c) ? out.dump() : out.dump(2)) << "\n";
        return kOk;
    }
    auto plan = optimize(req.graph, req.constraints, req.objective, view);
    if (json_output(c)) {
        std::cout << to_json(plan).dump() << "\n";
    } else if (plan.feasible) {
        std::vector<std::vector<std::string>> rows;
        for (std::size_t i = 0; i < plan.nodes.size(); ++i) {
            const auto& a = plan.assignment[i];
            rows.push_back({plan.nodes[i], a.model.name, a.model.version, fmt_number(a.accuracy),
                            fmt_number(a.latency_ms), fmt_number(a.memory_mb)});
        }
        print_table(std::cout, {"NODE", "MODEL", "VERSION", "ACCURACY", "LATENCY_MS", "MEMORY_MB"}, rows);
        std::cout << "score " << fmt_number(plan.aggregate.score) << ", latency_ms "
                  << fmt_number(plan.aggregate.latency_ms) << ", memory_mb " << fmt_number(plan.aggregate.memory_mb)
                  << (plan.mode == SearchMode::Exact ? " (EXACT)" : " (HEURISTIC)") << "\n";
    } else {
        std::cout << "INFEASIBLE: binding";
        for (const auto& b : plan.binding) std::cout << " " << b;
        std::cout << "\n";
    }
    return plan.feasible ? kOk : kInfeasible;
}

int cmd_compare(const Config& c, const std::vector<std::string>& ids) {
    auto store = open_store(c);
    auto view = store.view();
    auto cmp = compare_models(view, ids);
    if (json_output(c)) {
        std::cout << to_json(cmp).dump() << "\n";
        return kOk;
    }
    std::vector<std::string> header{"METRIC", "DATASET", "HARDWARE", "SLICE"};
    for (const auto& m : cmp.models) header.push_back(m.name + "@" + m.version);
    std::vector<std::vector<std::string>> rows;
    for (const auto& r : cmp.rows) {
        std::vector<std::string> row{r.metric + (r.higher_is_better ? " (+)" : " (-)"),
                                     r.dataset + "@" + r.dataset_version, r.hardware, r.slice.value_or("-")};
        for (const auto& v : r.values) row.push_back(v ? fmt_number(*v) : "-");
        rows.push_back(std::move(row));
    }
    print_table(std::cout, header, rows);
    return kOk;
}

int cmd_check(const Config& c) {
    auto store = open_store(c);
    auto report = store.integrity_check();
    if (json_output(c)) {
        Json issues = Json::array();
        for (const auto& i : report.issues) issues.push_back({{"where", i.where}, {"problem", i.problem}});
        std::cout << Json{{"ok", report.ok()}, {"records", store.size()}, {"issues", issues}}.dump() << "\n";
    } else if (report.ok()) {
        std::cout << "ok: " << store.size() << " record(s)\n";
    } else {
        for (const auto& i : report.issues) std::cout << i.where << ": " << i.problem << "\n";
    }
    return report.ok() ? kOk : kCorrupt;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Model zoo metadata store"};
    app.require_subcommand(1);
    Config cfg;
    if (const char* env = std::getenv("MZ_STORE")) cfg.store = env;
    app.add_option("--store", cfg.store, "Store directory or log file (default: $MZ_STORE)");
    app.add_option("--format", cfg.format, "Output format")->check(CLI::IsMember({"table", "json"}));
    app.add_flag("-v,--verbose", cfg.verbosity, "More logging");

    std::string file, text, zoo, fixtures, model, dataset, hardware, manifest;
    std::uint64_t seed = 0;
    bool explain_only = false, frontier = false;
    std::vector<std::string> ids;

    auto* ingest = app.add_subcommand("ingest", "Ingest a record envelope file");
    ingest->add_option("file", file)->required();
    auto* query = app.add_subcommand("query", "Run an MQL query");
    query->add_option("mql", text)->required();
    query->add_flag("--explain", explain_only, "Print the plan only");
    auto* parse = app.add_subcommand("parse", "Parse and pretty-print an MQL query");
    parse->add_option("mql", text)->required();
    auto* crawl_cmd = app.add_subcommand("crawl", "Crawl recorded model-zoo cards");
    crawl_cmd->add_option("zoo", zoo)->required();
    crawl_cmd->add_option("--fixtures", fixtures)->required();
    auto* eval = app.add_subcommand("eval", "Run a simulated evaluation");
    eval->add_option("model", model)->required();
    eval->add_option("dataset", dataset)->required();
    eval->add_option("hardware", hardware)->required();
    eval->add_option("--manifest", manifest)->required();
    eval->add_option("--seed", seed);
    auto* compose = app.add_subcommand("compose", "Select models for a pipeline");
    compose->add_option("plan", file)->required();
    compose->add_flag("--pareto", frontier, "Print the Pareto frontier instead");
    auto* compare = app.add_subcommand("compare", "Compare models metric by metric");
    compare->add_option("ids", ids)->required();
    auto* check = app.add_subcommand("check", "Verify store integrity");

    CLI11_PARSE(app, argc, argv);
    spdlog::set_level(cfg.verbosity > 0 ? spdlog::level::debug : spdlog::level::warn);

    try {
        if (*ingest) return cmd_ingest(cfg, file);
        if (*query) return cmd_query(cfg, text, explain_only);
        if (*parse) return cmd_parse(text);
        if (*crawl_cmd) return cmd_crawl(cfg, zoo, fixtures);
        if (*eval) return cmd_eval(cfg, model, dataset, hardware, manifest, seed);
        if (*compose) return cmd_compose(cfg, file, frontier);
        if (*compare) return cmd_compare(cfg, ids);
        if (*check) return cmd_check(cfg);
    } catch (const mql::QueryError& e) {
        std::cerr << "error: " << e.what() << "\n";
        if (const auto* s = dynamic_cast<const mql::SyntaxError*>(&e); s && !s->expected().empty()) {
            std::cerr << "expected one of:";
            for (const auto& t : s->expected()) std::cerr << " " << t;
            std::cerr << "\n";
        }
        if (const auto* a = dynamic_cast<const mql::AnalysisError*>(&e); a && !a->field_path().empty()) {
            std::cerr << "field: " << a->field_path() << "\n";
        }
        return kQueryError;
    } catch (const CorruptionError& e) {
        std::cerr << "corruption: " << e.what() << "\n";
        return kCorrupt;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kFailure;
    }
    return kFailure;
}
