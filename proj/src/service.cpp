#include "mz/service.hpp"

#include "mz/codec.hpp"
#include "mz/compare.hpp"
#include "mz/composer.hpp"
#include "mz/ingest.hpp"
#include "mz/mql.hpp"

#include <spdlog/spdlog.h>

#include <charconv>

namespace mz {

namespace fs = std::filesystem;

namespace {

constexpr std::string_view kPrefix = "/api/v1/";

Json violations_json(const ValidationReport& r) {
    Json out = Json::array();
    for (const auto& v : r.violations) out.push_back({{"path", v.path}, {"reason", v.reason}});
    return out;
}

Json position_json(const mql::QueryError& e) {
    return Json{{"line", e.pos().line}, {"column", e.pos().column}};
}

std::optional<std::size_t> parse_size(std::string_view s) {
    std::size_t v = 0;
    auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc() || p != s.data() + s.size()) return std::nullopt;
    return v;
}

std::vector<std::string> split(std::string_view s, char sep) {
    std::vector<std::string> out;
    std::size_t start = 0;
    while (start <= s.size()) {
        auto end = s.find(sep, start);
        if (end == std::string_view::npos) end = s.size();
        if (end > start) out.emplace_back(s.substr(start, end - start));
        start = end + 1;
    }
    return out;
}

}  // namespace

ApiResponse api_error(int status, std::string code, std::string message, Json detail) {
    Json err{{"code", std::move(code)}, {"message", std::move(message)}};
    if (!detail.is_null()) err["detail"] = std::move(detail);
    return ApiResponse{status, Json{{"error", std::move(err)}}};
}

Service::Service(Store& store, fs::path fixtures_root)
    : store_(store), fixtures_root_(std::move(fixtures_root)) {}

ApiResponse Service::handle(std::string_view method, std::string_view path,
                            const std::map<std::string, std::string>& query, std::string_view body) {
    if (path.substr(0, kPrefix.size()) != kPrefix) return api_error(404, "NOT_FOUND", "no such endpoint");
    std::string_view route = path.substr(kPrefix.size());
    auto parse_body = [&]() -> Json {
        if (body.empty()) return Json::object();
        return Json::parse(body);
    };

    try {
        if (route == "records") {
            if (method != "POST") return api_error(405, "METHOD_NOT_ALLOWED", "use POST");
            return post_record(parse_body());
        }
        if (route.substr(0, 8) == "records/") {
            if (method != "GET") return api_error(405, "METHOD_NOT_ALLOWED", "use GET");
            std::string_view rest = route.substr(8);
            auto slash = rest.find('/');
            if (slash == std::string_view::npos || slash + 1 == rest.size()) {
                return api_error(404, "NOT_FOUND", "expected /records/{kind}/{id}");
            }
            return get_record(rest.substr(0, slash), rest.substr(slash + 1));
        }
        if (route == "query") {
            if (method != "POST") return api_error(405, "METHOD_NOT_ALLOWED", "use POST");
            return this->query(parse_body(), query);
        }
        if (route == "compare") {
            if (method != "GET") return api_error(405, "METHOD_NOT_ALLOWED", "use GET");
            return compare(query);
        }
        if (route.substr(0, 6) == "crawl/") {
            if (method != "POST") return api_error(405, "METHOD_NOT_ALLOWED", "use POST");
            return crawl(route.substr(6), parse_body());
        }
        if (route == "compose") {
            if (method != "POST") return api_error(405, "METHOD_NOT_ALLOWED", "use POST");
            return compose(parse_body());
        }
        if (route == "health") {
            if (method != "GET") return api_error(405, "METHOD_NOT_ALLOWED", "use GET");
            return health();
        }
        return api_error(404, "NOT_FOUND", "no such endpoint");
    } catch (const Json::parse_error& e) {
        return api_error(400, "BAD_REQUEST", std::string("request body is not valid JSON: ") + e.what());
    } catch (const mql::SyntaxError& e) {
        Json detail = position_json(e);
        detail["expected"] = e.expected();
        return api_error(400, "SYNTAX_ERROR", e.what(), std::move(detail));
    } catch (const mql::AnalysisError& e) {
        Json detail = position_json(e);
        detail["field"] = e.field_path();
        return api_error(400, "ANALYSIS_ERROR", e.what(), std::move(detail));
    } catch (const mql::QueryError& e) {
        return api_error(400, "SYNTAX_ERROR", e.what(), position_json(e));
    } catch (const ValidationError& e) {
        return api_error(422, "VALIDATION_FAILED", e.what(), violations_json(e.report()));
    } catch (const DecodeError& e) {
        return api_error(422, "VALIDATION_FAILED", e.what(),
                         Json::array({{{"path", e.path()}, {"reason", e.reason()}}}));
    } catch (const ConflictError& e) {
        return api_error(409, "VERSION_CONFLICT", e.what(), Json{{"existing", to_string(e.existing())}});
    } catch (const NotFoundError& e) {
        return api_error(404, "NOT_FOUND", e.what());
    } catch (const IngestError& e) {
        return api_error(422, "CRAWL_FAILED", e.what());
    } catch (const std::exception& e) {
        spdlog::error("{} {}: {}", method, path, e.what());
        return api_error(500, "INTERNAL", e.what());
    }
}

ApiResponse Service::post_record(const Json& body) {
    auto result = ingest_manual(store_, decode_envelope(body));
    return ApiResponse{result.created ? 201 : 200,
                       Json{{"kind", kind_name(result.key.kind)}, {"id", result.key.id}, {"created", result.created}}};
}

ApiResponse Service::get_record(std::string_view kind, std::string_view id) {
    auto k = parse_kind(kind);
    if (!k) return api_error(404, "NOT_FOUND", "unknown kind '" + std::string(kind) + "'");
    auto view = store_.view();
    const Record* r = view.find(*k, id);
    if (!r) return api_error(404, "NOT_FOUND", "no " + std::string(kind) + " with id '" + std::string(id) + "'");
    return ApiResponse{200, encode_envelope(*r)};
}

ApiResponse Service::query(const Json& body, const std::map<std::string, std::string>& params) {
    if (!body.is_object() || !body.contains("mql") || !body.at("mql").is_string()) {
        return api_error(400, "BAD_REQUEST", "body must be {\"mql\": string}");
    }
    std::size_t offset = 0;
    std::size_t limit = kDefaultPageLimit;
    for (auto [key, slot] : {std::pair{"offset", &offset}, std::pair{"limit", &limit}}) {
        std::optional<std::size_t> v;
        if (auto it = params.find(key); it != params.end()) {
            v = parse_size(it->second);
            if (!v) return api_error(400, "BAD_REQUEST", std::string(key) + " must be a non-negative integer");
        } else if (body.contains(key)) {
            if (!body.at(key).is_number_unsigned()) {
                return api_error(400, "BAD_REQUEST", std::string(key) + " must be a non-negative integer");
            }
            v = body.at(key).get<std::size_t>();
        }
        if (v) *slot = *v;
    }
    if (limit == 0) return api_error(400, "BAD_REQUEST", "limit must be positive");

    auto typed = mql::analyze(body.at("mql").get<std::string>());
    auto view = store_.view();
    auto result = mql::evaluate(typed, mql::EvalContext{view, mql::MetricPolicy::MostRecent, std::nullopt});
    Json page = Json::array();
    for (std::size_t i = offset; i < result.records.size() && i < offset + limit; ++i) {
        page.push_back(encode_envelope(*result.records[i]));
    }
    return ApiResponse{200, Json{{"count", result.records.size()},
                                 {"offset", offset},
                                 {"limit", limit},
                                 {"elapsed_ms", result.elapsed_ms},
                                 {"plan", result.plan},
                                 {"results", std::move(page)}}};
}

ApiResponse Service::compare(const std::map<std::string, std::string>& params) {
    auto it = params.find("ids");
    std::vector<std::string> ids = it == params.end() ? std::vector<std::string>{} : split(it->second, ',');
    if (ids.empty()) return api_error(400, "BAD_REQUEST", "ids must list at least one model id");
    auto view = store_.view();
    return ApiResponse{200, to_json(compare_models(view, ids))};
}

ApiResponse Service::crawl(std::string_view zoo, const Json& body) {
    auto adapter = make_adapter(zoo);
    if (!adapter) return api_error(404, "NOT_FOUND", "unknown zoo '" + std::string(zoo) + "'");
    if (fixtures_root_.empty()) return api_error(422, "CRAWL_FAILED", "no fixtures root configured");
    if (!body.is_object() || !body.contains("fixture_dir") || !body.at("fixture_dir").is_string()) {
        return api_error(400, "BAD_REQUEST", "body must be {\"fixture_dir\": string}");
    }
    fs::path root = fs::weakly_canonical(fixtures_root_);
    fs::path dir = fs::weakly_canonical(root / body.at("fixture_dir").get<std::string>());
    auto [r, d] = std::mismatch(root.begin(), root.end(), dir.begin(), dir.end());
    if (r != root.end()) return api_error(400, "BAD_REQUEST", "fixture_dir must stay under the fixtures root");
    return ApiResponse{200, to_json(mz::crawl(store_, *adapter, dir))};
}

ApiResponse Service::compose(const Json& body) {
    auto req = parse_composition_request(body);
    auto view = store_.view();
    auto plan = optimize(req.graph, req.constraints, req.objective, view);
    if (!plan.feasible) {
        return api_error(422, "INFEASIBLE", "no assignment satisfies the budgets and compatibility",
                         to_json(plan));
    }
    return ApiResponse{200, to_json(plan)};
}

ApiResponse Service::health() {
    auto view = store_.view();
    Json counts = Json::object();
    for (Kind k : kAllKinds) counts[std::string(kind_name(k))] = view.count(k);
    return ApiResponse{200, Json{{"status", "ok"}, {"record_counts", std::move(counts)}, {"total", view.size()}}};
}

}  // namespace mz
