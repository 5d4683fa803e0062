#pragma once
// JSON-over-HTTP API under /api/v1.
//
// Service::handle is transport-free so it can be exercised without sockets;
// serve() binds it to an HTTP/1.1 listener.
//
// Errors are {"error": {"code", "message", "detail"?}} with codes
// VALIDATION_FAILED 422, VERSION_CONFLICT 409, SYNTAX_ERROR 400,
// ANALYSIS_ERROR 400, INFEASIBLE 422, NOT_FOUND 404, BAD_REQUEST 400,
// METHOD_NOT_ALLOWED 405, CRAWL_FAILED 422, INTERNAL 500.

#include "mz/store.hpp"

#include <filesystem>
#include <map>
#include <string>
#include <string_view>

namespace mz {

struct ApiResponse {
    int status = 200;
    Json body;
};

inline constexpr std::size_t kDefaultPageLimit = 100;

class Service {
public:
    // Crawl fixture directories are resolved under `fixtures_root` and may not
    // escape it. An empty root disables the crawl endpoint.
    explicit Service(Store& store, std::filesystem::path fixtures_root = {});

    // `path` is percent-decoded; `query` holds decoded query parameters.
    ApiResponse handle(std::string_view method, std::string_view path,
                       const std::map<std::string, std::string>& query, std::string_view body);

private:
    ApiResponse post_record(const Json& body);
    ApiResponse get_record(std::string_view kind, std::string_view id);
    ApiResponse query(const Json& body, const std::map<std::string, std::string>& params);
    ApiResponse compare(const std::map<std::string, std::string>& params);
    ApiResponse crawl(std::string_view zoo, const Json& body);
    ApiResponse compose(const Json& body);
    ApiResponse health();

    Store& store_;
    std::filesystem::path fixtures_root_;
};

ApiResponse api_error(int status, std::string code, std::string message, Json detail = nullptr);

struct ServeOptions {
    std::string host = "127.0.0.1";
    int port = 8080;
    // Directory served at / for the web console; empty disables it.
    std::string static_root;
};

// Blocks until the listener stops. Returns false if binding failed.
bool serve(Service& service, const ServeOptions& options);

}  // namespace mz
