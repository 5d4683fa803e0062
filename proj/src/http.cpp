#include "mz/service.hpp"

#include <httplib.h>
#include <spdlog/spdlog.h>

namespace mz {

bool serve(Service& service, const ServeOptions& options) {
    httplib::Server server;
    auto dispatch = [&service](const httplib::Request& req, httplib::Response& res) {
        std::map<std::string, std::string> query;
        for (const auto& [k, v] : req.params) query.emplace(k, v);
        ApiResponse r = service.handle(req.method, req.path, query, req.body);
        res.status = r.status;
        res.set_content(r.body.dump(), "application/json");
    };
    const std::string pattern = "/api/v1/.*";
    server.Get(pattern, dispatch);
    server.Post(pattern, dispatch);
    server.Put(pattern, dispatch);
    server.Delete(pattern, dispatch);
    if (!options.static_root.empty() && !server.set_mount_point("/", options.static_root)) {
        spdlog::error("cannot serve static files from {}", options.static_root);
        return false;
    }
    spdlog::info("listening on {}:{}", options.host, options.port);
    return server.listen(options.host, options.port);
}

}  // namespace mz
