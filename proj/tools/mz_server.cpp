// mz_server: serves the /api/v1 JSON API over HTTP.

#include "mz/service.hpp"

#include <CLI11.hpp>
#include <spdlog/spdlog.h>

#include <cstdlib>

int main(int argc, char** argv) {
    CLI::App app{"Model zoo metadata API server"};
    std::string store_path, bind = "127.0.0.1:8080", fixtures_root, webui_root;
    if (const char* env = std::getenv("MZ_STORE_PATH")) store_path = env;
    if (const char* env = std::getenv("MZ_BIND")) bind = env;
    if (const char* env = std::getenv("MZ_FIXTURES_ROOT")) fixtures_root = env;
    if (const char* env = std::getenv("MZ_WEBUI_ROOT")) webui_root = env;
    app.add_option("--store-path", store_path, "Store directory (default: $MZ_STORE_PATH)");
    app.add_option("--bind", bind, "host:port (default: $MZ_BIND or 127.0.0.1:8080)");
    app.add_option("--fixtures-root", fixtures_root, "Directory crawl fixture paths resolve under");
    app.add_option("--webui-root", webui_root, "Directory served at / (the built webui/)");
    CLI11_PARSE(app, argc, argv);

    if (store_path.empty()) {
        spdlog::error("no store: pass --store-path or set MZ_STORE_PATH");
        return 1;
    }
    auto colon = bind.rfind(':');
    if (colon == std::string::npos) {
        spdlog::error("--bind must be host:port");
        return 1;
    }
    mz::ServeOptions options;
    options.host = bind.substr(0, colon);
    options.static_root = webui_root;
    try {
        options.port = std::stoi(bind.substr(colon + 1));
    } catch (const std::exception&) {
        spdlog::error("invalid port in --bind '{}'", bind);
        return 1;
    }

    try {
        auto store = mz::Store::open(store_path);
        for (const auto& w : store.warnings()) spdlog::warn("{}", w);
        mz::Service service(store, fixtures_root);
        if (!mz::serve(service, options)) {
            spdlog::error("cannot listen on {}", bind);
            return 1;
        }
    } catch (const std::exception& e) {
        spdlog::error("{}", e.what());
        return 1;
    }
    return 0;
}
