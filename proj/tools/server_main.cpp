#include <csignal>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>
#include <httplib.h>

#include "matteforge/config.hpp"
#include "matteforge/error.hpp"
#include "matteforge/service.hpp"

namespace {

httplib::Server* g_server = nullptr;

void handle_signal(int) {
    if (g_server) g_server->stop();
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"HTTP service for interactive foreground extraction", "matteforge-server"};
    std::string bind = "127.0.0.1";
    int port = 8080;
    std::string persist_dir;
    std::string config_file;
    std::string cors_origin = "*";
    int ttl_s = 3600;
    int timeout_s = 120;
    app.add_option("--bind", bind, "Bind address");
    app.add_option("--port", port, "Port")->check(CLI::Range(0, 65535));
    app.add_option("--persist-dir", persist_dir, "Mirror sessions to this directory");
    app.add_option("--config", config_file, "Pipeline configuration file")->check(CLI::ExistingFile);
    app.add_option("--cors-origin", cors_origin, "Allowed CORS origin");
    app.add_option("--session-ttl", ttl_s, "Idle session lifetime in seconds")->check(CLI::PositiveNumber);
    app.add_option("--timeout", timeout_s, "Per-request compute budget in seconds")->check(CLI::PositiveNumber);
    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? 0 : 2;
    }

    matteforge::service::ServiceConfig cfg;
    try {
        if (!config_file.empty()) {
            std::ifstream in(config_file);
            std::stringstream text;
            text << in.rdbuf();
            for (const auto& [k, v] : matteforge::parse_config_text(text.str()))
                matteforge::apply_setting(cfg.pipeline, k, v);
        }
        cfg.pipeline.validate();
    } catch (const matteforge::Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    if (!persist_dir.empty()) cfg.persist_dir = persist_dir;
    cfg.cors_origin = cors_origin;
    cfg.session_ttl = std::chrono::seconds(ttl_s);
    cfg.compute_timeout = std::chrono::seconds(timeout_s);

    matteforge::service::Service service(cfg);
    httplib::Server server;
    service.mount(server);
    g_server = &server;
    std::signal(SIGINT, handle_signal);
    std::signal(SIGTERM, handle_signal);
    std::cout << "listening on " << bind << ":" << port << std::endl;
    if (!server.listen(bind, port)) {
        std::cerr << "error: cannot listen on " << bind << ":" << port << "\n";
        return 1;
    }
    return 0;
}
