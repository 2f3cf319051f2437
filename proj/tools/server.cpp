// HTTP server for live expert sessions.
#include <csignal>
#include <cstdlib>
#include <filesystem>

#include <CLI11.hpp>
#include <httplib.h>
#include <spdlog/spdlog.h>

#include "patientsim/elicitation/elicitor.hpp"
#include "patientsim/error.hpp"
#include "patientsim/llm/gateway.hpp"
#include "patientsim/session/http_api.hpp"
#include "provider_option.hpp"

using namespace patientsim;

namespace {
httplib::Server* g_server = nullptr;
void stop(int) {
    if (g_server) g_server->stop();
}
}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Patient simulator session server"};
    std::string bind = "127.0.0.1";
    int port = 8080;
    std::string data_dir = "data/sessions";
    std::string provider_spec = "live";
    std::optional<std::string> config_path;
    std::string variant = "full";
    std::optional<std::string> token;
    std::string cors_origin = "*";
    app.add_option("--bind", bind, "Bind address")->capture_default_str();
    app.add_option("--port", port, "Port")->capture_default_str();
    app.add_option("--data-dir", data_dir, "Event log directory")->capture_default_str();
    app.add_option("--provider", provider_spec, "scripted:FIXTURE or live")->capture_default_str();
    app.add_option("--config", config_path, "Provider config JSON");
    app.add_option("--variant", variant, "Default pipeline variant for new sessions")->capture_default_str();
    app.add_option("--token", token, "Static bearer token (or PATIENTSIM_TOKEN)");
    app.add_option("--cors-origin", cors_origin, "Allowed CORS origin")->capture_default_str();
    CLI11_PARSE(app, argc, argv);

    try {
        if (!token) {
            if (const char* env = std::getenv("PATIENTSIM_TOKEN"); env && *env) token = env;
        }
        auto config = llm::load_provider_config(config_path ? std::optional<std::filesystem::path>(*config_path)
                                                            : std::nullopt);
        auto provider = tools::make_provider(provider_spec, config);

        SystemClock clock;
        IdGenerator ids;
        llm::Gateway gateway(*provider, clock);
        simulator::Simulator sim(gateway, config.routing, ids);
        elicitation::Elicitor elicitor(gateway, config.routing, ids);
        session::JsonlEventStore store(data_dir);
        session::SessionService service(store, sim, elicitor, ids, clock, {parse_variant(variant)});
        spdlog::info("loaded {} sessions from {}", service.load_all(), data_dir);

        httplib::Server server;
        session::mount_session_api(server, service, {token, cors_origin});
        g_server = &server;
        std::signal(SIGINT, stop);
        std::signal(SIGTERM, stop);
        spdlog::info("listening on {}:{}", bind, port);
        if (!server.listen(bind, port)) {
            spdlog::error("cannot listen on {}:{}", bind, port);
            return 2;
        }
        return 0;
    } catch (const std::exception& e) {
        spdlog::error("{}", e.what());
        return tools::exit_code_for(e, 2);
    }
}
