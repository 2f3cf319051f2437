#include "patientsim/session/http_api.hpp"

#include <functional>

#include <httplib.h>
#include <spdlog/spdlog.h>

#include "patientsim/core/json.hpp"
#include "patientsim/error.hpp"

namespace patientsim::session {

namespace {

using Handler = std::function<void(const httplib::Request&, httplib::Response&)>;

void send(httplib::Response& res, int status, const json& body) {
    res.status = status;
    res.set_content(body.dump(), "application/json");
}

json parse_body(const httplib::Request& req) {
    if (is_blank(req.body)) return json::object();
    auto body = json::parse(req.body, nullptr, false);
    if (body.is_discarded() || !body.is_object()) throw ValidationError("request body must be a JSON object");
    return body;
}

std::string required_text(const json& body, const char* key) {
    auto it = body.find(key);
    if (it == body.end() || !it->is_string()) throw ValidationError(fmt::format("'{}' must be a string", key));
    return it->get<std::string>();
}

// Converts escaping exceptions into JSON error responses.
Handler guarded(Handler h) {
    return [h = std::move(h)](const httplib::Request& req, httplib::Response& res) {
        try {
            h(req, res);
        } catch (const Error& e) {
            if (e.code() == ErrorCode::upstream || e.code() == ErrorCode::script_mismatch) {
                spdlog::error("{} {}: {}", req.method, req.path, e.what());
            }
            send(res, http_status(e.code()), error_body(e));
        } catch (const json::exception& e) {
            send(res, 400, json{{"code", "validation_error"}, {"message", e.what()}, {"trace_id", nullptr}});
        } catch (const std::exception& e) {
            spdlog::error("{} {}: {}", req.method, req.path, e.what());
            send(res, 500, error_body(e));
        }
    };
}

json turn_reply(const Session& s, const DialogueTurn& turn) {
    json out{{"turn", turn}, {"constitution_version", s.constitution.version}};
    if (turn.trace_id) {
        if (auto it = s.traces.find(*turn.trace_id); it != s.traces.end()) out["trace"] = it->second;
    }
    return out;
}

}  // namespace

int http_status(ErrorCode code) {
    switch (code) {
    case ErrorCode::validation:
    case ErrorCode::invalid_input: return 400;
    case ErrorCode::not_found: return 404;
    case ErrorCode::conflict: return 409;
    case ErrorCode::undefined_agreement: return 422;
    case ErrorCode::provider:
    case ErrorCode::extraction:
    case ErrorCode::upstream: return 502;
    case ErrorCode::render:
    case ErrorCode::script_mismatch: return 500;
    }
    return 500;
}

json error_body(const std::exception& e) {
    json body{{"code", "internal_error"}, {"message", e.what()}, {"trace_id", nullptr}};
    if (const auto* err = dynamic_cast<const Error*>(&e)) body["code"] = std::string(to_string(err->code()));
    if (const auto* up = dynamic_cast<const simulator::GenerationFailed*>(&e)) {
        body["trace_id"] = up->trace_id();
        body["trace"] = up->trace();
    } else if (const auto* up = dynamic_cast<const UpstreamError*>(&e)) {
        body["trace_id"] = up->trace_id();
    } else if (const auto* el = dynamic_cast<const elicitation::ElicitationFailed*>(&e)) {
        body["trace_id"] = el->trace().trace_id;
        body["trace"] = el->trace();
    }
    return body;
}

void mount_session_api(httplib::Server& server, SessionService& service, const HttpOptions& options) {
    auto cors = options.cors_origin;
    server.set_post_routing_handler([cors](const httplib::Request&, httplib::Response& res) {
        res.set_header("Access-Control-Allow-Origin", cors);
        res.set_header("Access-Control-Allow-Headers", "Content-Type, Authorization");
        res.set_header("Access-Control-Allow-Methods", "GET, POST, PATCH, DELETE, OPTIONS");
    });

    if (options.bearer_token) {
        auto expected = "Bearer " + *options.bearer_token;
        server.set_pre_routing_handler([expected](const httplib::Request& req, httplib::Response& res) {
            if (req.method == "OPTIONS" || req.path == "/healthz") return httplib::Server::HandlerResponse::Unhandled;
            if (req.get_header_value("Authorization") == expected) return httplib::Server::HandlerResponse::Unhandled;
            send(res, 401, json{{"code", "unauthorized"}, {"message", "missing or wrong bearer token"}, {"trace_id", nullptr}});
            return httplib::Server::HandlerResponse::Handled;
        });
    }

    server.Options(R"(.*)", [](const httplib::Request&, httplib::Response& res) { res.status = 204; });

    server.Get("/healthz", [](const httplib::Request&, httplib::Response& res) {
        send(res, 200, json{{"status", "ok"}});
    });

    server.Post("/sessions", guarded([&service](const httplib::Request& req, httplib::Response& res) {
        auto body = parse_body(req);
        PersonaScenario scenario = body.contains("scenario") ? body.at("scenario").get<PersonaScenario>()
                                                             : body.get<PersonaScenario>();
        auto principles = jsonio::get_or(body, "principles", std::vector<std::string>{});
        std::optional<PipelineVariant> variant;
        if (auto v = jsonio::get_optional<std::string>(body, "active_variant")) variant = parse_variant(*v);
        auto id = service.create_session(std::move(scenario), principles, variant);
        send(res, 201, json{{"session_id", id}, {"session", *service.get_session(id)}});
    }));

    server.Get("/sessions", guarded([&service](const httplib::Request&, httplib::Response& res) {
        send(res, 200, json{{"sessions", service.list_sessions()}});
    }));

    server.Get(R"(/sessions/([^/]+))", guarded([&service](const httplib::Request& req, httplib::Response& res) {
        send(res, 200, *service.get_session(req.matches[1]));
    }));

    server.Post(R"(/sessions/([^/]+)/messages)",
                guarded([&service](const httplib::Request& req, httplib::Response& res) {
                    auto body = parse_body(req);
                    std::string id = req.matches[1];
                    auto turn = service.post_counselor_message(id, required_text(body, "text"));
                    send(res, 200, turn_reply(*service.get_session(id), turn));
                }));

    server.Post(R"(/sessions/([^/]+)/feedback)",
                guarded([&service](const httplib::Request& req, httplib::Response& res) {
                    auto item = parse_body(req).get<FeedbackItem>();
                    auto fid = service.submit_feedback(req.matches[1], std::move(item));
                    send(res, 201, json{{"feedback_id", fid}});
                }));

    server.Post(R"(/sessions/([^/]+)/feedback/([^/]+)/convert)",
                guarded([&service](const httplib::Request& req, httplib::Response& res) {
                    std::string id = req.matches[1];
                    auto result = service.convert_feedback(id, req.matches[2]);
                    json out{{"principle", result.principle},
                             {"created", result.created},
                             {"constitution_version", service.get_session(id)->constitution.version}};
                    jsonio::put(out, "elicitation", result.elicitation);
                    send(res, result.created ? 201 : 200, out);
                }));

    server.Post(R"(/sessions/([^/]+)/rewind)", guarded([&service](const httplib::Request& req, httplib::Response& res) {
        std::string id = req.matches[1];
        auto turn = service.rewind_and_regenerate(id);
        send(res, 200, turn_reply(*service.get_session(id), turn));
    }));

    server.Post(R"(/sessions/([^/]+)/principles)",
                guarded([&service](const httplib::Request& req, httplib::Response& res) {
                    auto body = parse_body(req);
                    std::string id = req.matches[1];
                    auto p = service.add_principle(id, required_text(body, "text"));
                    send(res, 201, json{{"principle", p}, {"constitution", service.get_session(id)->constitution}});
                }));

    server.Patch(R"(/sessions/([^/]+)/principles/([^/]+))",
                 guarded([&service](const httplib::Request& req, httplib::Response& res) {
                     auto body = parse_body(req);
                     std::string id = req.matches[1];
                     auto p = service.edit_principle(id, req.matches[2], required_text(body, "text"));
                     send(res, 200, json{{"principle", p}, {"constitution", service.get_session(id)->constitution}});
                 }));

    server.Delete(R"(/sessions/([^/]+)/principles/([^/]+))",
                  guarded([&service](const httplib::Request& req, httplib::Response& res) {
                      std::string id = req.matches[1];
                      service.delete_principle(id, req.matches[2]);
                      send(res, 200, json{{"constitution", service.get_session(id)->constitution}});
                  }));

    server.Get(R"(/sessions/([^/]+)/export)", guarded([&service](const httplib::Request& req, httplib::Response& res) {
        send(res, 200, service.export_transcript(req.matches[1]));
    }));

    server.Get(R"(/sessions/([^/]+)/events)", guarded([&service](const httplib::Request& req, httplib::Response& res) {
        std::string id = req.matches[1];
        service.get_session(id);
        send(res, 200, json{{"events", service.events(id)}});
    }));

    server.Post(R"(/sessions/([^/]+)/close)", guarded([&service](const httplib::Request& req, httplib::Response& res) {
        std::string id = req.matches[1];
        service.close(id);
        send(res, 200, *service.get_session(id));
    }));

    server.Post(R"(/sessions/([^/]+)/preview)",
                guarded([&service](const httplib::Request& req, httplib::Response& res) {
                    auto body = parse_body(req);
                    auto reply = service.preview(req.matches[1], required_text(body, "text"));
                    send(res, 200, json{{"text", reply.text}, {"trace", reply.trace}});
                }));
}

}  // namespace patientsim::session
