#pragma once

#include <optional>
#include <string>

#include <nlohmann/json.hpp>

#include "patientsim/session/service.hpp"

namespace httplib {
class Server;
}

namespace patientsim::session {

struct HttpOptions {
    std::optional<std::string> bearer_token;  // required on every route but /healthz when set
    std::string cors_origin = "*";
};

// HTTP status for an error code.
int http_status(ErrorCode code);

// {code, message, trace_id} body for an exception escaping a handler.
nlohmann::json error_body(const std::exception& e);

// Registers the session routes on `server`. The service must outlive it.
void mount_session_api(httplib::Server& server, SessionService& service, const HttpOptions& options = {});

}  // namespace patientsim::session
