#pragma once

#include <exception>
#include <string>

#include <json.hpp>

#include "nlds/session.hpp"

namespace httplib {
class Server;
}

namespace nlds {

/// HTTP status for a failed request: 404 for unknown sessions, turns and
/// candidates; 400 for malformed input; 409 for view name clashes; 422 for
/// questions or scripts the engine rejects; 500 otherwise.
int http_status(const std::exception& e);
/// {"error": <kind>, "message": ..., ["statement": n]}
nlohmann::json error_body(const std::exception& e);

/// Installs the /api routes on `server`. `service` must outlive it.
void register_routes(httplib::Server& server, SessionService& service);

}  // namespace nlds
