#pragma once

#include "histscan/error.hpp"
#include "histscan/service.hpp"

namespace httplib {
class Server;
}

namespace histscan {

/// HTTP status used for an error code: 409 VersionConflict, 404 unknown
/// resources, 400 malformed requests, 500 storage failures, 422 otherwise.
int http_status(ErrorCode code);

/// Installs the JSON API over `service`:
///
///   GET  /volumes                      GET  /volumes/{id}
///   POST /volumes                      GET  /volumes/{id}/scans
///   GET  /scans/{id}/image             POST /volumes/{id}/pages
///   POST /volumes/{id}/transition      POST /volumes/{id}/articles
///   POST /volumes/{id}/finalize        GET  /volumes/{id}/export
///
/// Every mutation except POST /volumes must carry "expected_version".
/// Failures return {"error": <code>, "message": ..., "details": {...}}.
void install_routes(httplib::Server& server, CaptureService& service);

}  // namespace histscan
