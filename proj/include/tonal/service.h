/**
 * @file service.h
 * @brief Local stateless HTTP service over the api layer.
 *
 * POST /analyze, /recover, /edit, /metrics; GET /library?filter=, /manifest.
 * 400 malformed JSON, 422 invalid content or configuration, 413 bodies over
 * 4 MiB, 500 anything else. Error bodies are {"error": kind, "message": ...}.
 */
#pragma once

#include <cstddef>
#include <memory>
#include <string>

#include "tonal/api.h"

namespace httplib {
class Server;
}

namespace tonal::service {

inline constexpr std::size_t kMaxBodyBytes = 4u << 20;

/// Registers every route on a fresh server; `context` must outlive it.
std::unique_ptr<httplib::Server> make_server(const api::Context& context);

/// Blocks until the server stops. Throws ConfigError if the port cannot be
/// bound.
void serve(const api::Context& context, const std::string& host, int port);

}  // namespace tonal::service
