#include "tonal/service.h"

#include <httplib.h>

#include "tonal/error.h"

namespace tonal::service {

namespace {

constexpr const char* kJson = "application/json";

void send_error(httplib::Response& res, int status, const char* kind, const std::string& message) {
  res.status = status;
  res.set_content(dump(Json{{"error", kind}, {"message", message}}), kJson);
}

// Runs a handler, mapping parse failures to 400 and contract failures to 422.
template <typename Fn>
void guarded(httplib::Response& res, Fn&& fn) {
  try {
    fn();
  } catch (const Json::parse_error& e) {
    send_error(res, 400, "malformed_body", e.what());
  } catch (const InputError& e) {
    send_error(res, 422, "input_error", e.what());
  } catch (const ConfigError& e) {
    send_error(res, 422, "config_error", e.what());
  } catch (const Json::exception& e) {
    send_error(res, 422, "input_error", e.what());
  } catch (const std::exception& e) {
    send_error(res, 500, "internal_error", e.what());
  }
}

Json body_of(const httplib::Request& req) { return Json::parse(req.body); }

int int_param(const Json& body, const char* name, int fallback) {
  if (!body.is_object() || !body.contains(name)) return fallback;
  if (!body[name].is_number_integer()) throw ConfigError(std::string(name) + " must be an integer");
  return body[name].get<int>();
}

}  // namespace

std::unique_ptr<httplib::Server> make_server(const api::Context& context) {
  auto server = std::make_unique<httplib::Server>();
  server->set_payload_max_length(kMaxBodyBytes);

  server->Post("/analyze", [](const httplib::Request& req, httplib::Response& res) {
    guarded(res, [&] {
      const Json body = body_of(req);
      std::optional<Tonality> tonality;
      if (body.is_object() && body.contains("tonality")) tonality = tonality_from_json(body["tonality"]);
      res.set_content(dump(api::analyze(body, int_param(body, "beam_width", 8), tonality)), kJson);
    });
  });

  server->Post("/recover", [&context](const httplib::Request& req, httplib::Response& res) {
    guarded(res, [&] {
      const auto request = api::recover_request_from_json(body_of(req));
      res.set_content(dump(to_json(api::recover(request, context))), kJson);
    });
  });

  server->Post("/edit", [](const httplib::Request& req, httplib::Response& res) {
    guarded(res, [&] { res.set_content(dump(api::edit(body_of(req))), kJson); });
  });

  server->Post("/metrics", [](const httplib::Request& req, httplib::Response& res) {
    guarded(res, [&] {
      const Json body = body_of(req);
      api::EvalOptions options;
      const int runs = int_param(body, "runs", 0);
      if (runs < 0) throw ConfigError("runs must be non-negative");
      options.runs = static_cast<std::size_t>(runs);
      options.beam_width = int_param(body, "beam_width", 8);
      res.set_content(dump(api::evaluate(api::eval_pieces_from_json(body), options)), kJson);
    });
  });

  server->Get("/library", [&context](const httplib::Request& req, httplib::Response& res) {
    guarded(res, [&] {
      const auto filter = LibraryFilter::parse(req.has_param("filter") ? req.get_param_value("filter") : "");
      res.set_content(api::library_jsonl(*context.library(filter)), "application/x-ndjson");
    });
  });

  server->Get("/manifest", [&context](const httplib::Request&, httplib::Response& res) {
    if (!context.manifest()) {
      send_error(res, 404, "not_found", "no manifest loaded (start the service with --manifest)");
      return;
    }
    res.set_content(dump(*context.manifest()), kJson);
  });

  return server;
}

void serve(const api::Context& context, const std::string& host, int port) {
  auto server = make_server(context);
  if (!server->bind_to_port(host, port)) {
    throw ConfigError("cannot bind " + host + ":" + std::to_string(port));
  }
  server->listen_after_bind();
}

}  // namespace tonal::service
