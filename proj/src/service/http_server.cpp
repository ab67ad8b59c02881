#include "service/http_server.hpp"

#include <atomic>
#include <sstream>

#include "httplib.h"

namespace mocg::service {

using nlohmann::json;

namespace {

void send_json(httplib::Response& res, const json& body, int status = 200) {
  res.status = status;
  res.set_content(body.dump(), "application/json");
}

void send_error(httplib::Response& res, const Error& e) { send_json(res, error_body(e), http_status(e.code())); }

json parse_body(const httplib::Request& req) {
  try {
    return json::parse(req.body);
  } catch (const json::parse_error& e) {
    fail(ErrorCode::InvalidArgument, std::string("request body is not JSON: ") + e.what());
  }
}

std::vector<std::string> split_list(const std::string& text) {
  std::vector<std::string> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ','))
    if (!item.empty()) out.push_back(item);
  return out;
}

std::uint64_t parse_count(const std::string& text, const char* name) {
  try {
    std::size_t used = 0;
    long long v = std::stoll(text, &used);
    if (used != text.size() || v < 0) throw std::invalid_argument(name);
    return static_cast<std::uint64_t>(v);
  } catch (const std::exception&) {
    fail(ErrorCode::InvalidArgument, std::string("bad ") + name + " '" + text + "'", {{name, text}});
  }
}

}  // namespace

struct HttpServer::Impl {
  Service& service;
  httplib::Server server;
  std::atomic<bool> stopping{false};

  explicit Impl(Service& s) : service(s) {}

  // Runs fn and turns thrown errors into error bodies.
  template <class F>
  httplib::Server::Handler wrap(F fn) {
    return [fn](const httplib::Request& req, httplib::Response& res) {
      try {
        fn(req, res);
      } catch (const Error& e) {
        send_error(res, e);
      } catch (const json::exception& e) {
        send_error(res, Error(ErrorCode::InvalidArgument, e.what()));
      } catch (const std::exception& e) {
        send_error(res, Error(ErrorCode::Internal, e.what()));
      }
    };
  }

  void routes() {
    auto& s = service;
    server.Get("/health", wrap([](const auto&, auto& res) { send_json(res, {{"status", "ok"}}); }));

    server.Post("/datasets", wrap([&s](const auto& req, auto& res) { send_json(res, s.add_dataset(req.body)); }));
    server.Get("/datasets/:id/variables",
               wrap([&s](const auto& req, auto& res) { send_json(res, s.dataset_variables(req.path_params.at("id"))); }));
    server.Get("/datasets/:id/correlations", wrap([&s](const auto& req, auto& res) {
                 std::size_t top = req.has_param("top") ? parse_count(req.get_param_value("top"), "top") : 0;
                 send_json(res, s.correlations(req.path_params.at("id"), req.get_param_value("outcome"), top));
               }));
    server.Get("/datasets/:id/matrix", wrap([&s](const auto& req, auto& res) {
                 send_json(res, s.matrix(req.path_params.at("id"), split_list(req.get_param_value("vars"))));
               }));

    server.Post("/jobs", wrap([&s](const auto& req, auto& res) { send_json(res, s.create_job(parse_body(req))); }));
    server.Get("/jobs/:id/snapshot",
               wrap([&s](const auto& req, auto& res) { send_json(res, s.job_snapshot(req.path_params.at("id"))); }));
    for (const char* action : {"pause", "resume", "stop"}) {
      server.Post(std::string("/jobs/:id/") + action, wrap([&s, action](const auto& req, auto& res) {
                    send_json(res, s.job_control(req.path_params.at("id"), action));
                  }));
    }
    server.Get("/jobs/:id/events", wrap([this](const auto& req, auto& res) { stream_events(req, res); }));

    server.Post("/graphs", wrap([&s](const auto& req, auto& res) { send_json(res, s.create_graph(parse_body(req))); }));
    server.Get("/graphs/:id", wrap([&s](const auto& req, auto& res) { send_json(res, s.get_graph(req.path_params.at("id"))); }));
    server.Post("/graphs/:id/edits", wrap([&s](const auto& req, auto& res) {
                  send_json(res, s.apply_edit(req.path_params.at("id"), parse_body(req)));
                }));
    server.Post("/graphs/:id/save",
                wrap([&s](const auto& req, auto& res) { send_json(res, s.save_graph(req.path_params.at("id"))); }));
    server.Get("/history", wrap([&s](const auto&, auto& res) { send_json(res, s.history()); }));
    server.Post("/comparisons", wrap([&s](const auto& req, auto& res) { send_json(res, s.compare(parse_body(req))); }));
  }

  void stream_events(const httplib::Request& req, httplib::Response& res) {
    std::string id = req.path_params.at("id");
    std::uint64_t after = req.has_param("after") ? parse_count(req.get_param_value("after"), "after") : 0;
    if (auto last = req.get_header_value("Last-Event-ID"); !last.empty()) after = parse_count(last, "Last-Event-ID");
    bool done = false;
    // Fail fast on unknown ids before committing to a stream.
    auto first = service.job_events(id, after, std::chrono::milliseconds(0), &done);

    struct Cursor {
      std::uint64_t after;
      std::vector<json> pending;
      bool done;
    };
    auto cursor = std::make_shared<Cursor>(Cursor{after, std::move(first), done});
    res.set_header("Cache-Control", "no-cache");
    res.set_chunked_content_provider("text/event-stream", [this, id, cursor](std::size_t, httplib::DataSink& sink) {
      if (cursor->pending.empty() && !cursor->done) {
        try {
          cursor->pending = service.job_events(id, cursor->after, std::chrono::milliseconds(500), &cursor->done);
        } catch (const Error&) {
          cursor->done = true;
        }
      }
      for (const auto& ev : cursor->pending) {
        std::string frame = "id: " + std::to_string(ev.at("seq").get<std::uint64_t>()) + "\ndata: " + ev.dump() + "\n\n";
        if (!sink.write(frame.data(), frame.size())) return false;
        cursor->after = ev.at("seq").get<std::uint64_t>();
      }
      cursor->pending.clear();
      if (cursor->done || stopping) sink.done();
      return true;
    });
  }
};

HttpServer::HttpServer(Service& service) : impl_(std::make_unique<Impl>(service)) { impl_->routes(); }

HttpServer::~HttpServer() { stop(); }

int HttpServer::bind(const std::string& host, int port) {
  int bound = port == 0 ? impl_->server.bind_to_any_port(host) : (impl_->server.bind_to_port(host, port) ? port : -1);
  if (bound < 0) fail(ErrorCode::Io, "cannot bind " + host + ":" + std::to_string(port), {{"host", host}, {"port", port}});
  return bound;
}

bool HttpServer::run() { return impl_->server.listen_after_bind(); }

void HttpServer::stop() {
  impl_->stopping = true;
  impl_->server.stop();
}

}  // namespace mocg::service
