#pragma once

#include <memory>
#include <string>

#include "service/service.hpp"

namespace mocg::service {

// JSON-over-HTTP front end for a Service. Job events are streamed as
// text/event-stream, one JSON object per `data:` line.
class HttpServer {
 public:
  explicit HttpServer(Service& service);
  ~HttpServer();

  // Binds host:port (port 0 picks a free one) and returns the bound port.
  int bind(const std::string& host, int port);
  // Serves until stop(); call after bind().
  bool run();
  void stop();

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

}  // namespace mocg::service
