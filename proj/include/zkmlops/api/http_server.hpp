#pragma once

#include <memory>
#include <string>

#include "zkmlops/api/router.hpp"

namespace zkmlops::api {

// HTTP/1.1 front end for Router. listen() blocks until stop().
class HttpServer {
 public:
  explicit HttpServer(Router& router);
  ~HttpServer();

  // Binds host:port; port 0 picks a free port. Returns the bound port or
  // throws Io.
  int bind(const std::string& host, int port);
  void listen();
  void stop();

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

// "host:port" or ":port".
std::pair<std::string, int> parse_listen(const std::string& spec);

}  // namespace zkmlops::api
