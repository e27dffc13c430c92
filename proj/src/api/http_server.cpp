#include "zkmlops/api/http_server.hpp"

#include <algorithm>
#include <cctype>

#include "httplib.h"

namespace zkmlops::api {

struct HttpServer::Impl {
  httplib::Server server;
};

namespace {

Request convert(const httplib::Request& in) {
  Request r;
  r.method = in.method;
  r.path = in.path;
  for (const auto& [k, v] : in.params) r.query[k] = v;
  for (const auto& [k, v] : in.headers) {
    std::string key = k;
    std::transform(key.begin(), key.end(), key.begin(), [](unsigned char c) { return std::tolower(c); });
    r.headers[key] = v;
  }
  r.body = in.body;
  return r;
}

}  // namespace

HttpServer::HttpServer(Router& router) : impl_(std::make_unique<Impl>()) {
  auto handler = [&router](const httplib::Request& req, httplib::Response& res) {
    Response out = router.handle(convert(req));
    res.status = out.status;
    res.set_content(out.body, out.content_type);
  };
  impl_->server.Get(".*", handler);
  impl_->server.Post(".*", handler);
  impl_->server.Put(".*", handler);
  impl_->server.Delete(".*", handler);
}

HttpServer::~HttpServer() { stop(); }

int HttpServer::bind(const std::string& host, int port) {
  int bound = port;
  if (port == 0) {
    bound = impl_->server.bind_to_any_port(host);
  } else if (!impl_->server.bind_to_port(host, port)) {
    bound = -1;
  }
  if (bound <= 0) throw Error(Errc::Io, "cannot bind " + host + ":" + std::to_string(port));
  return bound;
}

void HttpServer::listen() { impl_->server.listen_after_bind(); }

void HttpServer::stop() {
  if (impl_) impl_->server.stop();
}

std::pair<std::string, int> parse_listen(const std::string& spec) {
  auto colon = spec.rfind(':');
  if (colon == std::string::npos) throw Error(Errc::InvalidArgument, "--listen expects host:port");
  std::string host = spec.substr(0, colon);
  if (host.empty()) host = "127.0.0.1";
  int port = 0;
  try {
    port = std::stoi(spec.substr(colon + 1));
  } catch (const std::exception&) {
    throw Error(Errc::InvalidArgument, "bad port in '" + spec + "'");
  }
  if (port < 0 || port > 65535) throw Error(Errc::InvalidArgument, "bad port in '" + spec + "'");
  return {host, port};
}

}  // namespace zkmlops::api
