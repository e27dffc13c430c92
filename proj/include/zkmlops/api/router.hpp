#pragma once

#include <map>
#include <string>

#include "zkmlops/api/service.hpp"
#include "zkmlops/common/error.hpp"

namespace zkmlops::api {

struct Request {
  std::string method;
  std::string path;
  std::map<std::string, std::string> query;
  std::map<std::string, std::string> headers;  // lower-case names
  std::string body;
};

struct Response {
  int status = 200;
  std::string content_type = "application/json";
  std::string body;
};

// Unknown resources 404, preconditions 409, validation 400, execution 500.
int http_status(Errc code) noexcept;

// Transport-independent REST surface. Holds no state of its own.
class Router {
 public:
  explicit Router(Service& service) : svc_(service) {}
  Response handle(const Request& request);

 private:
  Response dispatch(const Request& request);
  Service& svc_;
};

}  // namespace zkmlops::api
