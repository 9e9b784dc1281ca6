#include "http_util.hpp"

#include <cstdlib>

#include <httplib.h>

#include "intent_router/error.hpp"

namespace intent_router::detail {

ParsedUrl parse_url(std::string_view url) {
  const auto scheme_end = url.find("://");
  if (scheme_end == std::string_view::npos || scheme_end == 0) {
    throw Error(ErrorCode::kInvalidArgument, "URL lacks a scheme: " + std::string(url));
  }
  const auto host_begin = scheme_end + 3;
  const auto path_begin = url.find('/', host_begin);
  ParsedUrl out;
  out.origin = std::string(url.substr(0, path_begin));
  if (out.origin.size() <= host_begin) {
    throw Error(ErrorCode::kInvalidArgument, "URL lacks a host: " + std::string(url));
  }
  if (path_begin != std::string_view::npos) {
    out.base_path = std::string(url.substr(path_begin));
    while (!out.base_path.empty() && out.base_path.back() == '/') out.base_path.pop_back();
  }
  return out;
}

std::unique_ptr<httplib::Client> make_client(const ParsedUrl& url, std::chrono::milliseconds timeout) {
  auto client = std::make_unique<httplib::Client>(url.origin);
  if (!client->is_valid()) {
    throw Error(ErrorCode::kInvalidArgument, "unsupported endpoint: " + url.origin);
  }
  const auto sec = static_cast<time_t>(timeout.count() / 1000);
  const auto usec = static_cast<time_t>((timeout.count() % 1000) * 1000);
  client->set_connection_timeout(sec, usec);
  client->set_read_timeout(sec, usec);
  client->set_write_timeout(sec, usec);
  return client;
}

std::string env_or_empty(const char* name) {
  const char* value = std::getenv(name);
  return value ? std::string(value) : std::string();
}

}  // namespace intent_router::detail
