#pragma once

#include <chrono>
#include <memory>
#include <string>
#include <string_view>

namespace httplib {
class Client;
}

namespace intent_router::detail {

struct ParsedUrl {
  std::string origin;     // scheme://host[:port]
  std::string base_path;  // path prefix without trailing slash, may be empty
};

// Throws Error(kInvalidArgument) for URLs without scheme or host.
ParsedUrl parse_url(std::string_view url);

std::unique_ptr<httplib::Client> make_client(const ParsedUrl& url, std::chrono::milliseconds timeout);

// Bearer token from the environment, empty when unset.
std::string env_or_empty(const char* name);

}  // namespace intent_router::detail
