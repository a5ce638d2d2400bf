#pragma once

// HTTPS transport for the LMFDB client. Requires OpenSSL.

#define CPPHTTPLIB_OPENSSL_SUPPORT
#include <httplib.h>

#include <regex>
#include <string>

#include "periodlab/lmfdb.hpp"

namespace periodlab {

inline HttpResponse http_get(const std::string& url) {
  static const std::regex parts(R"(^(https?://[^/]+)(/.*)?$)");
  std::smatch m;
  HttpResponse out;
  if (!std::regex_match(url, m, parts)) {
    out.error = "unsupported URL " + url;
    return out;
  }
  httplib::Client cli(m[1].str());
  cli.set_connection_timeout(10);
  cli.set_read_timeout(30);
  cli.set_follow_location(true);
  auto res = cli.Get(m[2].matched ? m[2].str() : "/");
  if (!res) {
    out.error = httplib::to_string(res.error());
    return out;
  }
  out.ok = true;
  out.status = res->status;
  out.body = res->body;
  return out;
}

inline Transport http_transport() { return http_get; }

}  // namespace periodlab
