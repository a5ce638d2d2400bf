#pragma once

// Coefficient data from the LMFDB newform API, with an on-disk cache.
//
// Network access goes through a caller-supplied Transport so that everything
// here is testable offline; lmfdb_http.hpp provides the HTTP one.

#include <chrono>
#include <cstdlib>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iomanip>
#include <optional>
#include <regex>
#include <sstream>
#include <string>
#include <unistd.h>

#include <json.hpp>

#include "periodlab/modular.hpp"

namespace periodlab {

inline constexpr const char* kDefaultLmfdbTemplate =
    "https://www.lmfdb.org/api/mf_newforms/?label={label}&_format=json&_fields=label,weight,level,traces";

/// Response of one GET. `ok` is false on transport failure (DNS, TLS,
/// timeout); status carries the HTTP status otherwise.
struct HttpResponse {
  bool ok = false;
  int status = 0;
  std::string body;
  std::string error;
};

using Transport = std::function<HttpResponse(const std::string& url)>;

struct LmfdbConfig {
  std::string url_template = kDefaultLmfdbTemplate;
  bool offline = false;
  std::filesystem::path cache_dir;
};

/// PERIODLAB_CACHE, else `fallback`.
inline std::filesystem::path default_cache_dir(const std::filesystem::path& fallback) {
  if (const char* env = std::getenv("PERIODLAB_CACHE"); env && *env) return env;
  return fallback;
}

inline bool valid_label(const std::string& label) {
  static const std::regex shape(R"(^[0-9]+\.[0-9]+\.[a-z]+\.[a-z]+$)");
  return std::regex_match(label, shape);
}

inline std::filesystem::path cache_path(const std::filesystem::path& dir, const std::string& label) {
  return dir / (label + ".coeffs");
}

struct CacheEntry {
  std::string label;
  std::string fetched_at;
  std::string payload;
  std::string source_url;
};

namespace detail {

inline std::string expand_template(std::string tpl, const std::string& label) {
  for (auto pos = tpl.find("{label}"); pos != std::string::npos; pos = tpl.find("{label}", pos + label.size()))
    tpl.replace(pos, 7, label);
  return tpl;
}

inline std::string utc_now() {
  std::time_t t = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&t, &tm);
  std::ostringstream os;
  os << std::put_time(&tm, "%Y-%m-%dT%H:%M:%SZ");
  return os.str();
}

inline std::string read_file(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

/// Value of a `# key value` comment line, if present.
inline std::string comment_field(const std::string& payload, const std::string& key) {
  std::istringstream in(payload);
  std::string line;
  const std::string prefix = "# " + key + " ";
  while (std::getline(in, line))
    if (line.rfind(prefix, 0) == 0) return line.substr(prefix.size());
  return {};
}

}  // namespace detail

/// Converts an API response into coefficient-file text. `traces` holds a_1,
/// a_2, ...; a leading a_0 = 0 is tolerated.
inline ModularForm form_from_api_json(const std::string& body, const std::string& label) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(body);
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorKind::rejected_payload, std::string("response is not JSON: ") + e.what());
  }
  const nlohmann::json* rec = nullptr;
  if (doc.is_object() && doc.contains("data") && doc["data"].is_array()) {
    for (const auto& r : doc["data"])
      if (r.is_object() && r.value("label", "") == label) rec = &r;
    if (!rec && doc["data"].empty()) throw Error(ErrorKind::not_found, "LMFDB has no newform labelled " + label);
  }
  if (!rec) throw Error(ErrorKind::rejected_payload, "response does not contain a record for " + label);
  try {
    ModularForm f;
    f.label = label;
    f.weight = rec->at("weight").get<int>();
    f.level = rec->at("level").get<long>();
    const auto& tr = rec->at("traces");
    std::vector<Integer> a;
    for (const auto& x : tr) a.push_back(x.is_string() ? parse_integer(x.get<std::string>()) : Integer(x.get<long long>()));
    std::size_t off = 0;
    if (a.size() >= 2 && a[0] == 0 && a[1] == 1) off = 1;
    if (a.size() <= off || a[off] != 1) throw Error(ErrorKind::rejected_payload, "a_1 must be 1");
    for (std::size_t i = off; i < a.size(); ++i) {
      const long n = static_cast<long>(i - off + 1);
      if (is_prime(n)) f.ap[n] = a[i];
    }
    return f;
  } catch (const Error&) {
    throw;
  } catch (const std::exception& e) {
    throw Error(ErrorKind::rejected_payload, std::string("malformed newform record: ") + e.what());
  }
}

/// Writes `text` to `path` through a temporary file in the same directory
/// and an atomic rename.
inline void atomic_write(const std::filesystem::path& path, const std::string& text) {
  std::filesystem::create_directories(path.parent_path());
  auto tmp = path;
  tmp += ".tmp." + std::to_string(::getpid());
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw Error(ErrorKind::offline, "cannot write " + tmp.string());
    out << text;
    out.flush();
    if (!out) {
      std::filesystem::remove(tmp);
      throw Error(ErrorKind::offline, "short write to " + tmp.string());
    }
  }
  std::filesystem::rename(tmp, path);
}

inline std::optional<CacheEntry> read_cache(const std::filesystem::path& dir, const std::string& label) {
  const auto p = cache_path(dir, label);
  if (!std::filesystem::exists(p)) return std::nullopt;
  CacheEntry e;
  e.label = label;
  e.payload = detail::read_file(p);
  e.fetched_at = detail::comment_field(e.payload, "fetched_at");
  e.source_url = detail::comment_field(e.payload, "source");
  return e;
}

namespace detail {

inline bool covers(const ModularForm& f, long upto) {
  for (long p : primes_up_to(upto))
    if (!f.ap.count(p)) return false;
  return true;
}

}  // namespace detail

/// Coefficient-file text for `label` with a_p for every prime <= upto,
/// served from the cache when it suffices and fetched otherwise.
inline std::string fetch_coefficients(const std::string& label, long upto, const LmfdbConfig& cfg, const Transport& transport) {
  if (!valid_label(label)) throw Error(ErrorKind::usage, "malformed newform label '" + label + "'");
  const auto path = cache_path(cfg.cache_dir, label);
  if (auto cached = read_cache(cfg.cache_dir, label)) {
    ModularForm f = parse_coefficients(cached->payload);
    if (f.label != label) throw Error(ErrorKind::rejected_payload, "cache file " + path.string() + " is for " + f.label);
    if (detail::covers(f, upto)) return cached->payload;
  }
  if (cfg.offline || !transport)
    throw Error(ErrorKind::offline, "no usable cache for " + label + "; populate " + path.string() + " manually");
  const std::string url = detail::expand_template(cfg.url_template, label);
  HttpResponse r = transport(url);
  if (!r.ok) throw Error(ErrorKind::offline, "fetching " + url + " failed (" + r.error + "); populate " + path.string() + " manually");
  if (r.status == 404) throw Error(ErrorKind::not_found, "LMFDB has no newform labelled " + label);
  if (r.status != 200) throw Error(ErrorKind::offline, "LMFDB returned HTTP " + std::to_string(r.status) + "; populate " + path.string() + " manually");

  ModularForm f = form_from_api_json(r.body, label);
  check_deligne_bound(f);
  if (!detail::covers(f, upto))
    throw Error(ErrorKind::rejected_payload, "response covers a_p only up to p = " + std::to_string(f.max_prime()));

  std::ostringstream os;
  os << "# source " << url << '\n' << "# fetched_at " << detail::utc_now() << '\n' << serialize_coefficients(f);
  const std::string payload = os.str();
  parse_coefficients(payload);  // must round-trip before it reaches the cache
  atomic_write(path, payload);
  return payload;
}

/// Loads a form by label through the cache, or directly from a file path.
inline ModularForm load_form(const std::string& label_or_file, long upto, const LmfdbConfig& cfg, const Transport& transport) {
  if (valid_label(label_or_file)) {
    ModularForm f = parse_coefficients(fetch_coefficients(label_or_file, upto, cfg, transport));
    check_deligne_bound(f);
    return f;
  }
  ModularForm f = read_coefficient_file(label_or_file);
  check_deligne_bound(f);
  return f;
}

}  // namespace periodlab
