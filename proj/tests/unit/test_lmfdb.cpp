#include <filesystem>

#include "support.hpp"

using namespace periodlab;
using namespace periodlab::testing;
namespace fs = std::filesystem;

namespace {

struct TempDir {
  fs::path path;
  TempDir() {
    path = fs::temp_directory_path() / ("periodlab-test-" + std::to_string(::getpid()) + "-" + std::to_string(counter()++));
    fs::remove_all(path);
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
  static int& counter() {
    static int n = 0;
    return n;
  }
};

// LMFDB-shaped body with traces a_1..a_n (optionally preceded by a_0 = 0).
std::string api_body(const std::string& label, int weight, long level, const std::vector<Integer>& a, bool with_a0 = false) {
  nlohmann::json traces = nlohmann::json::array();
  if (with_a0) traces.push_back(0);
  for (std::size_t n = 1; n < a.size(); ++n) traces.push_back(a[n].convert_to<long long>());
  nlohmann::json rec = {{"label", label}, {"weight", weight}, {"level", level}, {"traces", traces}};
  return nlohmann::json{{"data", nlohmann::json::array({rec})}}.dump();
}

struct Stub {
  std::vector<std::string> urls;
  HttpResponse response;
  Transport transport() {
    return [this](const std::string& url) {
      urls.push_back(url);
      return response;
    };
  }
};

HttpResponse ok(std::string body) { return {true, 200, std::move(body), {}}; }

std::vector<Integer> f2_expansion(long upto) { return eta_f2_crosscheck(upto); }

std::vector<fs::path> files_in(const fs::path& dir) {
  std::vector<fs::path> out;
  for (const auto& e : fs::directory_iterator(dir)) out.push_back(e.path().filename());
  return out;
}

}  // namespace

TEST(Lmfdb, Labels) {
  EXPECT_TRUE(valid_label("14.2.a.a"));
  EXPECT_TRUE(valid_label("1234.12.c.bq"));
  for (const char* bad : {"14.2.a", "14.2.A.a", "x.2.a.a", "14.2.a.a/../x", "", "14.2.a.a "}) EXPECT_FALSE(valid_label(bad)) << bad;
  EXPECT_EQ(cache_path("/c", "14.2.a.a"), fs::path("/c/14.2.a.a.coeffs"));
  EXPECT_EQ(detail::expand_template("http://h/{label}?l={label}", "14.2.a.a"), "http://h/14.2.a.a?l=14.2.a.a");
}

TEST(Lmfdb, FetchWritesCacheThenServesFromIt) {
  TempDir dir;
  Stub stub;
  stub.response = ok(api_body("14.2.a.a", 2, 14, f2_expansion(120)));
  LmfdbConfig cfg;
  cfg.cache_dir = dir.path;
  cfg.url_template = "http://stub/{label}";
  const std::string first = fetch_coefficients("14.2.a.a", 100, cfg, stub.transport());
  ASSERT_EQ(stub.urls, std::vector<std::string>{"http://stub/14.2.a.a"});
  const auto entry = read_cache(dir.path, "14.2.a.a");
  ASSERT_TRUE(entry);
  EXPECT_EQ(entry->payload, first);
  EXPECT_EQ(entry->source_url, "http://stub/14.2.a.a");
  EXPECT_EQ(entry->fetched_at.size(), 20u);
  EXPECT_EQ(entry->fetched_at.back(), 'Z');

  const std::string second = fetch_coefficients("14.2.a.a", 100, cfg, stub.transport());
  EXPECT_EQ(second, first);
  EXPECT_EQ(stub.urls.size(), 1u);
  cfg.offline = true;
  EXPECT_EQ(fetch_coefficients("14.2.a.a", 50, cfg, nullptr), first);

  const ModularForm f = parse_coefficients(first);
  for (long p : primes_up_to(100)) EXPECT_EQ(f.ap.at(p), ap_point_count(x0_14(), p).ap) << "p = " << p;
  EXPECT_EQ(files_in(dir.path), std::vector<fs::path>{"14.2.a.a.coeffs"});
}

TEST(Lmfdb, RefetchesWhenCacheIsShort) {
  TempDir dir;
  Stub stub;
  LmfdbConfig cfg;
  cfg.cache_dir = dir.path;
  stub.response = ok(api_body("14.2.a.a", 2, 14, f2_expansion(30)));
  fetch_coefficients("14.2.a.a", 30, cfg, stub.transport());
  stub.response = ok(api_body("14.2.a.a", 2, 14, f2_expansion(200)));
  const ModularForm f = parse_coefficients(fetch_coefficients("14.2.a.a", 150, cfg, stub.transport()));
  EXPECT_EQ(stub.urls.size(), 2u);
  EXPECT_EQ(f.max_prime(), 199);
}

TEST(Lmfdb, ToleratesLeadingZeroTrace) {
  TempDir dir;
  Stub stub;
  stub.response = ok(api_body("14.2.a.a", 2, 14, f2_expansion(60), true));
  LmfdbConfig cfg;
  cfg.cache_dir = dir.path;
  const ModularForm f = parse_coefficients(fetch_coefficients("14.2.a.a", 50, cfg, stub.transport()));
  EXPECT_EQ(f.ap.at(2), -1);
  EXPECT_EQ(f.ap.at(3), -2);
  EXPECT_EQ(f.ap.at(13), -4);
}

TEST(Lmfdb, OfflineErrorNamesThePath) {
  TempDir dir;
  LmfdbConfig cfg;
  cfg.cache_dir = dir.path;
  cfg.offline = true;
  try {
    fetch_coefficients("14.4.a.a", 100, cfg, nullptr);
    FAIL() << "expected an offline error";
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::offline);
    EXPECT_NE(std::string(e.what()).find(cache_path(dir.path, "14.4.a.a").string()), std::string::npos);
  }
  cfg.offline = false;
  Stub stub;
  stub.response = {false, 0, {}, "connection refused"};
  EXPECT_EQ(error_kind_of([&] { fetch_coefficients("14.4.a.a", 100, cfg, stub.transport()); }), ErrorKind::offline);
  stub.response = {true, 503, {}, {}};
  EXPECT_EQ(error_kind_of([&] { fetch_coefficients("14.4.a.a", 100, cfg, stub.transport()); }), ErrorKind::offline);
  EXPECT_TRUE(files_in(dir.path).empty());
}

TEST(Lmfdb, NotFound) {
  TempDir dir;
  LmfdbConfig cfg;
  cfg.cache_dir = dir.path;
  Stub stub;
  stub.response = {true, 404, "{}", {}};
  EXPECT_EQ(error_kind_of([&] { fetch_coefficients("99.2.a.z", 10, cfg, stub.transport()); }), ErrorKind::not_found);
  stub.response = ok(R"({"data": []})");
  EXPECT_EQ(error_kind_of([&] { fetch_coefficients("99.2.a.z", 10, cfg, stub.transport()); }), ErrorKind::not_found);
  EXPECT_TRUE(files_in(dir.path).empty());
}

TEST(Lmfdb, RejectedPayloadsLeaveCacheUntouched) {
  TempDir dir;
  LmfdbConfig cfg;
  cfg.cache_dir = dir.path;
  Stub stub;
  stub.response = ok(api_body("14.2.a.a", 2, 14, f2_expansion(40)));
  const std::string good = fetch_coefficients("14.2.a.a", 40, cfg, stub.transport());

  auto expect_rejected = [&](std::string body) {
    stub.response = ok(std::move(body));
    EXPECT_EQ(error_kind_of([&] { fetch_coefficients("14.2.a.a", 100, cfg, stub.transport()); }), ErrorKind::rejected_payload);
    EXPECT_EQ(detail::read_file(cache_path(dir.path, "14.2.a.a")), good);
    EXPECT_EQ(files_in(dir.path).size(), 1u);
  };
  std::vector<Integer> bad_a1 = f2_expansion(120);
  bad_a1[1] = 2;
  expect_rejected(api_body("14.2.a.a", 2, 14, bad_a1));
  std::vector<Integer> bound = f2_expansion(120);
  bound[11] = 7;  // 49 > 44
  expect_rejected(api_body("14.2.a.a", 2, 14, bound));
  expect_rejected(api_body("14.2.a.a", 2, 14, f2_expansion(60)));  // too short
  expect_rejected("not json");
  expect_rejected(R"({"data": [{"label": "14.2.a.b", "weight": 2, "level": 14, "traces": [1]}]})");
  expect_rejected(R"({"data": [{"label": "14.2.a.a", "weight": 2, "traces": [1, -1]}]})");
}

TEST(Lmfdb, InvalidLabelIsUsageError) {
  LmfdbConfig cfg;
  cfg.cache_dir = fs::temp_directory_path();
  EXPECT_EQ(error_kind_of([&] { fetch_coefficients("../etc/passwd", 10, cfg, nullptr); }), ErrorKind::usage);
}

TEST(Lmfdb, WeightFourStubUpToThousand) {
  TempDir dir;
  LmfdbConfig cfg;
  cfg.cache_dir = dir.path;
  Stub stub;
  const ModularForm h = f4_from_hecke(1000);
  stub.response = ok(api_body("14.4.a.a", 4, 14, expand_coefficients(h, 1000)));
  const ModularForm f = load_form("14.4.a.a", 1000, cfg, stub.transport());
  EXPECT_EQ(f.weight, 4);
  EXPECT_EQ(f.level, 14);
  EXPECT_EQ(f.ap, h.ap);
  const std::string text = detail::read_file(cache_path(dir.path, "14.4.a.a"));
  EXPECT_NE(text.find("weight 4\n"), std::string::npos);
  EXPECT_NE(text.find("level 14\n"), std::string::npos);
}

TEST(Lmfdb, LoadFormFromFile) {
  LmfdbConfig cfg;
  cfg.offline = true;
  const ModularForm f = load_form(data_path("cache/14.2.a.a.coeffs"), 0, cfg, nullptr);
  EXPECT_EQ(f.label, "14.2.a.a");
  EXPECT_EQ(error_kind_of([&] { load_form("/nonexistent.coeffs", 0, cfg, nullptr); }), ErrorKind::not_found);
}

TEST(Lmfdb, AtomicWriteReplaces) {
  TempDir dir;
  const fs::path p = dir.path / "sub" / "x.coeffs";
  atomic_write(p, "one");
  atomic_write(p, "two");
  EXPECT_EQ(detail::read_file(p), "two");
  EXPECT_EQ(files_in(p.parent_path()), std::vector<fs::path>{"x.coeffs"});
}
