#include <gtest/gtest.h>

#include <atomic>
#include <filesystem>
#include <fstream>
#include <regex>
#include <set>
#include <sstream>
#include <thread>

#include <httplib.h>

#include "intent_router/corpus.hpp"
#include "intent_router/dispatch.hpp"
#include "intent_router/error.hpp"

using namespace intent_router;
namespace fs = std::filesystem;

namespace {

Router builtin_router() {
  EncoderDescriptor d;
  d.dim = 256;
  return Router::build(builtin_routes(), make_encoder(d));
}

ActionRequest sample_request() {
  ActionRequest r;
  r.intent_type = "Intent Report Request";
  r.action = ActionVerb::kReport;
  r.original_text = "Summarize the results of the previous request.";
  r.decision_score = 1.0;
  r.issued_at = std::chrono::system_clock::time_point(std::chrono::microseconds(1714564800123456));
  r.correlation_id = "00000000-0000-4000-8000-000000000000";
  return r;
}

// Local sink endpoint answering with a scripted status sequence.
class StatusServer {
 public:
  explicit StatusServer(std::vector<int> statuses) : statuses_(std::move(statuses)) {
    server_.Post("/actions", [this](const httplib::Request& req, httplib::Response& res) {
      const auto n = hits_++;
      last_body_ = req.body;
      res.status = statuses_[std::min(n, statuses_.size() - 1)];
    });
    port_ = server_.bind_to_any_port("127.0.0.1");
    thread_ = std::thread([this] { server_.listen_after_bind(); });
    server_.wait_until_ready();
  }
  ~StatusServer() {
    server_.stop();
    thread_.join();
  }
  std::string url() const { return "http://127.0.0.1:" + std::to_string(port_) + "/actions"; }
  std::size_t hits() const { return hits_.load(); }
  std::string last_body() const { return last_body_; }

 private:
  httplib::Server server_;
  std::thread thread_;
  int port_ = 0;
  std::vector<int> statuses_;
  std::atomic<std::size_t> hits_{0};
  std::string last_body_;
};

}  // namespace

TEST(Verbs, Bijection) {
  const auto reg = ActionRegistry::builtin();
  std::set<ActionVerb> verbs;
  for (const auto& name : builtin_route_names()) {
    const auto v = reg.find(name);
    ASSERT_TRUE(v.has_value()) << name;
    EXPECT_TRUE(verbs.insert(*v).second);
    EXPECT_EQ(parse_action_verb(to_string(*v)), v);
  }
  EXPECT_EQ(verbs.size(), 6u);
  EXPECT_FALSE(reg.find("NONE").has_value());
  EXPECT_FALSE(parse_action_verb("explode").has_value());
  // Route actions declared in the built-in table agree with the registry.
  EXPECT_EQ(ActionRegistry::from_routes(builtin_routes()).entries(), reg.entries());
}

TEST(Registry, RejectsBadMaps) {
  EXPECT_THROW(ActionRegistry({{"a", ActionVerb::kDeploy}, {"b", ActionVerb::kDeploy}}), ConfigError);
  EXPECT_THROW(ActionRegistry({{"NONE", ActionVerb::kDeploy}}), ConfigError);
  EXPECT_THROW(ActionRegistry({{"", ActionVerb::kDeploy}}), ConfigError);
  std::vector<Route> routes = {{"a", {"x"}, 0.5, "explode"}};
  EXPECT_THROW((void)ActionRegistry::from_routes(routes), ConfigError);
}

TEST(Registry, UnmappedRoute) {
  const auto router = builtin_router();
  const ActionRegistry partial({{"Deployment Intent", ActionVerb::kDeploy}});
  try {
    partial.check_covers(router);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kUnmappedRoute);
  }
  const auto decision = router.route_query("Summarize the results of the previous request.");
  try {
    (void)dispatch(decision, partial);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kUnmappedRoute);
  }
  EXPECT_NO_THROW(ActionRegistry::builtin().check_covers(router));
}

TEST(Dispatch, MatchedRouteBecomesRequest) {
  const auto router = builtin_router();
  const auto result = dispatch(router.route_query("Summarize the results of the previous request."),
                               ActionRegistry::builtin());
  const auto* req = std::get_if<ActionRequest>(&result);
  ASSERT_NE(req, nullptr);
  EXPECT_EQ(req->intent_type, "Intent Report Request");
  EXPECT_EQ(req->action, ActionVerb::kReport);
  EXPECT_NEAR(req->decision_score, 1.0, 1e-9);
  EXPECT_TRUE(std::regex_match(req->correlation_id,
                               std::regex("[0-9a-f]{8}-[0-9a-f]{4}-4[0-9a-f]{3}-[89ab][0-9a-f]{3}-[0-9a-f]{12}")));
}

TEST(Dispatch, NoneProducesNoAction) {
  const auto router = builtin_router();
  const auto result = dispatch(router.route_query("zebra quilt xylophone"), ActionRegistry::builtin());
  const auto* none = std::get_if<NoAction>(&result);
  ASSERT_NE(none, nullptr);
  EXPECT_EQ(none->original_text, "zebra quilt xylophone");
  EXPECT_LT(none->best_score, 0.5);
  EXPECT_TRUE(none->nearest_route.has_value());
}

TEST(Serialize, FieldOrderAndFormat) {
  const auto s = serialize(sample_request());
  EXPECT_EQ(s,
            R"({"intent_type":"Intent Report Request","action":"report","original_text":"Summarize the results )"
            R"(of the previous request.","decision_score":1.0,"issued_at":"2024-05-01T12:00:00.123456Z",)"
            R"("correlation_id":"00000000-0000-4000-8000-000000000000"})");
}

TEST(Serialize, Errors) {
  auto r = sample_request();
  r.decision_score = std::numeric_limits<double>::quiet_NaN();
  EXPECT_THROW((void)serialize(r), Error);
  r = sample_request();
  r.original_text = "bad \xff byte";
  try {
    (void)serialize(r);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kSerialization);
  }
}

TEST(Utf8, Validation) {
  EXPECT_TRUE(is_valid_utf8("plain"));
  EXPECT_TRUE(is_valid_utf8("caf\xc3\xa9 \xe2\x82\xac \xf0\x9f\x93\xa1"));
  EXPECT_FALSE(is_valid_utf8("\xc0\xaf"));          // overlong
  EXPECT_FALSE(is_valid_utf8("\xed\xa0\x80"));      // surrogate
  EXPECT_FALSE(is_valid_utf8("\xe2\x82"));          // truncated
  EXPECT_FALSE(is_valid_utf8("\xf4\x90\x80\x80"));  // > U+10FFFF
}

TEST(Rfc3339, PreEpochAndRounding) {
  using namespace std::chrono;
  EXPECT_EQ(format_rfc3339(system_clock::time_point(microseconds(0))), "1970-01-01T00:00:00.000000Z");
  EXPECT_EQ(format_rfc3339(system_clock::time_point(microseconds(-1))), "1969-12-31T23:59:59.999999Z");
}

TEST(StreamSink, OneLinePerRequest) {
  std::ostringstream out;
  StreamSink sink(out);
  const auto receipt = sink.emit(sample_request());
  EXPECT_EQ(out.str(), serialize(sample_request()) + "\n");
  EXPECT_EQ(receipt.sink, "stdout");
  EXPECT_EQ(receipt.attempts, 1);
}

TEST(FileSink, ConcurrentAppendsKeepWholeLines) {
  const auto path = fs::temp_directory_path() / "ir_file_sink_test.jsonl";
  fs::remove(path);
  {
    std::vector<std::jthread> writers;
    for (int t = 0; t < 4; ++t) {
      writers.emplace_back([&] {
        FileSink sink(path);
        for (int i = 0; i < 50; ++i) {
          auto r = sample_request();
          r.correlation_id = new_correlation_id();
          (void)sink.emit(r);
        }
      });
    }
  }
  std::ifstream in(path);
  std::size_t lines = 0;
  std::set<std::string> ids;
  for (std::string line; std::getline(in, line); ++lines) {
    const auto j = nlohmann::json::parse(line);
    ids.insert(j.at("correlation_id").get<std::string>());
  }
  EXPECT_EQ(lines, 200u);
  EXPECT_EQ(ids.size(), 200u);
  fs::remove(path);
}

TEST(FileSink, UnwritablePath) {
  FileSink sink("/nonexistent-dir/x/actions.jsonl");
  EXPECT_THROW((void)sink.emit(sample_request()), SinkUnavailable);
}

TEST(HttpSink, DeliversOnFirstSuccess) {
  StatusServer server({200});
  HttpSink sink({server.url()});
  const auto receipt = sink.emit(sample_request());
  EXPECT_EQ(receipt.attempts, 1);
  EXPECT_EQ(receipt.http_status, 200);
  EXPECT_EQ(server.last_body(), serialize(sample_request()));
}

TEST(HttpSink, RetriesTransientThenSucceeds) {
  StatusServer server({503, 429, 202});
  HttpSink sink({server.url(), std::chrono::milliseconds(2000), 3, std::chrono::milliseconds(5)});
  EXPECT_EQ(sink.emit(sample_request()).attempts, 3);
}

TEST(HttpSink, PersistentFailureRaisesAfterAllAttempts) {
  StatusServer server({503});
  HttpSink sink({server.url(), std::chrono::milliseconds(2000), 3, std::chrono::milliseconds(5)});
  try {
    (void)sink.emit(sample_request());
    FAIL();
  } catch (const SinkUnavailable& e) {
    EXPECT_EQ(e.attempts(), 3);
    EXPECT_EQ(e.last_status(), 503);
    EXPECT_EQ(e.code(), ErrorCode::kSinkUnavailable);
  }
  EXPECT_EQ(server.hits(), 3u);
}

TEST(HttpSink, ClientErrorIsNotRetried) {
  StatusServer server({400});
  HttpSink sink({server.url(), std::chrono::milliseconds(2000), 3, std::chrono::milliseconds(5)});
  EXPECT_THROW((void)sink.emit(sample_request()), SinkUnavailable);
  EXPECT_EQ(server.hits(), 1u);
}

TEST(HttpSink, ConfigErrors) {
  EXPECT_THROW(HttpSink({""}), ConfigError);
  EXPECT_THROW(HttpSink({"http://x", std::chrono::milliseconds(100), 0}), ConfigError);
}
