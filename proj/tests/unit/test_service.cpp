#include <mscr/service/tcp.hpp>

#include <gtest/gtest.h>

#include <fstream>
#include <random>
#include <set>
#include <sstream>

using namespace mscr;
using namespace mscr::service;
using namespace std::chrono_literals;

namespace {

nlohmann::json scenario_json(const std::string& name) {
  std::ifstream in(std::string(MSCR_SOURCE_DIR) + "/scenarios/" + name + ".json");
  return nlohmann::json::parse(in);
}

class TempDir {
 public:
  explicit TempDir(const std::string& tag) {
    static std::atomic<int> n{0};
    path_ = std::filesystem::temp_directory_path() /
            ("mscr_service_" + tag + "_" + std::to_string(::getpid()) + "_" + std::to_string(n++));
    std::filesystem::remove_all(path_);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  const std::filesystem::path& path() const { return path_; }

 private:
  std::filesystem::path path_;
};

ManagerOptions manual_options(const std::filesystem::path& dir) {
  ManagerOptions o;
  o.data_dir = dir;
  o.autotick = false;
  return o;
}

std::vector<WireMessage> drain(Subscription& s, Kind kind = Kind::state) {
  std::vector<WireMessage> out;
  while (auto m = s.pop(0ms))
    if (m->kind == kind) out.push_back(*m);
  return out;
}

template <class F>
std::string error_code_of(F&& f) {
  try {
    f();
  } catch (const ServiceError& e) {
    return e.code();
  }
  return "none";
}

// ---------------------------------------------------------------------------
// Wire format

std::vector<WireMessage> real_state_frames(int n) {
  auto sc = sim::scenario_from_json(scenario_json("offset_20"));
  sim::Session s(sc, sim::RunMode::autonomous);
  std::vector<WireMessage> out;
  s.set_sink([&](const nlohmann::json& e) {
    if (e.at("type") == "state") out.push_back({Kind::state, "s1", e.at("tick").get<long>(), e});
  });
  for (int i = 0; i < n; ++i) s.step();
  return out;
}

sim::UserCommand random_command(std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  std::uniform_int_distribution<int> pick(0, 9);
  switch (pick(rng)) {
    case 0: return sim::UserCommand::of(sim::CommandKind::noop);
    case 1: {
      sim::Axes a;
      for (int i = 0; i < 3; ++i) {
        a.translate[i] = u(rng);
        a.rotate[i] = u(rng);
      }
      a.advance = u(rng);
      return sim::UserCommand::move(a);
    }
    case 2: return sim::UserCommand::of(sim::CommandKind::hold);
    case 3: return sim::UserCommand::of(sim::CommandKind::resume);
    case 4: return sim::UserCommand::of(sim::CommandKind::abort);
    case 5: {
      auto c = sim::UserCommand::of(sim::CommandKind::set_mode);
      c.mode = u(rng) > 0 ? sim::ControlMode::manual : sim::ControlMode::autonomous;
      return c;
    }
    case 6: {
      auto c = sim::UserCommand::of(sim::CommandKind::inflate);
      c.pressure = 1e5 * (u(rng) + 1.0);
      return c;
    }
    case 7: return sim::UserCommand::of(sim::CommandKind::deflate);
    case 8: {
      auto c = sim::UserCommand::of(sim::CommandKind::gripper);
      c.gripper_closed = u(rng) > 0;
      return c;
    }
    default: return sim::UserCommand::of(sim::CommandKind::drug_release);
  }
}

sim::RunMetrics random_metrics(std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(0.0, 500.0);
  std::uniform_int_distribution<long> k(0, 10000);
  sim::RunMetrics m;
  m.insertion_time = u(rng);
  m.epm_path_length = u(rng) / 100;
  m.epm_turning_sum = u(rng) / 10;
  m.success = k(rng) % 2 == 0;
  m.override_events = k(rng);
  m.fbg_flags = k(rng);
  m.pause_episodes = k(rng);
  m.rejected_commands = k(rng);
  m.advance_time = u(rng);
  m.max_b_mag = u(rng) / 1e4;
  m.hold_force = u(rng) / 100;
  m.final_insertion = u(rng) / 1e3;
  m.ticks = k(rng);
  m.end_reason = m.success ? "target depth reached" : "timeout";
  return m;
}

TEST(Wire, RoundTripsGeneratedMessagesOfEveryKind) {
  std::mt19937_64 rng(42);
  std::vector<WireMessage> msgs = real_state_frames(60);
  std::uniform_real_distribution<double> u(-1e3, 1e3);
  std::uniform_int_distribution<long> tick(0, 1'000'000);
  for (int i = 0; i < 200; ++i) {
    const std::string sid = "s" + std::to_string(i % 7 + 1);
    msgs.push_back({Kind::command, sid, tick(rng), sim::to_json(random_command(rng))});
    msgs.push_back({Kind::metrics, sid, tick(rng), sim::to_json(random_metrics(rng))});
    msgs.push_back({Kind::event, sid, tick(rng), {{"type", "warning"}, {"message", std::to_string(u(rng))}}});
    msgs.push_back(error_message(i % 2 ? sid : "", error_code::rate_limited, "x" + std::to_string(i),
                                 i % 3 ? "$.payload" : "", i % 5 ? nlohmann::json(i) : nlohmann::json(nullptr)));
    msgs.push_back({Kind::request, {}, 0, {{"op", "health"}, {"request_id", i}}});
    msgs.push_back({Kind::response, sid, tick(rng), {{"op", "send_command"}, {"tick", tick(rng)}, {"v", u(rng)}}});
  }
  // Perturbed copies of real state frames exercise the numeric fields.
  for (int i = 0; i < 60; ++i) {
    WireMessage m = msgs[i];
    m.payload["insertion"] = std::abs(u(rng));
    m.payload["theta_est"] = u(rng);
    m.payload["b"] = {u(rng), u(rng), u(rng)};
    msgs.push_back(m);
  }
  std::set<Kind> kinds;
  for (const auto& m : msgs) {
    kinds.insert(m.kind);
    EXPECT_EQ(message_from_json(to_json(m)), m);
    EXPECT_EQ(message_from_json(nlohmann::json::parse(to_json(m).dump())), m);
    EXPECT_EQ(decode_frame(encode_frame(m)), m);
  }
  EXPECT_EQ(kinds.size(), 7u);
}

TEST(Wire, FrameHeaderIsBigEndianLength) {
  const WireMessage m{Kind::event, "s1", 3, {{"type", "x"}}};
  const auto f = encode_frame(m);
  const auto body = to_json(m).dump();
  ASSERT_EQ(f.size(), body.size() + 4);
  EXPECT_EQ(static_cast<unsigned char>(f[0]), 0);
  EXPECT_EQ(static_cast<unsigned char>(f[3]), body.size() & 0xff);
  EXPECT_THROW(decode_frame(f.substr(0, f.size() - 1)), SchemaError);
}

TEST(Wire, PayloadViolationsNameTheirPath) {
  auto frame = real_state_frames(1).front();
  auto j = to_json(frame);
  j["payload"]["bogus"] = 1;
  try {
    message_from_json(j);
    FAIL();
  } catch (const SchemaError& e) {
    EXPECT_EQ(e.path(), "$.payload.bogus");
  }
  j = to_json(frame);
  j["payload"]["tick"] = frame.tick + 1;
  EXPECT_THROW(message_from_json(j), SchemaError);
  j = to_json(frame);
  j["payload"]["phase"] = "CRUISING";
  try {
    message_from_json(j);
    FAIL();
  } catch (const SchemaError& e) {
    EXPECT_EQ(e.path(), "$.payload.phase");
  }
  nlohmann::json cmd{{"kind", "command"}, {"session", "s1"}, {"tick", 0},
                     {"payload", {{"type", "axes"}, {"axes", {{"rotate", {0, 0, 2}}}}}}};
  try {
    message_from_json(cmd);
    FAIL();
  } catch (const SchemaError& e) {
    EXPECT_EQ(e.path(), "$.payload.axes.rotate[2]");
  }
  EXPECT_THROW(message_from_json({{"kind", "gossip"}, {"tick", 0}, {"payload", nlohmann::json::object()}}),
               SchemaError);
}

std::set<std::string> schema_properties(const std::string& name) {
  std::ifstream in(std::string(MSCR_SOURCE_DIR) + "/schemas/" + name + ".schema.json");
  const auto j = nlohmann::json::parse(in);
  std::set<std::string> keys;
  for (const auto& [k, _] : j.at("properties").items()) keys.insert(k);
  return keys;
}

std::set<std::string> keys_of(const nlohmann::json& j) {
  std::set<std::string> keys;
  for (const auto& [k, _] : j.items()) keys.insert(k);
  return keys;
}

TEST(Wire, PublishedSchemasDescribeTheEmittedPayloads) {
  EXPECT_EQ(schema_properties("state"), keys_of(real_state_frames(1).front().payload));
  EXPECT_EQ(schema_properties("metrics"), keys_of(sim::to_json(sim::RunMetrics{})));
  EXPECT_EQ(schema_properties("run_summary"), keys_of(to_json(RunSummary{})));
  EXPECT_EQ(schema_properties("wire_message"),
            keys_of(to_json(WireMessage{Kind::event, "s1", 0, {{"type", "x"}}})));
}

// ---------------------------------------------------------------------------
// Sessions

TEST(Sessions, CreateIssuesDistinctIdsAndFirstFrameIsTickZeroInHold) {
  TempDir dir("create");
  SessionManager mgr(manual_options(dir.path()));
  const auto a = mgr.create_session(scenario_json("aligned"), sim::RunMode::autonomous);
  const auto b = mgr.create_session(scenario_json("aligned"), sim::RunMode::autonomous);
  EXPECT_NE(a, b);
  auto sub = mgr.subscribe(a);
  mgr.step(a);
  const auto frames = drain(*sub);
  ASSERT_EQ(frames.size(), 1u);
  EXPECT_EQ(frames[0].tick, 0);
  EXPECT_EQ(frames[0].session, a);
  EXPECT_EQ(frames[0].payload.at("phase"), "HOLD");
  EXPECT_NO_THROW(message_from_json(to_json(frames[0])));
}

TEST(Sessions, MalformedScenarioIsASchemaErrorWithPath) {
  TempDir dir("malformed");
  SessionManager mgr(manual_options(dir.path()));
  auto sc = scenario_json("aligned");
  sc["papilla"]["distance_mm"] = "far";
  try {
    mgr.create_session(sc, sim::RunMode::autonomous);
    FAIL();
  } catch (const ServiceError& e) {
    EXPECT_EQ(e.code(), error_code::schema);
    EXPECT_EQ(e.path(), "$.papilla.distance_mm");
  }
  sc = scenario_json("aligned");
  sc["controller"] = {{"step_gian", 0.5}};
  try {
    mgr.create_session(sc, sim::RunMode::autonomous);
    FAIL();
  } catch (const ServiceError& e) {
    EXPECT_EQ(e.path(), "$.controller.step_gian");
  }
  EXPECT_EQ(mgr.live_sessions(), 0u);
}

TEST(Sessions, HoldCommandShowsInTheNextFrame) {
  TempDir dir("hold");
  SessionManager mgr(manual_options(dir.path()));
  const auto id = mgr.create_session(scenario_json("offset_20"), sim::RunMode::autonomous);
  auto sub = mgr.subscribe(id);
  mgr.send_command(id, sim::UserCommand::of(sim::CommandKind::resume));
  mgr.step(id, 5);
  ASSERT_NE(drain(*sub).back().payload.at("phase"), "HOLD");
  const long at = mgr.send_command(id, sim::UserCommand::of(sim::CommandKind::hold));
  mgr.step(id);
  const auto frames = drain(*sub);
  ASSERT_EQ(frames.size(), 1u);
  EXPECT_EQ(frames[0].tick, at);
  EXPECT_EQ(frames[0].payload.at("phase"), "HOLD");
}

TEST(Sessions, CommandAfterEndIsUnknownSession) {
  TempDir dir("ended");
  SessionManager mgr(manual_options(dir.path()));
  const auto id = mgr.create_session(scenario_json("aligned"), sim::RunMode::manual);
  mgr.step(id, 3);
  mgr.end_session(id);
  EXPECT_FALSE(mgr.is_live(id));
  EXPECT_EQ(error_code_of([&] { mgr.send_command(id, sim::UserCommand::of(sim::CommandKind::hold)); }),
            error_code::unknown_session);
  EXPECT_EQ(error_code_of([&] { mgr.subscribe(id); }), error_code::unknown_session);
  EXPECT_EQ(error_code_of([&] { mgr.send_command("nope", sim::UserCommand::of(sim::CommandKind::hold)); }),
            error_code::unknown_session);
}

TEST(Sessions, ThousandQueuedNoopsAreAckedAndLeaveStateUnchanged) {
  TempDir dir("noops");
  ManagerOptions o = manual_options(dir.path());
  double now = 0.0;
  o.clock = [&now] { return now += 0.011; };  // about 91 commands per second
  SessionManager mgr(o);
  const auto probe = mgr.create_session(scenario_json("offset_20"), sim::RunMode::autonomous);
  const auto control = mgr.create_session(scenario_json("offset_20"), sim::RunMode::autonomous);
  mgr.step(probe, 10);
  mgr.step(control, 10);
  for (int i = 0; i < 1000; ++i)
    EXPECT_EQ(mgr.send_command(probe, sim::UserCommand::of(sim::CommandKind::noop)), 10);
  mgr.step(probe, 5);
  mgr.step(control, 5);
  EXPECT_EQ(*mgr.latest_state(probe), *mgr.latest_state(control));
}

TEST(Sessions, RateLimitRejectsTheHundredFirstCommandWithinOneSecond) {
  TempDir dir("rate");
  ManagerOptions o = manual_options(dir.path());
  double now = 5.0;
  o.clock = [&now] { return now; };
  SessionManager mgr(o);
  const auto id = mgr.create_session(scenario_json("aligned"), sim::RunMode::manual);
  for (int i = 0; i < 100; ++i) {
    now = 5.0 + 0.009 * i;
    ASSERT_NO_THROW(mgr.send_command(id, sim::UserCommand::of(sim::CommandKind::noop)));
  }
  now = 5.95;
  EXPECT_EQ(error_code_of([&] { mgr.send_command(id, sim::UserCommand::of(sim::CommandKind::noop)); }),
            error_code::rate_limited);
  now = 6.0 + 1e-9;  // the first command has left the window
  EXPECT_NO_THROW(mgr.send_command(id, sim::UserCommand::of(sim::CommandKind::noop)));
}

TEST(Sessions, CommandOrderIsPreservedIntoTheRunLog) {
  TempDir dir("order");
  SessionManager mgr(manual_options(dir.path()));
  const auto id = mgr.create_session(scenario_json("aligned"), sim::RunMode::manual);
  std::vector<double> sent;
  for (int i = 0; i < 40; ++i) {
    auto c = sim::UserCommand::of(sim::CommandKind::inflate);
    c.pressure = 100.0 * (i * 7 % 40);
    sent.push_back(c.pressure);
    mgr.send_command(id, c);
    if (i % 9 == 0) mgr.step(id);
  }
  mgr.end_session(id);
  std::ifstream in(mgr.store().log_path(id));
  std::vector<double> seen;
  std::string line;
  while (std::getline(in, line)) {
    const auto e = nlohmann::json::parse(line);
    if (e.at("type") == "command" && e.at("command").at("type") == "inflate")
      seen.push_back(e.at("command").at("pressure_pa").get<double>());
  }
  EXPECT_EQ(seen, sent);
}

// ---------------------------------------------------------------------------
// Streaming

TEST(Streaming, TicksAreMonotoneAndTwoSubscribersSeeIdenticalFrames) {
  TempDir dir("fanout");
  SessionManager mgr(manual_options(dir.path()));
  const auto id = mgr.create_session(scenario_json("offset_20"), sim::RunMode::autonomous);
  auto a = mgr.subscribe(id);
  auto b = mgr.subscribe(id);
  mgr.send_command(id, sim::UserCommand::of(sim::CommandKind::resume));
  mgr.step(id, 120);
  const auto fa = drain(*a);
  const auto fb = drain(*b);
  ASSERT_EQ(fa.size(), 120u);
  EXPECT_EQ(fa, fb);
  for (std::size_t i = 1; i < fa.size(); ++i) EXPECT_EQ(fa[i].tick, fa[i - 1].tick + 1);
}

TEST(Streaming, LateSubscriberGetsTheLatestFrameFirst) {
  TempDir dir("late");
  SessionManager mgr(manual_options(dir.path()));
  const auto id = mgr.create_session(scenario_json("aligned"), sim::RunMode::autonomous);
  mgr.step(id, 10);
  auto sub = mgr.subscribe(id);
  mgr.step(id, 2);
  const auto frames = drain(*sub);
  ASSERT_EQ(frames.size(), 3u);
  EXPECT_EQ(frames[0].tick, 9);
  EXPECT_EQ(frames[1].tick, 10);
  EXPECT_EQ(frames[2].tick, 11);
}

TEST(Streaming, ReconnectAfterResumePointDeliversNoDuplicates) {
  TempDir dir("resume");
  SessionManager mgr(manual_options(dir.path()));
  const auto id = mgr.create_session(scenario_json("offset_20"), sim::RunMode::autonomous);
  mgr.send_command(id, sim::UserCommand::of(sim::CommandKind::resume));
  std::vector<long> audit;
  long resume_point = -1;
  std::mt19937_64 rng(7);
  std::uniform_int_distribution<int> burst(0, 12);
  for (int round = 0; round < 30; ++round) {
    auto sub = mgr.subscribe(id, resume_point >= 0 ? std::optional<long>(resume_point) : std::nullopt);
    mgr.step(id, burst(rng));
    for (const auto& f : drain(*sub)) {
      audit.push_back(f.tick);
      resume_point = f.tick;
    }
    // A disconnect can lose frames in flight; those ticks are simply skipped.
    mgr.step(id, burst(rng) % 3);
  }
  ASSERT_GT(audit.size(), 50u);
  for (std::size_t i = 1; i < audit.size(); ++i) EXPECT_GT(audit[i], audit[i - 1]);
  EXPECT_EQ(std::set<long>(audit.begin(), audit.end()).size(), audit.size());
}

TEST(Streaming, SlowReaderDropsToLatestWithoutStallingTheLoop) {
  TempDir dir("slow");
  ManagerOptions o = manual_options(dir.path());
  o.subscriber_capacity = 8;
  SessionManager mgr(o);
  const auto id = mgr.create_session(scenario_json("aligned"), sim::RunMode::autonomous);
  auto sub = mgr.subscribe(id);
  mgr.step(id, 100);
  EXPECT_GT(sub->dropped(), 0);
  const auto frames = drain(*sub);
  ASSERT_FALSE(frames.empty());
  EXPECT_LE(frames.size(), 8u);
  EXPECT_EQ(frames.back().tick, 99);
}

TEST(Streaming, SessionEndPublishesMetricsAndClosesSubscribers) {
  TempDir dir("end");
  SessionManager mgr(manual_options(dir.path()));
  const auto id = mgr.create_session(scenario_json("aligned"), sim::RunMode::autonomous);
  auto sub = mgr.subscribe(id);
  const auto m = mgr.end_session(id);
  std::optional<WireMessage> metrics;
  while (auto f = sub->pop(0ms))
    if (f->kind == Kind::metrics) metrics = f;
  ASSERT_TRUE(metrics);
  EXPECT_EQ(sim::metrics_from_json(metrics->payload), m);
  EXPECT_TRUE(sub->closed());
}

// ---------------------------------------------------------------------------
// Persistence

TEST(Runs, EmptyStoreFetchesEmptyList) {
  TempDir dir("empty");
  SessionManager mgr(manual_options(dir.path()));
  EXPECT_TRUE(mgr.fetch_runs().empty());
}

TEST(Runs, CompletedRunIsStoredWithItsMetricsVerbatim) {
  TempDir dir("verbatim");
  SessionManager mgr(manual_options(dir.path()));
  const auto id = mgr.create_session(scenario_json("aligned"), sim::RunMode::autonomous);
  auto sub = mgr.subscribe(id);
  mgr.send_command(id, sim::UserCommand::of(sim::CommandKind::resume));
  mgr.step(id, 100000);
  EXPECT_FALSE(mgr.is_live(id));
  std::optional<WireMessage> metrics;
  while (auto f = sub->pop(0ms))
    if (f->kind == Kind::metrics) metrics = f;
  ASSERT_TRUE(metrics);
  const auto runs = mgr.fetch_runs();
  ASSERT_EQ(runs.size(), 1u);
  EXPECT_EQ(runs[0].id, id);
  EXPECT_EQ(runs[0].scenario, "aligned");
  EXPECT_EQ(runs[0].mode, "autonomous");
  EXPECT_TRUE(runs[0].metrics.success);
  EXPECT_EQ(sim::to_json(runs[0].metrics), metrics->payload);
  std::ifstream log(mgr.store().log_path(id));
  EXPECT_EQ(sim::replay_metrics(log), runs[0].metrics);
}

TEST(Runs, ModeFilterExcludesOtherModes) {
  TempDir dir("filter");
  SessionManager mgr(manual_options(dir.path()));
  const auto a = mgr.create_session(scenario_json("aligned"), sim::RunMode::autonomous);
  const auto m = mgr.create_session(scenario_json("offset_20"), sim::RunMode::manual);
  mgr.step(a, 3);
  mgr.step(m, 3);
  mgr.end_session(a);
  mgr.end_session(m);
  const auto autos = mgr.fetch_runs(RunFilter{"autonomous", std::nullopt});
  ASSERT_EQ(autos.size(), 1u);
  EXPECT_EQ(autos[0].id, a);
  const auto by_scenario = mgr.fetch_runs(RunFilter{std::nullopt, "offset_20"});
  ASSERT_EQ(by_scenario.size(), 1u);
  EXPECT_EQ(by_scenario[0].id, m);
  EXPECT_EQ(mgr.fetch_runs().size(), 2u);
}

TEST(Runs, UnusableDataDirectoryIsStorageUnavailable) {
  TempDir dir("blocked");
  std::filesystem::create_directories(dir.path());
  const auto file = dir.path() / "not_a_dir";
  std::ofstream(file) << "x";
  SessionManager mgr(manual_options(file));
  EXPECT_EQ(error_code_of([&] { mgr.fetch_runs(); }), error_code::storage_unavailable);
  EXPECT_EQ(error_code_of([&] { mgr.create_session(scenario_json("aligned"), sim::RunMode::manual); }),
            error_code::storage_unavailable);
}

TEST(Runs, CorruptStoreIsStorageUnavailable) {
  TempDir dir("corrupt");
  std::filesystem::create_directories(dir.path());
  std::ofstream(dir.path() / "runs.jsonl") << "{not json\n";
  SessionManager mgr(manual_options(dir.path()));
  EXPECT_EQ(error_code_of([&] { mgr.fetch_runs(); }), error_code::storage_unavailable);
}

// ---------------------------------------------------------------------------
// Pacing

TEST(Pacing, NeverFasterThanRealTimeTimesSpeed) {
  TempDir dir("pace");
  ManagerOptions o;
  o.data_dir = dir.path();
  SessionManager mgr(o);
  for (double speed : {1.0, 10.0}) {
    const auto t0 = std::chrono::steady_clock::now();
    const auto id = mgr.create_session(scenario_json("aligned"), sim::RunMode::manual, speed);
    auto sub = mgr.subscribe(id);
    std::this_thread::sleep_for(400ms);
    long last = -1;
    for (const auto& f : drain(*sub)) {
      const double elapsed = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
      // Tick k may not have run before k / (27 * speed) seconds.
      EXPECT_LE(static_cast<double>(f.tick), sim::kTickRate * speed * elapsed + 1.0);
      last = f.tick;
    }
    const double elapsed = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    EXPECT_LE(static_cast<double>(last), sim::kTickRate * speed * elapsed + 1.0);
    EXPECT_GE(last, static_cast<long>(0.5 * sim::kTickRate * speed * 0.4) - 1);
    mgr.end_session(id);
  }
}

TEST(Pacing, SpeedZeroPausesAndResumes) {
  TempDir dir("pause");
  ManagerOptions o;
  o.data_dir = dir.path();
  SessionManager mgr(o);
  const auto id = mgr.create_session(scenario_json("aligned"), sim::RunMode::manual, 0.0);
  std::this_thread::sleep_for(150ms);
  EXPECT_FALSE(mgr.latest_state(id).has_value());
  mgr.set_speed(id, 20.0);
  std::this_thread::sleep_for(200ms);
  ASSERT_TRUE(mgr.latest_state(id).has_value());
  mgr.set_speed(id, 0.0);
  std::this_thread::sleep_for(60ms);
  const auto frozen = mgr.latest_state(id)->at("tick").get<long>();
  std::this_thread::sleep_for(150ms);
  EXPECT_EQ(mgr.latest_state(id)->at("tick").get<long>(), frozen);
  EXPECT_EQ(error_code_of([&] { mgr.set_speed(id, -1.0); }), error_code::bad_request);
}

// ---------------------------------------------------------------------------
// Socket transport

TEST(Endpoint, ParsesHostPortAndEnvOverride) {
  EXPECT_EQ(parse_endpoint("10.0.0.2:9000").host, "10.0.0.2");
  EXPECT_EQ(parse_endpoint("10.0.0.2:9000").port, 9000);
  EXPECT_EQ(parse_endpoint(":1234").host, "127.0.0.1");
  EXPECT_EQ(parse_endpoint("4321").port, 4321);
  EXPECT_THROW(parse_endpoint("host:notaport"), DomainError);
  ::setenv(kAddrEnv, "127.0.0.1:5555", 1);
  EXPECT_EQ(endpoint_from_env().port, 5555);
  ::unsetenv(kAddrEnv);
  EXPECT_EQ(endpoint_from_env({"localhost", 42}).port, 42);
}

class Tcp : public ::testing::Test {
 protected:
  void SetUp() override {
    ManagerOptions o;
    o.data_dir = dir_.path();
    mgr_ = std::make_unique<SessionManager>(o);
    server_ = std::make_unique<Server>(*mgr_, Endpoint{"127.0.0.1", 0});
    server_->start();
  }
  void TearDown() override {
    server_->stop();
    mgr_->shutdown();
  }
  Endpoint ep() const { return {"127.0.0.1", server_->port()}; }

  static std::optional<WireMessage> next_state(Client& c, std::chrono::milliseconds timeout = 3s) {
    const auto deadline = std::chrono::steady_clock::now() + timeout;
    while (std::chrono::steady_clock::now() < deadline) {
      auto m = c.next(50ms);
      if (m && m->kind == Kind::state) return m;
    }
    return std::nullopt;
  }

  TempDir dir_{"tcp"};
  std::unique_ptr<SessionManager> mgr_;
  std::unique_ptr<Server> server_;
};

TEST_F(Tcp, HealthAndSessionLifecycle) {
  Client c(ep());
  EXPECT_EQ(c.call("health").at("status"), "ok");
  const auto id = c.call("create_session", {{"scenario", scenario_json("offset_20")},
                                            {"mode", "autonomous"},
                                            {"speed", 0.0}})
                      .at("session")
                      .get<std::string>();
  c.call("subscribe", {{"session", id}});
  c.call("step", {{"session", id}, {"ticks", 1}});
  auto first = next_state(c);
  ASSERT_TRUE(first);
  EXPECT_EQ(first->tick, 0);
  EXPECT_EQ(first->payload.at("phase"), "HOLD");

  c.call("send_command", {{"session", id}, {"command", {{"type", "resume"}}}});
  c.call("set_speed", {{"session", id}, {"speed", 10.0}});
  long last = first->tick;
  for (int i = 0; i < 5; ++i) {
    auto f = next_state(c);
    ASSERT_TRUE(f);
    EXPECT_GT(f->tick, last);
    last = f->tick;
  }
  EXPECT_NE(mgr_->latest_state(id)->at("phase"), "HOLD");

  // HOLD reaches the server and the phase changes within one round trip.
  c.send(WireMessage{Kind::command, id, 0, {{"type", "hold"}}});
  long ack = -1;
  for (int i = 0; i < 200 && ack < 0; ++i) {
    auto m = c.next(1s);
    ASSERT_TRUE(m);
    if (m->kind == Kind::response && m->payload.at("op") == "command") ack = m->payload.at("tick").get<long>();
  }
  ASSERT_GE(ack, 0);
  bool held = false;
  for (int i = 0; i < 200 && !held; ++i) {
    auto f = next_state(c);
    ASSERT_TRUE(f);
    if (f->tick >= ack) {
      EXPECT_EQ(f->payload.at("phase"), "HOLD");
      held = true;
    }
  }
  EXPECT_TRUE(held);

  const auto end = c.call("end_session", {{"session", id}});
  EXPECT_EQ(end.at("metrics").at("end_reason"), "aborted");
  try {
    c.call("send_command", {{"session", id}, {"command", {{"type", "noop"}}}});
    FAIL();
  } catch (const ServiceError& e) {
    EXPECT_EQ(e.code(), error_code::unknown_session);
  }
  const auto runs = c.call("fetch_runs", {{"filter", {{"mode", "autonomous"}}}}).at("runs");
  ASSERT_EQ(runs.size(), 1u);
  EXPECT_EQ(runs[0].at("id"), id);
  EXPECT_TRUE(c.call("fetch_runs", {{"filter", {{"mode", "manual"}}}}).at("runs").empty());
}

TEST_F(Tcp, ErrorsCarryCodesAndPaths) {
  Client c(ep());
  auto sc = scenario_json("aligned");
  sc["plant"] = {{"b_max_mT", "lots"}};
  try {
    c.call("create_session", {{"scenario", sc}});
    FAIL();
  } catch (const ServiceError& e) {
    EXPECT_EQ(e.code(), error_code::schema);
    EXPECT_EQ(e.path(), "$.payload.scenario.plant.b_max_mT");
  }
  try {
    c.call("warp", {});
    FAIL();
  } catch (const ServiceError& e) {
    EXPECT_EQ(e.path(), "$.payload.op");
  }
  try {
    c.call("send_command", {{"session", "s404"}, {"command", {{"type", "noop"}}}});
    FAIL();
  } catch (const ServiceError& e) {
    EXPECT_EQ(e.code(), error_code::unknown_session);
  }

  // Malformed JSON in a well-formed frame gets an error reply and the
  // connection stays usable.
  const std::string junk = "{\"kind\": ";
  std::string frame(4, '\0');
  frame[3] = static_cast<char>(junk.size());
  c.send_raw(frame + junk);
  auto err = c.next(2s);
  ASSERT_TRUE(err);
  EXPECT_EQ(err->kind, Kind::error);
  EXPECT_EQ(err->payload.at("code"), error_code::schema);
  EXPECT_EQ(err->payload.at("path"), "$");
  EXPECT_EQ(c.call("health").at("status"), "ok");
}

TEST_F(Tcp, TwoClientsSeeIdenticalStreams) {
  Client ctl(ep());
  const auto id =
      ctl.call("create_session", {{"scenario", scenario_json("offset_20")}, {"mode", "autonomous"}, {"speed", 0.0}})
          .at("session")
          .get<std::string>();
  Client a(ep()), b(ep());
  a.call("subscribe", {{"session", id}});
  b.call("subscribe", {{"session", id}});
  ctl.call("send_command", {{"session", id}, {"command", {{"type", "resume"}}}});
  ctl.call("step", {{"session", id}, {"ticks", 40}});
  std::vector<WireMessage> fa, fb;
  for (int i = 0; i < 40; ++i) {
    auto x = next_state(a);
    auto y = next_state(b);
    ASSERT_TRUE(x && y);
    fa.push_back(*x);
    fb.push_back(*y);
  }
  EXPECT_EQ(fa, fb);
  EXPECT_EQ(fa.front().tick, 0);
  EXPECT_EQ(fa.back().tick, 39);
}

}  // namespace
