// Starts the session service on an ephemeral port, drives one session over TCP
// the way a cockpit would, and prints what comes back.

#include <mscr/service/tcp.hpp>

#include <cstdio>
#include <fstream>

int main() {
  using namespace mscr;
  using namespace mscr::service;
  using namespace std::chrono_literals;

  const auto store = std::filesystem::temp_directory_path() / "mscr_demo_service";
  std::filesystem::remove_all(store);
  ManagerOptions opts;
  opts.data_dir = store;
  SessionManager mgr(opts);
  Server server(mgr, Endpoint{"127.0.0.1", 0});
  server.start();
  std::printf("service on port %d\n", server.port());

  Client client(Endpoint{"127.0.0.1", server.port()});
  std::ifstream in(MSCR_SOURCE_DIR "/scenarios/aligned.json");
  const auto scenario = nlohmann::json::parse(in);
  const auto created = client.call("create_session", {{"scenario", scenario}, {"mode", "autonomous"}, {"speed", 20.0}});
  const std::string id = created.at("session");
  client.call("subscribe", {{"session", id}});
  client.call("send_command", {{"session", id}, {"command", {{"type", "resume"}}}});

  int states = 0;
  while (auto msg = client.next(2s)) {
    if (msg->kind == Kind::state) {
      if (++states % 27 == 1)
        std::printf("tick %5ld  phase %-14s insertion %.1f mm\n", msg->tick,
                    msg->payload.at("phase").get<std::string>().c_str(),
                    msg->payload.at("insertion").get<double>() * 1e3);
      if (states >= 27 * 8) break;
    } else if (msg->kind == Kind::event) {
      std::printf("tick %5ld  event %s\n", msg->tick, msg->payload.dump().c_str());
    }
  }

  const auto ended = client.call("end_session", {{"session", id}});
  std::printf("ended: %s\n", ended.at("metrics").at("end_reason").get<std::string>().c_str());
  const auto runs = client.call("fetch_runs", nlohmann::json::object());
  std::printf("run store holds %zu run(s)\n", runs.at("runs").size());

  server.stop();
  mgr.shutdown();
  std::filesystem::remove_all(store);
  return 0;
}
