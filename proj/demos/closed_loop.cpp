// Runs one scenario under the autonomous controller and the scripted operator
// and prints the metrics side by side.
//
//   demo_closed_loop [scenario.json] [seed]

#include <mscr/sim/session.hpp>

#include <cstdio>
#include <cstdlib>

int main(int argc, char** argv) {
  using namespace mscr::sim;

  const std::string path = argc > 1 ? argv[1] : MSCR_SOURCE_DIR "/scenarios/misalign_midway.json";
  Scenario sc = load_scenario(path);
  if (argc > 2) sc.seed = std::strtoull(argv[2], nullptr, 10);

  std::printf("scenario %s, seed %ld\n\n", sc.name.c_str(), static_cast<long>(sc.seed));
  std::printf("%-11s %-8s %10s %10s %12s %8s %22s\n", "mode", "success", "time s", "path m", "turning rad",
              "pauses", "end");
  for (RunMode mode : {RunMode::autonomous, RunMode::operator_model}) {
    Session s(sc, mode);
    s.set_keep_events(false);
    while (!s.finished()) s.step();
    const RunMetrics& m = s.metrics();
    std::printf("%-11s %-8s %10.2f %10.4f %12.2f %8ld %22s\n", std::string(run_mode_name(mode)).c_str(),
                m.success ? "yes" : "no", m.insertion_time, m.epm_path_length, m.epm_turning_sum,
                static_cast<long>(m.pause_episodes), m.end_reason.c_str());
  }
  return 0;
}
