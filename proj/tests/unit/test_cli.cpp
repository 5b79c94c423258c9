#include <mscr/cli/commands.hpp>

#include <gtest/gtest.h>

#include <array>
#include <cstdio>
#include <fstream>
#include <sys/wait.h>
#include <unistd.h>

using namespace mscr;
using namespace mscr::cli;
namespace fs = std::filesystem;

namespace {

struct Proc {
  int code = -1;
  std::string out;  // stdout and stderr, interleaved
};

// Runs the CLI binary through the shell with an explicit environment prefix.
Proc invoke(const std::string& args, const std::string& env = "") {
  const std::string cmd = "env -u MSCR_DATA_DIR -u MSCR_SERVICE_ADDR " + env + " '" MSCR_CLI_BIN "' " + args + " 2>&1";
  Proc p;
  FILE* f = ::popen(cmd.c_str(), "r");
  if (!f) return p;
  std::array<char, 4096> buf{};
  std::size_t n = 0;
  while ((n = std::fread(buf.data(), 1, buf.size(), f)) > 0) p.out.append(buf.data(), n);
  const int status = ::pclose(f);
  p.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  return p;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void spit(const fs::path& p, const std::string& body) {
  fs::create_directories(p.parent_path());
  std::ofstream(p, std::ios::binary) << body;
}

class CliTest : public ::testing::Test {
 protected:
  void SetUp() override {
    const auto* info = ::testing::UnitTest::GetInstance()->current_test_info();
    root_ = fs::temp_directory_path() / ("mscr_cli_" + std::string(info->name()) + "_" + std::to_string(::getpid()));
    fs::remove_all(root_);
    fs::create_directories(root_);
  }
  void TearDown() override {
    std::error_code ec;
    fs::remove_all(root_, ec);
  }

  std::string out_flag() const { return "--out_dir '" + root_.string() + "/out'"; }
  fs::path run_dir(const std::string& cmd, const std::string& label) const { return root_ / "out" / cmd / label; }
  std::string src_data() const { return "--data_dir '" MSCR_SOURCE_DIR "'"; }

  // Every file of a run directory except metadata.json, keyed by relative path.
  std::map<std::string, std::string> deterministic_files(const fs::path& dir) const {
    std::map<std::string, std::string> out;
    for (const auto& e : fs::recursive_directory_iterator(dir)) {
      if (!e.is_regular_file()) continue;
      const auto rel = fs::relative(e.path(), dir).string();
      if (rel != "metadata.json") out[rel] = slurp(e.path());
    }
    return out;
  }

  fs::path root_;
};

std::vector<std::string> lines_of(const std::string& s) {
  std::vector<std::string> out;
  std::istringstream in(s);
  for (std::string l; std::getline(in, l);) out.push_back(l);
  return out;
}

}  // namespace

TEST(CliSchema, EveryCommandKeyIsDeclared) {
  const auto schema = make_schema();
  for (const auto& spec : command_specs())
    for (const auto& k : spec.keys) EXPECT_NE(schema.find(k), nullptr) << spec.name << ": " << k;
}

TEST(CliSchema, EveryDeclaredKeyBelongsToSomeCommand) {
  std::set<std::string> used;
  for (const auto& spec : command_specs()) used.insert(spec.keys.begin(), spec.keys.end());
  const auto schema = make_schema();
  for (const auto& p : schema.params()) EXPECT_TRUE(used.count(p.key)) << p.key;
}

TEST(CliSchema, DefaultsPassTheirOwnChecks) {
  const auto schema = make_schema();
  auto cfg = schema.defaults();
  for (const auto& p : schema.params()) EXPECT_NO_THROW(schema.check(p, cfg.at(p.pointer()), p.key)) << p.key;
  EXPECT_NO_THROW(schema.overlay(cfg, schema.defaults()));
}

TEST(CliSchema, UnknownKeysAreRejectedWithTheirPath) {
  const auto schema = make_schema();
  auto cfg = schema.defaults();
  try {
    schema.overlay(cfg, nlohmann::json::parse(R"({"balloon": {"r_inn_mm": 1}})"));
    FAIL() << "accepted an unknown nested key";
  } catch (const SchemaError& e) {
    EXPECT_EQ(e.path(), "$.balloon.r_inn_mm");
  }
  try {
    schema.overlay(cfg, nlohmann::json::parse(R"({"ballon": {}})"));
    FAIL() << "accepted an unknown section";
  } catch (const SchemaError& e) {
    EXPECT_EQ(e.path(), "$.ballon");
  }
  try {
    schema.overlay(cfg, nlohmann::json::parse(R"({"balloon": 3})"));
    FAIL() << "accepted a scalar section";
  } catch (const SchemaError& e) {
    EXPECT_EQ(e.path(), "$.balloon");
  }
}

TEST(CliSchema, TypeAndBoundViolationsNameTheKey) {
  const auto schema = make_schema();
  auto cfg = schema.defaults();
  const std::vector<std::pair<std::string, std::string>> bad{
      {R"({"balloon": {"r_in_mm": "wide"}})", "$.balloon.r_in_mm"},
      {R"({"balloon": {"r_in_mm": -1}})", "$.balloon.r_in_mm"},
      {R"({"report": {"samples": 2.5}})", "$.report.samples"},
      {R"({"seed": []})", "$.seed"},
      {R"({"seed": [1, "two"]})", "$.seed[1]"},
      {R"({"run": {"mode": "telepathic"}})", "$.run.mode"},
      {R"({"run": {"logs": "yes"}})", "$.run.logs"},
  };
  for (const auto& [doc, path] : bad) {
    try {
      schema.overlay(cfg, nlohmann::json::parse(doc));
      ADD_FAILURE() << "accepted " << doc;
    } catch (const SchemaError& e) {
      EXPECT_EQ(e.path(), path) << doc;
    }
  }
}

TEST(CliSchema, FlagTextParsesLikeConfigValues) {
  const auto schema = make_schema();
  const Param& seed = *schema.find("seed");
  EXPECT_EQ(schema.parse_text(seed, {"3", "1", "2"}), nlohmann::json::parse("[3,1,2]"));
  EXPECT_THROW(schema.parse_text(seed, {"1x"}), SchemaError);
  const Param& r = *schema.find("balloon.r_in_mm");
  EXPECT_EQ(schema.parse_text(r, {"0.25"}), nlohmann::json(0.25));
  EXPECT_THROW(schema.parse_text(r, {"0.25mm"}), SchemaError);
  const Param& logs = *schema.find("run.logs");
  EXPECT_EQ(schema.parse_text(logs, {"false"}), nlohmann::json(false));
  EXPECT_THROW(schema.parse_text(logs, {"maybe"}), SchemaError);
}

TEST(CliSchema, PublishedConfigSchemaIsCurrent) {
  const auto published = nlohmann::json::parse(slurp(MSCR_SOURCE_DIR "/schemas/config.schema.json"));
  EXPECT_EQ(published, make_schema().json_schema());
}

TEST(CliOutput, Sha256KnownVector) {
  EXPECT_EQ(sha256_hex("abc"), "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
  EXPECT_EQ(sha256_hex(""), "e3b0c44298fc1c149afbf4c8996fb92427ae41e4649b934ca495991b7852b855");
}

TEST(CliOutput, NumbersRoundTripExactly) {
  for (double x : {0.1, 1.0 / 3.0, 2.0e-17, 123456.789, -7.25, 1e300})
    EXPECT_EQ(std::strtod(num(x).c_str(), nullptr), x) << num(x);
  EXPECT_EQ(num(0.0), "0");
  EXPECT_EQ(num(0.5), "0.5");
}

TEST(CliOutput, LabelMustBeAPlainName) {
  const RunRecord rec{"balloon-report", nlohmann::json::object(), {1}};
  const auto root = fs::temp_directory_path() / ("mscr_label_" + std::to_string(::getpid()));
  EXPECT_THROW(write_run(root, "../escape", rec, {}, std::chrono::system_clock::now(), {}), DomainError);
  EXPECT_THROW(write_run(root, "", rec, {}, std::chrono::system_clock::now(), {}), DomainError);
  fs::remove_all(root);
}

TEST_F(CliTest, HelpListsEveryFlagOfEveryCommand) {
  const auto schema = make_schema();
  for (const auto& spec : command_specs()) {
    const auto p = invoke(spec.name + " --help");
    ASSERT_EQ(p.code, 0) << spec.name;
    EXPECT_NE(p.out.find("--config"), std::string::npos) << spec.name;
    for (const auto& k : spec.keys) {
      EXPECT_NE(p.out.find("--" + k + " "), std::string::npos) << spec.name << " lacks --" << k;
      EXPECT_NE(p.out.find(schema.find(k)->help), std::string::npos) << spec.name << " lacks help for " << k;
    }
  }
  const auto top = invoke("--help");
  for (const auto& spec : command_specs()) EXPECT_NE(top.out.find(spec.name), std::string::npos);
}

TEST_F(CliTest, ConfigFileKeysAreTheFlagNames) {
  // The same setting through a file and through a flag produces the same manifest.
  spit(root_ / "c.json", R"({"balloon": {"r_in_mm": 0.45}, "report": {"samples": 7}, "seed": [4, 2]})");
  ASSERT_EQ(invoke("balloon-report --config '" + (root_ / "c.json").string() + "' --label a " + out_flag()).code, 0);
  ASSERT_EQ(invoke("balloon-report --balloon.r_in_mm 0.45 --report.samples 7 --seed 4,2 --label b " + out_flag()).code, 0);
  EXPECT_EQ(slurp(run_dir("balloon-report", "a") / "manifest.json"),
            slurp(run_dir("balloon-report", "b") / "manifest.json"));
  const auto m = nlohmann::json::parse(slurp(run_dir("balloon-report", "a") / "manifest.json"));
  EXPECT_EQ(m.at("seeds"), nlohmann::json::parse("[4,2]"));
  EXPECT_EQ(m.at("config").at("report").at("samples"), 7);
}

TEST_F(CliTest, LayeringIsDefaultThenFileThenEnvThenFlag) {
  const auto data_dir_of = [&](const std::string& label) {
    return nlohmann::json::parse(slurp(run_dir("balloon-report", label) / "manifest.json"))
        .at("config")
        .at("data_dir")
        .get<std::string>();
  };
  const std::string cfg = " --config '" + (root_ / "c.json").string() + "' ";
  spit(root_ / "c.json", R"({"data_dir": "from_file"})");
  ASSERT_EQ(invoke("balloon-report --label d " + out_flag()).code, 0);
  ASSERT_EQ(invoke("balloon-report --label f " + cfg + out_flag()).code, 0);
  ASSERT_EQ(invoke("balloon-report --label e " + cfg + out_flag(), "MSCR_DATA_DIR=from_env").code, 0);
  ASSERT_EQ(invoke("balloon-report --label x --data_dir from_flag " + cfg + out_flag(), "MSCR_DATA_DIR=from_env").code, 0);
  EXPECT_EQ(data_dir_of("d"), "data");
  EXPECT_EQ(data_dir_of("f"), "from_file");
  EXPECT_EQ(data_dir_of("e"), "from_env");
  EXPECT_EQ(data_dir_of("x"), "from_flag");
}

TEST_F(CliTest, UnknownConfigKeyFailsWithPath) {
  spit(root_ / "c.json", R"({"workspace": {"grid": 16, "gird": 16}})");
  const auto p = invoke("workspace --config '" + (root_ / "c.json").string() + "' " + out_flag());
  EXPECT_EQ(p.code, 2);
  EXPECT_NE(p.out.find("$.workspace.gird"), std::string::npos) << p.out;
  EXPECT_FALSE(fs::exists(root_ / "out"));
}

TEST_F(CliTest, UnknownFlagFails) {
  EXPECT_NE(invoke("workspace --workspace.gird 16 " + out_flag()).code, 0);
}

TEST_F(CliTest, ManifestHashesConfigAndFilesAndHoldsNoTimestamps) {
  ASSERT_EQ(invoke("gripper-curve --label m " + out_flag()).code, 0);
  const auto dir = run_dir("gripper-curve", "m");
  const auto m = nlohmann::json::parse(slurp(dir / "manifest.json"));
  EXPECT_EQ(m.at("command"), "gripper-curve");
  EXPECT_EQ(m.at("config_hash"), sha256_hex(m.at("config").dump()));
  EXPECT_FALSE(m.at("config").contains("label"));
  EXPECT_FALSE(m.at("config").contains("out_dir"));
  ASSERT_FALSE(m.at("files").empty());
  for (const auto& f : m.at("files")) {
    const auto body = slurp(dir / f.at("path").get<std::string>());
    EXPECT_EQ(f.at("bytes"), body.size());
    EXPECT_EQ(f.at("sha256"), sha256_hex(body));
  }
  const auto meta = nlohmann::json::parse(slurp(dir / "metadata.json"));
  EXPECT_TRUE(meta.contains("started_utc"));
  EXPECT_TRUE(meta.contains("finished_utc"));
  const std::string manifest_text = slurp(dir / "manifest.json");
  EXPECT_EQ(manifest_text.find(meta.at("started_utc").get<std::string>().substr(0, 10)), std::string::npos);
}

TEST_F(CliTest, RerunsAreByteIdenticalApartFromMetadata) {
  const std::vector<std::string> commands{
      "balloon-report --seed 3",
      "workspace --workspace.samples 20000 --workspace.grid 16 --seed 5,6",
      "gripper-curve --seed 1",
      "run --run.scenario noisy --seed 1,2 " + src_data(),
  };
  for (const auto& c : commands) {
    const auto name = c.substr(0, c.find(' '));
    ASSERT_EQ(invoke(c + " --label one " + out_flag()).code, 0) << c;
    ASSERT_EQ(invoke(c + " --label two " + out_flag()).code, 0) << c;
    const auto a = deterministic_files(run_dir(name, "one"));
    const auto b = deterministic_files(run_dir(name, "two"));
    EXPECT_FALSE(a.empty());
    EXPECT_EQ(a, b) << c;
  }
}

TEST_F(CliTest, RerunWithSameLabelReplacesTheDirectory) {
  ASSERT_EQ(invoke("run --run.scenario aligned --seed 1,2 --label r " + src_data() + " " + out_flag()).code, 0);
  ASSERT_EQ(invoke("run --run.scenario aligned --seed 1 --label r " + src_data() + " " + out_flag()).code, 0);
  EXPECT_FALSE(fs::exists(run_dir("run", "r") / "logs" / "autonomous_seed2.jsonl"));
}

TEST_F(CliTest, DefaultLabelIsATimestamp) {
  const auto p = invoke("gripper-curve " + out_flag());
  ASSERT_EQ(p.code, 0);
  std::vector<fs::path> dirs;
  for (const auto& e : fs::directory_iterator(root_ / "out" / "gripper-curve")) dirs.push_back(e.path());
  ASSERT_EQ(dirs.size(), 1u);
  const auto name = dirs[0].filename().string();
  EXPECT_EQ(name.size(), 16u) << name;
  EXPECT_EQ(name[8], 'T');
  EXPECT_EQ(name.back(), 'Z');
}

TEST_F(CliTest, BalloonDefaultRowCountIsSamples) {
  ASSERT_EQ(invoke("balloon-report --label b " + out_flag()).code, 0);
  const auto rows = lines_of(slurp(run_dir("balloon-report", "b") / "balloon_curve.csv"));
  EXPECT_EQ(rows.size(), 201u);
  EXPECT_EQ(rows.front().rfind("lambda_in,", 0), 0u);
}

TEST_F(CliTest, BalloonDegenerateRangeGivesOneZeroRow) {
  ASSERT_EQ(invoke("balloon-report --report.lambda_min 1 --report.lambda_max 1 --label b " + out_flag()).code, 0);
  const auto rows = lines_of(slurp(run_dir("balloon-report", "b") / "balloon_curve.csv"));
  ASSERT_EQ(rows.size(), 2u);
  EXPECT_EQ(rows[1].rfind("1,1,0,0,0,0,0,0,", 0), 0u) << rows[1];
}

TEST_F(CliTest, BalloonQuadratureColumnsAgreeWithClosedForm) {
  ASSERT_EQ(invoke("balloon-report --report.p_ex_kpa 3 --label b " + out_flag()).code, 0);
  const auto rows = lines_of(slurp(run_dir("balloon-report", "b") / "balloon_curve.csv"));
  for (std::size_t i = 1; i < rows.size(); ++i) {
    std::vector<std::string> cells;
    std::istringstream in(rows[i]);
    for (std::string c; std::getline(in, c, ',');) cells.push_back(c);
    ASSERT_EQ(cells.size(), 12u);
    EXPECT_LT(std::stod(cells[4]), 1e-6) << rows[i];
    EXPECT_LT(std::stod(cells[7]), 1e-6) << rows[i];
  }
}

TEST_F(CliTest, InvertedFieldBandIsAValidationError) {
  const auto p = invoke("workspace --field.b_min_mT 30 --field.b_max_mT 20 " + out_flag());
  EXPECT_EQ(p.code, 2);
  EXPECT_NE(p.out.find("$.field.b_min_mT"), std::string::npos) << p.out;
}

TEST_F(CliTest, EmptyWorkspaceIsAResultNotAnError) {
  const auto p = invoke("workspace --workspace.policy axial --field.b_min_mT 20 --field.b_max_mT 20 --label w " +
                     out_flag());
  ASSERT_EQ(p.code, 0) << p.out;
  const auto j = nlohmann::json::parse(slurp(run_dir("workspace", "w") / "workspace.json"));
  EXPECT_TRUE(j.at("empty").get<bool>());
  EXPECT_EQ(j.at("volume_m3"), 0.0);
}

TEST_F(CliTest, WorkspaceMonteCarloRowsFollowSeeds) {
  ASSERT_EQ(invoke("workspace --workspace.samples 20000 --seed 9,4,7 --label w " + out_flag()).code, 0);
  const auto rows = lines_of(slurp(run_dir("workspace", "w") / "workspace.csv"));
  ASSERT_EQ(rows.size(), 4u);
  EXPECT_EQ(rows[1].rfind("9,", 0), 0u);
  EXPECT_EQ(rows[2].rfind("4,", 0), 0u);
  EXPECT_EQ(rows[3].rfind("7,", 0), 0u);
}

TEST_F(CliTest, SameSeedsGiveIdenticalTablesAndOtherSeedsDiffer) {
  const std::string base = "run --run.scenario noisy --run.mode operator --run.logs false " + src_data() + " " + out_flag();
  ASSERT_EQ(invoke(base + " --seed 1,2 --label a").code, 0);
  ASSERT_EQ(invoke(base + " --seed 1,2 --label b --run.workers 2").code, 0);
  ASSERT_EQ(invoke(base + " --seed 3,4 --label c").code, 0);
  const auto a = slurp(run_dir("run", "a") / "summary.csv");
  EXPECT_EQ(a, slurp(run_dir("run", "b") / "summary.csv"));
  EXPECT_NE(a, slurp(run_dir("run", "c") / "summary.csv"));
  EXPECT_FALSE(fs::exists(run_dir("run", "a") / "logs"));
}

TEST_F(CliTest, RunTableHasOneRowPerModeAndSeed) {
  ASSERT_EQ(invoke("run --run.scenario aligned --seed 1,2,3 --label r " + src_data() + " " + out_flag()).code, 0);
  const auto rows = lines_of(slurp(run_dir("run", "r") / "runs.csv"));
  EXPECT_EQ(rows.size(), 7u);
  const auto md = slurp(run_dir("run", "r") / "summary.md");
  EXPECT_NE(md.find("| autonomous | 3 |"), std::string::npos) << md;
  EXPECT_NE(md.find("| operator | 3 |"), std::string::npos) << md;
}

TEST_F(CliTest, ReplayReproducesRunMetrics) {
  ASSERT_EQ(invoke("run --run.scenario offset_20 --run.mode autonomous --seed 8 --label r " + src_data() + " " + out_flag()).code, 0);
  const auto log = run_dir("run", "r") / "logs" / "autonomous_seed8.jsonl";
  ASSERT_TRUE(fs::exists(log));
  ASSERT_EQ(invoke("replay --replay.log '" + log.string() + "' --label p " + out_flag()).code, 0);
  const auto replayed = nlohmann::json::parse(slurp(run_dir("replay", "p") / "metrics.json"));
  const auto rows = lines_of(slurp(run_dir("run", "r") / "runs.csv"));
  ASSERT_EQ(rows.size(), 2u);
  EXPECT_NE(rows[1].find(replayed.at("end_reason").get<std::string>()), std::string::npos);
  EXPECT_NE(rows[1].find("," + num(replayed.at("insertion_time").get<double>()) + ","), std::string::npos) << rows[1];
}

TEST_F(CliTest, MissingScenarioIsReported) {
  const auto p = invoke("run --run.scenario no_such_thing " + src_data() + " " + out_flag());
  EXPECT_EQ(p.code, 3);
  EXPECT_NE(p.out.find("no_such_thing"), std::string::npos);
}

TEST_F(CliTest, MalformedScenarioNamesTheField) {
  auto doc = nlohmann::json::parse(slurp(MSCR_SOURCE_DIR "/scenarios/aligned.json"));
  doc["plant"]["b_max_mT"] = "strong";
  spit(root_ / "bad.json", doc.dump());
  const auto p = invoke("run --run.scenario '" + (root_ / "bad.json").string() + "' " + out_flag());
  EXPECT_EQ(p.code, 2);
  EXPECT_NE(p.out.find("$.plant.b_max_mT"), std::string::npos) << p.out;
}

TEST_F(CliTest, DetectorAgainstItselfScoresOne) {
  const std::string gt =
      R"({"frame":0,"boxes":[{"class":"marker1","corners":[[0,0],[10,0],[10,10],[0,10]]}]})" "\n"
      R"({"frame":1,"boxes":[{"class":"marker2","corners":[[5,5],[15,5],[15,15],[5,15]]}]})" "\n";
  spit(root_ / "gt.jsonl", gt);
  const auto f = "'" + (root_ / "gt.jsonl").string() + "'";
  ASSERT_EQ(invoke("eval-detector --eval.pred " + f + " --eval.gt " + f + " --label e " + out_flag()).code, 0);
  const auto m = nlohmann::json::parse(slurp(run_dir("eval-detector", "e") / "metrics.json"));
  EXPECT_EQ(m.at("precision"), 1.0);
  EXPECT_EQ(m.at("recall"), 1.0);
  EXPECT_EQ(m.at("f1"), 1.0);
}

TEST_F(CliTest, DetectorParseErrorNamesTheLine) {
  spit(root_ / "gt.jsonl", R"({"frame":0,"boxes":[]})" "\n");
  spit(root_ / "pred.jsonl", R"({"frame":0,"boxes":[]})" "\n{oops\n");
  const auto p = invoke("eval-detector --eval.pred '" + (root_ / "pred.jsonl").string() + "' --eval.gt '" +
                     (root_ / "gt.jsonl").string() + "' " + out_flag());
  EXPECT_NE(p.code, 0);
  EXPECT_NE(p.out.find("line 2"), std::string::npos) << p.out;
}

TEST_F(CliTest, DetectorNeedsBothFiles) {
  const auto p = invoke("eval-detector " + out_flag());
  EXPECT_EQ(p.code, 2);
  EXPECT_NE(p.out.find("$.eval.pred"), std::string::npos) << p.out;
}

TEST_F(CliTest, HealthWithoutServiceIsUnhealthy) {
  const auto p = invoke("health --service.timeout_ms 200", "MSCR_SERVICE_ADDR=127.0.0.1:1");
  EXPECT_NE(p.code, 0);
  EXPECT_NE(p.out.find("127.0.0.1:1"), std::string::npos) << p.out;
}

TEST_F(CliTest, ServeAnswersHealthAndStopsAfterDuration) {
  const std::string addr = "127.0.0.1:" + std::to_string(20000 + ::getpid() % 20000);
  const std::string serve_cmd = "env MSCR_SERVICE_ADDR=" + addr + " '" MSCR_CLI_BIN "' serve --data_dir '" +
                                (root_ / "store").string() + "' --service.duration_s 3 > /dev/null 2>&1 &";
  ASSERT_EQ(std::system(serve_cmd.c_str()), 0);
  Proc p;
  for (int i = 0; i < 40; ++i) {
    p = invoke("health --service.timeout_ms 500 --service.addr " + addr);
    if (p.code == 0) break;
    std::this_thread::sleep_for(std::chrono::milliseconds(50));
  }
  EXPECT_EQ(p.code, 0) << p.out;
  EXPECT_NE(p.out.find("\"status\":\"ok\""), std::string::npos) << p.out;
  std::this_thread::sleep_for(std::chrono::milliseconds(3500));
  EXPECT_NE(invoke("health --service.timeout_ms 200 --service.addr " + addr).code, 0);
}
