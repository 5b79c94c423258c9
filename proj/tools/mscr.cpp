#include <mscr/cli/commands.hpp>
#include <mscr/service/tcp.hpp>

#include <CLI11.hpp>

#include <csignal>
#include <iostream>

namespace {

using namespace mscr;
using namespace mscr::cli;

std::atomic<bool> g_stop{false};

void on_signal(int) { g_stop = true; }

enum Exit { kOk = 0, kInternal = 1, kBadInput = 2, kMissing = 3, kUnhealthy = 4 };

struct Bound {
  const Param* param;
  CLI::Option* option;
  std::vector<std::string> values;
};

std::string help_for(const Param& p) {
  std::string h = p.help;
  if (!p.env.empty()) h += " (env " + p.env + ")";
  return h;
}

nlohmann::json resolve(const ConfigSchema& schema, const CommandSpec& spec, const std::string& config_path,
                       const std::vector<std::unique_ptr<Bound>>& flags) {
  nlohmann::json cfg = schema.defaults();
  if (!config_path.empty()) {
    std::ifstream in(config_path);
    if (!in) throw MissingDataError("cannot open config '" + config_path + "'");
    std::stringstream ss;
    ss << in.rdbuf();
    try {
      schema.overlay(cfg, parse_json(ss.str()));
    } catch (const SchemaError& e) {
      throw SchemaError(config_path + ":" + e.path(), e.message());
    }
  }
  schema.apply_env(cfg, std::set<std::string>(spec.keys.begin(), spec.keys.end()));
  for (const auto& f : flags)
    if (f->option->count() > 0) cfg[f->param->pointer()] = schema.parse_text(*f->param, f->values);
  return cfg;
}

int serve(const nlohmann::json& cfg) {
  service::ManagerOptions opts;
  opts.data_dir = cfg.at("data_dir").get<std::string>();
  service::SessionManager mgr(opts);
  service::Server server(mgr, service::parse_endpoint(cfg.at("service").at("addr").get<std::string>()));
  server.start();
  std::cout << "listening on port " << server.port() << ", run store " << opts.data_dir.string() << std::endl;
  std::signal(SIGINT, on_signal);
  std::signal(SIGTERM, on_signal);
  const double duration = cfg.at("service").at("duration_s").get<double>();
  const auto t0 = std::chrono::steady_clock::now();
  while (!g_stop) {
    std::this_thread::sleep_for(std::chrono::milliseconds(50));
    if (duration > 0.0 && std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count() >= duration)
      break;
  }
  server.stop();
  mgr.shutdown();
  std::cout << "stopped" << std::endl;
  return kOk;
}

int health(const nlohmann::json& cfg) {
  const auto ep = service::parse_endpoint(cfg.at("service").at("addr").get<std::string>());
  try {
    service::Client c(ep);
    const auto reply =
        c.call("health", nlohmann::json::object(),
               std::chrono::milliseconds(cfg.at("service").at("timeout_ms").get<long>()));
    std::cout << reply.dump() << std::endl;
    return reply.value("status", "") == "ok" ? kOk : kUnhealthy;
  } catch (const std::exception& e) {
    std::cerr << "unhealthy: " << e.what() << std::endl;
    return kUnhealthy;
  }
}

int run_command(const ConfigSchema& schema, const CommandSpec& spec, const nlohmann::json& cfg,
                const std::vector<std::string>& argv) {
  if (spec.name == "serve") return serve(cfg);
  if (spec.name == "health") return health(cfg);
  const auto started = std::chrono::system_clock::now();
  auto result = run_batch_command(spec.name, cfg);
  std::vector<std::string> recorded;
  for (const auto& k : spec.keys)
    if (!is_placement_key(k)) recorded.push_back(k);
  const RunRecord record{spec.name, restrict_to(schema, cfg, recorded), seeds_of(cfg)};
  std::string label = cfg.at("label").get<std::string>();
  if (label.empty()) label = utc_stamp(started, true);
  const auto dir = write_run(cfg.at("out_dir").get<std::string>(), label, record, result.files, started, argv);
  std::cout << result.summary;
  for (const auto& w : result.warnings) std::cerr << "warning: " << w << '\n';
  std::cout << "wrote " << dir.string() << std::endl;
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  const ConfigSchema schema = make_schema();
  CLI::App app{
      "Design and simulation toolkit for magnetically steered catheters.\n"
      "Every config key is also a flag: key a.b in a --config JSON file is --a.b on the command line.\n"
      "Precedence: built-in default < config file < environment < flag."};
  app.require_subcommand(0, 1);
  bool print_schema = false;
  app.add_flag("--config-schema", print_schema, "Print the JSON Schema that --config files must satisfy and exit");

  std::string config_path;
  std::vector<std::pair<CLI::App*, const CommandSpec*>> subs;
  std::map<const CommandSpec*, std::vector<std::unique_ptr<Bound>>> flags;
  for (const auto& spec : command_specs()) {
    CLI::App* sub = app.add_subcommand(spec.name, spec.description);
    sub->add_option("--config", config_path, "JSON config file (keys mirror the flags below)");
    for (const auto& key : spec.keys) {
      const Param* p = schema.find(key);
      auto b = std::make_unique<Bound>();
      b->param = p;
      b->option = sub->add_option("--" + key, b->values, help_for(*p));
      b->option->type_name(std::string(type_name(p->type)));
      b->option->default_str(p->fallback.is_string() ? p->fallback.get<std::string>() : p->fallback.dump());
      if (p->type == ParamType::integer_list) {
        b->option->delimiter(',');
        b->option->expected(1, CLI::detail::expected_max_vector_size);
      } else {
        b->option->expected(1);
        b->option->multi_option_policy(CLI::MultiOptionPolicy::TakeLast);
      }
      if (!p->choices.empty()) {
        std::string c;
        for (const auto& x : p->choices) c += (c.empty() ? "" : "|") + x;
        b->option->type_name(c);
      }
      flags[&spec].push_back(std::move(b));
    }
    subs.emplace_back(sub, &spec);
  }

  CLI11_PARSE(app, argc, argv);
  if (print_schema) {
    std::cout << schema.json_schema().dump(2) << std::endl;
    return kOk;
  }
  for (const auto& [sub, spec] : subs) {
    if (!sub->parsed()) continue;
    std::vector<std::string> args(argv, argv + argc);
    try {
      const auto cfg = resolve(schema, *spec, config_path, flags[spec]);
      return run_command(schema, *spec, cfg, args);
    } catch (const SchemaError& e) {
      std::cerr << "config error: " << e.what() << std::endl;
      return kBadInput;
    } catch (const MissingDataError& e) {
      std::cerr << "error: " << e.what() << std::endl;
      return kMissing;
    } catch (const DomainError& e) {
      std::cerr << "error: " << e.what() << std::endl;
      return kBadInput;
    } catch (const std::exception& e) {
      std::cerr << "internal error: " << e.what() << std::endl;
      return kInternal;
    }
  }
  std::cout << app.help();
  return kOk;
}
