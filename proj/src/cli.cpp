#include "l2x/cli.hpp"

#include "l2x/agents.hpp"
#include "l2x/curriculum.hpp"
#include "l2x/errors.hpp"
#include "l2x/metrics.hpp"
#include "l2x/protocol.hpp"
#include "l2x/server.hpp"
#include "l2x/similarity.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <atomic>
#include <chrono>
#include <csignal>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <thread>

namespace l2x {

namespace {

std::atomic<bool> g_interrupted{false};

extern "C" void on_signal(int) { g_interrupted = true; }

struct IoError : Error {
  explicit IoError(const std::string& m) : Error("io-error", m) {}
};

Json read_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  try {
    return Json::parse(ss.str());
  } catch (const Json::parse_error& e) {
    throw SyntaxError("'" + path + "': " + e.what());
  }
}

std::ofstream open_output(const std::string& path) {
  const auto parent = std::filesystem::path(path).parent_path();
  if (!parent.empty()) std::filesystem::create_directories(parent);
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot write '" + path + "'");
  return out;
}

std::shared_ptr<const TaskDefinition> load_task_ref(const std::string& ref) {
  if (ref.starts_with("builtin:")) return builtin_task(ref.substr(8));
  if (!std::filesystem::exists(ref)) throw DanglingReference("task file '" + ref + "' does not exist");
  return std::make_shared<const TaskDefinition>(load_task_file(ref));
}

bool runtime_fault(const Error& e) {
  return e.code() == "agent-fault" || e.code() == "bind-error" || e.code() == "io-error";
}

struct AgentFlags {
  std::string kind = "tabular-q";
  double epsilon = 0.1;
  double learning_rate = 0.1;
  double discount = 0.95;
  double initial_value = 0.0;

  void add_to(CLI::App* cmd) {
    cmd->add_option("--agent", kind, "random, tabular-q or bandit")->capture_default_str();
    cmd->add_option("--epsilon", epsilon)->capture_default_str();
    cmd->add_option("--learning-rate", learning_rate)->capture_default_str();
    cmd->add_option("--discount", discount)->capture_default_str();
    cmd->add_option("--initial-value", initial_value, "optimistic initial value estimate")->capture_default_str();
  }
  AgentConfig config(std::uint64_t seed) const {
    AgentConfig c;
    c.kind = agent_kind_from_string(kind);
    c.epsilon = epsilon;
    c.learning_rate = learning_rate;
    c.discount = discount;
    c.initial_value = initial_value;
    c.seed = seed;
    validate(c);
    return c;
  }
};

int validate_files(const std::vector<std::string>& files, std::ostream& out, std::ostream& err) {
  int status = 0;
  for (const std::string& f : files) {
    try {
      if (f.ends_with(".l2task.json")) {
        (void)load_task_file(f);
      } else if (f.ends_with(".l2syl.json")) {
        (void)load_syllabus_file(f);
      } else if (f.ends_with(".l2log.jsonl")) {
        (void)read_log_file(f);
      } else if (f.ends_with(".json")) {
        validate(spec_from_json(read_json_file(f)));
      } else {
        throw ArgumentError("unrecognised file kind (expected .l2w.json, .l2task.json, .l2syl.json, .l2log.jsonl)");
      }
      out << "ok " << f << "\n";
    } catch (const Error& e) {
      err << "invalid " << f << ": " << e.code() << ": " << e.what() << "\n";
      status = std::max(status, runtime_fault(e) ? 2 : 1);
    }
  }
  return status;
}

int run_serve(bool stdio, const std::string& listen, std::istream& in, std::ostream& out, std::ostream& err) {
  if (listen.empty() || stdio) {
    serve_stream(in, out);
    return 0;
  }
  auto [host, port] = parse_listen_address(listen);
  Server server(host, port);
  server.start();
  err << "listening on " << host << ":" << server.port() << std::endl;
  g_interrupted = false;
  std::signal(SIGINT, on_signal);
  std::signal(SIGTERM, on_signal);
  while (!g_interrupted) std::this_thread::sleep_for(std::chrono::milliseconds(100));
  server.stop();
  return 0;
}

int run_lifetime(const Syllabus& syllabus, const AgentConfig& config, const std::string& log_path,
                 std::ostream& out) {
  auto agent = make_agent(config);
  std::ofstream log = open_output(log_path);
  RunOptions options;
  options.sink = log_writer(log);
  const RunSummary summary = run_syllabus(syllabus, *agent, options);
  out << Json({{"lifetime_id", syllabus.lifetime_id},
               {"episodes", summary.episodes},
               {"steps", summary.steps},
               {"log", log_path}})
             .dump()
      << "\n";
  return 0;
}

}  // namespace

int cli_main(const std::vector<std::string>& args, std::istream& in, std::ostream& out, std::ostream& err) {
  CLI::App app{"l2x: reconfigurable continual-RL world simulator and lifelong-learning assessment", "l2x"};
  app.require_subcommand(1);
  int status = 0;
  std::function<int()> action;

  auto* serve = app.add_subcommand("serve", "run the line-protocol environment server");
  bool stdio = false;
  std::string listen;
  serve->add_flag("--stdio", stdio, "speak the protocol on stdin/stdout (default)");
  serve->add_option("--listen", listen, "TCP host:port to listen on");
  serve->callback([&] { action = [&] { return run_serve(stdio, listen, in, out, err); }; });

  auto* run = app.add_subcommand("run", "execute a syllabus with an in-process agent");
  std::string syllabus_path, run_log;
  std::optional<std::uint64_t> run_seed;
  AgentFlags run_agent;
  run->add_option("syllabus", syllabus_path, "syllabus file (.l2syl.json)")->required();
  run->add_option("--log", run_log, "output log (.l2log.jsonl)")->required();
  run->add_option("--seed", run_seed, "overrides the syllabus global seed and seeds the agent");
  run_agent.add_to(run);
  run->callback([&] {
    action = [&] {
      Syllabus s = load_syllabus_file(syllabus_path);
      if (run_seed) s.global_seed = *run_seed;
      return run_lifetime(s, run_agent.config(s.global_seed), run_log, out);
    };
  });

  auto* metrics = app.add_subcommand("metrics", "compute lifelong-learning metrics from a log");
  std::string metrics_log, ste_dir, report_out;
  metrics->add_option("log", metrics_log, "lifetime log (.l2log.jsonl)")->required();
  metrics->add_option("--ste-dir", ste_dir, "directory of single-task-expert logs");
  metrics->add_option("--out", report_out, "write the report here instead of stdout");
  metrics->callback([&] {
    action = [&] {
      const auto log = read_log_file(metrics_log);
      const SteRegistry ste = ste_dir.empty() ? SteRegistry{} : load_ste_dir(ste_dir);
      const std::string text = to_json(compute_report(log, ste)).dump(2) + "\n";
      if (report_out.empty()) {
        out << text;
      } else {
        std::ofstream f = open_output(report_out);
        f << text;
      }
      return 0;
    };
  });

  auto* val = app.add_subcommand("validate", "check world, task, syllabus or log files");
  std::vector<std::string> files;
  val->add_option("files", files, "files to check")->required();
  val->callback([&] { action = [&] { return validate_files(files, out, err); }; });

  auto* sim = app.add_subcommand("similarity", "heuristic distances between two worlds");
  std::string spec_a, spec_b, weights_path;
  double cell_size = 0.5;
  sim->add_option("spec_a", spec_a)->required();
  sim->add_option("spec_b", spec_b)->required();
  sim->add_option("--cell-size", cell_size, "occupancy grid cell size in meters")->capture_default_str();
  sim->add_option("--weights", weights_path, "JSON object of key-path weights");
  sim->callback([&] {
    action = [&] {
      const WorldSpec a = spec_from_json(read_json_file(spec_a));
      const WorldSpec b = spec_from_json(read_json_file(spec_b));
      const WeightMap w = weights_path.empty() ? WeightMap{} : weights_from_json(read_json_file(weights_path));
      out << to_json(compare(a, b, cell_size, w)).dump(2) << "\n";
      return 0;
    };
  });

  auto* ste = app.add_subcommand("ste", "single-task-expert reference run");
  std::string ste_task, ste_log;
  std::int64_t ste_episodes = 200;
  std::uint64_t ste_seed = 0;
  AgentFlags ste_agent;
  ste->add_option("task", ste_task, "task file (.l2task.json) or builtin:<name>")->required();
  ste->add_option("--episodes", ste_episodes)->capture_default_str();
  ste->add_option("--seed", ste_seed)->capture_default_str();
  ste->add_option("--log", ste_log, "output log (.l2log.jsonl)")->required();
  ste_agent.add_to(ste);
  ste->callback([&] {
    action = [&] {
      const Syllabus s = make_ste_syllabus(ste_task, load_task_ref(ste_task), ste_episodes, ste_seed);
      return run_lifetime(s, ste_agent.config(ste_seed), ste_log, out);
    };
  });

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::ParseError& e) {
    app.exit(e, out, err);
    err << app.help();
    return 1;
  }
  try {
    status = action ? action() : 0;
  } catch (const Error& e) {
    err << "error: " << e.code() << ": " << e.what() << "\n";
    return runtime_fault(e) ? 2 : 1;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return 2;
  }
  return status;
}

int cli_main(int argc, const char* const* argv) {
  std::vector<std::string> args;
  for (int i = 1; i < argc; ++i) args.emplace_back(argv[i]);
  return cli_main(args, std::cin, std::cout, std::cerr);
}

}  // namespace l2x
