#include "chatmpc/cli/cli.hpp"

#include <httplib.h>
#include <pthread.h>
#include <signal.h>

#include <CLI11.hpp>
#include <atomic>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <json.hpp>
#include <sstream>
#include <thread>

#include "chatmpc/embedding/remote.hpp"
#include "chatmpc/error.hpp"
#include "chatmpc/service/http.hpp"
#include "chatmpc/sim/export.hpp"

namespace chatmpc::cli {
namespace {

namespace fs = std::filesystem;

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

void write_file(const fs::path& path, const std::string& content) {
  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  if (!f) throw ValidationError("cannot write " + path.string());
  f << content;
  if (!f) throw std::runtime_error("failed writing " + path.string());
}

std::shared_ptr<const interpreter::Interpreter> make_interpreter(const std::string& corpus,
                                                                 const std::string& embedder) {
  auto clf = interpreter::train_classifier(load_corpus_spec(corpus), make_provider(embedder));
  return std::make_shared<interpreter::Interpreter>(std::move(clf), interpreter::UpdateConfig{});
}

struct RunArgs {
  std::string scenario;
  std::string prompts;
  std::string theta0 = "0.4,0.4";
  std::string out = "chatmpc_out";
  std::string embedder = "builtin";
  std::string corpus = "table1";
};

int cmd_run(const RunArgs& a, std::ostream& out) {
  const sim::Scenario scenario = sim::load_scenario(a.scenario);
  const sim::PromptSchedule schedule =
      a.prompts.empty() ? sim::PromptSchedule{std::nullopt} : parse_prompt_schedule(a.prompts);
  const ParamVector theta0 = parse_theta(a.theta0);
  const auto interp = make_interpreter(a.corpus, a.embedder);

  const fs::path dir(a.out);
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw ValidationError("cannot create output directory " + a.out + ": " + ec.message());

  const sim::SessionLog log = sim::run_session(scenario, schedule, *interp, theta0);

  nlohmann::json metrics = nlohmann::json::array();
  nlohmann::json thetas = nlohmann::json::array();
  bool all_reached = true;
  for (std::size_t i = 0; i < log.entries.size(); ++i) {
    const auto& e = log.entries[i];
    write_file(dir / ("trial_" + std::to_string(i + 1) + ".csv"), sim::trajectory_csv(e.trajectory));
    metrics.push_back(sim::metrics_json(e.metrics));
    thetas.push_back(sim::theta_json(e.theta_after));
    all_reached = all_reached && e.metrics.reached_goal;

    out << "trial " << i + 1 << ": theta=[" << e.theta_after.gamma_vase << ", " << e.theta_after.gamma_toy
        << "] steps=" << e.metrics.steps << " reached=" << (e.metrics.reached_goal ? "yes" : "no");
    for (const auto& [kind, c] : e.metrics.min_clearance_by_kind) {
      out << " clearance[" << cbf::kind_name(kind) << "]=" << c;
    }
    if (e.prompt) out << " prompt=\"" << *e.prompt << "\" marker=" << interpreter::marker_to_string(e.marker.s);
    out << '\n';
  }
  write_file(dir / "metrics.json", metrics.dump(2) + "\n");
  write_file(dir / "theta_history.json", thetas.dump(2) + "\n");
  write_file(dir / "session.json", sim::session_summary_json(log).dump(2) + "\n");
  return all_reached ? kOk : kGoalNotReached;
}

int cmd_interpret(const std::string& prompt, const std::string& corpus, const std::string& embedder,
                  std::ostream& out) {
  const auto interp = make_interpreter(corpus, embedder);
  const auto m = interp->extract(prompt);
  const nlohmann::json doc = {{"prompt", prompt},
                              {"marker", {m.s[0], m.s[1]}},
                              {"confidence", m.confidence},
                              {"recognized", m.recognized}};
  out << doc.dump() << '\n';
  return kOk;
}

struct ServeArgs {
  std::string host = "127.0.0.1";
  int port = 8787;
  std::string ui_origin = "*";
  std::string log_file;
  std::string embedder = "builtin";
  std::string corpus = "table1";
};

int cmd_serve(const ServeArgs& a, std::ostream& out, std::ostream& err) {
  service::ServiceOptions opts;
  if (!a.log_file.empty()) opts.log_file = a.log_file;
  service::SessionService svc(make_interpreter(a.corpus, a.embedder), opts);

  // Signals are consumed by a watcher thread; every other thread keeps them blocked.
  sigset_t sigs;
  sigemptyset(&sigs);
  sigaddset(&sigs, SIGINT);
  sigaddset(&sigs, SIGTERM);
  sigset_t previous;
  pthread_sigmask(SIG_BLOCK, &sigs, &previous);

  httplib::Server server;
  // No SO_REUSEPORT: an occupied port must fail to bind rather than be shared.
  server.set_socket_options([](socket_t sock) {
    int yes = 1;
    setsockopt(sock, SOL_SOCKET, SO_REUSEADDR, &yes, sizeof(yes));
  });
  service::register_routes(server, svc, {a.ui_origin});
  int port = a.port;
  if (port == 0) {
    port = server.bind_to_any_port(a.host);
    if (port < 0) port = -1;
  } else if (!server.bind_to_port(a.host, port)) {
    port = -1;
  }
  if (port < 0) {
    pthread_sigmask(SIG_SETMASK, &previous, nullptr);
    err << "error: cannot bind " << a.host << ":" << a.port << '\n';
    return kRuntime;
  }
  out << "serving on http://" << a.host << ":" << port << std::endl;

  std::atomic<bool> done{false};
  std::thread watcher([&] {
    const timespec tick{0, 100'000'000};
    while (!done.load()) {
      if (sigtimedwait(&sigs, nullptr, &tick) > 0) {
        server.stop();
        return;
      }
    }
  });
  const bool ok = server.listen_after_bind();
  done.store(true);
  watcher.join();
  pthread_sigmask(SIG_SETMASK, &previous, nullptr);
  out << "shutdown" << std::endl;
  return ok || !server.is_running() ? kOk : kRuntime;
}

}  // namespace

sim::PromptSchedule parse_prompt_schedule(const std::string& spec) {
  if (spec == "table2") return sim::table2_schedule();
  sim::PromptSchedule out;
  std::error_code ec;
  if (fs::is_regular_file(spec, ec)) {
    std::ifstream in(spec);
    if (!in) throw ValidationError("cannot read prompt file " + spec);
    std::string line;
    while (std::getline(in, line)) {
      const std::string t = trim(line);
      if (t.empty()) continue;
      out.push_back(t == "-" ? std::nullopt : std::optional<std::string>(t));
    }
    if (out.empty()) throw ValidationError("prompt file " + spec + " has no entries");
    return out;
  }
  std::stringstream ss(spec);
  std::string part;
  while (std::getline(ss, part, '|')) {
    const std::string t = trim(part);
    out.push_back(t.empty() || t == "-" ? std::nullopt : std::optional<std::string>(t));
  }
  if (!spec.empty() && spec.back() == '|') out.push_back(std::nullopt);
  return out;
}

ParamVector parse_theta(const std::string& text) {
  const auto comma = text.find(',');
  if (comma == std::string::npos) throw ValidationError("theta must be 'g_vase,g_toy'");
  ParamVector t;
  try {
    std::size_t p1 = 0;
    std::size_t p2 = 0;
    const std::string a = trim(text.substr(0, comma));
    const std::string b = trim(text.substr(comma + 1));
    t.gamma_vase = std::stod(a, &p1);
    t.gamma_toy = std::stod(b, &p2);
    if (p1 != a.size() || p2 != b.size()) throw std::invalid_argument("trailing characters");
  } catch (const std::exception&) {
    throw ValidationError("theta must be 'g_vase,g_toy', got '" + text + "'");
  }
  auto ok = [](double g) { return std::isfinite(g) && g >= ParamVector::kMin && g <= ParamVector::kMax; };
  if (!ok(t.gamma_vase) || !ok(t.gamma_toy)) throw ValidationError("theta components must lie in [1e-4, 1e4]");
  return t;
}

std::shared_ptr<const embedding::EmbeddingProvider> make_provider(const std::string& spec) {
  if (spec == "builtin") return std::make_shared<embedding::BuiltinEmbedder>();
  if (spec.rfind("http://", 0) == 0 || spec.rfind("https://", 0) == 0) {
    return std::make_shared<embedding::RemoteEmbedder>(embedding::RemoteConfig{spec});
  }
  throw ValidationError("embedder must be 'builtin' or an http URL, got '" + spec + "'");
}

std::vector<interpreter::TrainExample> load_corpus_spec(const std::string& spec) {
  if (spec == "table1") return interpreter::builtin_corpus();
  return interpreter::load_corpus(spec);
}

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Chat-personalized MPC workbench"};
  app.require_subcommand(1);

  RunArgs run;
  bool seedless = false;
  auto* run_cmd = app.add_subcommand("run", "Run a scenario through a prompt schedule");
  run_cmd->add_option("--scenario", run.scenario, "Builtin scenario (env_a, env_b) or scenario JSON path")->required();
  run_cmd->add_option("--prompts", run.prompts, "table2, a prompt file, or inline prompts separated by '|'");
  run_cmd->add_option("--theta0", run.theta0, "Initial parameter g_vase,g_toy")->capture_default_str();
  run_cmd->add_option("--out", run.out, "Output directory")->capture_default_str();
  run_cmd->add_option("--embedder", run.embedder, "builtin or remote service URL")->capture_default_str();
  run_cmd->add_option("--corpus", run.corpus, "table1 or JSON Lines corpus path")->capture_default_str();
  run_cmd->add_flag("--seedless", seedless, "Assert that no random number generator is used (always true)");

  std::string prompt;
  std::string icorpus = "table1";
  std::string iembedder = "builtin";
  auto* int_cmd = app.add_subcommand("interpret", "Classify one prompt and print the update marker");
  int_cmd->add_option("prompt", prompt, "Prompt text")->required();
  int_cmd->add_option("--corpus", icorpus, "table1 or JSON Lines corpus path")->capture_default_str();
  int_cmd->add_option("--embedder", iembedder, "builtin or remote service URL")->capture_default_str();

  ServeArgs serve;
  auto* serve_cmd = app.add_subcommand("serve", "Serve the session API");
  serve_cmd->add_option("--host", serve.host)->capture_default_str();
  serve_cmd->add_option("--port", serve.port, "0 picks a free port")->capture_default_str();
  serve_cmd->add_option("--ui-origin", serve.ui_origin, "Allowed CORS origin")->capture_default_str();
  serve_cmd->add_option("--log-file", serve.log_file, "Append-only session log (replayed on start)");
  serve_cmd->add_option("--embedder", serve.embedder)->capture_default_str();
  serve_cmd->add_option("--corpus", serve.corpus)->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    out << app.help();
    return kOk;
  } catch (const CLI::CallForAllHelp& e) {
    out << app.help("", CLI::AppFormatMode::All);
    return kOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << '\n';
    return kValidation;
  }

  try {
    if (*run_cmd) return cmd_run(run, out);
    if (*int_cmd) return cmd_interpret(prompt, icorpus, iembedder, out);
    if (*serve_cmd) return cmd_serve(serve, out, err);
  } catch (const ValidationError& e) {
    err << "error: " << e.what() << '\n';
    return kValidation;
  } catch (const ParseError& e) {
    err << "error: " << e.what() << '\n';
    return kValidation;
  } catch (const ConfigError& e) {
    err << "error: " << e.what() << '\n';
    return kValidation;
  } catch (const NotFoundError& e) {
    err << "error: " << e.what() << '\n';
    return kValidation;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kRuntime;
  }
  return kValidation;
}

}  // namespace chatmpc::cli
