#include <doctest.h>

// Eigen first: resolv.h, pulled in by httplib, defines a _res macro that collides with Eigen internals.
#include "chatmpc/service/http.hpp"
#include "chatmpc/service/service.hpp"

#include <httplib.h>

#include <chrono>
#include <cstdio>
#include <filesystem>
#include <json.hpp>
#include <thread>

#include "chatmpc/error.hpp"

using namespace chatmpc;
using namespace chatmpc::service;
using nlohmann::json;

namespace {

const char* kP1 = "Separate from the vase.";
const char* kP2 = "You don't have to be so careful about the toy.";

std::shared_ptr<const interpreter::Interpreter> shared_interpreter() {
  static const auto interp = std::make_shared<const interpreter::Interpreter>(
      interpreter::train_classifier(interpreter::builtin_corpus(), std::make_shared<embedding::BuiltinEmbedder>()),
      interpreter::UpdateConfig{});
  return interp;
}

std::string temp_path(const std::string& stem) {
  const auto p = std::filesystem::temp_directory_path() /
                 (stem + "_" + std::to_string(std::chrono::steady_clock::now().time_since_epoch().count()) + ".jsonl");
  return p.string();
}

/// Service plus HTTP front end on an ephemeral port.
class LiveServer {
 public:
  explicit LiveServer(HttpOptions options = {}) : service_(shared_interpreter()) {
    register_routes(server_, service_, options);
    port_ = server_.bind_to_any_port("127.0.0.1");
    thread_ = std::thread([this] { server_.listen_after_bind(); });
    server_.wait_until_ready();
  }
  ~LiveServer() {
    server_.stop();
    thread_.join();
  }
  httplib::Client client() const { return httplib::Client("127.0.0.1", port_); }

 private:
  SessionService service_;
  httplib::Server server_;
  int port_ = 0;
  std::thread thread_;
};

}  // namespace

TEST_CASE("session lifecycle") {
  SessionService svc(shared_interpreter());

  SUBCASE("creation") {
    const auto a = svc.create_session("env_a");
    CHECK(a.theta == ParamVector{0.4, 0.4});
    CHECK(a.theta0 == ParamVector{0.4, 0.4});
    CHECK(a.scenario.name == "env_a");
    const auto b = svc.create_session("env_a", ParamVector{0.3, 0.6});
    CHECK(a.id != b.id);
    CHECK(b.theta == ParamVector{0.3, 0.6});
    CHECK(svc.session_count() == 2);
    CHECK_THROWS_AS(svc.create_session("nope"), NotFoundError);
    CHECK_THROWS_AS(svc.create_session("env_a", ParamVector{0.0, 0.4}), ValidationError);
    CHECK_THROWS_AS(svc.get_state("s999999"), NotFoundError);
  }

  SUBCASE("prompts update theta and are recorded") {
    const auto id = svc.create_session("env_a").id;
    const auto r = svc.submit_prompt(id, kP1);
    CHECK(r.marker.recognized);
    CHECK(r.theta_before == ParamVector{0.4, 0.4});
    CHECK(r.theta_after == ParamVector{0.2, 0.4});
    const auto g = svc.submit_prompt(id, "qwzx");
    CHECK_FALSE(g.marker.recognized);
    CHECK(g.theta_after == ParamVector{0.2, 0.4});
    CHECK_THROWS_AS(svc.submit_prompt(id, "   "), ValidationError);
    CHECK_THROWS_AS(svc.submit_prompt("s999999", kP1), NotFoundError);
    const auto state = svc.get_state(id);
    CHECK(state.transcript.size() == 2);
    CHECK(state.theta == ParamVector{0.2, 0.4});
  }

  SUBCASE("trials run with the current theta") {
    const auto id = svc.create_session("env_a").id;
    const auto t0 = svc.run_trial(id);
    CHECK(t0.index == 0);
    CHECK(t0.metrics.reached_goal);
    svc.submit_prompt(id, kP1);
    const auto t1 = svc.run_trial(id);
    CHECK(t1.index == 1);
    CHECK(t1.theta == ParamVector{0.2, 0.4});
    CHECK(t1.after_prompts == 1);
    CHECK(t1.metrics.min_clearance_by_kind.at(cbf::ObstacleKind::Vase) >
          t0.metrics.min_clearance_by_kind.at(cbf::ObstacleKind::Vase));
    const auto traj = svc.get_trajectory(id, 0);
    CHECK(traj == t0.trajectory);
    CHECK(traj.states.size() == static_cast<std::size_t>(t0.metrics.steps) + 1);
    CHECK_THROWS_AS(svc.get_trajectory(id, 5), NotFoundError);
    CHECK_THROWS_AS(svc.run_trial("s999999"), NotFoundError);
  }

  SUBCASE("theta history is the prompt chain") {
    const auto id = svc.create_session("env_b").id;
    svc.submit_prompt(id, kP1);
    svc.submit_prompt(id, kP2);
    const std::vector<ParamVector> expected{{0.4, 0.4}, {0.2, 0.4}, {0.2, 0.8}};
    CHECK(svc.get_state(id).theta_history() == expected);
  }
}

TEST_CASE("a second trial on a busy session is a conflict") {
  SessionService svc(shared_interpreter());
  sim::Scenario slow = sim::builtin_scenario("env_b");
  slow.name = "far";
  slow.x0 = mpc::State(0, -40, 0, 0);
  svc.register_scenario(slow);
  const auto id = svc.create_session("far").id;
  const auto other = svc.create_session("env_a").id;

  std::thread runner([&] { svc.run_trial(id); });
  bool seen = false;
  const auto deadline = std::chrono::steady_clock::now() + std::chrono::seconds(10);
  while (!seen && std::chrono::steady_clock::now() < deadline) {
    seen = svc.trial_running(id);
    if (!seen) std::this_thread::yield();
  }
  REQUIRE(seen);
  CHECK_THROWS_AS(svc.run_trial(id), ConflictError);
  // other sessions are unaffected while this one runs
  CHECK(svc.submit_prompt(other, kP1).theta_after == ParamVector{0.2, 0.4});
  runner.join();
  CHECK_FALSE(svc.trial_running(id));
  CHECK(svc.get_state(id).trials.size() == 1);
}

TEST_CASE("sessions are isolated under interleaving") {
  SessionService svc(shared_interpreter());
  std::vector<std::string> ids;
  for (int i = 0; i < 4; ++i) ids.push_back(svc.create_session(i % 2 ? "env_b" : "env_a").id);
  // session i receives i copies of p1, interleaved round-robin
  for (int round = 0; round < 3; ++round)
    for (int i = 0; i < 4; ++i)
      if (round < i) svc.submit_prompt(ids[i], kP1);
  for (int i = 0; i < 4; ++i) {
    const auto s = svc.get_state(ids[i]);
    CHECK(s.transcript.size() == static_cast<std::size_t>(i));
    CHECK(s.theta.gamma_vase == doctest::Approx(0.4 / (1 << i)).epsilon(1e-15));
    CHECK(s.theta.gamma_toy == 0.4);
  }

  std::vector<std::thread> threads;
  for (int i = 0; i < 4; ++i)
    threads.emplace_back([&, i] {
      for (int k = 0; k < 5; ++k) svc.submit_prompt(ids[i], i % 2 ? kP2 : "qwzx");
    });
  for (auto& t : threads) t.join();
  for (int i = 0; i < 4; ++i) {
    const auto s = svc.get_state(ids[i]);
    CHECK(s.transcript.size() == static_cast<std::size_t>(i + 5));
    CHECK(s.theta.gamma_toy == doctest::Approx(i % 2 ? 0.4 * 32 : 0.4).epsilon(1e-15));
  }
}

TEST_CASE("the mutation log is replayed on start-up") {
  const auto path = temp_path("chatmpc_service_log");
  ServiceOptions opts;
  opts.log_file = path;
  std::string id;
  SessionSnapshot before;
  {
    SessionService svc(shared_interpreter(), opts);
    id = svc.create_session("env_a").id;
    svc.submit_prompt(id, kP1);
    svc.run_trial(id);
    svc.submit_prompt(id, kP2);
    before = svc.get_state(id);
  }
  {
    SessionService svc(shared_interpreter(), opts);
    const auto after = svc.get_state(id);
    CHECK(after.theta == before.theta);
    CHECK(after.theta_history() == before.theta_history());
    CHECK(after.transcript.size() == 2);
    REQUIRE(after.trials.size() == 1);
    CHECK(after.trials[0].trajectory == before.trials[0].trajectory);
    CHECK(after.created_at == before.created_at);
    // new ids continue after the replayed ones
    CHECK(svc.create_session("env_b").id != id);
  }
  std::filesystem::remove(path);
}

TEST_CASE("HTTP API") {
  LiveServer live(HttpOptions{"http://localhost:5173"});
  auto cli = live.client();

  SUBCASE("scenarios") {
    const auto res = cli.Get("/scenarios");
    REQUIRE(res);
    CHECK(res->status == 200);
    CHECK(res->get_header_value("Access-Control-Allow-Origin") == "http://localhost:5173");
    const auto doc = json::parse(res->body);
    REQUIRE(doc.size() == 2);
    CHECK(doc[0]["name"] == "env_a");
  }

  SUBCASE("preflight") {
    const auto res = cli.Options("/sessions");
    REQUIRE(res);
    CHECK(res->status == 204);
    CHECK(res->get_header_value("Access-Control-Allow-Methods").find("POST") != std::string::npos);
  }

  SUBCASE("full loop") {
    auto res = cli.Post("/sessions", R"({"scenario":"env_a"})", "application/json");
    REQUIRE(res);
    REQUIRE(res->status == 201);
    const std::string id = json::parse(res->body)["id"];
    const std::string base = "/sessions/" + id;

    res = cli.Post(base + "/trial", "", "application/json");
    REQUIRE(res);
    CHECK(res->status == 200);
    auto trial = json::parse(res->body);
    CHECK(trial["index"] == 0);
    CHECK(trial["metrics"]["reached_goal"] == true);

    res = cli.Post(base + "/prompt", json{{"prompt", kP1}}.dump(), "application/json");
    REQUIRE(res);
    auto p = json::parse(res->body);
    CHECK(p["recognized"] == true);
    CHECK(p["theta_after"] == json::array({0.2, 0.4}));

    res = cli.Post(base + "/prompt", R"({"prompt":"qwzx"})", "application/json");
    p = json::parse(res->body);
    CHECK(p["recognized"] == false);
    CHECK(p["marker"]["s"] == json::array({0, 0}));

    res = cli.Get(base);
    REQUIRE(res);
    const auto state = json::parse(res->body);
    CHECK(state["theta"] == json::array({0.2, 0.4}));
    CHECK(state["running"] == false);
    CHECK(state["theta_history"].size() == 3);

    res = cli.Get(base + "/trials/0/trajectory");
    REQUIRE(res);
    CHECK(res->status == 200);
    res = cli.Get(base + "/trials/0/trajectory?format=csv");
    REQUIRE(res);
    CHECK(res->body.rfind("k,x1,x2,v1,v2,u1,u2,status\n", 0) == 0);

    res = cli.Get(base + "/trials/5/trajectory");
    CHECK(res->status == 404);
    CHECK(json::parse(res->body)["code"] == "not_found");
    res = cli.Get(base + "/trials/x/trajectory");
    CHECK(res->status == 400);
  }

  SUBCASE("errors") {
    auto res = cli.Post("/sessions", R"({"scenario":"nope"})", "application/json");
    REQUIRE(res);
    CHECK(res->status == 404);
    const auto err = json::parse(res->body);
    CHECK(err["code"] == "not_found");
    CHECK(err["message"].is_string());

    res = cli.Post("/sessions", "{bad", "application/json");
    CHECK(res->status == 400);
    CHECK(json::parse(res->body)["code"] == "validation");

    res = cli.Post("/sessions", "", "application/json");
    CHECK(res->status == 400);

    res = cli.Get("/sessions/s999999");
    CHECK(res->status == 404);

    res = cli.Post("/sessions", R"({"scenario":"env_a"})", "application/json");
    const std::string id = json::parse(res->body)["id"];
    res = cli.Post("/sessions/" + id + "/prompt", R"({"prompt":""})", "application/json");
    CHECK(res->status == 400);
    res = cli.Post("/sessions/" + id + "/prompt", R"({"text":"x"})", "application/json");
    CHECK(res->status == 400);
  }
}
