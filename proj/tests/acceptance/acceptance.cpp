// One PASS/FAIL line per acceptance criterion; exit status is the number of failures.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <random>
#include <sstream>
#include <string>

#include "chatmpc/cbf/barrier.hpp"
#include "chatmpc/interpreter/interpreter.hpp"
#include "chatmpc/sim/sim.hpp"
#include "support/grid_oracle.hpp"
#include "support/invariants.hpp"

using namespace chatmpc;
namespace fs = std::filesystem;

namespace {

using Clock = std::chrono::steady_clock;

int failures = 0;

void report(const char* name, bool ok, const std::string& detail, double seconds) {
  std::printf("%s  %-26s %6.3fs  %s\n", ok ? "PASS" : "FAIL", name, seconds, detail.c_str());
  std::fflush(stdout);
  if (!ok) ++failures;
}

template <typename Fn>
void criterion(const char* name, double budget_s, Fn fn) {
  const auto t0 = Clock::now();
  std::string detail;
  bool ok = false;
  try {
    ok = fn(detail);
  } catch (const std::exception& e) {
    detail = std::string("exception: ") + e.what();
  }
  const double dt = std::chrono::duration<double>(Clock::now() - t0).count();
  if (budget_s > 0.0 && dt >= budget_s) {
    ok = false;
    detail += " (over the " + std::to_string(budget_s) + " s budget)";
  }
  report(name, ok, detail, dt);
}

std::shared_ptr<const embedding::EmbeddingProvider> builtin() {
  static const auto p = std::make_shared<embedding::BuiltinEmbedder>();
  return p;
}

const interpreter::Interpreter& table1_interpreter() {
  static const interpreter::Interpreter interp(interpreter::train_classifier(interpreter::builtin_corpus(), builtin()),
                                               interpreter::UpdateConfig{});
  return interp;
}

// Solve-level invariants observed across every closed-loop run below.
struct SolveAudit {
  long solves = 0;
  std::string first_violation;

  sim::SolveObserver observer(const mpc::ControllerConfig& cfg) {
    return [this, cfg](const mpc::State& x, const mpc::OcpSolution& sol) {
      ++solves;
      if (!first_violation.empty()) return;
      for (auto msg : {testing::rollout_consistency(cfg.model, x, sol), testing::box_feasibility(sol)})
        if (!msg.empty()) first_violation = msg;
    };
  }
};

SolveAudit audit;
std::map<std::string, sim::SessionLog> sessions;

const sim::SessionLog& session(const std::string& env) {
  auto it = sessions.find(env);
  if (it == sessions.end()) {
    const mpc::ControllerConfig cfg;
    it = sessions
             .emplace(env, sim::run_session(sim::builtin_scenario(env), sim::table2_schedule(), table1_interpreter(),
                                            {0.4, 0.4}, cfg, audit.observer(cfg)))
             .first;
  }
  return it->second;
}

std::string fmt(double v) {
  std::ostringstream os;
  os.precision(6);
  os << v;
  return os.str();
}

std::string slurp(const fs::path& p) {
  std::ifstream f(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(f), std::istreambuf_iterator<char>()};
}

}  // namespace

int main() {
  criterion("theta-trace", 1.0, [](std::string& d) {
    const auto log = sim::run_session(sim::builtin_scenario("env_a"), sim::table2_schedule(), table1_interpreter(),
                                      {0.4, 0.4});
    const std::vector<ParamVector> expected{{0.4, 0.4}, {0.2, 0.4}, {0.2, 0.8}};
    const auto got = log.theta_history();
    std::ostringstream os;
    for (const auto& t : got) os << "[" << t.gamma_vase << "," << t.gamma_toy << "] ";
    d = os.str();
    return got == expected;
  });

  criterion("classifier-fidelity", 1.0, [](std::string& d) {
    const auto& corpus = interpreter::builtin_corpus();
    const auto full = interpreter::train_classifier(corpus, builtin());
    int resub = 0, loo = 0;
    for (std::size_t i = 0; i < corpus.size(); ++i) {
      resub += interpreter::extract_intent(full, corpus[i].prompt).s == corpus[i].marker;
      std::vector<interpreter::TrainExample> rest;
      for (std::size_t j = 0; j < corpus.size(); ++j)
        if (j != i) rest.push_back(corpus[j]);
      loo += interpreter::extract_intent(interpreter::train_classifier(rest, builtin()), corpus[i].prompt).s ==
             corpus[i].marker;
    }
    const auto schedule = sim::table2_schedule();
    const bool p1 = interpreter::extract_intent(full, *schedule[1]).s == interpreter::Marker{-1, 0};
    const bool p2 = interpreter::extract_intent(full, *schedule[2]).s == interpreter::Marker{0, 1};
    d = "resubstitution " + std::to_string(resub) + "/20, leave-one-out " + std::to_string(loo) + "/20, p1 " +
        (p1 ? "ok" : "wrong") + ", p2 " + (p2 ? "ok" : "wrong");
    return resub == 20 && loo >= 16 && p1 && p2;
  });

  criterion("safety", 10.0, [](std::string& d) {
    double worst = INFINITY;
    for (const char* env : {"env_a", "env_b"})
      for (const auto& e : session(env).entries)
        for (double h : e.metrics.min_h_by_obstacle) worst = std::min(worst, h);
    d = "min h over 6 trials " + fmt(worst);
    return worst >= -1e-4;
  });

  criterion("personalization-direction", 0.0, [](std::string& d) {
    using cbf::ObstacleKind;
    bool ok = true;
    for (const char* env : {"env_a", "env_b"}) {
      const auto& en = session(env).entries;
      if (en.size() != 3) return false;
      auto c = [&](std::size_t i, ObstacleKind k) { return en[i].metrics.min_clearance_by_kind.at(k); };
      const bool vase_up = c(1, ObstacleKind::Vase) > c(0, ObstacleKind::Vase);
      const bool toy_down = c(2, ObstacleKind::Toy) < c(1, ObstacleKind::Toy);
      bool reached = true;
      for (const auto& e : en) reached = reached && e.metrics.reached_goal && e.metrics.steps <= 600;
      ok = ok && vase_up && toy_down && reached;
      d += std::string(env) + ": vase " + fmt(c(0, ObstacleKind::Vase)) + "->" + fmt(c(1, ObstacleKind::Vase)) +
           ", toy " + fmt(c(1, ObstacleKind::Toy)) + "->" + fmt(c(2, ObstacleKind::Toy)) +
           (reached ? ", all reached" : ", goal missed") + (env[4] == 'a' ? "; " : "");
    }
    return ok;
  });

  criterion("solver-correctness", 0.0, [](std::string& d) {
    const auto model = mpc::PlantModel::double_integrator(0.2);
    const auto w = mpc::CostWeights::defaults();
    const auto set = cbf::build_constraints({}, {0.4, 0.4}, 2);
    std::mt19937_64 rng(20240521);
    std::uniform_real_distribution<double> pos(-5.0, 5.0), vel(-2.0, 2.0);
    int ok_count = 0;
    double worst_gap = -INFINITY;
    std::string violation;
    for (int k = 0; k < 50; ++k) {
      const std::array<double, 4> x0a{pos(rng), pos(rng), vel(rng), vel(rng)};
      const mpc::State x0(x0a[0], x0a[1], x0a[2], x0a[3]);
      const auto sol = mpc::solve_ocp(model, x0, w, set);
      ++audit.solves;
      const auto grid = testing::grid_search_two_step(x0a, 0.2);
      worst_gap = std::max(worst_gap, sol.cost - grid.cost);
      ok_count += sol.cost <= grid.cost + grid.bound;
      for (auto msg : {testing::rollout_consistency(model, x0, sol), testing::box_feasibility(sol)})
        if (violation.empty() && !msg.empty()) violation = msg;
    }
    // the closed-loop runs feed the same audit
    session("env_a");
    session("env_b");
    if (audit.first_violation.empty()) audit.first_violation = violation;
    d = std::to_string(ok_count) + "/50 within the grid bound (max cost - grid " + fmt(worst_gap) + "), " +
        std::to_string(audit.solves) + " solves audited" +
        (audit.first_violation.empty() ? "" : ", violation: " + audit.first_violation);
    return ok_count == 50 && audit.first_violation.empty();
  });

  criterion("cbf-properties", 0.0, [](std::string& d) {
    std::mt19937_64 rng(99);
    std::uniform_real_distribution<double> pos(-4.0, 4.0), gam(1e-3, 1.0), margin(0.1, 1.5);
    int samples = 0, nested = 0;
    while (samples < 1000) {
      const cbf::Obstacle obs(cbf::ObstacleKind::Vase, {pos(rng), pos(rng)}, margin(rng));
      const mpc::State a(pos(rng), pos(rng), 0, 0), b(pos(rng), pos(rng), 0, 0);
      if (cbf::h_value(obs, a.head<2>()) < 0.0) continue;
      double g1 = gam(rng), g2 = gam(rng);
      if (g1 > g2) std::swap(g1, g2);
      ++samples;
      nested += !(cbf::barrier_residual(obs, g1, a, b) >= 0.0) || cbf::barrier_residual(obs, g2, a, b) >= 0.0;
    }
    // unit-margin obstacle at the origin: h = x^2 - 1 on the x axis
    const cbf::Obstacle unit(cbf::ObstacleKind::Vase, {0.0, 0.0}, 1.0);
    auto at = [](double h) { return mpc::State(std::sqrt(h + 1.0), 0, 0, 0); };
    const double r1 = cbf::barrier_residual(unit, 0.4, at(1.0), at(0.5));
    const double r2 = cbf::barrier_residual(unit, 0.4, at(1.0), at(0.7));
    const double r3 = cbf::barrier_residual(unit, 0.4, at(2.0), at(2.0));
    const double h = cbf::h_value(cbf::Obstacle(cbf::ObstacleKind::Vase, {-1.0, -3.0}, 0.5), {0.0, 0.0});
    const bool table = std::abs(r1 + 0.1) <= 1e-12 && std::abs(r2 - 0.1) <= 1e-12 && std::abs(r3 - 0.8) <= 1e-12 &&
                       h == 9.75;
    d = std::to_string(nested) + "/1000 nested; residuals " + fmt(r1) + ", " + fmt(r2) + ", " + fmt(r3) + "; h " +
        fmt(h);
    return nested == 1000 && table;
  });

  criterion("determinism", 0.0, [](std::string& d) {
    const auto root = fs::temp_directory_path() /
                      ("chatmpc_acceptance_" + std::to_string(Clock::now().time_since_epoch().count()));
    fs::create_directories(root);
    std::vector<fs::path> dirs;
    for (const char* tag : {"a", "b"}) {
      const fs::path out = root / tag;
      const std::string cmd = std::string("\"") + CHATMPC_CLI_PATH + "\" run --scenario env_a --prompts table2 --out \"" +
                              out.string() + "\" > \"" + (root / (std::string(tag) + ".stdout")).string() + "\"";
      if (std::system(cmd.c_str()) != 0) {
        d = "CLI run failed";
        return false;
      }
      dirs.push_back(out);
    }
    int files = 0;
    bool same = slurp(root / "a.stdout") == slurp(root / "b.stdout");
    for (const auto& entry : fs::directory_iterator(dirs[0])) {
      ++files;
      same = same && slurp(entry.path()) == slurp(dirs[1] / entry.path().filename());
    }
    int files_b = 0;
    for ([[maybe_unused]] const auto& entry : fs::directory_iterator(dirs[1])) ++files_b;
    same = same && files == files_b && files > 0;
    d = std::to_string(files) + " output files plus stdout " + (same ? "byte-identical" : "differ");
    fs::remove_all(root);
    return same;
  });

  std::printf("%d failure(s)\n", failures);
  return failures;
}
