#include "chatmpc/service/service.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <ctime>
#include <json.hpp>

#include "chatmpc/error.hpp"
#include "chatmpc/sim/export.hpp"

namespace chatmpc::service {

struct SessionService::Session {
  mutable std::mutex mutex;
  std::atomic<bool> running{false};
  SessionSnapshot data;
};

namespace {

std::string utc_now() {
  const auto now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

std::string format_id(std::uint64_t n) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "s%06llu", static_cast<unsigned long long>(n));
  return buf;
}

void validate_theta(const ParamVector& t) {
  auto ok = [](double g) { return std::isfinite(g) && g >= ParamVector::kMin && g <= ParamVector::kMax; };
  if (!ok(t.gamma_vase) || !ok(t.gamma_toy)) {
    throw ValidationError("theta components must lie in [1e-4, 1e4]");
  }
}

class RunningGuard {
 public:
  explicit RunningGuard(std::atomic<bool>& flag) : flag_(flag) {}
  ~RunningGuard() { flag_.store(false); }
  RunningGuard(const RunningGuard&) = delete;
  RunningGuard& operator=(const RunningGuard&) = delete;

 private:
  std::atomic<bool>& flag_;
};

}  // namespace

std::vector<ParamVector> SessionSnapshot::theta_history() const {
  std::vector<ParamVector> out{theta0};
  for (const auto& p : transcript) out.push_back(p.theta_after);
  return out;
}

SessionService::SessionService(std::shared_ptr<const interpreter::Interpreter> interpreter, ServiceOptions options)
    : interpreter_(std::move(interpreter)), options_(std::move(options)) {
  if (!interpreter_) throw ConfigError("session service needs an interpreter");
  validate_theta(options_.default_theta);
  for (const auto& name : sim::builtin_scenario_names()) scenarios_.emplace(name, sim::builtin_scenario(name));
  if (options_.log_file) {
    replay(*options_.log_file);
    log_.open(*options_.log_file, std::ios::app);
    if (!log_) throw ConfigError("cannot open session log " + *options_.log_file);
  }
}

SessionService::~SessionService() = default;

void SessionService::append_log(const std::string& line) {
  if (replaying_ || !log_.is_open()) return;
  std::lock_guard lock(log_mutex_);
  log_ << line << '\n';
  log_.flush();
}

void SessionService::replay(const std::string& path) {
  std::ifstream in(path);
  if (!in) return;
  replaying_ = true;
  std::string line;
  int lineno = 0;
  try {
    while (std::getline(in, line)) {
      ++lineno;
      if (line.empty()) continue;
      const auto ev = nlohmann::json::parse(line);
      const auto kind = ev.at("event").get<std::string>();
      const auto id = ev.at("id").get<std::string>();
      if (kind == "create") {
        const auto th = ev.at("theta0").get<std::vector<double>>();
        const auto snap = create_session(ev.at("scenario").get<std::string>(), ParamVector{th.at(0), th.at(1)});
        if (snap.id != id) throw ParseError("replayed session id " + snap.id + " does not match " + id);
      } else if (kind == "prompt") {
        submit_prompt(id, ev.at("prompt").get<std::string>());
      } else if (kind == "trial") {
        run_trial(id);
      } else {
        throw ParseError("unknown event '" + kind + "'");
      }
    }
  } catch (const nlohmann::json::exception& e) {
    replaying_ = false;
    throw ParseError("session log line " + std::to_string(lineno) + ": " + e.what());
  } catch (...) {
    replaying_ = false;
    throw;
  }
  replaying_ = false;
}

std::shared_ptr<SessionService::Session> SessionService::find(const std::string& id) const {
  std::shared_lock lock(sessions_mutex_);
  const auto it = sessions_.find(id);
  if (it == sessions_.end()) throw NotFoundError("unknown session '" + id + "'");
  return it->second;
}

SessionSnapshot SessionService::create_session(const std::string& scenario_name, std::optional<ParamVector> theta0) {
  const ParamVector theta = theta0.value_or(options_.default_theta);
  validate_theta(theta);
  sim::Scenario scenario;
  {
    std::shared_lock lock(scenarios_mutex_);
    const auto it = scenarios_.find(scenario_name);
    if (it == scenarios_.end()) throw NotFoundError("unknown scenario '" + scenario_name + "'");
    scenario = it->second;
  }
  auto session = std::make_shared<Session>();
  session->data.scenario = std::move(scenario);
  session->data.theta0 = theta;
  session->data.theta = theta;
  session->data.created_at = utc_now();
  {
    std::unique_lock lock(sessions_mutex_);
    session->data.id = format_id(next_id_++);
    sessions_.emplace(session->data.id, session);
  }
  append_log(nlohmann::json{{"event", "create"},
                            {"id", session->data.id},
                            {"scenario", scenario_name},
                            {"theta0", sim::theta_json(theta)}}
                 .dump());
  std::lock_guard lock(session->mutex);
  return session->data;
}

PromptRecord SessionService::submit_prompt(const std::string& id, const std::string& prompt) {
  if (embedding::is_blank(prompt)) throw ValidationError("prompt must not be empty");
  if (!embedding::is_valid_utf8(prompt)) throw ValidationError("prompt must be valid UTF-8");
  const auto session = find(id);
  std::lock_guard lock(session->mutex);
  const auto result = interpreter_->interpret(prompt, session->data.theta);
  PromptRecord rec{prompt, result.marker, result.theta_before, result.theta_after};
  session->data.theta = rec.theta_after;
  session->data.transcript.push_back(rec);
  append_log(nlohmann::json{{"event", "prompt"}, {"id", id}, {"prompt", prompt}}.dump());
  return rec;
}

TrialRecord SessionService::run_trial(const std::string& id) {
  const auto session = find(id);
  if (session->running.exchange(true)) {
    throw ConflictError("a trial is already running for session '" + id + "'");
  }
  RunningGuard guard(session->running);

  sim::Scenario scenario;
  ParamVector theta;
  std::size_t after_prompts = 0;
  {
    std::lock_guard lock(session->mutex);
    scenario = session->data.scenario;
    theta = session->data.theta;
    after_prompts = session->data.transcript.size();
  }
  sim::TrialResult result = sim::run_trial(scenario, theta, options_.controller);

  std::lock_guard lock(session->mutex);
  TrialRecord rec;
  rec.index = session->data.trials.size();
  rec.theta = theta;
  rec.after_prompts = after_prompts;
  rec.trajectory = std::move(result.trajectory);
  rec.metrics = std::move(result.metrics);
  session->data.trials.push_back(rec);
  append_log(nlohmann::json{{"event", "trial"}, {"id", id}}.dump());
  return rec;
}

SessionSnapshot SessionService::get_state(const std::string& id) const {
  const auto session = find(id);
  std::lock_guard lock(session->mutex);
  return session->data;
}

bool SessionService::trial_running(const std::string& id) const { return find(id)->running.load(); }

sim::Trajectory SessionService::get_trajectory(const std::string& id, std::size_t index) const {
  const auto session = find(id);
  std::lock_guard lock(session->mutex);
  if (index >= session->data.trials.size()) {
    throw NotFoundError("trial " + std::to_string(index) + " out of range (session has " +
                        std::to_string(session->data.trials.size()) + " trials)");
  }
  return session->data.trials[index].trajectory;
}

std::vector<sim::Scenario> SessionService::scenarios() const {
  std::shared_lock lock(scenarios_mutex_);
  std::vector<sim::Scenario> out;
  for (const auto& [name, s] : scenarios_) out.push_back(s);
  return out;
}

void SessionService::register_scenario(sim::Scenario scenario) {
  scenario.validate();
  std::unique_lock lock(scenarios_mutex_);
  const std::string name = scenario.name;
  scenarios_.insert_or_assign(name, std::move(scenario));
}

std::size_t SessionService::session_count() const {
  std::shared_lock lock(sessions_mutex_);
  return sessions_.size();
}

}  // namespace chatmpc::service
