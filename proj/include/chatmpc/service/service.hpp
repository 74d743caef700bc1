#pragma once

#include <atomic>
#include <fstream>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <shared_mutex>
#include <string>
#include <vector>

#include "chatmpc/interpreter/interpreter.hpp"
#include "chatmpc/mpc/controller.hpp"
#include "chatmpc/sim/sim.hpp"

namespace chatmpc::service {

struct ServiceOptions {
  ParamVector default_theta{0.4, 0.4};
  mpc::ControllerConfig controller;
  /// Append-only JSON Lines record of every mutation; replayed on start-up when present.
  std::optional<std::string> log_file;
};

struct PromptRecord {
  std::string prompt;
  interpreter::UpdateMarker marker;
  ParamVector theta_before;
  ParamVector theta_after;
};

struct TrialRecord {
  std::size_t index = 0;
  ParamVector theta;
  /// Number of transcript entries submitted before this trial ran.
  std::size_t after_prompts = 0;
  sim::Trajectory trajectory;
  sim::TrialMetrics metrics;
};

struct SessionSnapshot {
  std::string id;
  sim::Scenario scenario;
  ParamVector theta0;
  ParamVector theta;
  std::string created_at;
  std::vector<PromptRecord> transcript;
  std::vector<TrialRecord> trials;

  /// theta0 followed by theta_after of every prompt.
  std::vector<ParamVector> theta_history() const;
};

/// In-memory session store hosting the personalization loop. Each session
/// serializes its own mutations; distinct sessions proceed independently.
class SessionService {
 public:
  SessionService(std::shared_ptr<const interpreter::Interpreter> interpreter, ServiceOptions options = {});
  ~SessionService();

  SessionService(const SessionService&) = delete;
  SessionService& operator=(const SessionService&) = delete;

  /// Throws NotFoundError for an unregistered scenario, ValidationError for a bad theta0.
  SessionSnapshot create_session(const std::string& scenario_name, std::optional<ParamVector> theta0 = {});
  /// Throws ValidationError for a blank prompt.
  PromptRecord submit_prompt(const std::string& id, const std::string& prompt);
  /// Throws ConflictError while another trial of the same session is running.
  TrialRecord run_trial(const std::string& id);

  SessionSnapshot get_state(const std::string& id) const;
  bool trial_running(const std::string& id) const;
  /// Throws NotFoundError when `index` is out of range.
  sim::Trajectory get_trajectory(const std::string& id, std::size_t index) const;

  std::vector<sim::Scenario> scenarios() const;
  void register_scenario(sim::Scenario scenario);

  std::size_t session_count() const;

 private:
  struct Session;

  std::shared_ptr<Session> find(const std::string& id) const;
  void append_log(const std::string& line);
  void replay(const std::string& path);
  SessionSnapshot create_locked(const std::string& id, const std::string& scenario_name, const ParamVector& theta0);

  std::shared_ptr<const interpreter::Interpreter> interpreter_;
  ServiceOptions options_;

  mutable std::shared_mutex sessions_mutex_;
  std::map<std::string, std::shared_ptr<Session>> sessions_;
  std::uint64_t next_id_ = 1;

  mutable std::shared_mutex scenarios_mutex_;
  std::map<std::string, sim::Scenario> scenarios_;

  std::mutex log_mutex_;
  std::ofstream log_;
  bool replaying_ = false;
};

}  // namespace chatmpc::service
