#pragma once

#include <iosfwd>
#include <memory>
#include <string>

#include "chatmpc/embedding/embedding.hpp"
#include "chatmpc/interpreter/interpreter.hpp"
#include "chatmpc/sim/sim.hpp"

namespace chatmpc::cli {

enum ExitCode : int {
  kOk = 0,
  kValidation = 1,
  kRuntime = 2,
  /// run finished but at least one trial did not reach the goal
  kGoalNotReached = 3,
};

/// "table2", a path to a file with one prompt per line, or inline prompts
/// separated by '|'. An entry of "-" (or an empty inline entry) runs a trial
/// without a prompt; blank file lines are skipped.
sim::PromptSchedule parse_prompt_schedule(const std::string& spec);

/// "g_vase,g_toy"
ParamVector parse_theta(const std::string& text);

/// "builtin" or an http(s) URL of a remote embedding service.
std::shared_ptr<const embedding::EmbeddingProvider> make_provider(const std::string& spec);

/// "table1" or a JSON Lines corpus path.
std::vector<interpreter::TrainExample> load_corpus_spec(const std::string& spec);

/// Entry point behind the `chatmpc` executable.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace chatmpc::cli
