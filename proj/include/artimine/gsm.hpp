#pragma once

#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "artimine/petri_net.hpp"
#include "artimine/sentry.hpp"
#include "json.hpp"

namespace artimine {

// Pseudo-milestone achieved when the instance is created.
inline constexpr const char* kInitMilestone = "InitMilestone";

std::string milestone_name(const std::string& stage);  // stage + "Milestone"

struct Milestone {
  std::string name;
  Sentry achieving;
  Sentry invalidating;

  friend bool operator==(const Milestone&, const Milestone&) = default;
};

// Atomic stage: opening it runs `task`.
struct Stage {
  std::string name;
  std::string task;
  std::vector<Sentry> guards;
  Milestone milestone;

  friend bool operator==(const Stage&, const Stage&) = default;
};

struct ConditionVariable {
  std::string name;
  std::vector<std::string> domain;

  friend bool operator==(const ConditionVariable&, const ConditionVariable&) = default;
};

struct GsmModel {
  std::string artifact;
  std::vector<Stage> stages;
  std::vector<ConditionVariable> variables;

  const Stage* stage(const std::string& name) const;

  friend bool operator==(const GsmModel&, const GsmModel&) = default;
};

struct Diagnostics {
  bool ok = true;
  std::vector<std::string> messages;
};

/// Reference resolution, non-empty guards, one event at most per sentry.
Diagnostics validate(const GsmModel& model);
/// As validate, but also reports sentries that do not parse.
Diagnostics validate_json(const nlohmann::json& j);

// Indexed like model.stages; milestone slots carry one extra entry at the
// end for the InitMilestone.
struct GsmState {
  bool created = false;
  std::vector<char> open;
  std::vector<char> achieved;
  std::vector<std::uint64_t> last_toggled;
  std::vector<std::optional<std::string>> vars;  // like model.variables
  std::uint64_t clock = 0;

  friend bool operator==(const GsmState&, const GsmState&) = default;
  friend auto operator<=>(const GsmState&, const GsmState&) = default;
};

GsmState initial_state(const GsmModel& model);

struct GsmEvent {
  enum class Kind { create, task_executed, milestone_achieved, stage_opened, assign };
  Kind kind = Kind::create;
  std::string subject;  // stage, milestone, or variable
  std::string value;    // for assign

  friend bool operator==(const GsmEvent&, const GsmEvent&) = default;
};

std::string to_string(const GsmEvent& e);

enum class ExecutionMode {
  immediate,  // an opened stage runs its task right away
  deferred,   // opened stages wait for an external task_executed event
};

struct StepResult {
  GsmState state;
  std::vector<GsmEvent> emitted;    // internal events, in processing order
  std::vector<std::string> executed;  // tasks, in order
};

/// Processes one external event and its cascade to quiescence. Throws
/// DivergenceError beyond `max_micro_steps` processed events and
/// NotEnabledError for a deferred task_executed on a closed stage.
StepResult gsm_step(const GsmModel& model, const GsmState& state, const GsmEvent& event,
                    ExecutionMode mode = ExecutionMode::immediate, std::size_t max_micro_steps = 10000);

using Valuation = std::map<std::string, std::string>;

/// All task sequences of length ≤ max_len (prefix-closed), exploring every
/// choice of the next open stage. With `fixed` the variables keep that
/// valuation; otherwise every assignment from the declared domains is tried
/// before each task.
std::set<Trace> gsm_language(const GsmModel& model, std::size_t max_len,
                             const std::optional<Valuation>& fixed = std::nullopt);

nlohmann::ordered_json to_json(const GsmModel& model);
GsmModel gsm_model_from_json(const nlohmann::json& j);

/// Stages as boxes with guard diamonds and milestone circles.
std::string to_dot(const GsmModel& model);

}  // namespace artimine
