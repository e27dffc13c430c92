#pragma once

#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"
#include "zkmlops/common/clock.hpp"
#include "zkmlops/gateway/workflow.hpp"

namespace zkmlops::orchestrator {

enum class AuditState {
  Created,
  SetupDone,
  KeysExchanged,
  ProofSubmitted,
  VerifiedCompliant,
  VerifiedNonCompliant,
  Failed,
};

// snake_case: "created", "setup_done", ..., "failed".
std::string_view to_string(AuditState s) noexcept;
AuditState parse_state(std::string_view name);  // InvalidArgument

bool is_terminal(AuditState s) noexcept;
// The step that may run next, or nullopt in terminal states.
std::optional<std::string_view> next_step(AuditState s) noexcept;
// Transition taken when `step` succeeds in `from`. `accepted` is the
// verify verdict and is ignored for the other steps. Throws OutOfOrder or
// TerminalAudit.
AuditState transition(AuditState from, std::string_view step, bool accepted);

struct StepRecord {
  std::string step_name;
  gateway::ExecutorKind executor_kind = gateway::ExecutorKind::ReferenceBackend;
  Timestamp started_at = 0;
  Timestamp finished_at = 0;
  bool success = true;
  std::string message;
  std::vector<std::string> produced_artifacts;
  // kind -> artifact id pinned at the moment the step consumed it.
  std::map<std::string, std::string> consumed_artifacts;
  std::optional<bool> verdict;  // verify only
  std::string triggered_by;

  nlohmann::json to_json() const;
  static StepRecord from_json(const nlohmann::json& j);
};

struct Audit {
  std::string id;
  std::string workflow_id;
  AuditState state = AuditState::Created;
  std::string failure_reason;  // set iff state == Failed
  std::vector<StepRecord> history;  // completed steps only
  std::optional<StepRecord> failed_step;
  std::map<std::string, std::string> artifacts;  // kind -> artifact id
  Timestamp created_at = 0;
  Timestamp updated_at = 0;

  nlohmann::json to_json() const;
  static Audit from_json(const nlohmann::json& j);
};

// State reached by replaying the recorded step names (and verify verdict)
// from Created, with Failed applied when a failed step is recorded.
AuditState replay_state(const Audit& audit);

}  // namespace zkmlops::orchestrator
