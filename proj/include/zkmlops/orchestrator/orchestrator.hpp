#pragma once

#include <filesystem>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <shared_mutex>
#include <string>
#include <vector>

#include "zkmlops/common/clock.hpp"
#include "zkmlops/common/error.hpp"
#include "zkmlops/gateway/executor.hpp"
#include "zkmlops/gateway/workflow.hpp"
#include "zkmlops/orchestrator/audit.hpp"
#include "zkmlops/store/artifact_store.hpp"

namespace zkmlops::orchestrator {

// Saga coordinator. Each audit is an append-only JSON-lines event log at
// <audits_dir>/<id>.log, replayed on construction. At most one step runs
// per audit; a second concurrent advance gets StepInProgress.
class Orchestrator {
 public:
  Orchestrator(std::filesystem::path audits_dir, store::ArtifactStore& store,
               const gateway::WorkflowRegistry& workflows, gateway::StepInterpreter& interpreter);

  Audit create_audit(std::string_view workflow_id);

  // Precondition errors (UnknownAudit, TerminalAudit, OutOfOrder,
  // UnknownStep, MissingPrecondition, StepInProgress) leave the audit
  // untouched. ExecutionFailure and PostconditionViolation are thrown after
  // the audit has moved to Failed.
  Audit advance(std::string_view audit_id, std::string_view step_name, std::string_view triggered_by = "");

  Audit attach_artifact(std::string_view audit_id, std::string_view kind, std::string_view artifact_id);

  Audit get_audit(std::string_view audit_id) const;
  // Newest first.
  std::vector<Audit> list_audits(std::optional<AuditState> state = std::nullopt) const;

  const store::ArtifactStore& store() const { return store_; }
  const gateway::WorkflowRegistry& workflows() const { return workflows_; }

 private:
  struct Entry {
    std::mutex step_mu;
    mutable std::mutex mu;
    Audit audit;
  };

  std::shared_ptr<Entry> entry(std::string_view id) const;
  void append(const std::string& id, const nlohmann::json& event);
  Audit load_log(const std::filesystem::path& path);
  [[noreturn]] void fail(Entry& e, StepRecord record, Errc code, const std::string& message);

  std::filesystem::path dir_;
  store::ArtifactStore& store_;
  const gateway::WorkflowRegistry& workflows_;
  gateway::StepInterpreter& interpreter_;
  StrictClock clock_;
  mutable std::shared_mutex map_mu_;
  std::map<std::string, std::shared_ptr<Entry>, std::less<>> audits_;
  std::mutex log_mu_;
};

}  // namespace zkmlops::orchestrator
