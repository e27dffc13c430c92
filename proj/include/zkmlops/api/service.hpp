#pragma once

#include <filesystem>
#include <memory>
#include <optional>

#include "zkmlops/gateway/executor.hpp"
#include "zkmlops/gateway/workflow.hpp"
#include "zkmlops/orchestrator/orchestrator.hpp"
#include "zkmlops/selection/selection.hpp"
#include "zkmlops/store/artifact_store.hpp"

namespace zkmlops::api {

struct ServiceOptions {
  std::filesystem::path data_dir;
  // Workflow documents loaded at start (ids already present are skipped).
  std::optional<std::filesystem::path> configs_dir;
  std::filesystem::path knowledge_base;
  gateway::ScriptOptions scripts;
};

// Wires the modules together over one data directory:
//   <data-dir>/artifacts  <data-dir>/workflows  <data-dir>/audits  <data-dir>/adr
class Service {
 public:
  explicit Service(ServiceOptions options);
  // For tests: substitute the interpreter port.
  Service(ServiceOptions options, std::unique_ptr<gateway::StepInterpreter> interpreter);

  store::ArtifactStore& store() { return store_; }
  gateway::WorkflowRegistry& workflows() { return workflows_; }
  orchestrator::Orchestrator& orchestrator() { return orchestrator_; }
  const selection::KnowledgeBase& knowledge_base() const { return kb_; }
  selection::SpecStore& specs() { return specs_; }

 private:
  ServiceOptions options_;
  store::ArtifactStore store_;
  gateway::WorkflowRegistry workflows_;
  std::unique_ptr<gateway::StepInterpreter> interpreter_;
  orchestrator::Orchestrator orchestrator_;
  selection::KnowledgeBase kb_;
  selection::SpecStore specs_;
};

}  // namespace zkmlops::api
