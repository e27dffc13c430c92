#pragma once

#include <array>
#include <filesystem>
#include <map>
#include <optional>
#include <shared_mutex>
#include <string>
#include <string_view>
#include <vector>

#include "zkmlops/common/bytes.hpp"
#include "zkmlops/selection/taxonomy.hpp"

namespace zkmlops::gateway {

// The four step labels, in canonical order. Fixed framework-wide.
inline constexpr std::array<std::string_view, 4> kStepNames{"setup", "key-exchange", "prove", "verify"};

// Index into kStepNames, or nullopt.
std::optional<std::size_t> step_index(std::string_view name);

enum class ExecutorKind { ExternalScript, ReferenceBackend };
std::string_view to_string(ExecutorKind k) noexcept;
ExecutorKind parse_executor(std::string_view name);

struct StepSpec {
  std::string step_name;
  ExecutorKind executor = ExecutorKind::ReferenceBackend;
  std::optional<std::string> command_template;  // external only
  std::vector<std::string> inputs;
  std::vector<std::string> outputs;
  std::uint32_t timeout_seconds = 60;

  friend bool operator==(const StepSpec&, const StepSpec&) = default;
};

struct WorkflowConfig {
  std::string id;
  std::string purpose;
  selection::LifecyclePhase phase = selection::LifecyclePhase::Inference;
  selection::ModelCategory model_category = selection::ModelCategory::GeneralNeuralNetworks;
  std::string protocol;
  std::vector<StepSpec> steps;
  std::optional<std::string> traceability_ref;

  const StepSpec& step(std::string_view name) const;  // throws UnknownStep

  std::string to_json() const;
  friend bool operator==(const WorkflowConfig&, const WorkflowConfig&) = default;
};

// Strict parse: missing or extra fields, a wrong step set, duplicate kind
// labels or bad executor settings are SchemaError.
WorkflowConfig parse_workflow_config(std::string_view text);

// Kind labels consumed and produced by each reference-backend step.
struct StepContract {
  std::vector<std::string> inputs;
  std::vector<std::string> outputs;
};
const StepContract& reference_contract(std::string_view step_name);

bool is_valid_label(std::string_view label);

// Config port. Loaded documents are persisted as <dir>/<id>.json and
// reloaded on construction.
class WorkflowRegistry {
 public:
  explicit WorkflowRegistry(std::filesystem::path dir);

  // Throws SchemaError or DuplicateWorkflow.
  WorkflowConfig load(std::string_view text);
  // Loads every *.json under `dir`, skipping ids already registered.
  // Returns the ids that were added.
  std::vector<std::string> load_directory(const std::filesystem::path& dir);

  WorkflowConfig get(std::string_view id) const;  // throws UnknownWorkflow
  bool contains(std::string_view id) const;
  std::vector<WorkflowConfig> list() const;  // sorted by id

 private:
  std::filesystem::path dir_;
  mutable std::shared_mutex mu_;
  std::map<std::string, WorkflowConfig, std::less<>> configs_;
};

}  // namespace zkmlops::gateway
