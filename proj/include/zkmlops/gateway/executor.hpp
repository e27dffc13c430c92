#pragma once

#include <filesystem>
#include <map>
#include <memory>
#include <optional>
#include <semaphore>
#include <string>

#include "zkmlops/common/bytes.hpp"
#include "zkmlops/gateway/workflow.hpp"

namespace zkmlops::gateway {

struct BackendVerdict {
  bool accepted = false;
  std::string detail;
};

using ArtifactMap = std::map<std::string, Bytes, std::less<>>;

struct StepOutcome {
  ArtifactMap produced;
  std::optional<BackendVerdict> verdict;  // verify steps only
};

// Interpreter port: runs one step of a workflow on resolved input bytes.
class StepInterpreter {
 public:
  virtual ~StepInterpreter() = default;
  virtual StepOutcome execute_step(const WorkflowConfig& config, std::string_view step_name,
                                   const ArtifactMap& inputs) = 0;
};

class StepExecutor {
 public:
  virtual ~StepExecutor() = default;
  virtual StepOutcome run(const WorkflowConfig& config, const StepSpec& step, const ArtifactMap& inputs) = 0;
};

// Dispatches the four steps to the zk reference backend in-process.
class ReferenceExecutor : public StepExecutor {
 public:
  StepOutcome run(const WorkflowConfig& config, const StepSpec& step, const ArtifactMap& inputs) override;
};

struct ScriptOptions {
  // Defaults to $ZKMLOPS_SCRATCH, else <tmp>/zkmlops-scratch.
  std::filesystem::path scratch_root;
  unsigned max_parallel = 4;
};

// Runs command templates through /bin/sh inside a per-call scratch
// directory: inputs are copied to <scratch>/in/<kind>, outputs are read
// from <scratch>/out/<kind>. Exit 0 is success; for verify steps exit 10 is
// a rejecting verdict. The scratch directory is removed on success and kept
// on failure.
class ScriptExecutor : public StepExecutor {
 public:
  explicit ScriptExecutor(ScriptOptions options = {});
  StepOutcome run(const WorkflowConfig& config, const StepSpec& step, const ArtifactMap& inputs) override;

  const std::filesystem::path& scratch_root() const { return options_.scratch_root; }

 private:
  ScriptOptions options_;
  std::counting_semaphore<1024> slots_;
};

// Expands {in:<kind>}, {out:<kind>} and {scratch}. Paths are single-quoted
// for the shell. Throws SchemaError for unknown kinds or any leftover
// {...} token (a '$' directly before '{' is left to the shell).
std::string expand_command(const StepSpec& step, const std::filesystem::path& scratch);

// Both adapters behind the interpreter port, selected per step by config.
class BackendGateway : public StepInterpreter {
 public:
  explicit BackendGateway(ScriptOptions options = {});
  BackendGateway(std::unique_ptr<StepExecutor> reference, std::unique_ptr<StepExecutor> external);

  // Throws UnknownStep, MissingPrecondition for uncovered inputs, and
  // whatever the adapter raises (Timeout, NonZeroExit, MissingOutput, ...).
  StepOutcome execute_step(const WorkflowConfig& config, std::string_view step_name,
                           const ArtifactMap& inputs) override;

 private:
  std::unique_ptr<StepExecutor> reference_;
  std::unique_ptr<StepExecutor> external_;
};

}  // namespace zkmlops::gateway
