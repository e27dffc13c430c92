#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace zkmlops {

// Every failure surfaced by the library carries one of these codes. The API
// layer maps each code onto exactly one HTTP status.
enum class Errc {
  // orchestrator
  UnknownWorkflow,
  UnknownAudit,
  OutOfOrder,
  MissingPrecondition,
  ExecutionFailure,
  PostconditionViolation,
  TerminalAudit,
  StepInProgress,
  NotCompliant,
  // artifact store
  UnknownArtifact,
  EmptyContent,
  IntegrityError,
  // backend gateway
  SchemaError,
  DuplicateWorkflow,
  Timeout,
  NonZeroExit,
  MissingOutput,
  UnknownStep,
  // selection
  NoKnownMethod,
  ProtocolNotCandidate,
  UnknownRecord,
  // zk reference backend
  ZeroInverse,
  AssertionViolated,
  ArityMismatch,
  RangeOverflow,
  WitnessMismatch,
  MalformedProof,
  EmptyTable,
  IndexOutOfRange,
  InvalidModel,
  // bench
  BackendUnavailable,
  ModelUnsupported,
  EmptySamples,
  // generic
  InvalidArgument,
  Io,
};

// Stable snake_case identifier, used as the machine-readable API error code.
std::string_view to_string(Errc code) noexcept;

class Error : public std::runtime_error {
 public:
  Error(Errc code, const std::string& message)
      : std::runtime_error(message), code_(code) {}

  Errc code() const noexcept { return code_; }

 private:
  Errc code_;
};

}  // namespace zkmlops
