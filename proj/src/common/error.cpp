#include "zkmlops/common/error.hpp"

namespace zkmlops {

std::string_view to_string(Errc code) noexcept {
  switch (code) {
    case Errc::UnknownWorkflow: return "unknown_workflow";
    case Errc::UnknownAudit: return "unknown_audit";
    case Errc::OutOfOrder: return "out_of_order";
    case Errc::MissingPrecondition: return "missing_precondition";
    case Errc::ExecutionFailure: return "execution_failure";
    case Errc::PostconditionViolation: return "postcondition_violation";
    case Errc::TerminalAudit: return "terminal_audit";
    case Errc::StepInProgress: return "step_in_progress";
    case Errc::NotCompliant: return "not_compliant";
    case Errc::UnknownArtifact: return "unknown_artifact";
    case Errc::EmptyContent: return "empty_content";
    case Errc::IntegrityError: return "integrity_error";
    case Errc::SchemaError: return "schema_error";
    case Errc::DuplicateWorkflow: return "duplicate_workflow";
    case Errc::Timeout: return "timeout";
    case Errc::NonZeroExit: return "non_zero_exit";
    case Errc::MissingOutput: return "missing_output";
    case Errc::UnknownStep: return "unknown_step";
    case Errc::NoKnownMethod: return "no_known_method";
    case Errc::ProtocolNotCandidate: return "protocol_not_candidate";
    case Errc::UnknownRecord: return "unknown_record";
    case Errc::ZeroInverse: return "zero_inverse";
    case Errc::AssertionViolated: return "assertion_violated";
    case Errc::ArityMismatch: return "arity_mismatch";
    case Errc::RangeOverflow: return "range_overflow";
    case Errc::WitnessMismatch: return "witness_mismatch";
    case Errc::MalformedProof: return "malformed_proof";
    case Errc::EmptyTable: return "empty_table";
    case Errc::IndexOutOfRange: return "index_out_of_range";
    case Errc::InvalidModel: return "invalid_model";
    case Errc::BackendUnavailable: return "backend_unavailable";
    case Errc::ModelUnsupported: return "model_unsupported";
    case Errc::EmptySamples: return "empty_samples";
    case Errc::InvalidArgument: return "invalid_argument";
    case Errc::Io: return "io_error";
  }
  return "unknown";
}

}  // namespace zkmlops
