#include "zkmlops/orchestrator/audit.hpp"

#include "zkmlops/common/error.hpp"

namespace zkmlops::orchestrator {

using nlohmann::json;

namespace {
constexpr std::pair<AuditState, std::string_view> kStateNames[] = {
    {AuditState::Created, "created"},
    {AuditState::SetupDone, "setup_done"},
    {AuditState::KeysExchanged, "keys_exchanged"},
    {AuditState::ProofSubmitted, "proof_submitted"},
    {AuditState::VerifiedCompliant, "verified_compliant"},
    {AuditState::VerifiedNonCompliant, "verified_non_compliant"},
    {AuditState::Failed, "failed"},
};
}  // namespace

std::string_view to_string(AuditState s) noexcept {
  for (const auto& [state, name] : kStateNames)
    if (state == s) return name;
  return "?";
}

AuditState parse_state(std::string_view name) {
  for (const auto& [state, n] : kStateNames)
    if (n == name) return state;
  throw Error(Errc::InvalidArgument, "unknown audit state '" + std::string(name) + "'");
}

bool is_terminal(AuditState s) noexcept {
  return s == AuditState::VerifiedCompliant || s == AuditState::VerifiedNonCompliant || s == AuditState::Failed;
}

std::optional<std::string_view> next_step(AuditState s) noexcept {
  switch (s) {
    case AuditState::Created: return gateway::kStepNames[0];
    case AuditState::SetupDone: return gateway::kStepNames[1];
    case AuditState::KeysExchanged: return gateway::kStepNames[2];
    case AuditState::ProofSubmitted: return gateway::kStepNames[3];
    default: return std::nullopt;
  }
}

AuditState transition(AuditState from, std::string_view step, bool accepted) {
  if (is_terminal(from))
    throw Error(Errc::TerminalAudit, "audit is in terminal state " + std::string(to_string(from)));
  if (step != *next_step(from)) {
    throw Error(Errc::OutOfOrder, "step '" + std::string(step) + "' cannot run in state " +
                                      std::string(to_string(from)) + "; next is '" + std::string(*next_step(from)) +
                                      "'");
  }
  switch (from) {
    case AuditState::Created: return AuditState::SetupDone;
    case AuditState::SetupDone: return AuditState::KeysExchanged;
    case AuditState::KeysExchanged: return AuditState::ProofSubmitted;
    default: return accepted ? AuditState::VerifiedCompliant : AuditState::VerifiedNonCompliant;
  }
}

json StepRecord::to_json() const {
  json j{{"step_name", step_name},
         {"executor_kind", gateway::to_string(executor_kind)},
         {"started_at", format_timestamp(started_at)},
         {"finished_at", format_timestamp(finished_at)},
         {"exit_status", success ? json{{"success", true}} : json{{"success", false}, {"message", message}}},
         {"produced_artifacts", produced_artifacts},
         {"consumed_artifacts", consumed_artifacts},
         {"triggered_by", triggered_by}};
  if (verdict) j["verdict"] = *verdict ? "accepted" : "rejected";
  return j;
}

StepRecord StepRecord::from_json(const json& j) {
  StepRecord r;
  r.step_name = j.at("step_name").get<std::string>();
  r.executor_kind = gateway::parse_executor(j.at("executor_kind").get<std::string>());
  r.started_at = parse_timestamp(j.at("started_at").get<std::string>());
  r.finished_at = parse_timestamp(j.at("finished_at").get<std::string>());
  const json& es = j.at("exit_status");
  r.success = es.at("success").get<bool>();
  r.message = es.value("message", "");
  r.produced_artifacts = j.at("produced_artifacts").get<std::vector<std::string>>();
  r.consumed_artifacts = j.at("consumed_artifacts").get<std::map<std::string, std::string>>();
  if (j.contains("verdict")) r.verdict = j["verdict"].get<std::string>() == "accepted";
  r.triggered_by = j.value("triggered_by", "");
  return r;
}

json Audit::to_json() const {
  json h = json::array();
  for (const auto& r : history) h.push_back(r.to_json());
  json j{{"id", id},
         {"workflow_id", workflow_id},
         {"state", to_string(state)},
         {"history", h},
         {"artifacts", artifacts},
         {"created_at", format_timestamp(created_at)},
         {"updated_at", format_timestamp(updated_at)}};
  auto next = next_step(state);
  j["next_step"] = next ? json(std::string(*next)) : json(nullptr);
  if (state == AuditState::Failed) j["failure_reason"] = failure_reason;
  if (failed_step) j["failed_step"] = failed_step->to_json();
  return j;
}

Audit Audit::from_json(const json& j) {
  Audit a;
  a.id = j.at("id").get<std::string>();
  a.workflow_id = j.at("workflow_id").get<std::string>();
  a.state = parse_state(j.at("state").get<std::string>());
  for (const auto& r : j.at("history")) a.history.push_back(StepRecord::from_json(r));
  a.artifacts = j.at("artifacts").get<std::map<std::string, std::string>>();
  a.created_at = parse_timestamp(j.at("created_at").get<std::string>());
  a.updated_at = parse_timestamp(j.at("updated_at").get<std::string>());
  a.failure_reason = j.value("failure_reason", "");
  if (j.contains("failed_step")) a.failed_step = StepRecord::from_json(j["failed_step"]);
  return a;
}

AuditState replay_state(const Audit& audit) {
  AuditState s = AuditState::Created;
  for (const auto& r : audit.history) s = transition(s, r.step_name, r.verdict.value_or(false));
  if (audit.failed_step) s = AuditState::Failed;
  return s;
}

}  // namespace zkmlops::orchestrator
