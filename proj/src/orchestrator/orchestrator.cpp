#include "zkmlops/orchestrator/orchestrator.hpp"

#include <algorithm>
#include <fstream>
#include <random>

#include "zkmlops/common/error.hpp"

namespace zkmlops::orchestrator {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

std::string fresh_audit_id() {
  static std::mutex mu;
  static std::mt19937_64 rng{std::random_device{}()};
  std::lock_guard lock(mu);
  char buf[32];
  std::snprintf(buf, sizeof buf, "aud-%016llx", static_cast<unsigned long long>(rng()));
  return buf;
}

std::string media_hint(std::string_view kind) {
  if (kind == "model" || kind == "model-input" || kind == "model-output" || kind == "setup-parameters" ||
      kind == "verification-report")
    return "application/json";
  return "application/octet-stream";
}

}  // namespace

Orchestrator::Orchestrator(fs::path audits_dir, store::ArtifactStore& store,
                           const gateway::WorkflowRegistry& workflows, gateway::StepInterpreter& interpreter)
    : dir_(std::move(audits_dir)), store_(store), workflows_(workflows), interpreter_(interpreter) {
  fs::create_directories(dir_);
  for (const auto& f : fs::directory_iterator(dir_)) {
    if (f.path().extension() != ".log") continue;
    auto e = std::make_shared<Entry>();
    e->audit = load_log(f.path());
    audits_.emplace(e->audit.id, std::move(e));
  }
}

Audit Orchestrator::load_log(const fs::path& path) {
  std::ifstream in(path);
  std::string line;
  Audit a;
  bool have = false;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    json ev;
    try {
      ev = json::parse(line);
    } catch (const json::exception&) {
      break;  // torn trailing write
    }
    const std::string type = ev.at("event").get<std::string>();
    Timestamp at = parse_timestamp(ev.at("at").get<std::string>());
    if (type == "created") {
      a = Audit{};
      a.id = ev.at("id").get<std::string>();
      a.workflow_id = ev.at("workflow_id").get<std::string>();
      a.created_at = a.updated_at = at;
      have = true;
    } else if (type == "attached") {
      a.artifacts[ev.at("kind").get<std::string>()] = ev.at("artifact_id").get<std::string>();
    } else if (type == "step") {
      a.history.push_back(StepRecord::from_json(ev.at("record")));
      for (const auto& [k, v] : ev.at("bindings").items()) a.artifacts[k] = v.get<std::string>();
      a.state = parse_state(ev.at("state").get<std::string>());
    } else if (type == "failed") {
      a.failed_step = StepRecord::from_json(ev.at("record"));
      a.failure_reason = ev.at("reason").get<std::string>();
      a.state = AuditState::Failed;
    }
    a.updated_at = at;
  }
  if (!have) throw Error(Errc::Io, "audit log " + path.string() + " has no creation record");
  return a;
}

void Orchestrator::append(const std::string& id, const json& event) {
  std::lock_guard lock(log_mu_);
  std::ofstream out(dir_ / (id + ".log"), std::ios::app | std::ios::binary);
  out << event.dump() << '\n';
  out.flush();
  if (!out) throw Error(Errc::Io, "cannot append to audit log of " + id);
}

std::shared_ptr<Orchestrator::Entry> Orchestrator::entry(std::string_view id) const {
  std::shared_lock lock(map_mu_);
  auto it = audits_.find(id);
  if (it == audits_.end()) throw Error(Errc::UnknownAudit, "unknown audit '" + std::string(id) + "'");
  return it->second;
}

Audit Orchestrator::create_audit(std::string_view workflow_id) {
  auto config = workflows_.get(workflow_id);
  auto e = std::make_shared<Entry>();
  e->audit.id = fresh_audit_id();
  e->audit.workflow_id = config.id;
  e->audit.created_at = e->audit.updated_at = clock_.now();
  append(e->audit.id, json{{"event", "created"},
                           {"at", format_timestamp(e->audit.created_at)},
                           {"id", e->audit.id},
                           {"workflow_id", e->audit.workflow_id}});
  std::unique_lock lock(map_mu_);
  audits_.emplace(e->audit.id, e);
  return e->audit;
}

Audit Orchestrator::attach_artifact(std::string_view audit_id, std::string_view kind, std::string_view artifact_id) {
  auto e = entry(audit_id);
  if (!gateway::is_valid_label(kind)) throw Error(Errc::InvalidArgument, "invalid kind label '" + std::string(kind) + "'");
  if (!store_.contains(artifact_id)) throw Error(Errc::UnknownArtifact, "unknown artifact " + std::string(artifact_id));
  std::lock_guard lock(e->mu);
  if (is_terminal(e->audit.state))
    throw Error(Errc::TerminalAudit, "audit " + e->audit.id + " is " + std::string(to_string(e->audit.state)));
  Timestamp at = clock_.now();
  append(e->audit.id, json{{"event", "attached"},
                           {"at", format_timestamp(at)},
                           {"kind", kind},
                           {"artifact_id", artifact_id}});
  e->audit.artifacts[std::string(kind)] = std::string(artifact_id);
  e->audit.updated_at = at;
  return e->audit;
}

void Orchestrator::fail(Entry& e, StepRecord record, Errc code, const std::string& message) {
  record.success = false;
  record.message = message;
  record.finished_at = clock_.now();
  {
    std::lock_guard lock(e.mu);
    append(e.audit.id, json{{"event", "failed"},
                            {"at", format_timestamp(record.finished_at)},
                            {"record", record.to_json()},
                            {"reason", message}});
    e.audit.state = AuditState::Failed;
    e.audit.failure_reason = message;
    e.audit.failed_step = record;
    e.audit.updated_at = record.finished_at;
  }
  throw Error(code, message);
}

Audit Orchestrator::advance(std::string_view audit_id, std::string_view step_name, std::string_view triggered_by) {
  auto e = entry(audit_id);
  std::unique_lock step_lock(e->step_mu, std::try_to_lock);
  if (!step_lock.owns_lock())
    throw Error(Errc::StepInProgress, "audit " + std::string(audit_id) + " is already running a step");

  Audit snap;
  {
    std::lock_guard lock(e->mu);
    snap = e->audit;
  }
  if (!gateway::step_index(step_name)) throw Error(Errc::UnknownStep, "unknown step '" + std::string(step_name) + "'");
  // Validates terminality and order; the verdict is not known yet.
  transition(snap.state, step_name, false);

  const auto config = workflows_.get(snap.workflow_id);
  const auto& spec = config.step(step_name);
  gateway::ArtifactMap inputs;
  StepRecord record;
  record.step_name = std::string(step_name);
  record.executor_kind = spec.executor;
  record.triggered_by = std::string(triggered_by);
  for (const auto& kind : spec.inputs) {
    auto it = snap.artifacts.find(kind);
    if (it == snap.artifacts.end())
      throw Error(Errc::MissingPrecondition, "step '" + record.step_name + "' needs artifact '" + kind + "'");
    inputs[kind] = store_.get(it->second);
    record.consumed_artifacts[kind] = it->second;
  }

  record.started_at = clock_.now();
  gateway::StepOutcome outcome;
  try {
    outcome = interpreter_.execute_step(config, step_name, inputs);
  } catch (const std::exception& ex) {
    std::string code;
    if (const auto* err = dynamic_cast<const Error*>(&ex)) code = std::string(zkmlops::to_string(err->code())) + ": ";
    fail(*e, std::move(record), Errc::ExecutionFailure, "step '" + std::string(step_name) + "' failed: " + code + ex.what());
  }

  std::map<std::string, std::string> bindings;
  for (const auto& kind : spec.outputs) {
    auto it = outcome.produced.find(kind);
    if (it == outcome.produced.end() || it->second.empty())
      fail(*e, std::move(record), Errc::PostconditionViolation,
           "step '" + std::string(step_name) + "' did not produce '" + kind + "'");
    try {
      auto art = store_.put(it->second, kind, media_hint(kind));
      bindings[kind] = art.id;
      record.produced_artifacts.push_back(art.id);
    } catch (const Error& ex) {
      fail(*e, std::move(record), Errc::ExecutionFailure, "storing '" + kind + "' failed: " + ex.what());
    }
  }
  const bool is_verify = step_name == gateway::kStepNames[3];
  if (is_verify && !outcome.verdict)
    fail(*e, std::move(record), Errc::PostconditionViolation, "verify step returned no verdict");
  if (is_verify) record.verdict = outcome.verdict->accepted;
  record.message = outcome.verdict ? outcome.verdict->detail : "";
  record.finished_at = clock_.now();
  AuditState next = transition(snap.state, step_name, record.verdict.value_or(false));

  std::lock_guard lock(e->mu);
  append(e->audit.id, json{{"event", "step"},
                           {"at", format_timestamp(record.finished_at)},
                           {"record", record.to_json()},
                           {"bindings", bindings},
                           {"state", to_string(next)}});
  for (const auto& [k, v] : bindings) e->audit.artifacts[k] = v;
  e->audit.history.push_back(std::move(record));
  e->audit.state = next;
  e->audit.updated_at = e->audit.history.back().finished_at;
  return e->audit;
}

Audit Orchestrator::get_audit(std::string_view audit_id) const {
  auto e = entry(audit_id);
  std::lock_guard lock(e->mu);
  return e->audit;
}

std::vector<Audit> Orchestrator::list_audits(std::optional<AuditState> state) const {
  std::vector<std::shared_ptr<Entry>> entries;
  {
    std::shared_lock lock(map_mu_);
    for (const auto& [_, e] : audits_) entries.push_back(e);
  }
  std::vector<Audit> out;
  for (const auto& e : entries) {
    std::lock_guard lock(e->mu);
    if (!state || e->audit.state == *state) out.push_back(e->audit);
  }
  std::sort(out.begin(), out.end(), [](const Audit& a, const Audit& b) {
    return a.created_at != b.created_at ? a.created_at > b.created_at : a.id > b.id;
  });
  return out;
}

}  // namespace zkmlops::orchestrator
