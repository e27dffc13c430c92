#include "zkmlops/api/router.hpp"

#include <vector>

#include "json.hpp"

namespace zkmlops::api {

using nlohmann::json;
namespace orch = zkmlops::orchestrator;

int http_status(Errc code) noexcept {
  switch (code) {
    case Errc::UnknownWorkflow:
    case Errc::UnknownAudit:
    case Errc::UnknownArtifact:
    case Errc::UnknownRecord:
    case Errc::UnknownStep:
    case Errc::NoKnownMethod:
      return 404;
    case Errc::OutOfOrder:
    case Errc::MissingPrecondition:
    case Errc::TerminalAudit:
    case Errc::StepInProgress:
    case Errc::NotCompliant:
    case Errc::DuplicateWorkflow:
      return 409;
    case Errc::SchemaError:
    case Errc::InvalidArgument:
    case Errc::EmptyContent:
    case Errc::ProtocolNotCandidate:
    case Errc::InvalidModel:
    case Errc::RangeOverflow:
    case Errc::ArityMismatch:
    case Errc::MalformedProof:
    case Errc::EmptySamples:
    case Errc::ModelUnsupported:
      return 400;
    default:
      return 500;
  }
}

namespace {

Response json_response(int status, const json& body) { return {status, "application/json", body.dump()}; }

Response error_response(int status, std::string_view code, std::string_view message) {
  return json_response(status, json{{"code", code}, {"message", message}});
}

std::vector<std::string> split_path(const std::string& path) {
  std::vector<std::string> parts;
  std::string cur;
  for (char c : path) {
    if (c == '/') {
      if (!cur.empty()) parts.push_back(std::move(cur));
      cur.clear();
    } else {
      cur += c;
    }
  }
  if (!cur.empty()) parts.push_back(std::move(cur));
  return parts;
}

json parse_body(const Request& r) {
  try {
    json j = json::parse(r.body);
    if (!j.is_object()) throw Error(Errc::InvalidArgument, "request body must be a JSON object");
    return j;
  } catch (const json::exception& e) {
    throw Error(Errc::InvalidArgument, std::string("request body is not JSON: ") + e.what());
  }
}

std::string field(const json& j, const char* key) {
  if (!j.contains(key) || !j[key].is_string()) throw Error(Errc::InvalidArgument, std::string("missing string field '") + key + "'");
  return j[key].get<std::string>();
}

json workflow_json(const gateway::WorkflowConfig& c) { return json::parse(c.to_json()); }

json certificate(const orch::Audit& a, const gateway::WorkflowConfig& wf) {
  const orch::StepRecord& v = a.history.back();
  auto pinned = [&](const char* kind) {
    auto it = v.consumed_artifacts.find(kind);
    return it == v.consumed_artifacts.end() ? json(nullptr) : json(it->second);
  };
  return json{{"certificate_version", 1},
              {"audit_id", a.id},
              {"workflow_id", a.workflow_id},
              {"protocol", wf.protocol},
              {"verdict", "compliant"},
              {"verification_key_artifact", pinned("verification-key")},
              {"proof_artifact", pinned("proof")},
              {"model_input_artifact", pinned("model-input")},
              {"model_output_artifact", pinned("model-output")},
              {"verified_artifacts", v.consumed_artifacts},
              {"issued_at", format_timestamp(v.finished_at)}};
}

}  // namespace

Response Router::handle(const Request& request) {
  try {
    return dispatch(request);
  } catch (const Error& e) {
    return error_response(http_status(e.code()), to_string(e.code()), e.what());
  } catch (const std::exception& e) {
    return error_response(500, "internal_error", e.what());
  }
}

Response Router::dispatch(const Request& r) {
  const auto p = split_path(r.path);
  const std::string& m = r.method;
  auto& orc = svc_.orchestrator();

  if (p.size() == 1 && p[0] == "health" && m == "GET") return json_response(200, json{{"status", "ok"}});

  if (!p.empty() && p[0] == "workflows") {
    if (p.size() == 1 && m == "POST") {
      auto c = svc_.workflows().load(r.body);
      return json_response(201, json{{"id", c.id}, {"workflow", workflow_json(c)}});
    }
    if (p.size() == 1 && m == "GET") {
      json arr = json::array();
      for (const auto& c : svc_.workflows().list()) arr.push_back(workflow_json(c));
      return json_response(200, arr);
    }
    if (p.size() == 2 && m == "GET") return json_response(200, workflow_json(svc_.workflows().get(p[1])));
  }

  if (!p.empty() && p[0] == "audits") {
    if (p.size() == 1 && m == "POST") {
      auto body = parse_body(r);
      return json_response(201, orc.create_audit(field(body, "workflow_id")).to_json());
    }
    if (p.size() == 1 && m == "GET") {
      std::optional<orch::AuditState> filter;
      if (auto it = r.query.find("state"); it != r.query.end() && !it->second.empty())
        filter = orch::parse_state(it->second);
      json arr = json::array();
      for (const auto& a : orc.list_audits(filter)) arr.push_back(a.to_json());
      return json_response(200, arr);
    }
    if (p.size() == 2 && m == "GET") return json_response(200, orc.get_audit(p[1]).to_json());
    if (p.size() == 4 && p[2] == "artifacts") {
      if (m == "PUT") {
        orc.get_audit(p[1]);
        std::string media = "application/octet-stream";
        if (auto it = r.headers.find("content-type"); it != r.headers.end() && !it->second.empty()) media = it->second;
        auto art = svc_.store().put(as_bytes(r.body), p[3], media);
        auto audit = orc.attach_artifact(p[1], p[3], art.id);
        return json_response(200, json{{"artifact", json::parse(art.to_json())}, {"audit", audit.to_json()}});
      }
      if (m == "GET") {
        auto audit = orc.get_audit(p[1]);
        auto it = audit.artifacts.find(p[3]);
        if (it == audit.artifacts.end())
          throw Error(Errc::UnknownArtifact, "audit " + audit.id + " has no '" + p[3] + "' artifact");
        Bytes data = svc_.store().get(it->second);
        return {200, "application/octet-stream", zkmlops::to_string(data)};
      }
    }
    if (p.size() == 4 && p[2] == "steps" && m == "POST") {
      std::string actor;
      if (auto it = r.headers.find("x-actor"); it != r.headers.end()) actor = it->second;
      return json_response(200, orc.advance(p[1], p[3], actor).to_json());
    }
    if (p.size() == 3 && p[2] == "certificate" && m == "GET") {
      auto audit = orc.get_audit(p[1]);
      if (audit.state != orch::AuditState::VerifiedCompliant)
        throw Error(Errc::NotCompliant, "audit " + audit.id + " is " + std::string(orch::to_string(audit.state)));
      return json_response(200, certificate(audit, svc_.workflows().get(audit.workflow_id)));
    }
  }

  if (p.size() == 1 && p[0] == "recommendations" && m == "POST") {
    auto body = parse_body(r);
    auto phase = selection::parse_phase(field(body, "phase"));
    auto category = selection::parse_category(field(body, "model_category"));
    json arr = json::parse(selection::render_ranking(svc_.knowledge_base().recommend(phase, category)));
    return json_response(200, json{{"phase", selection::to_string(phase)},
                                   {"model_category", selection::to_string(category)},
                                   {"candidates", arr}});
  }

  if (!p.empty() && p[0] == "specs") {
    if (p.size() == 1 && m == "POST") {
      auto body = parse_body(r);
      auto spec = selection::build_spec(svc_.knowledge_base(), field(body, "purpose"),
                                        selection::parse_phase(field(body, "phase")),
                                        selection::parse_category(field(body, "model_category")),
                                        field(body, "protocol"), body.value("author", ""), wall_clock_micros());
      std::string id = svc_.specs().store(spec);
      return json_response(201, json{{"id", id}, {"spec", spec.to_json()}});
    }
    if (p.size() == 1 && m == "GET") return json_response(200, svc_.specs().list());
    if (p.size() == 2 && m == "GET") return {200, "text/markdown; charset=utf-8", svc_.specs().render(p[1])};
  }

  return error_response(404, "not_found", "no route for " + m + " " + r.path);
}

}  // namespace zkmlops::api
