#include "zkmlops/gateway/workflow.hpp"

#include <algorithm>
#include <mutex>
#include <set>

#include "json.hpp"
#include "zkmlops/common/error.hpp"

namespace zkmlops::gateway {

namespace fs = std::filesystem;
using nlohmann::json;

std::optional<std::size_t> step_index(std::string_view name) {
  for (std::size_t i = 0; i < kStepNames.size(); ++i)
    if (kStepNames[i] == name) return i;
  return std::nullopt;
}

std::string_view to_string(ExecutorKind k) noexcept {
  return k == ExecutorKind::ExternalScript ? "external-script" : "reference-backend";
}

ExecutorKind parse_executor(std::string_view name) {
  if (name == "external-script") return ExecutorKind::ExternalScript;
  if (name == "reference-backend") return ExecutorKind::ReferenceBackend;
  throw Error(Errc::SchemaError, "unknown executor '" + std::string(name) + "'");
}

bool is_valid_label(std::string_view label) {
  if (label.empty() || label.size() > 64) return false;
  if (label.front() == '.' || label.front() == '-') return false;
  return std::all_of(label.begin(), label.end(), [](char c) {
    return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || (c >= '0' && c <= '9') || c == '-' || c == '_' ||
           c == '.';
  });
}

const StepContract& reference_contract(std::string_view step_name) {
  static const std::map<std::string, StepContract, std::less<>> contracts{
      {"setup", {{"model", "setup-parameters"}, {"proving-key", "setup-verification-key"}}},
      {"key-exchange", {{"setup-verification-key"}, {"verification-key"}}},
      {"prove", {{"model", "model-input", "proving-key"}, {"proof", "model-output"}}},
      {"verify", {{"verification-key", "model-input", "model-output", "proof"}, {"verification-report"}}},
  };
  auto it = contracts.find(step_name);
  if (it == contracts.end()) throw Error(Errc::UnknownStep, "unknown step '" + std::string(step_name) + "'");
  return it->second;
}

const StepSpec& WorkflowConfig::step(std::string_view name) const {
  for (const auto& s : steps)
    if (s.step_name == name) return s;
  throw Error(Errc::UnknownStep, "workflow " + id + " has no step '" + std::string(name) + "'");
}

std::string WorkflowConfig::to_json() const {
  json steps_j = json::array();
  for (const auto& s : steps) {
    steps_j.push_back({{"step_name", s.step_name},
                       {"executor", to_string(s.executor)},
                       {"command_template", s.command_template ? json(*s.command_template) : json(nullptr)},
                       {"inputs", s.inputs},
                       {"outputs", s.outputs},
                       {"timeout_seconds", s.timeout_seconds}});
  }
  json j{{"id", id},
         {"purpose", purpose},
         {"phase", selection::to_string(phase)},
         {"model_category", selection::to_string(model_category)},
         {"protocol", protocol},
         {"steps", steps_j},
         {"traceability_ref", traceability_ref ? json(*traceability_ref) : json(nullptr)}};
  return j.dump(2);
}

namespace {

[[noreturn]] void schema(const std::string& msg) { throw Error(Errc::SchemaError, msg); }

void expect_keys(const json& j, const std::set<std::string>& required, const std::set<std::string>& optional,
                 const std::string& where) {
  if (!j.is_object()) schema(where + " must be an object");
  for (const auto& k : required)
    if (!j.contains(k)) schema(where + " is missing field '" + k + "'");
  for (const auto& [k, _] : j.items())
    if (!required.count(k) && !optional.count(k)) schema(where + " has unknown field '" + k + "'");
}

std::string text_field(const json& j, const char* key, const std::string& where) {
  const json& v = j.at(key);
  if (!v.is_string()) schema(where + "." + key + " must be a string");
  return v.get<std::string>();
}

std::vector<std::string> labels(const json& j, const char* key, const std::string& where) {
  const json& v = j.at(key);
  if (!v.is_array()) schema(where + "." + key + " must be an array");
  std::vector<std::string> out;
  std::set<std::string> seen;
  for (const auto& e : v) {
    if (!e.is_string() || !is_valid_label(e.get<std::string>()))
      schema(where + "." + key + " holds an invalid kind label");
    if (!seen.insert(e.get<std::string>()).second)
      schema(where + "." + key + " repeats kind '" + e.get<std::string>() + "'");
    out.push_back(e.get<std::string>());
  }
  return out;
}

}  // namespace

WorkflowConfig parse_workflow_config(std::string_view text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception& e) {
    schema(std::string("workflow config is not JSON: ") + e.what());
  }
  expect_keys(j, {"id", "purpose", "phase", "model_category", "protocol", "steps"}, {"traceability_ref"}, "config");
  WorkflowConfig c;
  c.id = text_field(j, "id", "config");
  if (!is_valid_label(c.id)) schema("config.id '" + c.id + "' is not a valid identifier");
  c.purpose = text_field(j, "purpose", "config");
  c.phase = selection::parse_phase(text_field(j, "phase", "config"));
  c.model_category = selection::parse_category(text_field(j, "model_category", "config"));
  c.protocol = text_field(j, "protocol", "config");
  if (c.protocol.empty()) schema("config.protocol is empty");
  if (j.contains("traceability_ref") && !j["traceability_ref"].is_null())
    c.traceability_ref = text_field(j, "traceability_ref", "config");

  const json& steps = j.at("steps");
  if (!steps.is_array() || steps.size() != kStepNames.size())
    schema("config.steps must list exactly the steps setup, key-exchange, prove, verify");
  std::set<std::string> produced;
  for (std::size_t i = 0; i < steps.size(); ++i) {
    std::string where = "steps[" + std::to_string(i) + "]";
    const json& sj = steps[i];
    expect_keys(sj, {"step_name", "executor", "inputs", "outputs", "timeout_seconds"}, {"command_template"}, where);
    StepSpec s;
    s.step_name = text_field(sj, "step_name", where);
    if (s.step_name != kStepNames[i])
      schema(where + " is '" + s.step_name + "', expected '" + std::string(kStepNames[i]) + "'");
    s.executor = parse_executor(text_field(sj, "executor", where));
    if (sj.contains("command_template") && !sj["command_template"].is_null())
      s.command_template = text_field(sj, "command_template", where);
    s.inputs = labels(sj, "inputs", where);
    s.outputs = labels(sj, "outputs", where);
    const json& to = sj.at("timeout_seconds");
    if (!to.is_number_integer() || to.get<std::int64_t>() <= 0 || to.get<std::int64_t>() > 86400)
      schema(where + ".timeout_seconds must be a positive integer");
    s.timeout_seconds = to.get<std::uint32_t>();

    if (s.executor == ExecutorKind::ExternalScript) {
      if (!s.command_template || s.command_template->empty()) schema(where + " needs a command_template");
    } else {
      if (s.command_template) schema(where + " is a reference-backend step and takes no command_template");
      const auto& contract = reference_contract(s.step_name);
      auto same = [](std::vector<std::string> a, std::vector<std::string> b) {
        std::sort(a.begin(), a.end());
        std::sort(b.begin(), b.end());
        return a == b;
      };
      if (!same(s.inputs, contract.inputs) || !same(s.outputs, contract.outputs))
        schema(where + " does not match the reference backend's artifact kinds");
    }
    for (const auto& o : s.outputs) {
      if (!produced.insert(o).second) schema("kind '" + o + "' is produced by more than one step");
      if (std::find(s.inputs.begin(), s.inputs.end(), o) != s.inputs.end())
        schema(where + " lists '" + o + "' as both input and output");
    }
    c.steps.push_back(std::move(s));
  }
  return c;
}

WorkflowRegistry::WorkflowRegistry(fs::path dir) : dir_(std::move(dir)) {
  fs::create_directories(dir_);
  for (const auto& entry : fs::directory_iterator(dir_)) {
    if (entry.path().extension() != ".json") continue;
    auto c = parse_workflow_config(zkmlops::to_string(read_file(entry.path())));
    configs_.emplace(c.id, std::move(c));
  }
}

WorkflowConfig WorkflowRegistry::load(std::string_view text) {
  WorkflowConfig c = parse_workflow_config(text);
  std::unique_lock lock(mu_);
  if (configs_.count(c.id)) throw Error(Errc::DuplicateWorkflow, "workflow '" + c.id + "' is already loaded");
  write_file_atomic(dir_ / (c.id + ".json"), as_bytes(text));
  configs_.emplace(c.id, c);
  return c;
}

std::vector<std::string> WorkflowRegistry::load_directory(const fs::path& dir) {
  std::vector<fs::path> files;
  for (const auto& entry : fs::directory_iterator(dir))
    if (entry.path().extension() == ".json") files.push_back(entry.path());
  std::sort(files.begin(), files.end());
  std::vector<std::string> added;
  for (const auto& f : files) {
    std::string text = zkmlops::to_string(read_file(f));
    if (contains(parse_workflow_config(text).id)) continue;
    added.push_back(load(text).id);
  }
  return added;
}

WorkflowConfig WorkflowRegistry::get(std::string_view id) const {
  std::shared_lock lock(mu_);
  auto it = configs_.find(id);
  if (it == configs_.end()) throw Error(Errc::UnknownWorkflow, "unknown workflow '" + std::string(id) + "'");
  return it->second;
}

bool WorkflowRegistry::contains(std::string_view id) const {
  std::shared_lock lock(mu_);
  return configs_.find(id) != configs_.end();
}

std::vector<WorkflowConfig> WorkflowRegistry::list() const {
  std::shared_lock lock(mu_);
  std::vector<WorkflowConfig> out;
  for (const auto& [_, c] : configs_) out.push_back(c);
  return out;
}

}  // namespace zkmlops::gateway
