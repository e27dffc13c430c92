#include "zkmlops/selection/selection.hpp"

#include <algorithm>
#include <cstdio>

#include "zkmlops/common/bytes.hpp"
#include "zkmlops/common/error.hpp"

namespace zkmlops::selection {

namespace fs = std::filesystem;
using nlohmann::json;

int Properties::count() const {
  return int{non_interactive} + int{transparent_setup} + int{standard_representations} + int{succinct} +
         int{post_quantum};
}

json Properties::to_json() const {
  return json{{"non_interactive", non_interactive},
              {"transparent_setup", transparent_setup},
              {"standard_representations", standard_representations},
              {"succinct", succinct},
              {"post_quantum", post_quantum}};
}

Properties Properties::from_json(const json& j) {
  if (!j.is_object() || j.size() != kPropertyNames.size())
    throw Error(Errc::SchemaError, "properties must hold exactly the five flags");
  Properties p;
  p.non_interactive = j.at("non_interactive").get<bool>();
  p.transparent_setup = j.at("transparent_setup").get<bool>();
  p.standard_representations = j.at("standard_representations").get<bool>();
  p.succinct = j.at("succinct").get<bool>();
  p.post_quantum = j.at("post_quantum").get<bool>();
  return p;
}

json ProtocolProfile::to_json() const {
  return json{{"name", name},
              {"properties", properties.to_json()},
              {"property_count", properties.count()},
              {"notes", notes},
              {"provenance", provenance == Provenance::Published ? "published" : "curated"}};
}

KnowledgeBase KnowledgeBase::parse(std::string_view text) {
  KnowledgeBase kb;
  try {
    json j = json::parse(text);
    for (const auto& [name, pj] : j.at("profiles").items()) {
      ProtocolProfile p;
      p.name = name;
      p.properties = Properties::from_json(pj.at("properties"));
      p.notes = pj.value("notes", "");
      std::string prov = pj.at("provenance").get<std::string>();
      if (prov != "published" && prov != "curated") throw Error(Errc::SchemaError, "bad provenance for " + name);
      p.provenance = prov == "published" ? Provenance::Published : Provenance::Curated;
      kb.profiles_.emplace(name, std::move(p));
    }
    for (const auto& pair : j.at("pairs")) {
      auto key = std::make_pair(parse_phase(pair.at("phase").get<std::string>()),
                                parse_category(pair.at("model_category").get<std::string>()));
      auto& list = kb.pairs_[key];
      for (const auto& n : pair.at("protocols")) {
        std::string name = n.get<std::string>();
        if (!kb.profiles_.count(name)) throw Error(Errc::SchemaError, "protocol '" + name + "' has no profile");
        if (std::find(list.begin(), list.end(), name) == list.end()) list.push_back(name);
      }
    }
  } catch (const json::exception& e) {
    throw Error(Errc::SchemaError, std::string("malformed knowledge base: ") + e.what());
  }
  return kb;
}

KnowledgeBase KnowledgeBase::load(const fs::path& path) { return parse(zkmlops::to_string(read_file(path))); }

const ProtocolProfile& KnowledgeBase::profile(std::string_view name) const {
  auto it = profiles_.find(name);
  if (it == profiles_.end()) throw Error(Errc::UnknownRecord, "no profile for '" + std::string(name) + "'");
  return it->second;
}

std::vector<ProtocolProfile> KnowledgeBase::recommend(LifecyclePhase phase, ModelCategory category) const {
  auto it = pairs_.find({phase, category});
  if (it == pairs_.end() || it->second.empty()) {
    throw Error(Errc::NoKnownMethod, "no known method for " + std::string(to_string(phase)) + " / " +
                                         std::string(to_string(category)) + "; consider alternative approaches");
  }
  std::vector<ProtocolProfile> out;
  for (const auto& n : it->second) out.push_back(profiles_.at(n));
  std::sort(out.begin(), out.end(), [](const ProtocolProfile& a, const ProtocolProfile& b) {
    int ca = a.properties.count(), cb = b.properties.count();
    return ca != cb ? ca > cb : a.name < b.name;
  });
  return out;
}

std::string render_ranking(const std::vector<ProtocolProfile>& ranking) {
  json arr = json::array();
  for (const auto& p : ranking) arr.push_back(p.to_json());
  return arr.dump();
}

json TraceabilitySpec::to_json() const {
  return json{{"audit_purpose", audit_purpose},
              {"decision_trace",
               {{"phase", to_string(phase)}, {"model_category", to_string(model_category)}, {"candidates", candidates}}},
              {"selected_protocol", selected_protocol},
              {"property_checklist", property_checklist.to_json()},
              {"author", author},
              {"created_at", format_timestamp(created_at)}};
}

TraceabilitySpec TraceabilitySpec::from_json(const json& j) {
  TraceabilitySpec s;
  s.audit_purpose = j.at("audit_purpose").get<std::string>();
  const json& dt = j.at("decision_trace");
  s.phase = parse_phase(dt.at("phase").get<std::string>());
  s.model_category = parse_category(dt.at("model_category").get<std::string>());
  s.candidates = dt.at("candidates").get<std::vector<std::string>>();
  s.selected_protocol = j.at("selected_protocol").get<std::string>();
  s.property_checklist = Properties::from_json(j.at("property_checklist"));
  s.author = j.at("author").get<std::string>();
  s.created_at = parse_timestamp(j.at("created_at").get<std::string>());
  return s;
}

TraceabilitySpec build_spec(const KnowledgeBase& kb, std::string_view purpose, LifecyclePhase phase,
                            ModelCategory category, std::string_view chosen_protocol, std::string_view author,
                            Timestamp created_at) {
  if (purpose.empty()) throw Error(Errc::InvalidArgument, "audit purpose is empty");
  auto ranking = kb.recommend(phase, category);
  auto it = std::find_if(ranking.begin(), ranking.end(), [&](const ProtocolProfile& p) { return p.name == chosen_protocol; });
  if (it == ranking.end()) {
    throw Error(Errc::ProtocolNotCandidate, "'" + std::string(chosen_protocol) + "' is not a candidate for " +
                                                std::string(to_string(phase)) + " / " + std::string(to_string(category)));
  }
  TraceabilitySpec s;
  s.audit_purpose = std::string(purpose);
  s.phase = phase;
  s.model_category = category;
  for (const auto& p : ranking) s.candidates.push_back(p.name);
  s.selected_protocol = it->name;
  s.property_checklist = it->properties;
  s.author = std::string(author);
  s.created_at = created_at;
  return s;
}

namespace {
const char* mark(bool b) { return b ? "[x]" : "[ ]"; }
}  // namespace

std::string render_markdown(const TraceabilitySpec& spec, std::string_view record_id) {
  const Properties& p = spec.property_checklist;
  std::string md;
  md += "# ADR " + std::string(record_id) + ": ZKP Traceability Specification\n\n";
  md += "- Author: " + (spec.author.empty() ? std::string("unspecified") : spec.author) + "\n";
  md += "- Recorded: " + format_timestamp(spec.created_at) + "\n\n";
  md += "## Purpose of the Audit\n\n" + spec.audit_purpose + "\n\n";
  md += "## Decision Trace\n\n";
  md += "- Lifecycle phase: " + std::string(title(spec.phase)) + " (`" + std::string(to_string(spec.phase)) + "`)\n";
  md += "- Model category: " + std::string(title(spec.model_category)) + " (`" +
        std::string(to_string(spec.model_category)) + "`)\n";
  md += "- Ranked candidates:\n";
  for (std::size_t i = 0; i < spec.candidates.size(); ++i)
    md += "  " + std::to_string(i + 1) + ". " + spec.candidates[i] + "\n";
  md += "\n## Selected Protocol\n\n`" + spec.selected_protocol + "`, satisfying " + std::to_string(p.count()) +
        " of 5 properties:\n\n";
  md += std::string("- ") + mark(p.non_interactive) + " non-interactive\n";
  md += std::string("- ") + mark(p.transparent_setup) + " transparent setup\n";
  md += std::string("- ") + mark(p.standard_representations) + " standard representations\n";
  md += std::string("- ") + mark(p.succinct) + " succinct\n";
  md += std::string("- ") + mark(p.post_quantum) + " post-quantum secure\n";
  return md;
}

std::string slugify(std::string_view text) {
  std::string out;
  for (char c : text) {
    if (std::isalnum(static_cast<unsigned char>(c))) {
      out += static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    } else if (!out.empty() && out.back() != '-') {
      out += '-';
    }
    if (out.size() >= 48) break;
  }
  while (!out.empty() && out.back() == '-') out.pop_back();
  return out.empty() ? "spec" : out;
}

SpecStore::SpecStore(fs::path dir) : dir_(std::move(dir)) { fs::create_directories(dir_); }

std::vector<std::string> SpecStore::list() const {
  std::vector<std::string> ids;
  for (const auto& f : fs::directory_iterator(dir_)) {
    std::string name = f.path().filename().string();
    if (f.path().extension() == ".json" && name.size() > 5 && name[4] == '-') ids.push_back(name.substr(0, 4));
  }
  std::sort(ids.begin(), ids.end());
  return ids;
}

std::string SpecStore::store(const TraceabilitySpec& spec) {
  std::lock_guard lock(mu_);
  auto ids = list();
  int next = ids.empty() ? 1 : std::stoi(ids.back()) + 1;
  if (next > 9999) throw Error(Errc::Io, "ADR storage is full");
  char num[16];
  std::snprintf(num, sizeof num, "%04d", next);
  std::string base = std::string(num) + "-" + slugify(spec.audit_purpose);
  write_file_atomic(dir_ / (base + ".md"), as_bytes(render_markdown(spec, num)));
  write_file_atomic(dir_ / (base + ".json"), as_bytes(spec.to_json().dump(2)));
  return num;
}

fs::path SpecStore::find(std::string_view record_id, std::string_view ext) const {
  if (record_id.size() == 4 && std::all_of(record_id.begin(), record_id.end(), ::isdigit)) {
    for (const auto& f : fs::directory_iterator(dir_)) {
      std::string name = f.path().filename().string();
      if (name.compare(0, 5, std::string(record_id) + "-") == 0 && f.path().extension() == ext) return f.path();
    }
  }
  throw Error(Errc::UnknownRecord, "unknown ADR record '" + std::string(record_id) + "'");
}

TraceabilitySpec SpecStore::get(std::string_view record_id) const {
  return TraceabilitySpec::from_json(json::parse(zkmlops::to_string(read_file(find(record_id, ".json")))));
}

std::string SpecStore::render(std::string_view record_id) const { return zkmlops::to_string(read_file(find(record_id, ".md"))); }

}  // namespace zkmlops::selection
