#pragma once

#include <array>
#include <filesystem>
#include <map>
#include <mutex>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"
#include "zkmlops/common/clock.hpp"
#include "zkmlops/selection/taxonomy.hpp"

namespace zkmlops::selection {

struct Properties {
  bool non_interactive = false;
  bool transparent_setup = false;
  bool standard_representations = false;
  bool succinct = false;
  bool post_quantum = false;

  int count() const;
  nlohmann::json to_json() const;
  static Properties from_json(const nlohmann::json& j);
  friend bool operator==(const Properties&, const Properties&) = default;
};

inline constexpr std::array<std::string_view, 5> kPropertyNames{
    "non_interactive", "transparent_setup", "standard_representations", "succinct", "post_quantum"};

enum class Provenance { Published, Curated };

struct ProtocolProfile {
  std::string name;
  Properties properties;
  std::string notes;
  Provenance provenance = Provenance::Curated;

  nlohmann::json to_json() const;
  friend bool operator==(const ProtocolProfile&, const ProtocolProfile&) = default;
};

class KnowledgeBase {
 public:
  // {"pairs": [{"phase", "model_category", "protocols": [...]}],
  //  "profiles": {"name": {"properties": {...}, "notes", "provenance"}}}
  // Throws SchemaError, including for protocol names without a profile.
  static KnowledgeBase parse(std::string_view text);
  static KnowledgeBase load(const std::filesystem::path& path);

  // Descending property count, ties by ascending name. Throws NoKnownMethod
  // for an empty pair.
  std::vector<ProtocolProfile> recommend(LifecyclePhase phase, ModelCategory category) const;
  const ProtocolProfile& profile(std::string_view name) const;  // UnknownRecord

 private:
  std::map<std::pair<LifecyclePhase, ModelCategory>, std::vector<std::string>> pairs_;
  std::map<std::string, ProtocolProfile, std::less<>> profiles_;
};

std::string render_ranking(const std::vector<ProtocolProfile>& ranking);

struct TraceabilitySpec {
  std::string audit_purpose;
  LifecyclePhase phase = LifecyclePhase::Inference;
  ModelCategory model_category = ModelCategory::GeneralNeuralNetworks;
  std::vector<std::string> candidates;  // ranked
  std::string selected_protocol;
  Properties property_checklist;
  std::string author;
  Timestamp created_at = 0;

  nlohmann::json to_json() const;
  static TraceabilitySpec from_json(const nlohmann::json& j);
};

// Throws ProtocolNotCandidate (and NoKnownMethod for an empty pair).
TraceabilitySpec build_spec(const KnowledgeBase& kb, std::string_view purpose, LifecyclePhase phase,
                            ModelCategory category, std::string_view chosen_protocol, std::string_view author,
                            Timestamp created_at);

std::string render_markdown(const TraceabilitySpec& spec, std::string_view record_id);

// ADR storage: <dir>/NNNN-<slug>.json plus the rendered NNNN-<slug>.md.
// Records are written once and never modified.
class SpecStore {
 public:
  explicit SpecStore(std::filesystem::path dir);

  // Returns the record id "NNNN".
  std::string store(const TraceabilitySpec& spec);
  TraceabilitySpec get(std::string_view record_id) const;  // UnknownRecord
  std::string render(std::string_view record_id) const;    // UnknownRecord
  std::vector<std::string> list() const;

 private:
  std::filesystem::path find(std::string_view record_id, std::string_view ext) const;

  std::filesystem::path dir_;
  std::mutex mu_;
};

std::string slugify(std::string_view text);

}  // namespace zkmlops::selection
