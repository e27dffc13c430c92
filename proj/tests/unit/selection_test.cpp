#include <algorithm>

#include "doctest.h"
#include "json.hpp"
#include "paths.hpp"
#include "temp_dir.hpp"
#include "zkmlops/common/bytes.hpp"
#include "zkmlops/common/error.hpp"
#include "zkmlops/selection/selection.hpp"

using namespace zkmlops;
using namespace zkmlops::selection;
using nlohmann::json;

namespace {

Errc code_of(auto&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("no error thrown");
  return Errc::Io;
}

const KnowledgeBase& kb() {
  static const KnowledgeBase k = KnowledgeBase::load(fixtures::knowledge_base());
  return k;
}

// Independent ranking straight from the JSON file.
std::vector<std::string> oracle_ranking(const json& doc, std::string_view phase, std::string_view cat) {
  std::vector<std::pair<int, std::string>> rows;
  for (const auto& p : doc["pairs"]) {
    if (p["phase"] != phase || p["model_category"] != cat) continue;
    for (const auto& name : p["protocols"]) {
      int n = 0;
      for (const auto& [k, v] : doc["profiles"][name.get<std::string>()]["properties"].items()) n += v.get<bool>();
      rows.emplace_back(-n, name.get<std::string>());
    }
  }
  std::sort(rows.begin(), rows.end());
  std::vector<std::string> out;
  for (auto& r : rows) out.push_back(r.second);
  return out;
}

}  // namespace

TEST_CASE("inference on general networks ranks ezkl first with every property") {
  auto r = kb().recommend(LifecyclePhase::Inference, ModelCategory::GeneralNeuralNetworks);
  REQUIRE_FALSE(r.empty());
  CHECK(r.front().name == "ezkl");
  CHECK(r.front().properties.count() == 5);
  CHECK(r.front().provenance == Provenance::Published);
  for (std::size_t i = 1; i < r.size(); ++i) CHECK(r[i].properties.count() < 5);
}

TEST_CASE("ranking matches the oracle for every pair") {
  json doc = json::parse(zkmlops::to_string(read_file(fixtures::knowledge_base())));
  std::size_t nonempty = 0;
  for (auto ph : kAllPhases) {
    for (auto cat : kAllCategories) {
      auto expect = oracle_ranking(doc, to_string(ph), to_string(cat));
      if (expect.empty()) {
        CHECK(code_of([&] { kb().recommend(ph, cat); }) == Errc::NoKnownMethod);
        continue;
      }
      ++nonempty;
      auto got = kb().recommend(ph, cat);
      std::vector<std::string> names;
      for (const auto& p : got) names.push_back(p.name);
      CHECK(names == expect);
      int best = 0;
      for (const auto& p : got) best = std::max(best, p.properties.count());
      CHECK(got.front().properties.count() == best);
    }
  }
  CHECK(nonempty >= 20);
  CHECK_FALSE(kb().recommend(LifecyclePhase::Inference, ModelCategory::ConvolutionalNeuralNetworks).empty());
  CHECK(code_of([&] { kb().recommend(LifecyclePhase::OnlineMetrics, ModelCategory::LargeLanguageModels); }) ==
        Errc::NoKnownMethod);
}

TEST_CASE("rankings are byte-deterministic") {
  auto a = render_ranking(kb().recommend(LifecyclePhase::Inference, ModelCategory::GeneralNeuralNetworks));
  auto k2 = KnowledgeBase::load(fixtures::knowledge_base());
  auto b = render_ranking(k2.recommend(LifecyclePhase::Inference, ModelCategory::GeneralNeuralNetworks));
  CHECK(a == b);
  CHECK(a.find("ezkl") < a.find("reference-mpcith"));
}

TEST_CASE("knowledge base schema") {
  CHECK(code_of([] { KnowledgeBase::parse("[]"); }) == Errc::SchemaError);
  CHECK(code_of([] {
          KnowledgeBase::parse(
              R"({"pairs":[{"phase":"Inference","model_category":"LinearModels","protocols":["ghost"]}],"profiles":{}})");
        }) == Errc::SchemaError);
  CHECK(code_of([] {
          KnowledgeBase::parse(R"({"pairs":[{"phase":"Later","model_category":"LinearModels","protocols":[]}],"profiles":{}})");
        }) == Errc::SchemaError);
  CHECK(code_of([] { Properties::from_json(json{{"non_interactive", true}}); }) == Errc::SchemaError);
  CHECK(code_of([] { kb().profile("ghost"); }) == Errc::UnknownRecord);
}

TEST_CASE("traceability spec") {
  auto s = build_spec(kb(), "Check loan model outputs", LifecyclePhase::Inference,
                      ModelCategory::GeneralNeuralNetworks, "reference-mpcith", "carol", 1'700'000'000'000'000);
  CHECK(s.candidates.front() == "ezkl");
  CHECK(s.selected_protocol == "reference-mpcith");
  CHECK(s.property_checklist == kb().profile("reference-mpcith").properties);
  CHECK(code_of([&] {
          build_spec(kb(), "p", LifecyclePhase::Inference, ModelCategory::GeneralNeuralNetworks, "zkdt", "c", 0);
        }) == Errc::ProtocolNotCandidate);
  CHECK(code_of([&] {
          build_spec(kb(), "p", LifecyclePhase::OnlineMetrics, ModelCategory::LargeLanguageModels, "ezkl", "c", 0);
        }) == Errc::NoKnownMethod);
  auto round = TraceabilitySpec::from_json(s.to_json());
  CHECK(round.to_json() == s.to_json());
}

TEST_CASE("spec store numbers, renders and never rewrites") {
  fixtures::TempDir dir;
  SpecStore store(dir / "adr");
  auto s = build_spec(kb(), "Audit: credit scoring!", LifecyclePhase::Inference,
                      ModelCategory::GeneralNeuralNetworks, "ezkl", "dana", 1'700'000'000'000'000);
  auto id1 = store.store(s);
  auto id2 = store.store(s);
  CHECK(id1 == "0001");
  CHECK(id2 == "0002");
  CHECK(std::filesystem::exists(dir / "adr" / "0001-audit-credit-scoring.md"));
  std::string md = store.render(id1);
  auto h1 = md.find("## Purpose of the Audit");
  auto h2 = md.find("## Decision Trace");
  auto h3 = md.find("## Selected Protocol");
  CHECK(h1 != std::string::npos);
  CHECK(h1 < h2);
  CHECK(h2 < h3);
  CHECK(h3 != std::string::npos);
  CHECK(md.find("- [x] non-interactive") != std::string::npos);
  CHECK(md.find("Audit: credit scoring!") != std::string::npos);
  CHECK(store.get(id1).to_json() == s.to_json());
  CHECK(code_of([&] { store.render("0099"); }) == Errc::UnknownRecord);
  CHECK(code_of([&] { store.get("../x"); }) == Errc::UnknownRecord);
  CHECK(store.list() == std::vector<std::string>{"0001", "0002"});

  auto before = read_file(dir / "adr" / "0001-audit-credit-scoring.json");
  SpecStore reopened(dir / "adr");
  CHECK(reopened.store(s) == "0003");
  CHECK(read_file(dir / "adr" / "0001-audit-credit-scoring.json") == before);
  CHECK(render_markdown(s, "0001") == md);
}

TEST_CASE("slugify") {
  CHECK(slugify("Audit: credit scoring!") == "audit-credit-scoring");
  CHECK(slugify("  --  ") == "spec");
}
