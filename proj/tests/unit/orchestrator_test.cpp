#include <atomic>
#include <fstream>
#include <functional>
#include <latch>
#include <random>
#include <thread>

#include "doctest.h"
#include "paths.hpp"
#include "temp_dir.hpp"
#include "zkmlops/common/error.hpp"
#include "zkmlops/gateway/executor.hpp"
#include "zkmlops/orchestrator/orchestrator.hpp"
#include "zkmlops/zk/reference_backend.hpp"

using namespace zkmlops;
using namespace zkmlops::orchestrator;
using gateway::ArtifactMap;
using gateway::StepOutcome;
using gateway::WorkflowConfig;

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

// Produces every declared output; behaviour per step is scriptable.
struct FakeInterpreter : gateway::StepInterpreter {
  bool accept = true;
  std::string fail_on;
  std::string drop_output_on;
  bool no_verdict = false;
  std::function<void()> hook;
  std::atomic<int> calls{0};

  StepOutcome execute_step(const WorkflowConfig& c, std::string_view step, const ArtifactMap& in) override {
    ++calls;
    if (hook) hook();
    if (step == fail_on) throw Error(Errc::NonZeroExit, "backend exploded");
    StepOutcome out;
    std::string seed;
    for (const auto& [k, v] : in) seed += k + "=" + to_string(v) + ";";
    for (const auto& k : c.step(step).outputs)
      if (step != drop_output_on) out.produced[k] = to_bytes(std::string(step) + "/" + k + "/" + seed);
    if (step == "verify" && !no_verdict) out.verdict = gateway::BackendVerdict{accept, accept ? "ok" : "mismatch"};
    return out;
  }
};

struct World {
  fixtures::TempDir dir;
  store::ArtifactStore store{dir / "artifacts"};
  gateway::WorkflowRegistry registry{dir / "workflows"};
  FakeInterpreter fake;
  Orchestrator orch{dir / "audits", store, registry, fake};

  World() { registry.load(to_string(read_file(fixtures::shipped_config()))); }

  Audit fresh_with_inputs() {
    auto a = orch.create_audit("fnn-inference-v1");
    attach(a.id, "model", "{\"dims\":[1,1]}");
    attach(a.id, "setup-parameters", "{}");
    attach(a.id, "model-input", "{\"input\":[1]}");
    return orch.get_audit(a.id);
  }
  void attach(const std::string& id, const std::string& kind, const std::string& content) {
    orch.attach_artifact(id, kind, store.put(to_bytes(content), kind).id);
  }
};

}  // namespace

TEST_CASE("create and look up audits") {
  World w;
  auto a = w.orch.create_audit("fnn-inference-v1");
  auto b = w.orch.create_audit("fnn-inference-v1");
  CHECK(a.id != b.id);
  CHECK(a.state == AuditState::Created);
  CHECK(w.orch.get_audit(a.id).workflow_id == "fnn-inference-v1");
  CHECK(code_of([&] { w.orch.create_audit("nope"); }) == Errc::UnknownWorkflow);
  CHECK(code_of([&] { w.orch.get_audit("aud-0000000000000000"); }) == Errc::UnknownAudit);
  CHECK(code_of([&] { w.orch.advance("aud-0000000000000000", "setup"); }) == Errc::UnknownAudit);
}

TEST_CASE("preconditions leave the audit untouched") {
  World w;
  auto a = w.orch.create_audit("fnn-inference-v1");
  CHECK(code_of([&] { w.orch.advance(a.id, "prove"); }) == Errc::OutOfOrder);
  CHECK(code_of([&] { w.orch.advance(a.id, "setup"); }) == Errc::MissingPrecondition);
  CHECK(code_of([&] { w.orch.advance(a.id, "deploy"); }) == Errc::UnknownStep);
  CHECK(w.fake.calls == 0);
  auto after = w.orch.get_audit(a.id);
  CHECK(after.state == AuditState::Created);
  CHECK(after.history.empty());
}

TEST_CASE("attach validates and last write wins") {
  World w;
  auto a = w.orch.create_audit("fnn-inference-v1");
  auto x = w.store.put(to_bytes("one"), "model");
  auto y = w.store.put(to_bytes("two"), "model");
  w.orch.attach_artifact(a.id, "model", x.id);
  w.orch.attach_artifact(a.id, "model", y.id);
  CHECK(w.orch.get_audit(a.id).artifacts.at("model") == y.id);
  CHECK(code_of([&] { w.orch.attach_artifact(a.id, "model", std::string(64, 'a')); }) == Errc::UnknownArtifact);
  CHECK(code_of([&] { w.orch.attach_artifact(a.id, "Bad Label", x.id); }) == Errc::InvalidArgument);
}

TEST_CASE("happy path with bindings") {
  World w;
  auto a = w.fresh_with_inputs();
  for (auto s : gateway::kStepNames) a = w.orch.advance(a.id, s, "alice");
  CHECK(a.state == AuditState::VerifiedCompliant);
  REQUIRE(a.history.size() == 4);
  for (std::size_t i = 0; i < 4; ++i) {
    CHECK(a.history[i].step_name == gateway::kStepNames[i]);
    CHECK(a.history[i].triggered_by == "alice");
    CHECK(a.history[i].finished_at >= a.history[i].started_at);
    if (i) CHECK(a.history[i].started_at > a.history[i - 1].finished_at);
  }
  CHECK(a.history[3].verdict == true);
  // Verify consumed exactly what prove produced.
  CHECK(a.history[3].consumed_artifacts.at("proof") == a.artifacts.at("proof"));
  CHECK(w.store.stat(a.artifacts.at("proof")).kind == "proof");
  CHECK(code_of([&] { w.orch.advance(a.id, "verify"); }) == Errc::TerminalAudit);
  CHECK(code_of([&] { w.orch.attach_artifact(a.id, "model", a.artifacts.at("model")); }) == Errc::TerminalAudit);
}

TEST_CASE("rejecting verdict is terminal non-compliance") {
  World w;
  w.fake.accept = false;
  auto a = w.fresh_with_inputs();
  for (auto s : gateway::kStepNames) a = w.orch.advance(a.id, s);
  CHECK(a.state == AuditState::VerifiedNonCompliant);
  CHECK(a.history.back().verdict == false);
}

TEST_CASE("failures move the audit to Failed") {
  World w;
  SUBCASE("executor error") {
    w.fake.fail_on = "prove";
    auto a = w.fresh_with_inputs();
    w.orch.advance(a.id, "setup");
    w.orch.advance(a.id, "key-exchange");
    CHECK(code_of([&] { w.orch.advance(a.id, "prove"); }) == Errc::ExecutionFailure);
    a = w.orch.get_audit(a.id);
    CHECK(a.state == AuditState::Failed);
    REQUIRE(a.failed_step.has_value());
    CHECK(a.failed_step->step_name == "prove");
    CHECK_FALSE(a.failed_step->success);
    CHECK(a.failure_reason.find("non_zero_exit") != std::string::npos);
    CHECK(a.history.size() == 2);
    CHECK(code_of([&] { w.orch.advance(a.id, "prove"); }) == Errc::TerminalAudit);
  }
  SUBCASE("missing output") {
    w.fake.drop_output_on = "setup";
    auto a = w.fresh_with_inputs();
    CHECK(code_of([&] { w.orch.advance(a.id, "setup"); }) == Errc::PostconditionViolation);
    CHECK(w.orch.get_audit(a.id).state == AuditState::Failed);
  }
  SUBCASE("verify without verdict") {
    w.fake.no_verdict = true;
    auto a = w.fresh_with_inputs();
    for (int i = 0; i < 3; ++i) w.orch.advance(a.id, gateway::kStepNames[i]);
    CHECK(code_of([&] { w.orch.advance(a.id, "verify"); }) == Errc::PostconditionViolation);
    CHECK(w.orch.get_audit(a.id).state == AuditState::Failed);
  }
}

TEST_CASE("list is newest first and filters by state") {
  World w;
  std::vector<std::string> ids;
  for (int i = 0; i < 5; ++i) ids.push_back(w.fresh_with_inputs().id);
  w.orch.advance(ids[1], "setup");
  w.orch.advance(ids[3], "setup");
  auto all = w.orch.list_audits();
  REQUIRE(all.size() == 5);
  for (std::size_t i = 1; i < all.size(); ++i) CHECK(all[i - 1].created_at > all[i].created_at);
  CHECK(all.front().id == ids.back());
  auto done = w.orch.list_audits(AuditState::SetupDone);
  REQUIRE(done.size() == 2);
  CHECK(done[0].id == ids[3]);
  CHECK(w.orch.list_audits(AuditState::Failed).empty());
}

TEST_CASE("event log replays to the same audits") {
  fixtures::TempDir dir;
  store::ArtifactStore store(dir / "artifacts");
  gateway::WorkflowRegistry registry(dir / "workflows");
  registry.load(to_string(read_file(fixtures::shipped_config())));
  FakeInterpreter fake;
  std::vector<nlohmann::json> before;
  {
    Orchestrator orch(dir / "audits", store, registry, fake);
    auto mk = [&] {
      auto a = orch.create_audit("fnn-inference-v1");
      for (auto [k, v] : {std::pair{"model", "m"}, {"setup-parameters", "p"}, {"model-input", "x"}})
        orch.attach_artifact(a.id, k, store.put(to_bytes(v), k).id);
      return a.id;
    };
    auto a = mk(), b = mk(), c = mk();
    for (auto s : gateway::kStepNames) orch.advance(a, s, "bob");
    orch.advance(b, "setup");
    fake.fail_on = "setup";
    CHECK_THROWS(orch.advance(c, "setup"));
    for (const auto& x : orch.list_audits()) before.push_back(x.to_json());
  }
  // A torn trailing line from a crash is ignored.
  for (const auto& f : std::filesystem::directory_iterator(dir / "audits")) {
    std::ofstream(f.path(), std::ios::app) << "{\"event\":\"st";
  }
  Orchestrator again(dir / "audits", store, registry, fake);
  std::vector<nlohmann::json> after;
  for (const auto& x : again.list_audits()) {
    after.push_back(x.to_json());
    CHECK(replay_state(x) == x.state);
  }
  CHECK(before == after);
}

TEST_CASE("state machine: exhaustive step sequences up to length 6") {
  const std::vector<std::string> alphabet{"setup", "key-exchange", "prove", "verify"};
  const std::vector<std::string> canonical{"setup", "key-exchange", "prove", "verify"};
  for (int mode = 0; mode < 3; ++mode) {
    World w;
    w.fake.accept = mode != 1;
    if (mode == 2) w.fake.fail_on = "prove";
    std::size_t sequences = 0;
    std::vector<std::size_t> seq;
    std::function<void(std::size_t)> rec = [&](std::size_t len) {
      if (seq.size() == len) {
        ++sequences;
        auto a = w.fresh_with_inputs();
        std::vector<std::string> done;  // steps the oracle expects to succeed
        bool failed = false, terminal = false;
        for (auto i : seq) {
          const std::string& s = alphabet[i];
          const auto before = w.orch.get_audit(a.id);
          bool in_order = !terminal && done.size() < 4 && s == canonical[done.size()];
          try {
            w.orch.advance(a.id, s);
            CHECK(in_order);
            done.push_back(s);
            terminal = done.size() == 4;
          } catch (const Error& e) {
            if (terminal) {
              CHECK(e.code() == Errc::TerminalAudit);
            } else if (in_order) {
              CHECK((mode == 2 && s == "prove"));
              CHECK(e.code() == Errc::ExecutionFailure);
              failed = terminal = true;
            } else {
              CHECK(e.code() == Errc::OutOfOrder);
              auto after = w.orch.get_audit(a.id);
              CHECK(after.state == before.state);
              CHECK(after.history.size() == before.history.size());
            }
          }
          auto now = w.orch.get_audit(a.id);
          if (now.state == AuditState::ProofSubmitted)
            CHECK(done == std::vector<std::string>(canonical.begin(), canonical.begin() + 3));
          if (failed) CHECK(now.state == AuditState::Failed);
          CHECK(is_terminal(now.state) == terminal);
          CHECK(replay_state(now) == now.state);
        }
        return;
      }
      for (std::size_t i = 0; i < alphabet.size(); ++i) {
        seq.push_back(i);
        rec(len);
        seq.pop_back();
      }
    };
    for (std::size_t len = 1; len <= 6; ++len) rec(len);
    CHECK(sequences == 4 + 16 + 64 + 256 + 1024 + 4096);
  }
}

TEST_CASE("second concurrent step gets StepInProgress") {
  World w;
  auto a = w.fresh_with_inputs();
  std::latch entered(1), release(1);
  w.fake.hook = [&] {
    entered.count_down();
    release.wait();
  };
  std::thread t([&] { w.orch.advance(a.id, "setup"); });
  entered.wait();
  CHECK(code_of([&] { w.orch.advance(a.id, "setup"); }) == Errc::StepInProgress);
  CHECK(code_of([&] { w.orch.advance(a.id, "key-exchange"); }) == Errc::StepInProgress);
  release.count_down();
  t.join();
  w.fake.hook = nullptr;
  CHECK(w.orch.get_audit(a.id).state == AuditState::SetupDone);
  CHECK(w.fake.calls == 1);
}

TEST_CASE("reference backend end to end with tampered output") {
  fixtures::TempDir dir;
  store::ArtifactStore store(dir / "artifacts");
  gateway::WorkflowRegistry registry(dir / "workflows");
  registry.load(to_string(read_file(fixtures::shipped_config())));
  gateway::BackendGateway gw;
  Orchestrator orch(dir / "audits", store, registry, gw);
  std::mt19937_64 rng(5);
  std::vector<std::uint32_t> dims{6, 4, 2};
  auto model = zk::QuantizedFnn::random(dims, rng);

  auto run = [&](bool tamper) {
    auto a = orch.create_audit("fnn-inference-v1");
    auto put = [&](const std::string& kind, const std::string& text) {
      orch.attach_artifact(a.id, kind, store.put(to_bytes(text), kind).id);
    };
    put("model", model.to_json());
    put("setup-parameters", R"({"repetitions": 8})");
    put("model-input", zk::write_vector_json(std::vector<std::int64_t>{1, -2, 3, -4, 5, -6}, "input"));
    for (int i = 0; i < 3; ++i) a = orch.advance(a.id, gateway::kStepNames[i]);
    if (tamper) {
      auto y = zk::read_vector_json(to_string(store.get(a.artifacts.at("model-output"))), "output");
      y[0] += 1;
      put("model-output", zk::write_vector_json(y, "output"));
    }
    return orch.advance(a.id, "verify").state;
  };
  CHECK(run(false) == AuditState::VerifiedCompliant);
  CHECK(run(true) == AuditState::VerifiedNonCompliant);
}
