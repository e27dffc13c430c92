// Acceptance runner: one PASS/FAIL line per criterion, exit status 1 if any
// criterion fails.
#include <algorithm>
#include <array>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <iostream>
#include <numeric>
#include <random>
#include <sstream>

#include "fixtures.hpp"
#include "json.hpp"
#include "oracles.hpp"
#include "paths.hpp"
#include "temp_dir.hpp"
#include "zkmlops/common/error.hpp"
#include "zkmlops/gateway/executor.hpp"
#include "zkmlops/orchestrator/orchestrator.hpp"
#include "zkmlops/selection/selection.hpp"
#include "zkmlops/zk/circuit.hpp"
#include "zkmlops/zk/lookup.hpp"
#include "zkmlops/zk/reference_backend.hpp"

using namespace zkmlops;
namespace orch = zkmlops::orchestrator;
using nlohmann::json;
using Clock = std::chrono::steady_clock;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

std::string fmt(double v, int prec = 4) {
  std::ostringstream o;
  o.precision(prec);
  o << std::fixed << v;
  return o.str();
}

// Full four-step audit through the orchestrator for one workflow. With
// `tamper`, the model-output artifact gets +1 on coordinate 0 before verify.
struct ScenarioResult {
  orch::AuditState state;
  double seconds;
  orch::StepRecord verify_record;
};

ScenarioResult run_scenario(orch::Orchestrator& o, store::ArtifactStore& st, const std::string& workflow,
                            const zk::QuantizedFnn& model, const std::vector<std::int64_t>& x,
                            std::uint32_t t, bool tamper) {
  auto t0 = Clock::now();
  auto a = o.create_audit(workflow);
  auto put = [&](const std::string& kind, const std::string& text) {
    o.attach_artifact(a.id, kind, st.put(to_bytes(text), kind).id);
  };
  put("model", model.to_json());
  put("setup-parameters", json{{"repetitions", t}, {"bind_weights", true}}.dump());
  put("model-input", zk::write_vector_json(x, "input"));
  for (int i = 0; i < 3; ++i) a = o.advance(a.id, gateway::kStepNames[i], "acceptance");
  if (tamper) {
    auto y = zk::read_vector_json(zkmlops::to_string(st.get(a.artifacts.at("model-output"))), "output");
    y[0] += 1;
    put("model-output", zk::write_vector_json(y, "output"));
  }
  a = o.advance(a.id, "verify", "acceptance");
  return {a.state, seconds_since(t0), a.history.back()};
}

struct Harness {
  fixtures::TempDir dir;
  store::ArtifactStore store{dir / "artifacts"};
  gateway::WorkflowRegistry registry{dir / "workflows"};
  gateway::BackendGateway gateway{gateway::ScriptOptions{dir / "scratch", 4}};
  orch::Orchestrator orch{dir / "audits", store, registry, gateway};
};

zk::QuantizedFnn scenario_model() {
  std::mt19937_64 rng(2024);
  std::vector<std::uint32_t> dims{16, 8, 2};
  return zk::QuantizedFnn::random(dims, rng);
}

std::vector<std::int64_t> scenario_input() {
  std::mt19937_64 rng(7);
  return fixtures::random_input(16, rng);
}

Outcome criterion1() {
  Harness h;
  h.registry.load(zkmlops::to_string(read_file(fixtures::shipped_config())));
  auto model = scenario_model();
  auto x = scenario_input();
  auto honest = run_scenario(h.orch, h.store, "fnn-inference-v1", model, x, 8, false);
  auto tampered = run_scenario(h.orch, h.store, "fnn-inference-v1", model, x, 8, true);
  bool pass = honest.state == orch::AuditState::VerifiedCompliant && honest.seconds < 60 &&
              tampered.state == orch::AuditState::VerifiedNonCompliant;
  return {pass, "honest=" + std::string(orch::to_string(honest.state)) + " in " + fmt(honest.seconds, 3) +
                    " s, tampered=" + std::string(orch::to_string(tampered.state))};
}

Outcome criterion2() {
  // Scan verifier-side bytes for the 8-byte field encoding of every model
  // parameter. A hit is explained when the encoding is also that of a public
  // statement value or occurs in the model-independent parameter block.
  std::size_t params = 0, hits = 0, explained = 0;
  const std::uint32_t t = 8;
  ByteWriter pw;
  zk::ProtocolParameters::current(t).write(pw);
  const Bytes block = pw.bytes();
  auto encode = [](zk::Fp v) {
    std::array<std::uint8_t, 8> e{};
    for (int i = 0; i < 8; ++i) e[i] = static_cast<std::uint8_t>(v.value() >> (8 * i));
    return e;
  };
  auto occurs = [](const Bytes& hay, const std::array<std::uint8_t, 8>& needle) {
    return std::search(hay.begin(), hay.end(), needle.begin(), needle.end()) != hay.end();
  };
  for (std::uint64_t m = 0; m < 20; ++m) {
    std::mt19937_64 rng(500 + m);
    std::uniform_int_distribution<std::uint32_t> d(2, 16);
    std::vector<std::uint32_t> dims{d(rng), d(rng), d(rng)};
    auto model = zk::QuantizedFnn::random(dims, rng);
    auto x = fixtures::random_input(dims.front(), rng);
    auto keys = zk::setup(model, {t, true});
    auto proof = zk::prove_inference(model, keys.proving_key, x);
    Bytes exposed = keys.verification_key;
    exposed.insert(exposed.end(), proof.proof.begin(), proof.proof.end());
    auto stmt = proof.statement.serialize();
    exposed.insert(exposed.end(), stmt.begin(), stmt.end());
    std::vector<std::array<std::uint8_t, 8>> public_values;
    for (const auto& v : proof.statement.inputs) public_values.push_back(encode(v));
    for (const auto& v : proof.statement.outputs) public_values.push_back(encode(v));
    for (auto w : model.flat_parameters()) {
      ++params;
      auto e = encode(zk::Fp::from_signed(w));
      if (!occurs(exposed, e)) continue;
      ++hits;
      if (std::find(public_values.begin(), public_values.end(), e) != public_values.end() || occurs(block, e))
        ++explained;
    }
  }
  return {hits == explained, std::to_string(params) + " parameters scanned over 20 models, " + std::to_string(hits) +
                                 " encodings found, " + std::to_string(hits - explained) + " unexplained"};
}

Outcome criterion3() {
  std::mt19937_64 rng(3);
  std::uniform_int_distribution<std::uint32_t> d(2, 32), layers(1, 2);
  int ok = 0;
  for (int i = 0; i < 100; ++i) {
    std::vector<std::uint32_t> dims{d(rng)};
    for (std::uint32_t l = layers(rng); l > 0; --l) dims.push_back(d(rng));
    std::uint32_t t = i % 2 ? 8 : 1;
    auto model = zk::QuantizedFnn::random(dims, rng);
    auto x = fixtures::random_input(dims.front(), rng);
    auto keys = zk::setup(model, {t, i % 4 < 2});
    auto p = zk::prove_inference(model, keys.proving_key, x);
    ok += zk::verify_inference(keys.verification_key, x, p.output, p.proof).accepted;
  }
  return {ok == 100, std::to_string(ok) + "/100 honest proofs accepted"};
}

Outcome criterion4() {
  auto t0 = Clock::now();
  // Unbound, so the last secret multiplication is a final-layer product.
  auto in = fixtures::make_instance({16, 8, 2}, 44, false);
  const int n = 2000;
  auto rate = [&](std::uint32_t t) {
    int acc = 0;
    for (int i = 0; i < n; ++i) {
      auto r = fixtures::cheat_once(in, t, t * 1000003ull + static_cast<std::uint64_t>(i));
      if (!r.statement_false) throw std::runtime_error("cheat did not change the statement");
      acc += r.accepted;
    }
    return static_cast<double>(acc) / n;
  };
  double r1 = rate(1);
  double r8 = rate(8);
  double secs = seconds_since(t0);
  bool ok1 = r1 >= 0.55 && r1 <= 0.75;
  bool ok8 = r8 <= 0.01;
  return {ok1 && ok8 && secs < 600, "t=1 rate " + fmt(r1) + (ok1 ? " (ok)" : " (out of [0.55, 0.75])") +
                                        ", t=8 rate " + fmt(r8) + (ok8 ? " (ok)" : " (above 0.01)") +
                                        ", (2/3)^8=" + fmt(std::pow(2.0 / 3.0, 8)) + ", " + fmt(secs, 1) + " s"};
}

Outcome criterion5() {
  std::mt19937_64 rng(5);
  std::uniform_int_distribution<std::uint32_t> d(2, 24), layers(1, 2);
  int exact = 0;
  for (int i = 0; i < 100; ++i) {
    std::vector<std::uint32_t> dims{d(rng)};
    for (std::uint32_t l = layers(rng); l > 0; --l) dims.push_back(d(rng));
    auto model = zk::QuantizedFnn::random(dims, rng);
    auto x = fixtures::random_input(dims.front(), rng);
    auto compiled = zk::compile_fnn(model, i % 2 == 0);
    auto a = zk::assign_fnn(model, compiled, x);
    auto y = zk::eval_circuit(compiled.circuit, a.public_inputs, a.witness);
    auto expect = oracle::forward(model.dims, model.weights, model.biases, x);
    bool same = y.size() == expect.size();
    for (std::size_t k = 0; same && k < y.size(); ++k) same = y[k].to_signed() == expect[k];
    exact += same;
  }
  zk::CircuitBuilder b(1);
  b.output(b.relu(b.input(0), zk::kReluBits));
  auto hints = b.hints();
  auto relu = std::move(b).build();
  int relu_ok = 0;
  for (std::int64_t v = -1000; v <= 1000; ++v) {
    std::vector<zk::Fp> x{zk::Fp::from_signed(v)};
    auto w = zk::solve_witness(relu, hints, x, std::vector<zk::Fp>(relu.num_witness));
    auto y = zk::eval_circuit(relu, x, w);
    relu_ok += y.size() == 1 && y[0].to_signed() == std::max<std::int64_t>(0, v);
  }
  return {exact == 100 && relu_ok == 2001,
          std::to_string(exact) + "/100 circuits equal the integer forward pass, ReLU gadget " +
              std::to_string(relu_ok) + "/2001"};
}

// Fake backend for the state-machine sweep.
struct FakeInterpreter : gateway::StepInterpreter {
  bool accept = true;
  std::string fail_on;
  gateway::StepOutcome execute_step(const gateway::WorkflowConfig& c, std::string_view step,
                                    const gateway::ArtifactMap&) override {
    if (step == fail_on) throw Error(Errc::NonZeroExit, "injected failure");
    gateway::StepOutcome out;
    for (const auto& k : c.step(step).outputs) out.produced[k] = to_bytes(std::string(step) + "/" + k);
    if (step == "verify") out.verdict = gateway::BackendVerdict{accept, ""};
    return out;
  }
};

Outcome criterion6() {
  const std::array<std::string, 4> names{"setup", "key-exchange", "prove", "verify"};
  std::size_t sequences = 0, violations = 0;
  std::array<std::size_t, 7> terminal_visits{};
  for (int mode = 0; mode < 3; ++mode) {
    fixtures::TempDir dir;
    store::ArtifactStore st(dir / "artifacts");
    gateway::WorkflowRegistry reg(dir / "workflows");
    reg.load(zkmlops::to_string(read_file(fixtures::shipped_config())));
    FakeInterpreter fake;
    fake.accept = mode != 1;
    if (mode == 2) fake.fail_on = "key-exchange";
    orch::Orchestrator o(dir / "audits", st, reg, fake);
    std::vector<std::size_t> seq;
    std::function<void(std::size_t)> walk = [&](std::size_t len) {
      if (seq.size() < len) {
        for (std::size_t i = 0; i < names.size(); ++i) {
          seq.push_back(i);
          walk(len);
          seq.pop_back();
        }
        return;
      }
      ++sequences;
      auto a = o.create_audit("fnn-inference-v1");
      for (auto [k, v] : {std::pair{"model", "m"}, {"setup-parameters", "p"}, {"model-input", "x"}})
        o.attach_artifact(a.id, k, st.put(to_bytes(v), k).id);
      std::vector<std::string> succeeded;
      for (auto i : seq) {
        auto before = o.get_audit(a.id).state;
        try {
          o.advance(a.id, names[i]);
          succeeded.push_back(names[i]);
        } catch (const Error&) {
        }
        auto after = o.get_audit(a.id).state;
        if (orch::is_terminal(before)) {
          ++terminal_visits[static_cast<int>(before)];
          if (after != before) ++violations;
        }
        if (after == orch::AuditState::ProofSubmitted &&
            succeeded != std::vector<std::string>{"setup", "key-exchange", "prove"})
          ++violations;
      }
      // Every successful step sequence is a prefix of the canonical order.
      for (std::size_t k = 0; k < succeeded.size(); ++k)
        if (succeeded[k] != names[k]) ++violations;
    };
    for (std::size_t len = 1; len <= 6; ++len) walk(len);
  }
  bool every_terminal = terminal_visits[4] && terminal_visits[5] && terminal_visits[6];
  return {violations == 0 && every_terminal,
          std::to_string(sequences) + " sequences, " + std::to_string(violations) + " violations, terminal revisits " +
              std::to_string(terminal_visits[4] + terminal_visits[5] + terminal_visits[6])};
}

std::string run_cli(const std::string& args, int& status) {
  std::string cmd = std::string("'") + ZKMLOPS_CLI + "' " + args + " 2>&1";
  FILE* p = popen(cmd.c_str(), "r");
  if (!p) throw std::runtime_error("cannot start the CLI");
  std::string out;
  std::array<char, 4096> buf;
  while (std::size_t n = std::fread(buf.data(), 1, buf.size(), p)) out.append(buf.data(), n);
  status = pclose(p);
  return out;
}

Outcome criterion7() {
  int st1 = 0, st2 = 0;
  auto text = run_cli("bench run --reps 10 --models 16-8-2,64-32-10 --format text", st1);
  auto js = run_cli("bench run --reps 10 --models 16-8-2,64-32-10 --format json", st2);
  if (st1 != 0 || st2 != 0) return {false, "bench exited with an error: " + text.substr(0, 200)};
  bool headers = true;
  for (const char* h : {"Mean", "Max", "Min", "Std", "proving_ms", "verification_ms", "proof_bytes"})
    headers = headers && text.find(h) != std::string::npos;
  auto doc = json::parse(js);
  std::map<std::pair<std::string, std::string>, json> by;
  for (const auto& r : doc) by[{r["model"], r["metric"]}] = r;
  bool samples = true;
  for (const auto& [_, r] : by) samples = samples && r["samples"].size() == 10;
  double std_small = by[{"16-8-2", "proof_bytes"}]["std"];
  double std_big = by[{"64-32-10", "proof_bytes"}]["std"];
  double p_small = by[{"16-8-2", "proving_ms"}]["mean"];
  double p_big = by[{"64-32-10", "proving_ms"}]["mean"];
  bool pass = headers && samples && by.size() == 6 && std_small == 0 && std_big == 0 && p_big > p_small;
  return {pass, std::string("columns ") + (headers ? "present" : "missing") + ", proof_bytes std " + fmt(std_small, 1) +
                    "/" + fmt(std_big, 1) + ", proving mean " + fmt(p_small, 2) + " ms -> " + fmt(p_big, 2) + " ms"};
}

Outcome criterion8() {
  using namespace selection;
  auto kb = KnowledgeBase::load(fixtures::knowledge_base());
  auto ranking = kb.recommend(LifecyclePhase::Inference, ModelCategory::GeneralNeuralNetworks);
  bool head = ranking.front().name == "ezkl" && ranking.front().properties.count() == 5;
  fixtures::TempDir dir;
  SpecStore specs(dir / "adr");
  auto spec = build_spec(kb, "Inference audit of a credit model", LifecyclePhase::Inference,
                         ModelCategory::GeneralNeuralNetworks, "ezkl", "acceptance", wall_clock_micros());
  auto md = specs.render(specs.store(spec));
  auto h1 = md.find("## Purpose of the Audit"), h2 = md.find("## Decision Trace"),
       h3 = md.find("## Selected Protocol");
  bool headings = h1 != std::string::npos && h2 != std::string::npos && h3 != std::string::npos && h1 < h2 &&
                  h2 < h3;
  int s1 = 0, s2 = 0;
  auto out1 = run_cli("recommend --phase Inference --category GeneralNeuralNetworks", s1);
  auto out2 = run_cli("recommend --phase Inference --category GeneralNeuralNetworks", s2);
  auto kb2 = KnowledgeBase::load(fixtures::knowledge_base());
  bool deterministic = s1 == 0 && s2 == 0 && out1 == out2 &&
                       render_ranking(ranking) ==
                           render_ranking(kb2.recommend(LifecyclePhase::Inference,
                                                        ModelCategory::GeneralNeuralNetworks));
  return {head && headings && deterministic,
          "head " + ranking.front().name + " " + std::to_string(ranking.front().properties.count()) +
              "/5, headings " + (headings ? "present" : "missing") + ", rankings " +
              (deterministic ? "byte-identical" : "differ")};
}

Outcome criterion9() {
  auto table = zk::relu_table(-512, 511);
  std::mt19937_64 rng(9);
  std::uniform_int_distribution<std::int64_t> v(-512, 511);
  const int trials = 1000;
  const std::size_t n = 200;
  int bad_accepted = 0, good_accepted = 0;
  for (int i = 0; i < trials; ++i) {
    std::vector<zk::LookupPair> pairs;
    for (std::size_t k = 0; k < n; ++k) {
      auto x = v(rng);
      pairs.push_back({zk::Fp::from_signed(x), zk::Fp::from_signed(std::max<std::int64_t>(0, x))});
    }
    good_accepted += zk::verify_lookup(zk::prove_lookup(pairs, table, 32, fixtures::seed_digest(2 * i)), table);
    // Corrupt exactly 10% of the pairs.
    std::vector<std::size_t> idx(n);
    std::iota(idx.begin(), idx.end(), 0);
    std::shuffle(idx.begin(), idx.end(), rng);
    for (std::size_t k = 0; k < n / 10; ++k) pairs[idx[k]].second = pairs[idx[k]].second + zk::Fp(1);
    bad_accepted += zk::verify_lookup(zk::prove_lookup(pairs, table, 32, fixtures::seed_digest(2 * i + 1)), table);
  }
  double bad_rate = static_cast<double>(bad_accepted) / trials;
  return {bad_rate <= 0.05 && good_accepted == trials,
          "10% bad: " + fmt(bad_rate) + " accepted (0.9^32=" + fmt(std::pow(0.9, 32)) + "), clean: " +
              std::to_string(good_accepted) + "/" + std::to_string(trials)};
}

Outcome criterion10() {
  Harness h;
  h.registry.load(zkmlops::to_string(read_file(fixtures::shipped_config())));
  h.registry.load(zkmlops::to_string(read_file(fixtures::mock_workflow())));
  auto model = scenario_model();
  auto x = scenario_input();
  auto ref_ok = run_scenario(h.orch, h.store, "fnn-inference-v1", model, x, 8, false);
  auto ref_bad = run_scenario(h.orch, h.store, "fnn-inference-v1", model, x, 8, true);
  auto mock_ok = run_scenario(h.orch, h.store, "fnn-inference-mock", model, x, 8, false);
  auto mock_bad = run_scenario(h.orch, h.store, "fnn-inference-mock", model, x, 8, true);
  bool same = ref_ok.state == mock_ok.state && ref_bad.state == mock_bad.state;
  bool pass = same && mock_ok.state == orch::AuditState::VerifiedCompliant &&
              mock_bad.state == orch::AuditState::VerifiedNonCompliant &&
              mock_bad.verify_record.executor_kind == gateway::ExecutorKind::ExternalScript &&
              mock_bad.verify_record.verdict == false;
  return {pass, "mock honest=" + std::string(orch::to_string(mock_ok.state)) + ", mock tampered (exit 10)=" +
                    std::string(orch::to_string(mock_bad.state)) + ", reference " +
                    (same ? "agrees" : "disagrees")};
}

}  // namespace

int main() {
  const std::array<std::function<Outcome()>, 10> criteria{criterion1, criterion2, criterion3, criterion4,
                                                           criterion5, criterion6, criterion7, criterion8,
                                                           criterion9, criterion10};
  int failed = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    Outcome o;
    try {
      o = criteria[i]();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    failed += !o.pass;
    std::cout << "criterion " << i + 1 << ": " << (o.pass ? "PASS" : "FAIL") << " (" << o.detail << ")" << std::endl;
  }
  std::cout << (10 - failed) << "/10 criteria passed" << std::endl;
  return failed ? 1 : 0;
}
