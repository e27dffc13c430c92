// zkmlops command line: service, benchmark harness and zk file tools.

#include <csignal>
#include <cstdio>
#include <iostream>
#include <random>

#include "CLI11.hpp"
#include "zkmlops/api/http_server.hpp"
#include "zkmlops/api/router.hpp"
#include "zkmlops/api/service.hpp"
#include "zkmlops/bench/bench.hpp"
#include "zkmlops/common/error.hpp"
#include "zkmlops/zk/reference_backend.hpp"

namespace fs = std::filesystem;
using namespace zkmlops;

namespace {

constexpr int kRejected = 10;

api::HttpServer* g_server = nullptr;

void on_signal(int) {
  if (g_server) g_server->stop();
}

void write_out(const std::string& path, ByteSpan data) {
  if (path.empty() || path == "-") {
    std::fwrite(data.data(), 1, data.size(), stdout);
    std::fflush(stdout);
  } else {
    write_file_atomic(path, data);
  }
}

std::string read_text(const std::string& path) { return to_string(read_file(path)); }

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"zkmlops: zero-knowledge audit orchestration"};
  app.require_subcommand(1);

  // serve
  auto* serve = app.add_subcommand("serve", "Run the REST service");
  std::string listen = "127.0.0.1:8080";
  std::string data_dir = "./zkmlops-data";
  std::string configs_dir = ZKMLOPS_DEFAULT_CONFIGS;
  std::string kb_path = ZKMLOPS_DEFAULT_KB;
  std::string scratch;
  unsigned max_parallel = 4;
  serve->add_option("--listen", listen, "host:port");
  serve->add_option("--data-dir", data_dir, "Persistent state directory");
  serve->add_option("--configs", configs_dir, "Workflow documents loaded at start");
  serve->add_option("--knowledge-base", kb_path, "Protocol knowledge base JSON");
  serve->add_option("--scratch", scratch, "Scratch root for external steps (default $ZKMLOPS_SCRATCH)");
  serve->add_option("--max-parallel", max_parallel, "Concurrent external step processes");

  // bench run
  auto* bench = app.add_subcommand("bench", "Benchmark harness");
  bench->require_subcommand(1);
  auto* bench_run = bench->add_subcommand("run", "Run repeated prove/verify cycles");
  bench::BenchConfig bcfg;
  std::string models = "16-8-2";
  std::string format = "text";
  std::string out_path;
  std::string workflow;
  bench_run->add_option("--backend", bcfg.backend, "reference | external");
  bench_run->add_option("--models", models, "Comma separated d0-d1-...-dL specs");
  bench_run->add_option("--reps", bcfg.reps, "Independent runs per model");
  bench_run->add_option("--t", bcfg.repetitions, "Proof repetitions");
  bench_run->add_option("--seed", bcfg.seed, "Base seed");
  bench_run->add_option("--format", format, "text | csv | json");
  bench_run->add_option("--out", out_path, "Output file (default stdout)");
  bench_run->add_option("--workflow", workflow, "Workflow config for --backend external");
  bench_run->add_flag("--bind", bcfg.bind_weights, "Bind the weight commitment in the circuit");

  // zk tools
  auto* zk_cmd = app.add_subcommand("zk", "Reference backend file tools");
  zk_cmd->require_subcommand(1);

  auto* zsetup = zk_cmd->add_subcommand("setup", "Derive proving and verification keys");
  std::string model_path, params_path, pk_path, vk_path;
  std::uint32_t t = zk::kDefaultRepetitions;
  bool no_bind = false;
  zsetup->add_option("--model", model_path)->required();
  zsetup->add_option("--params", params_path, "Setup parameters JSON (overrides --t/--no-bind)");
  zsetup->add_option("--t", t, "Proof repetitions");
  zsetup->add_flag("--no-bind", no_bind, "Do not bind the weight commitment");
  zsetup->add_option("--proving-key", pk_path)->required();
  zsetup->add_option("--verification-key", vk_path)->required();

  auto* zprove = zk_cmd->add_subcommand("prove", "Run the model and prove the output");
  std::string input_path, proof_path, output_path;
  zprove->add_option("--model", model_path)->required();
  zprove->add_option("--proving-key", pk_path)->required();
  zprove->add_option("--input", input_path)->required();
  zprove->add_option("--proof", proof_path)->required();
  zprove->add_option("--output", output_path)->required();

  auto* zverify = zk_cmd->add_subcommand("verify", "Verify a proof; exit 0 accepted, 10 rejected");
  std::string report_path;
  zverify->add_option("--verification-key", vk_path)->required();
  zverify->add_option("--input", input_path)->required();
  zverify->add_option("--output", output_path)->required();
  zverify->add_option("--proof", proof_path)->required();
  zverify->add_option("--report", report_path, "Write a JSON report here");

  auto* zmodel = zk_cmd->add_subcommand("random-model", "Write a random quantized FNN");
  std::string dims_spec = "16-8-2";
  std::uint64_t seed = 1;
  std::string out_file;
  zmodel->add_option("--dims", dims_spec);
  zmodel->add_option("--seed", seed);
  zmodel->add_option("--out", out_file);

  auto* zinput = zk_cmd->add_subcommand("random-input", "Write a random 8-bit input vector");
  std::uint32_t size = 16;
  zinput->add_option("--size", size);
  zinput->add_option("--seed", seed);
  zinput->add_option("--out", out_file);

  auto* rec = app.add_subcommand("recommend", "Rank candidate protocols");
  std::string phase, category;
  rec->add_option("--phase", phase)->required();
  rec->add_option("--category", category)->required();
  rec->add_option("--knowledge-base", kb_path);

  CLI11_PARSE(app, argc, argv);

  try {
    if (*serve) {
      api::ServiceOptions opts;
      opts.data_dir = data_dir;
      if (!configs_dir.empty() && fs::exists(configs_dir)) opts.configs_dir = fs::path(configs_dir);
      opts.knowledge_base = kb_path;
      opts.scripts.scratch_root = scratch;
      opts.scripts.max_parallel = max_parallel;
      api::Service service(opts);
      api::Router router(service);
      api::HttpServer server(router);
      auto [host, port] = api::parse_listen(listen);
      int bound = server.bind(host, port);
      g_server = &server;
      std::signal(SIGINT, on_signal);
      std::signal(SIGTERM, on_signal);
      std::cout << "listening on " << host << ":" << bound << std::endl;
      server.listen();
      g_server = nullptr;
      return 0;
    }
    if (*bench_run) {
      for (auto& m : CLI::detail::split(models, ',')) bcfg.models.push_back(m);
      if (!workflow.empty()) bcfg.workflow = fs::path(workflow);
      auto fmt = bench::parse_format(format);
      auto results = bench::run_bench(bcfg);
      write_out(out_path, as_bytes(bench::render_table(results, fmt)));
      return 0;
    }
    if (*zsetup) {
      auto model = zk::QuantizedFnn::from_json(read_text(model_path));
      zk::SetupParameters params{t, !no_bind};
      if (!params_path.empty()) params = zk::SetupParameters::from_json(read_text(params_path));
      auto keys = zk::setup(model, params);
      write_file_atomic(pk_path, keys.proving_key);
      write_file_atomic(vk_path, keys.verification_key);
      return 0;
    }
    if (*zprove) {
      auto model = zk::QuantizedFnn::from_json(read_text(model_path));
      auto x = zk::read_vector_json(read_text(input_path), "input");
      auto proof = zk::prove_inference(model, read_file(pk_path), x);
      write_file_atomic(proof_path, proof.proof);
      write_file_atomic(output_path, as_bytes(zk::write_vector_json(proof.output, "output")));
      return 0;
    }
    if (*zverify) {
      zk::Verdict v;
      try {
        auto x = zk::read_vector_json(read_text(input_path), "input");
        auto y = zk::read_vector_json(read_text(output_path), "output");
        v = zk::verify_inference(read_file(vk_path), x, y, read_file(proof_path));
      } catch (const Error& e) {
        if (e.code() != Errc::InvalidArgument) throw;
        v = {false, e.what()};
      }
      std::string report = std::string("{\"version\":1,\"accepted\":") + (v.accepted ? "true" : "false") + "}";
      if (!report_path.empty()) write_file_atomic(report_path, as_bytes(report));
      std::cout << (v.accepted ? "accepted" : "rejected: " + v.detail) << std::endl;
      return v.accepted ? 0 : kRejected;
    }
    if (*zmodel) {
      std::mt19937_64 rng(seed);
      auto dims = zk::parse_dims(dims_spec);
      write_out(out_file, as_bytes(zk::QuantizedFnn::random(dims, rng).to_json()));
      return 0;
    }
    if (*zinput) {
      std::mt19937_64 rng(seed);
      std::uniform_int_distribution<std::int64_t> d(zk::kQuantMin, zk::kQuantMax);
      std::vector<std::int64_t> x(size);
      for (auto& v : x) v = d(rng);
      write_out(out_file, as_bytes(zk::write_vector_json(x, "input")));
      return 0;
    }
    if (*rec) {
      auto kb = selection::KnowledgeBase::load(kb_path);
      auto ranking = kb.recommend(selection::parse_phase(phase), selection::parse_category(category));
      for (const auto& p : ranking)
        std::cout << p.properties.count() << "/5  " << p.name
                  << (p.provenance == selection::Provenance::Published ? "  (published)" : "  (curated)") << "\n";
      return 0;
    }
  } catch (const Error& e) {
    std::cerr << "error: " << to_string(e.code()) << ": " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
