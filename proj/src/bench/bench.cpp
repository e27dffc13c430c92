#include "zkmlops/bench/bench.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <map>
#include <random>
#include <sstream>

#include "json.hpp"
#include "zkmlops/common/error.hpp"
#include "zkmlops/gateway/executor.hpp"
#include "zkmlops/zk/fnn.hpp"
#include "zkmlops/zk/mpcith.hpp"
#include "zkmlops/zk/reference_backend.hpp"

namespace zkmlops::bench {

using nlohmann::json;
using Clock = std::chrono::steady_clock;

Stats stats(std::span<const double> samples) {
  if (samples.empty()) throw Error(Errc::EmptySamples, "no samples");
  Stats s;
  s.min = *std::min_element(samples.begin(), samples.end());
  s.max = *std::max_element(samples.begin(), samples.end());
  double sum = 0;
  for (double v : samples) sum += v;
  s.mean = sum / static_cast<double>(samples.size());
  double sq = 0;
  for (double v : samples) sq += (v - s.mean) * (v - s.mean);
  s.std = std::sqrt(sq / static_cast<double>(samples.size()));
  return s;
}

namespace {

double ms_since(Clock::time_point t0) {
  return std::chrono::duration<double, std::milli>(Clock::now() - t0).count();
}

struct Samples {
  std::vector<double> prove, verify, bytes;
};

std::vector<std::uint32_t> model_dims(const std::string& spec) {
  try {
    return zk::parse_dims(spec);
  } catch (const Error& e) {
    throw Error(Errc::ModelUnsupported, "model '" + spec + "': " + e.what());
  }
}

std::vector<std::int64_t> random_input(std::uint32_t n, std::mt19937_64& rng) {
  std::uniform_int_distribution<std::int64_t> d(zk::kQuantMin, zk::kQuantMax);
  std::vector<std::int64_t> x(n);
  for (auto& v : x) v = d(rng);
  return x;
}

Samples run_reference(const BenchConfig& cfg, const std::vector<std::uint32_t>& dims, std::uint64_t model_seed) {
  Samples s;
  for (std::uint32_t r = 0; r < cfg.reps; ++r) {
    std::mt19937_64 rng(model_seed * 1000003u + r);
    auto model = zk::QuantizedFnn::random(dims, rng);
    auto x = random_input(dims.front(), rng);
    zk::CompiledFnn compiled;
    try {
      compiled = zk::compile_fnn(model, cfg.bind_weights);
    } catch (const Error& e) {
      throw Error(Errc::ModelUnsupported, e.what());
    }
    auto assignment = zk::assign_fnn(model, compiled, x);
    zk::Statement st;
    st.circuit_digest = compiled.circuit.digest();
    for (auto v : x) st.inputs.push_back(zk::Fp::from_signed(v));
    st.outputs = assignment.outputs;
    st.weight_commitment = assignment.weight_commitment;
    zk::Witness w{assignment.witness};
    Sha256 h;
    h.update("zkmlops.bench").update_u64(model_seed).update_u32(r);
    const Digest randomness = h.digest();

    auto t0 = Clock::now();
    zk::Proof proof = zk::prove(st, w, compiled.circuit, cfg.repetitions, randomness);
    s.prove.push_back(ms_since(t0));
    Bytes bytes = proof.serialize();
    s.bytes.push_back(static_cast<double>(bytes.size()));

    t0 = Clock::now();
    zk::Verdict v = zk::verify(st, proof, compiled.circuit);
    s.verify.push_back(ms_since(t0));
    if (!v.accepted) throw Error(Errc::ExecutionFailure, "honest proof rejected: " + v.detail);
  }
  return s;
}

Samples run_external(const BenchConfig& cfg, const std::vector<std::uint32_t>& dims, std::uint64_t model_seed) {
  auto config = gateway::parse_workflow_config(zkmlops::to_string(read_file(*cfg.workflow)));
  gateway::BackendGateway gw;
  zk::SetupParameters params{cfg.repetitions, cfg.bind_weights};
  Samples s;
  for (std::uint32_t r = 0; r < cfg.reps; ++r) {
    std::mt19937_64 rng(model_seed * 1000003u + r);
    auto model = zk::QuantizedFnn::random(dims, rng);
    auto x = random_input(dims.front(), rng);
    gateway::ArtifactMap art;
    art["model"] = to_bytes(model.to_json());
    art["setup-parameters"] = to_bytes(params.to_json());
    art["model-input"] = to_bytes(zk::write_vector_json(x, "input"));
    auto run = [&](std::string_view step) {
      gateway::ArtifactMap in;
      for (const auto& k : config.step(step).inputs) {
        auto it = art.find(k);
        if (it == art.end()) throw Error(Errc::BackendUnavailable, "workflow needs unknown input '" + k + "'");
        in[k] = it->second;
      }
      auto t0 = Clock::now();
      auto out = gw.execute_step(config, step, in);
      double ms = ms_since(t0);
      for (auto& [k, v] : out.produced) art[k] = std::move(v);
      return std::make_pair(ms, out.verdict);
    };
    run("setup");
    run("key-exchange");
    s.prove.push_back(run("prove").first);
    auto it = art.find("proof");
    if (it == art.end()) throw Error(Errc::BackendUnavailable, "workflow produces no 'proof' artifact");
    s.bytes.push_back(static_cast<double>(it->second.size()));
    auto [ms, verdict] = run("verify");
    s.verify.push_back(ms);
    if (!verdict || !verdict->accepted) throw Error(Errc::ExecutionFailure, "honest proof rejected by external backend");
  }
  return s;
}

BenchResult make(const std::string& backend, const std::string& model, std::string_view metric,
                 std::vector<double> samples) {
  Stats st = stats(samples);
  return {backend, model, std::string(metric), std::move(samples), st.mean, st.max, st.min, st.std};
}

}  // namespace

std::vector<BenchResult> run_bench(const BenchConfig& cfg) {
  if (cfg.backend != "reference" && cfg.backend != "external")
    throw Error(Errc::BackendUnavailable, "unknown backend '" + cfg.backend + "'");
  if (cfg.backend == "external" && (!cfg.workflow || !std::filesystem::exists(*cfg.workflow)))
    throw Error(Errc::BackendUnavailable, "the external backend needs a workflow config file");
  if (cfg.reps == 0) throw Error(Errc::EmptySamples, "--reps must be positive");
  if (cfg.models.empty()) throw Error(Errc::InvalidArgument, "no models given");
  std::vector<BenchResult> out;
  for (std::size_t m = 0; m < cfg.models.size(); ++m) {
    auto dims = model_dims(cfg.models[m]);
    std::uint64_t model_seed = cfg.seed * 7919u + m;
    Samples s = cfg.backend == "reference" ? run_reference(cfg, dims, model_seed) : run_external(cfg, dims, model_seed);
    std::string label = zk::format_dims(dims);
    out.push_back(make(cfg.backend, label, kMetrics[0], std::move(s.prove)));
    out.push_back(make(cfg.backend, label, kMetrics[1], std::move(s.verify)));
    out.push_back(make(cfg.backend, label, kMetrics[2], std::move(s.bytes)));
  }
  return out;
}

Format parse_format(std::string_view name) {
  if (name == "text") return Format::Text;
  if (name == "csv") return Format::Csv;
  if (name == "json") return Format::Json;
  throw Error(Errc::InvalidArgument, "unknown format '" + std::string(name) + "'");
}

namespace {

std::string num(double v) {
  char buf[64];
  if (v == std::floor(v) && std::abs(v) < 1e15)
    std::snprintf(buf, sizeof buf, "%.0f", v);
  else
    std::snprintf(buf, sizeof buf, "%.2f", v);
  return buf;
}

std::string pad(std::string s, std::size_t w) {
  if (s.size() < w) s.append(w - s.size(), ' ');
  return s;
}

}  // namespace

std::string render_table(const std::vector<BenchResult>& results, Format format) {
  std::ostringstream os;
  if (format == Format::Json) {
    json arr = json::array();
    for (const auto& r : results) {
      arr.push_back({{"backend", r.backend},
                     {"model", r.model},
                     {"metric", r.metric},
                     {"samples", r.samples},
                     {"mean", r.mean},
                     {"max", r.max},
                     {"min", r.min},
                     {"std", r.std}});
    }
    return arr.dump(2) + "\n";
  }
  if (format == Format::Csv) {
    os << "model,metric,backend,Mean,Max,Min,Std\n";
    for (const auto& r : results)
      os << r.model << ',' << r.metric << ',' << r.backend << ',' << num(r.mean) << ',' << num(r.max) << ','
         << num(r.min) << ',' << num(r.std) << '\n';
    return os.str();
  }
  // Grouped per model, one row per (metric, backend).
  std::vector<std::string> order;
  for (const auto& r : results)
    if (std::find(order.begin(), order.end(), r.model) == order.end()) order.push_back(r.model);
  const std::size_t w0 = 17, w1 = 11, w = 13;
  for (const auto& model : order) {
    os << "Model " << model << "\n";
    os << pad("Metric", w0) << pad("Backend", w1) << pad("Mean", w) << pad("Max", w) << pad("Min", w) << "Std\n";
    for (const auto& r : results) {
      if (r.model != model) continue;
      os << pad(r.metric, w0) << pad(r.backend, w1) << pad(num(r.mean), w) << pad(num(r.max), w)
         << pad(num(r.min), w) << num(r.std) << "\n";
    }
    os << "\n";
  }
  return os.str();
}

std::vector<BenchResult> parse_results_json(std::string_view text) {
  std::vector<BenchResult> out;
  try {
    for (const auto& j : json::parse(text)) {
      BenchResult r;
      r.backend = j.at("backend").get<std::string>();
      r.model = j.at("model").get<std::string>();
      r.metric = j.at("metric").get<std::string>();
      r.samples = j.at("samples").get<std::vector<double>>();
      r.mean = j.at("mean").get<double>();
      r.max = j.at("max").get<double>();
      r.min = j.at("min").get<double>();
      r.std = j.at("std").get<double>();
      out.push_back(std::move(r));
    }
  } catch (const json::exception& e) {
    throw Error(Errc::InvalidArgument, std::string("malformed bench results: ") + e.what());
  }
  return out;
}

}  // namespace zkmlops::bench
