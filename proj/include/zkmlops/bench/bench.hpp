#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace zkmlops::bench {

struct Stats {
  double mean = 0;
  double max = 0;
  double min = 0;
  double std = 0;  // population
};

// Throws EmptySamples.
Stats stats(std::span<const double> samples);

inline constexpr std::string_view kMetrics[] = {"proving_ms", "verification_ms", "proof_bytes"};

struct BenchResult {
  std::string backend;
  std::string model;  // "16-8-2"
  std::string metric;
  std::vector<double> samples;
  double mean = 0;
  double max = 0;
  double min = 0;
  double std = 0;

  friend bool operator==(const BenchResult&, const BenchResult&) = default;
};

struct BenchConfig {
  // "reference", or "external" together with `workflow`.
  std::string backend = "reference";
  std::vector<std::string> models;
  std::uint32_t reps = 10;
  std::uint32_t repetitions = 8;  // proof repetitions t
  std::uint64_t seed = 1;
  bool bind_weights = false;
  // Workflow config whose steps run through the script executor.
  std::optional<std::filesystem::path> workflow;
};

// For each model, runs `reps` independently seeded setup + prove + verify
// cycles and times only the prove and verify calls. Three results per
// model, in kMetrics order. Throws BackendUnavailable or ModelUnsupported.
std::vector<BenchResult> run_bench(const BenchConfig& config);

enum class Format { Text, Csv, Json };
Format parse_format(std::string_view name);  // InvalidArgument

std::string render_table(const std::vector<BenchResult>& results, Format format);
// Inverse of the JSON rendering.
std::vector<BenchResult> parse_results_json(std::string_view text);

}  // namespace zkmlops::bench
