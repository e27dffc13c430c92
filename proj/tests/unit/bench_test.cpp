#include <cmath>
#include <numeric>
#include <sstream>

#include "doctest.h"
#include "paths.hpp"
#include "zkmlops/bench/bench.hpp"
#include "zkmlops/common/error.hpp"

using namespace zkmlops;
using namespace zkmlops::bench;

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

// Two-pass population std.
double oracle_std(const std::vector<double>& v) {
  double m = std::accumulate(v.begin(), v.end(), 0.0) / v.size();
  double acc = 0;
  for (double x : v) acc += (x - m) * (x - m);
  return std::sqrt(acc / v.size());
}

const std::vector<BenchResult>& small_run() {
  static const auto r = [] {
    BenchConfig c;
    c.models = {"16-8-2", "64-32-10"};
    c.reps = 10;
    return run_bench(c);
  }();
  return r;
}

}  // namespace

TEST_CASE("summary statistics") {
  std::vector<double> same{5, 5, 5};
  auto s = stats(same);
  CHECK(s.mean == 5);
  CHECK(s.std == 0);
  std::vector<double> v{1, 2, 3, 4};
  s = stats(v);
  CHECK(s.mean == doctest::Approx(2.5));
  CHECK(s.max == 4);
  CHECK(s.min == 1);
  CHECK(s.std == doctest::Approx(1.118033988750).epsilon(1e-12));
  CHECK(s.std == doctest::Approx(oracle_std(v)));
  CHECK(code_of([] { stats(std::vector<double>{}); }) == Errc::EmptySamples);
}

TEST_CASE("reference bench shape") {
  const auto& r = small_run();
  REQUIRE(r.size() == 6);
  for (std::size_t i = 0; i < r.size(); ++i) {
    CHECK(r[i].backend == "reference");
    CHECK(r[i].metric == kMetrics[i % 3]);
    CHECK(r[i].samples.size() == 10);
    CHECK(r[i].std == doctest::Approx(oracle_std(r[i].samples)));
    CHECK(r[i].min <= r[i].mean);
    CHECK(r[i].mean <= r[i].max);
    CHECK(r[i].min > 0);
  }
  CHECK(r[0].model == "16-8-2");
  CHECK(r[3].model == "64-32-10");
  CHECK(r[2].std == 0);
  CHECK(r[5].std == 0);
  CHECK(r[5].mean > r[2].mean);
  CHECK(r[3].mean > r[0].mean);
}

TEST_CASE("rendering") {
  const auto& r = small_run();
  auto text = render_table(r, Format::Text);
  for (const char* h : {"Metric", "Backend", "Mean", "Max", "Min", "Std", "proving_ms", "verification_ms",
                        "proof_bytes", "16-8-2", "64-32-10"})
    CHECK(text.find(h) != std::string::npos);
  auto csv = render_table(r, Format::Csv);
  std::istringstream in(csv);
  std::string line;
  std::getline(in, line);
  CHECK(line == "model,metric,backend,Mean,Max,Min,Std");
  int rows = 0;
  while (std::getline(in, line))
    if (!line.empty()) ++rows;
  CHECK(rows == 6);
  CHECK(parse_results_json(render_table(r, Format::Json)) == r);
  CHECK(parse_format("csv") == Format::Csv);
  CHECK(code_of([] { parse_format("xml"); }) == Errc::InvalidArgument);
}

TEST_CASE("bench configuration errors") {
  BenchConfig c;
  c.models = {"4-2"};
  c.reps = 1;
  c.backend = "gpu";
  CHECK(code_of([&] { run_bench(c); }) == Errc::BackendUnavailable);
  c.backend = "external";
  CHECK(code_of([&] { run_bench(c); }) == Errc::BackendUnavailable);
  c.backend = "reference";
  c.models = {"sixteen"};
  CHECK(code_of([&] { run_bench(c); }) == Errc::ModelUnsupported);
  c.models = {"64-64-64-2"};
  // Worst-case pre-activations exceed the ReLU gadget range.
  CHECK(code_of([&] { run_bench(c); }) == Errc::ModelUnsupported);
}

TEST_CASE("external backend through the mock scripts") {
  BenchConfig c;
  c.backend = "external";
  c.workflow = fixtures::mock_workflow();
  c.models = {"8-4-2"};
  c.reps = 2;
  auto r = run_bench(c);
  REQUIRE(r.size() == 3);
  CHECK(r[0].backend == "external");
  CHECK(r[2].std == 0);
  CHECK(r[2].mean > 0);
}
