#pragma once

#include <random>
#include <vector>

#include "zkmlops/zk/fnn.hpp"
#include "zkmlops/zk/mpcith.hpp"

namespace fixtures {

using namespace zkmlops;
using namespace zkmlops::zk;

struct Instance {
  QuantizedFnn model;
  CompiledFnn compiled;
  std::vector<std::int64_t> input;
  FnnAssignment assignment;
  Statement statement;
  Witness witness;
};

inline std::vector<std::int64_t> random_input(std::uint32_t n, std::mt19937_64& rng) {
  std::uniform_int_distribution<std::int64_t> dist(kQuantMin, kQuantMax);
  std::vector<std::int64_t> x(n);
  for (auto& v : x) v = dist(rng);
  return x;
}

inline Instance make_instance(const std::vector<std::uint32_t>& dims, std::uint64_t seed, bool bind) {
  std::mt19937_64 rng(seed);
  Instance in;
  in.model = QuantizedFnn::random(dims, rng);
  in.compiled = compile_fnn(in.model, bind);
  in.input = random_input(dims.front(), rng);
  in.assignment = assign_fnn(in.model, in.compiled, in.input);
  in.statement.circuit_digest = in.compiled.circuit.digest();
  for (auto v : in.input) in.statement.inputs.push_back(Fp::from_signed(v));
  in.statement.outputs = in.assignment.outputs;
  in.statement.weight_commitment = in.assignment.weight_commitment;
  in.witness.values = in.assignment.witness;
  return in;
}

inline Digest seed_digest(std::uint64_t s) {
  Sha256 h;
  h.update("test-randomness").update_u64(s);
  return h.digest();
}

// Index of the last secret-by-secret multiplication gate. In a compiled FNN
// it is a final-layer product, so its output reaches y with coefficient 1.
inline std::uint32_t last_secret_mul(const Circuit& c) {
  auto mask = public_wire_mask(c);
  for (std::size_t i = c.gates.size(); i-- > 0;) {
    const Gate& g = c.gates[i];
    if (g.op == GateOp::Mul && !mask[g.a] && !mask[g.b]) return static_cast<std::uint32_t>(i);
  }
  throw std::runtime_error("circuit has no secret multiplication");
}

// Cheating prover: corrupts party 0's share at one multiplication gate by +1
// so that the proof claims y + 1 on one output coordinate.
struct CheatResult {
  bool accepted;
  bool statement_false;
};

inline CheatResult cheat_once(const Instance& in, std::uint32_t repetitions, std::uint64_t trial_seed) {
  detail::Tamper tamper{last_secret_mul(in.compiled.circuit), 0, Fp(1)};
  std::vector<Fp> claimed;
  Proof proof = detail::prove_unchecked(in.statement, in.witness, in.compiled.circuit, repetitions,
                                        seed_digest(trial_seed), tamper, &claimed);
  Statement forged = in.statement;
  forged.outputs = claimed;
  return {verify(forged, proof, in.compiled.circuit).accepted, claimed != in.statement.outputs};
}

}  // namespace fixtures
